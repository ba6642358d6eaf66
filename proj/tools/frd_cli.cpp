// Command-line driver: builds finite range decompositions, runs the
// verification and sampling suites, and writes machine-readable reports
// (CSV + JSON) plus human-readable summaries.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "frd/config.hpp"
#include "frd/io.hpp"
#include "frd/numeric.hpp"
#include "frd/renorm.hpp"
#include "frd/linalg.hpp"
#include "frd/rng.hpp"

namespace fs = std::filesystem;
using namespace frd;

namespace {

struct BuildSet {
  BaseBuilder builder;
  Decomposition dec;  // requested kind
  Decomposition base;
  double K = 0;
};

BuildSet build_requested(const RunConfig& cfg, int N) {
  const TorusGeometry g = cfg.geometry_for(N);
  const Generator A = cfg.main_generator();
  BaseBuilder builder(g, A, 0.0, cfg.workers);
  Decomposition base = builder.build();
  if (cfg.kind == "base") return {std::move(builder), base, base, 0.0};
  if (cfg.kind == "improved")
    return {std::move(builder), improved_decomposition(base, cfg.n), base, 0.0};
  // Final kind: reference Laplacian plus a K estimate over the ensemble.
  const Generator lap = laplacian_generator(A.mset, A.m, A.omega0, A.Omega0);
  BaseBuilder lap_builder(g, lap, 0.0, cfg.workers);
  const Decomposition lap_base = lap_builder.build();
  const Decomposition lap_nt = improved_decomposition(lap_base, cfg.ntilde);
  const Decomposition lap_n = improved_decomposition(lap_base, cfg.n);
  double K = 0;
  for (const Generator& G : cfg.make_ensemble()) {
    BaseBuilder gb(g, G, 0.0, cfg.workers);
    const Decomposition g_nt = improved_decomposition(gb.build(), cfg.ntilde);
    K = std::max(K, estimate_K(g_nt, lap_nt, cfg.ntilde));
  }
  const Decomposition a_nt = improved_decomposition(base, cfg.ntilde);
  Decomposition fin = final_decomposition(a_nt, lap_nt, lap_n, K);
  return {std::move(builder), std::move(fin), base, K};
}

int cmd_decompose(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  BuildSet bs = build_requested(cfg, cfg.N);
  save_decomposition(bs.dec, cfg.out_dir + "/decomposition.json");
  save_decomposition_scales(bs.dec, cfg.out_dir);
  save_generator(bs.builder.generator(), cfg.out_dir + "/generator.json");

  BoundsReport summary;
  const SpectralKernel green = bs.builder.green();
  summary.add({"summary", "sum_identity_defect", -1, -1, bs.dec.sum_identity_defect(green),
               1e-10, 0, bs.dec.sum_identity_defect(green) <= 1e-10 * cfg.tol_scale});
  for (int k = 1; k <= cfg.N; ++k) {
    const double fr = bs.dec.finite_range_defect(k);
    summary.add({"summary", "finite_range_defect", k, -1, fr, 1e-9, 0,
                 fr <= 1e-9 * cfg.tol_scale});
    const double tail_psd = lambda_max(bs.dec.tail[k - 1].cast<Complex>());
    summary.add({"summary", "tail_max_eigenvalue", k, -1, tail_psd, 0, 0,
                 tail_psd <= 1e-10 * cfg.tol_scale * bs.dec.tail[k - 1].norm() + 1e-300});
    summary.add({"summary", "min_mode_eigenvalue_rel", k, -1,
                 bs.dec.min_mode_eigenvalue_rel(k), -1e-10, 0,
                 bs.dec.min_mode_eigenvalue_rel(k) >= -1e-10 * cfg.tol_scale});
  }
  save_report(summary, cfg.out_dir + "/summary.csv", cfg.out_dir + "/summary.json");
  if (!summary.all_pass()) {
    for (const auto& r : summary.rows)
      if (!r.pass)
        std::cerr << "FAIL " << r.quantity << " k=" << r.k << " measured=" << r.measured
                  << "\n";
    return 1;
  }
  std::cout << "decomposition written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  BuildSet bs = build_requested(cfg, cfg.N);
  std::vector<Generator> dirs = {random_direction(bs.builder.generator().mset, cfg.m, 7),
                                 random_direction(bs.builder.generator().mset, cfg.m, 8)};
  BoundsReport rep;
  if (cfg.kind == "final") {
    const Generator lap =
        laplacian_generator(bs.builder.generator().mset, cfg.m, cfg.omega0, cfg.Omega0);
    BaseBuilder lap_builder(cfg.geometry(), lap, 0.0, cfg.workers);
    rep = verify_final_bounds(bs.dec, bs.builder, bs.base, lap_builder.build(), dirs);
  } else {
    rep = verify_akm_bounds(bs.builder, cfg.kind == "base" ? bs.dec : bs.base, dirs, 1);
  }
  save_report(rep, cfg.out_dir + "/verify.csv", cfg.out_dir + "/verify.json");
  std::cout << (rep.all_pass() ? "verify: all suites passed\n" : "verify: failures\n");
  return rep.all_pass() ? 0 : 1;
}

int cmd_sample(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  BuildSet bs = build_requested(cfg, cfg.N);
  const int k = cfg.scale;
  const SampleBatch batch =
      sample(bs.dec.spectral[k - 1], cfg.seed, cfg.sample_count, std::nullopt, cfg.workers);
  write_text_file(cfg.out_dir + "/batch.txt", batch_to_text(batch));

  // Covariance residuals at a few random site pairs plus the range check.
  BoundsReport rep;
  const TorusGeometry g = cfg.geometry();
  const std::int64_t origin = g.site_index(std::vector<int>(g.d, 0));
  const CounterRng rng(cfg.seed + 5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = static_cast<std::int64_t>(rng.uniform(trial, 0) * g.volume) % g.volume;
    const auto y = static_cast<std::int64_t>(rng.uniform(trial, 1) * g.volume) % g.volume;
    const int r = static_cast<int>(rng.uniform(trial, 2) * g.m) % g.m;
    const int s = static_cast<int>(rng.uniform(trial, 3) * g.m) % g.m;
    const double emp = empirical_covariance(batch, x, r, y, s);
    std::vector<int> diff(g.d);
    const auto xc = g.site_coords(x), yc = g.site_coords(y);
    for (int i = 0; i < g.d; ++i) diff[i] = xc[i] - yc[i];
    const double exact = bs.dec.position[k - 1].values[g.site_index(diff)](r, s);
    const double se =
        std::sqrt((bs.dec.position[k - 1].values[origin](r, r) *
                       bs.dec.position[k - 1].values[origin](s, s) +
                   exact * exact) /
                  cfg.sample_count);
    rep.add({"sample_covariance", "pair" + std::to_string(trial), k, -1, emp, exact,
             se > 0 ? (emp - exact) / se : 0.0, std::abs(emp - exact) <= 5 * se});
  }
  const RangeCheckReport rc = gradient_range_check(batch, k);
  rep.add({"sample_range", "violations", k, -1, static_cast<double>(rc.violations),
           0, 0, rc.violations == 0});
  save_report(rep, cfg.out_dir + "/sample.csv", cfg.out_dir + "/sample.json");
  return rep.all_pass() ? 0 : 1;
}

int cmd_renorm(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  RunConfig fcfg = cfg;
  fcfg.kind = "final";
  BuildSet bs = build_requested(fcfg, cfg.N);
  const TorusGeometry g = cfg.geometry();
  BoundsReport rep;

  // Localization at the configured scale with a bounded block functional.
  const int k = std::min(cfg.scale, cfg.N);
  {
    std::vector<std::int64_t> block;
    std::vector<int> c(g.d, 0);
    const int side = std::min<std::int64_t>(3, g.side);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) {
        c[0] = i;
        c[1] = j;
        block.push_back(g.site_index(c));
      }
    LocalFunctional F{block, [](const Eigen::VectorXd& v) {
                        return std::exp(-v.squaredNorm());
                      }};
    const LocalizationReport loc =
        localization_check(bs.dec, k, F, cfg.sample_count, cfg.seed, cfg.workers);
    rep.add({"renorm_localization", "bounded_F", k, loc.Nbar,
             loc.fine_mean - loc.coarse_mean, 3 * loc.combined_se, 0, loc.pass});
  }

  // Derivative-of-expectation suite on the coarse measure: the weight-formula
  // value must reproduce the closed form for quadratic functionals.
  {
    const Generator dir = random_direction(bs.builder.generator().mset, cfg.m, 7);
    const MixCoefficients mix = mix_coefficients(cfg.L, cfg.N, cfg.d, cfg.ntilde);
    const auto d1 = final_derivative(mix, bs.builder.build_derivative(dir, 1));
    const auto d2 = final_derivative(mix, bs.builder.build_derivative(dir, 2));
    const int Nbar = std::min(k + 1, cfg.N);
    const CoarseKernel ck = coarse_kernel(bs.dec, k, Nbar);
    const Eigen::MatrixXd M = dense_covariance(ck);
    const Eigen::MatrixXd Md =
        dense_covariance(coarse_kernel_of_derivative(d1[k - 1], k, Nbar));
    const Eigen::MatrixXd Mdd =
        dense_covariance(coarse_kernel_of_derivative(d2[k - 1], k, Nbar));
    const CounterRng hrng(cfg.seed + 3);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    const int span = std::min<int>(8, static_cast<int>(M.rows()));
    for (int i = 0; i < span; ++i)
      for (int j = 0; j < span; ++j) H(i, j) = hrng.gaussian(i, j);
    H = (0.5 * (H + H.transpose())).eval();
    const QuadraticFunctional Fq{H, 0.0};
    const DerivReport r1 = gauss_expectation_deriv(M, Md, std::nullopt, Fq, 1);
    const DerivReport r2 = gauss_expectation_deriv(M, Md, Mdd, Fq, 2);
    const double rel1 =
        std::abs(r1.weight_value - r1.closed_form) / std::max(std::abs(r1.closed_form), 1e-300);
    const double rel2 =
        std::abs(r2.weight_value - r2.closed_form) / std::max(std::abs(r2.closed_form), 1e-300);
    rep.add({"renorm_derivative", "ell1_rel", k, Nbar, rel1, 1e-8, 0, rel1 <= 1e-8});
    rep.add({"renorm_derivative", "ell2_rel", k, Nbar, rel2, 1e-6, 0, rel2 <= 1e-6});
    rep.add({"renorm_derivative", "hs_dot", k, Nbar, r1.hs_dot, 0, 0, std::isfinite(r1.hs_dot)});

    // Hilbert-Schmidt quotient sum at the top scale along the same direction.
    const double hs = hs_quotient_sum(bs.dec.spectral[cfg.N], d1[cfg.N], cfg.N);
    rep.add({"renorm_hs_sum", "k_top", cfg.N + 1, -1, hs, 0, 0, std::isfinite(hs)});
  }
  save_report(rep, cfg.out_dir + "/renorm.csv", cfg.out_dir + "/renorm.json");
  return rep.all_pass() ? 0 : 1;
}

int cmd_sweep(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  BoundsReport rep;
  std::vector<double> hs_values, c_values;
  for (int N : cfg.sweep_N) {
    RunConfig sub = cfg;
    sub.N = N;
    sub.kind = "final";
    BuildSet bs = build_requested(sub, N);
    const Generator dir = random_direction(bs.builder.generator().mset, cfg.m, 7);
    const MixCoefficients mix = mix_coefficients(cfg.L, N, cfg.d, cfg.ntilde);
    const auto deriv = final_derivative(mix, bs.builder.build_derivative(dir, 1));
    const double hs = hs_quotient_sum(bs.dec.spectral[N], deriv[N], N);
    const double c = final_lower_envelope_c(bs.dec);
    hs_values.push_back(hs);
    c_values.push_back(c);
    rep.add({"sweep_uniformity", "hs_sum", N, -1, hs, 0, 0, true});
    rep.add({"sweep_uniformity", "lower_c", N, -1, c, 0, 0, c > 0});
  }
  const double hs_spread = *std::max_element(hs_values.begin(), hs_values.end()) /
                           *std::min_element(hs_values.begin(), hs_values.end());
  rep.add({"sweep_uniformity", "hs_spread", -1, -1, hs_spread, 1.5, hs_spread / 1.5,
           hs_spread <= 1.5});
  const double c_spread = *std::max_element(c_values.begin(), c_values.end()) /
                          *std::min_element(c_values.begin(), c_values.end());
  rep.add({"sweep_uniformity", "c_spread", -1, -1, c_spread, 1.25, c_spread / 1.25,
           c_spread <= 1.25});

  // Support-diameter sweep of the integration map at the largest torus that
  // accommodates the coarse route.
  const int Nbig = *std::max_element(cfg.sweep_N.begin(), cfg.sweep_N.end());
  if (Nbig >= 3 && cfg.m == 1) {
    RunConfig sub = cfg;
    sub.N = Nbig;
    sub.kind = "final";
    BuildSet bs = build_requested(sub, Nbig);
    const Generator dir = random_direction(bs.builder.generator().mset, cfg.m, 7);
    const SmoothnessReport srep =
        smoothness_suite(bs.dec, bs.builder, dir, 1, {cfg.L, 3 * cfg.L, cfg.L * cfg.L});
    for (const auto& row : srep.rows)
      rep.add({"sweep_smoothness", "ratio_ell" + std::to_string(row.ell), row.D, row.Nbar,
               row.ratio, 0, 0, true});
    const double t1 = 0.5 * cfg.d, t2 = 1.0 * cfg.d;
    rep.add({"sweep_smoothness", "exponent_ell1", -1, -1, srep.slope_ell1, t1,
             srep.slope_ell1 - t1, std::abs(srep.slope_ell1 - t1) <= 0.25 * t1});
    rep.add({"sweep_smoothness", "exponent_ell2", -1, -1, srep.slope_ell2, t2,
             srep.slope_ell2 - t2, std::abs(srep.slope_ell2 - t2) <= 0.25 * t2});
  }
  save_report(rep, cfg.out_dir + "/sweep.csv", cfg.out_dir + "/sweep.json");
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite range decompositions of lattice Green's functions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  double tol_scale = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--workers", workers, "worker thread count override");
    sub->add_option("--tol-scale", tol_scale, "tolerance scale override");
  };

  CLI::App* c_dec = app.add_subcommand("decompose", "build and export a decomposition");
  CLI::App* c_ver = app.add_subcommand("verify", "run the envelope verification suites");
  CLI::App* c_sam = app.add_subcommand("sample", "draw Gaussian samples and check covariance");
  CLI::App* c_ren = app.add_subcommand("renorm", "localization and smoothness suites");
  CLI::App* c_swe = app.add_subcommand("sweep", "uniform-in-N sweeps");
  for (CLI::App* sub : {c_dec, c_ver, c_sam, c_ren, c_swe}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = RunConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.seed = seed;
    if (workers > 0) cfg.workers = workers;
    if (tol_scale > 0) cfg.tol_scale = tol_scale;
    if (c_dec->parsed()) return cmd_decompose(cfg);
    if (c_ver->parsed()) return cmd_verify(cfg);
    if (c_sam->parsed()) return cmd_sample(cfg);
    if (c_ren->parsed()) return cmd_renorm(cfg);
    if (c_swe->parsed()) return cmd_sweep(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
