#include "frd/renorm.hpp"

#include <cmath>
#include <stdexcept>

#include "frd/linalg.hpp"
#include "frd/numeric.hpp"
#include "frd/rng.hpp"

namespace frd {

namespace {

/// Shared construction: subsampled-Fourier route with an optional constant term.
CoarseKernel build_coarse(const TorusGeometry& fine, const SpectralKernel& spec, int k,
                          int Nbar, const Eigen::MatrixXd& constant_term,
                          double lambda_tail, const Eigen::MatrixXd& parentM) {
  CoarseKernel ck;
  ck.coarse = coarse_geometry(fine, Nbar);
  ck.parent_scale = k;
  ck.lambda_tail = lambda_tail;
  ck.parentM = parentM;
  ck.spectral = SpectralKernel(ck.coarse);
  const std::int64_t stride = fine.side / ck.coarse.side;  // L^(N - Nbar)
  const std::int64_t czero = ck.spectral.zero_mode();
  for (std::int64_t pc = 0; pc < ck.coarse.volume; ++pc) {
    if (pc == czero) continue;
    // T_Nbar dual point a maps to the fine dual point a * L^(N - Nbar).
    const std::vector<int> a = ck.coarse.site_coords(pc);
    std::vector<int> af(fine.d);
    for (int i = 0; i < fine.d; ++i) af[i] = static_cast<int>(a[i] * stride);
    ck.spectral.values[pc] = spec.values[fine.site_index(af)];
  }
  MatrixKernel pos = idft_real(ck.spectral);
  for (std::int64_t x = 0; x < ck.coarse.volume; ++x) pos.values[x] += constant_term;
  ck.kernel = std::move(pos);
  ck.zero_mode_cov =
      constant_term * static_cast<double>(ck.coarse.volume);
  return ck;
}

}  // namespace

CoarseKernel coarse_kernel(const Decomposition& dec, int k, int Nbar) {
  const TorusGeometry& g = dec.geom;
  if (!(k <= Nbar && Nbar <= g.N))
    throw std::invalid_argument("coarse_kernel: need k <= Nbar <= N");
  const double lambda_tail =
      std::pow(static_cast<double>(g.side / coarse_geometry(g, Nbar).side), g.d) - 1.0;
  const Eigen::MatrixXd M = -dec.tail[k - 1];  // PSD by the tail convention
  CoarseKernel ck = build_coarse(g, dec.spectral[k - 1], k, Nbar, lambda_tail * M,
                                 lambda_tail, M);

  // Independent fiber-sum route: D(xbar) = sum_{pi(y) = xbar} C_k(y) + lambda M.
  const TorusGeometry& cg = ck.coarse;
  double worst = 0;
  const double scale = std::max(ck.kernel.max_norm(), 1e-300);
  std::vector<Eigen::MatrixXd> fiber(cg.volume, Eigen::MatrixXd::Zero(g.m, g.m));
  for (std::int64_t y = 0; y < g.volume; ++y)
    fiber[coarse_project(g, cg, y)] += dec.position[k - 1].values[y];
  for (std::int64_t x = 0; x < cg.volume; ++x) {
    const Eigen::MatrixXd route_b = fiber[x] + lambda_tail * M;
    worst = std::max(worst, (route_b - ck.kernel.values[x]).norm() / scale);
  }
  ck.route_defect = worst;
  if (worst > 1e-9)
    throw std::runtime_error("coarse_kernel: construction routes disagree");
  return ck;
}

CoarseKernel coarse_kernel_of_derivative(const SpectralKernel& deriv, int k, int Nbar) {
  const TorusGeometry& g = deriv.geom;
  if (!(k <= Nbar && Nbar <= g.N))
    throw std::invalid_argument("coarse_kernel_of_derivative: need k <= Nbar <= N");
  return build_coarse(g, deriv, k, Nbar, Eigen::MatrixXd::Zero(g.m, g.m), 0.0,
                      Eigen::MatrixXd::Zero(g.m, g.m));
}

Eigen::MatrixXd dense_covariance(const CoarseKernel& ck) {
  const TorusGeometry& cg = ck.coarse;
  const std::int64_t s = cg.volume * cg.m;
  Eigen::MatrixXd M(s, s);
  for (std::int64_t x = 0; x < cg.volume; ++x) {
    const std::vector<int> xc = cg.site_coords(x);
    for (std::int64_t y = 0; y < cg.volume; ++y) {
      const std::vector<int> yc = cg.site_coords(y);
      std::vector<int> diff(cg.d);
      for (int i = 0; i < cg.d; ++i) diff[i] = xc[i] - yc[i];
      const Eigen::MatrixXd& block = ck.kernel.values[cg.site_index(diff)];
      for (int r = 0; r < cg.m; ++r)
        for (int t = 0; t < cg.m; ++t) M(x * cg.m + r, y * cg.m + t) = block(r, t);
    }
  }
  return M;
}

int LocalFunctional::diameter(const TorusGeometry& g) const {
  int dmax = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const std::vector<int> xi = g.site_coords(support[i]);
    for (std::size_t l = i + 1; l < support.size(); ++l) {
      const std::vector<int> xl = g.site_coords(support[l]);
      std::vector<int> diff(g.d);
      for (int a = 0; a < g.d; ++a) diff[a] = xi[a] - xl[a];
      dmax = std::max(dmax, g.dinf(g.site_index(diff)));
    }
  }
  return dmax;
}

int choose_Nbar(const TorusGeometry& g, int k, int diameter) {
  int Nbar = 1;
  while (std::pow(static_cast<double>(g.L), Nbar) < 2.0 * diameter && Nbar < g.N) ++Nbar;
  return std::min(std::max(Nbar, k), g.N);
}

LocalizationReport localization_check(const Decomposition& dec, int k,
                                      const LocalFunctional& F, int count,
                                      std::uint64_t seed, int workers, int forced_Nbar) {
  const TorusGeometry& g = dec.geom;
  const int D = F.diameter(g);
  const int Nbar = forced_Nbar > 0 ? forced_Nbar : choose_Nbar(g, k, D);
  if (2 * D > std::pow(static_cast<double>(g.L), Nbar) - 1)
    throw std::invalid_argument("localization_check: support too large for the coarse torus");
  LocalizationReport rep;
  rep.Nbar = Nbar;

  auto mc = [&](const SampleBatch& batch, const std::vector<std::int64_t>& sites, double& mean,
                double& se) {
    KahanSum acc, acc2;
    Eigen::VectorXd vals(sites.size() * g.m);
    for (const Field& f : batch.fields) {
      for (std::size_t i = 0; i < sites.size(); ++i)
        for (int r = 0; r < g.m; ++r) vals(static_cast<int>(i * g.m + r)) = f.at(sites[i], r);
      const double v = F.eval(vals);
      acc.add(v);
      acc2.add(v * v);
    }
    mean = acc.value() / batch.count;
    const double var = std::max(acc2.value() / batch.count - mean * mean, 0.0);
    se = std::sqrt(var / batch.count);
  };

  // Fine side.
  const SampleBatch fine = sample(dec.spectral[k - 1], seed, count, std::nullopt, workers);
  mc(fine, F.support, rep.fine_mean, rep.fine_se);

  // Coarse side: transport the support through the projection.
  const CoarseKernel ck = coarse_kernel(dec, k, Nbar);
  std::vector<std::int64_t> coarse_sites(F.support.size());
  for (std::size_t i = 0; i < F.support.size(); ++i)
    coarse_sites[i] = coarse_project(g, ck.coarse, F.support[i]);
  const SampleBatch coarse =
      sample(ck.spectral, seed + 1, count, ck.zero_mode_cov, workers);
  mc(coarse, coarse_sites, rep.coarse_mean, rep.coarse_se);

  rep.combined_se = std::sqrt(rep.fine_se * rep.fine_se + rep.coarse_se * rep.coarse_se);
  rep.pass = std::abs(rep.fine_mean - rep.coarse_mean) <= 3.0 * rep.combined_se;
  return rep;
}

double localization_quadratic_gap(const Decomposition& dec, int k, std::int64_t x0,
                                  std::int64_t y0, int r, int s, int Nbar) {
  const TorusGeometry& g = dec.geom;
  const std::vector<int> xc = g.site_coords(x0), yc = g.site_coords(y0);
  std::vector<int> diff(g.d);
  for (int i = 0; i < g.d; ++i) diff[i] = xc[i] - yc[i];
  const double fine_value = dec.position[k - 1].values[g.site_index(diff)](r, s);
  const CoarseKernel ck = coarse_kernel(dec, k, Nbar);
  const std::int64_t px = coarse_project(g, ck.coarse, x0);
  const std::int64_t py = coarse_project(g, ck.coarse, y0);
  const std::vector<int> pxc = ck.coarse.site_coords(px), pyc = ck.coarse.site_coords(py);
  std::vector<int> cdiff(g.d);
  for (int i = 0; i < g.d; ++i) cdiff[i] = pxc[i] - pyc[i];
  const double coarse_value = ck.kernel.values[ck.coarse.site_index(cdiff)](r, s);
  return std::abs(fine_value - coarse_value);
}

namespace {

double hs_norm_sandwich(const Eigen::MatrixXd& M, const Eigen::MatrixXd& D) {
  // ||M^(-1/2) D M^(-1/2)||_HS via the PSD eigendecomposition of M.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double floor = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv_sqrt = es.eigenvalues();
  for (int i = 0; i < inv_sqrt.size(); ++i)
    inv_sqrt(i) = inv_sqrt(i) > floor ? 1.0 / std::sqrt(inv_sqrt(i)) : 0.0;
  const Eigen::MatrixXd Mi =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  return (Mi * D * Mi).norm();
}

struct WickContext {
  Eigen::MatrixXd M, Minv, S, T, U;  // S = M^-1 Mdot M^-1 etc.
  double trS = 0, trU = 0, trMd2 = 0;
  bool has_ddot = false;
};

// Degenerate Gaussian measures live on a subspace (the zero-mean fields when
// the tail correction vanishes); the inverse is taken there. Null directions
// of M must also be null for the derivatives, otherwise the covariance really
// is losing rank along an active direction and we refuse.
WickContext make_wick(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mdot,
                      const std::optional<Eigen::MatrixXd>& Mddot) {
  WickContext w;
  w.M = M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  const double floor = 1e-12 * scale;
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i) {
    if (inv(i) > floor) {
      inv(i) = 1.0 / inv(i);
      continue;
    }
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    double active = (Mdot * v).norm();
    if (Mddot) active = std::max(active, (*Mddot * v).norm());
    if (active > 1e-9 * std::max(Mdot.norm(), 1.0))
      throw std::runtime_error("gauss_expectation_deriv: covariance nearly singular");
    inv(i) = 0.0;  // clean null direction, projected out
  }
  w.Minv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  w.S = w.Minv * Mdot * w.Minv;
  w.T = w.S * Mdot * w.Minv;
  w.trS = (w.Minv * Mdot).trace();
  w.trMd2 = (w.Minv * Mdot * w.Minv * Mdot).trace();
  if (Mddot) {
    w.U = w.Minv * *Mddot * w.Minv;
    w.trU = (w.Minv * *Mddot).trace();
    w.has_ddot = true;
  }
  return w;
}

// Gaussian moments of quadratic forms q_A = <x, A x>, x ~ N(0, M), A symmetric.
double e1(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M) { return (A * M).trace(); }
double e2(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd Am = A * M, Bm = B * M;
  return Am.trace() * Bm.trace() + 2.0 * (Am * Bm).trace();
}
double e3(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
          const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd Am = A * M, Bm = B * M, Cm = C * M;
  const double ta = Am.trace(), tb = Bm.trace(), tc = Cm.trace();
  return ta * tb * tc +
         2.0 * (ta * (Bm * Cm).trace() + tb * (Am * Cm).trace() + tc * (Am * Bm).trace()) +
         8.0 * (Am * Bm * Cm).trace();
}

}  // namespace

DerivReport gauss_expectation_deriv(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mdot,
                                    const std::optional<Eigen::MatrixXd>& Mddot,
                                    const QuadraticFunctional& F, int ell) {
  if (ell != 1 && ell != 2)
    throw std::invalid_argument("gauss_expectation_deriv: ell must be 1 or 2");
  const WickContext w = make_wick(M, Mdot, Mddot);
  DerivReport rep;
  rep.ell = ell;
  rep.hs_dot = hs_norm_sandwich(M, Mdot);
  if (Mddot) rep.hs_ddot = hs_norm_sandwich(M, *Mddot);
  const Eigen::MatrixXd& H = F.H;
  if (ell == 1) {
    // E[(q_H - c0) * (q_S - tr M^-1 Mdot)] / 2.
    const double val = 0.5 * (e2(H, w.S, M) - e1(H, M) * w.trS -
                              F.c0 * (e1(w.S, M) - w.trS));
    rep.weight_value = val;
    rep.closed_form = (H * Mdot).trace();
  } else {
    if (!Mddot) throw std::invalid_argument("gauss_expectation_deriv: ell=2 needs Mddot");
    // Second-order weight:
    //   1/4 (q_S - tr M^-1 Mdot)^2 - q_T + 1/2 (q_U - tr M^-1 Mddot)
    //   + 1/2 tr(M^-1 Mdot M^-1 Mdot).
    const double a = w.trS;
    auto weighted = [&](const Eigen::MatrixXd& G, double cG) {
      // E[(q_G - cG) * w2] with the pieces expanded through Gaussian moments.
      const double qs2 = e3(G, w.S, w.S, M) - 2.0 * a * e2(G, w.S, M) + a * a * e1(G, M);
      const double qt = e2(G, w.T, M);
      const double qu = e2(G, w.U, M) - w.trU * e1(G, M);
      const double qc = w.trMd2 * e1(G, M);
      const double ew2_parts =
          0.25 * (e2(w.S, w.S, M) - 2.0 * a * e1(w.S, M) + a * a) - e1(w.T, M) +
          0.5 * (e1(w.U, M) - w.trU) + 0.5 * w.trMd2;
      return 0.25 * qs2 - qt + 0.5 * qu + 0.5 * qc - cG * ew2_parts;
    };
    rep.weight_value = weighted(H, F.c0);
    rep.closed_form = (H * *Mddot).trace();
  }
  return rep;
}

DerivReport gauss_expectation_deriv_mc(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mdot,
                                       const std::optional<Eigen::MatrixXd>& Mddot,
                                       const std::function<double(const Eigen::VectorXd&)>& F,
                                       int ell, int count, std::uint64_t seed) {
  if (ell != 1 && ell != 2)
    throw std::invalid_argument("gauss_expectation_deriv_mc: ell must be 1 or 2");
  const WickContext w = make_wick(M, Mdot, Mddot);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::MatrixXd root = es.eigenvectors() *
                               es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                               es.eigenvectors().transpose();
  const CounterRng rng(seed);
  const int s = static_cast<int>(M.rows());
  KahanSum acc, acc2;
  Eigen::VectorXd z(s);
  for (int it = 0; it < count; ++it) {
    for (int i = 0; i < s; ++i) z(i) = rng.gaussian(it, i);
    const Eigen::VectorXd x = root * z;
    double wgt;
    if (ell == 1) {
      wgt = 0.5 * (x.dot(w.S * x) - w.trS);
    } else {
      const double qs = x.dot(w.S * x);
      const double qt = x.dot(w.T * x);
      const double qu = x.dot(w.U * x);
      wgt = 0.25 * (qs - w.trS) * (qs - w.trS) - qt + 0.5 * (qu - w.trU) + 0.5 * w.trMd2;
    }
    const double v = F(x) * wgt;
    acc.add(v);
    acc2.add(v * v);
  }
  DerivReport rep;
  rep.ell = ell;
  rep.weight_value = acc.value() / count;
  const double var = std::max(acc2.value() / count - rep.weight_value * rep.weight_value, 0.0);
  rep.mc_se = std::sqrt(var / count);
  rep.hs_dot = hs_norm_sandwich(M, Mdot);
  if (Mddot) rep.hs_ddot = hs_norm_sandwich(M, *Mddot);
  return rep;
}

double hs_quotient_sum(const SpectralKernel& C, const SpectralKernel& Cdot, int Nbar) {
  const TorusGeometry& g = C.geom;
  if (Nbar > g.N) throw std::invalid_argument("hs_quotient_sum: Nbar > N");
  const TorusGeometry cg = coarse_geometry(g, Nbar);
  const std::int64_t stride = g.side / cg.side;
  const std::int64_t czero = SpectralKernel(cg).zero_mode();
  KahanSum acc;
  for (std::int64_t pc = 0; pc < cg.volume; ++pc) {
    if (pc == czero) continue;
    const std::vector<int> a = cg.site_coords(pc);
    std::vector<int> af(g.d);
    for (int i = 0; i < g.d; ++i) af[i] = static_cast<int>(a[i] * stride);
    const std::int64_t p = g.site_index(af);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C.values[p]);
    if (es.eigenvalues()(0) <= 0)
      throw std::runtime_error("hs_quotient_sum: kernel mode not positive");
    const Eigen::MatrixXcd Mi = es.eigenvectors() *
                                es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                es.eigenvectors().adjoint();
    acc.add((Mi * Cdot.values[p] * Mi).squaredNorm());
  }
  return acc.value();
}

SmoothnessReport smoothness_suite(const Decomposition& final_dec, const BaseBuilder& builder_A,
                                  const Generator& Adot, int k,
                                  const std::vector<int>& diameters) {
  const TorusGeometry& g = final_dec.geom;
  if (g.m != 1)
    throw std::invalid_argument("smoothness_suite: scalar fields only");
  const int scale = k + 1;
  if (scale > g.N) throw std::invalid_argument("smoothness_suite: k + 1 must be <= N");
  SmoothnessReport rep;
  rep.scale = scale;
  const MixCoefficients mix_nt = mix_coefficients(g.L, g.N, g.d, final_dec.ntilde);
  const auto deriv1 = final_derivative(mix_nt, builder_A.build_derivative(Adot, 1));
  const auto deriv2 = final_derivative(mix_nt, builder_A.build_derivative(Adot, 2));

  std::vector<int> dedup;
  for (int D : diameters)
    if (dedup.empty() || dedup.back() != D) dedup.push_back(D);

  for (int D : dedup) {
    const int Nbar = choose_Nbar(g, scale, D);
    const CoarseKernel ck = coarse_kernel(final_dec, scale, Nbar);
    const Eigen::MatrixXd M = dense_covariance(ck);
    const Eigen::MatrixXd Md =
        dense_covariance(coarse_kernel_of_derivative(deriv1[scale - 1], scale, Nbar));
    const Eigen::MatrixXd Mdd =
        dense_covariance(coarse_kernel_of_derivative(deriv2[scale - 1], scale, Nbar));

    // Block X = [0, D]^d transported to the coarse torus (injective since
    // D < L^Nbar / 2 fails only when the clamp hit; then sites may collide and
    // the block simply wraps, which is still a valid functional).
    std::vector<std::int64_t> sites;
    std::vector<int> c(g.d, 0);
    const std::int64_t nblock = static_cast<std::int64_t>(std::pow(D + 1.0, g.d));
    for (std::int64_t it = 0; it < nblock; ++it) {
      std::int64_t v = it;
      for (int i = 0; i < g.d; ++i) {
        c[i] = static_cast<int>(v % (D + 1));
        v /= (D + 1);
      }
      sites.push_back(coarse_project(g, ck.coarse, g.site_index(c)));
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    for (std::int64_t sidx : sites) H(sidx, sidx) += 1.0;

    const Eigen::MatrixXd HM = H * M;
    const double trHM = HM.trace();
    const double trHMd = (H * Md).trace();
    const double kappa2 = 2.0 * (HM * HM).trace();

    {
      SmoothnessRow row;
      row.D = D;
      row.Nbar = Nbar;
      row.ell = 1;
      row.deriv_abs = std::abs(trHMd);
      row.fnorm = std::sqrt(kappa2);
      row.ratio = row.deriv_abs / row.fnorm;
      rep.rows.push_back(row);
    }
    {
      // G = (q_H - tr HM)^2; E''(0) = 2 (tr H Mdot)^2 + 4 tr(H Mddot H M)
      // + 4 tr(H Mdot H Mdot); ||G - EG|| = sqrt(kappa4 + 2 kappa2^2).
      const double d2 = 2.0 * trHMd * trHMd + 4.0 * (H * Mdd * HM).trace() +
                        4.0 * (H * Md * H * Md).trace();
      const double kappa4 = 48.0 * (HM * HM * HM * HM).trace();
      SmoothnessRow row;
      row.D = D;
      row.Nbar = Nbar;
      row.ell = 2;
      row.deriv_abs = std::abs(d2);
      row.fnorm = std::sqrt(kappa4 + 2.0 * kappa2 * kappa2);
      row.ratio = row.deriv_abs / row.fnorm;
      rep.rows.push_back(row);
    }
    (void)trHM;
  }

  std::vector<double> x1, y1, x2, y2;
  for (const auto& row : rep.rows) {
    if (row.ell == 1) {
      x1.push_back(std::log(static_cast<double>(row.D)));
      y1.push_back(std::log(row.ratio));
    } else {
      x2.push_back(std::log(static_cast<double>(row.D)));
      y2.push_back(std::log(row.ratio));
    }
  }
  rep.slope_ell1 = fit_slope(x1, y1);
  rep.slope_ell2 = fit_slope(x2, y2);
  return rep;
}

WhittleReport whittle_check(const std::vector<int>& sizes, int per_size,
                            const std::vector<double>& s_values, int count,
                            std::uint64_t seed) {
  WhittleReport rep;
  const CounterRng rng(seed);
  std::uint64_t stream = 0;
  for (int n : sizes) {
    for (int rep_i = 0; rep_i < per_size; ++rep_i) {
      Eigen::MatrixXd A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.gaussian(stream, 1000 + i * n + j);
      ++stream;
      const double hs = A.norm();
      const double tra = A.trace();
      std::vector<KahanSum> acc(s_values.size());
      Eigen::VectorXd x(n);
      for (int it = 0; it < count; ++it) {
        for (int i = 0; i < n; ++i) x(i) = rng.gaussian(stream, 2000 + i, it);
        const double dev = std::abs(x.dot(A * x) - tra);
        for (std::size_t si = 0; si < s_values.size(); ++si)
          acc[si].add(std::pow(dev, s_values[si]));
      }
      ++stream;
      for (std::size_t si = 0; si < s_values.size(); ++si) {
        WhittleRow row;
        row.size = n;
        row.s = s_values[si];
        row.ratio = acc[si].value() / count / std::pow(hs, s_values[si]);
        rep.fitted_C = std::max(rep.fitted_C, row.ratio);
        rep.rows.push_back(row);
      }
    }
  }
  // A = Id, s = 2: the ratio is exactly 2 in the limit.
  {
    const int n = 16;
    KahanSum acc, acc2;
    Eigen::VectorXd x(n);
    for (int it = 0; it < count; ++it) {
      double q = 0;
      for (int i = 0; i < n; ++i) {
        x(i) = rng.gaussian(9999, i, it);
        q += x(i) * x(i);
      }
      const double v = (q - n) * (q - n) / n;
      acc.add(v);
      acc2.add(v * v);
    }
    rep.id_s2_ratio = acc.value() / count;
    const double var = std::max(acc2.value() / count - rep.id_s2_ratio * rep.id_s2_ratio, 0.0);
    rep.id_s2_se = std::sqrt(var / count);
    rep.id_pass = std::abs(rep.id_s2_ratio - 2.0) <= 3.0 * rep.id_s2_se;
  }
  return rep;
}

}  // namespace frd
