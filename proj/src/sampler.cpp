#include "frd/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "frd/linalg.hpp"
#include "frd/numeric.hpp"
#include "frd/parallel.hpp"
#include "frd/rng.hpp"

namespace frd {

SpectralKernel spectral_sqrt(const SpectralKernel& kernel) {
  const auto& g = kernel.geom;
  SpectralKernel out(g);
  for (std::int64_t p = 0; p < g.volume; ++p) {
    const Eigen::MatrixXcd& v = kernel.values[p];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v);
    const double scale = std::max(std::abs(es.eigenvalues()(g.m - 1)), 1e-300);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int a = 0; a < g.m; ++a) {
      if (ev(a) < -1e-10 * scale)
        throw std::runtime_error("spectral_sqrt: kernel mode not PSD");
      ev(a) = std::sqrt(std::max(ev(a), 0.0));
    }
    out.values[p] = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  }
  return out;
}

SampleBatch sample(const SpectralKernel& kernel, std::uint64_t seed, int count,
                   const std::optional<Eigen::MatrixXd>& zero_mode_cov, int workers) {
  const auto& g = kernel.geom;
  const std::int64_t zero = kernel.zero_mode();
  const SpectralKernel root = spectral_sqrt(kernel);
  std::optional<Eigen::MatrixXd> zero_root;
  if (zero_mode_cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*zero_mode_cov);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    zero_root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  }

  // Representative of each +/- pair: the lower linear index (odd side, so no
  // self-paired nonzero mode exists).
  std::vector<std::int64_t> reps;
  reps.reserve(g.volume / 2);
  for (std::int64_t p = 0; p < g.volume; ++p) {
    if (p == zero) continue;
    if (p < g.negate_index(p)) reps.push_back(p);
  }
  if (2 * static_cast<std::int64_t>(reps.size()) + 1 != g.volume)
    throw std::runtime_error("sample: +/- pairing failed (even side?)");

  const CounterRng rng(seed);
  const double s = std::pow(static_cast<double>(g.volume), 0.5);
  SampleBatch batch;
  batch.seed = seed;
  batch.count = count;
  batch.fields.assign(count, Field(g));

  DftPlan plan(g);
  parallel_for(count, workers, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<Complex> hat(g.volume * g.m);
    for (std::int64_t sidx = lo; sidx < hi; ++sidx) {
      std::fill(hat.begin(), hat.end(), Complex(0));
      for (std::int64_t rp : reps) {
        Eigen::VectorXcd z(g.m);
        for (int r = 0; r < g.m; ++r) {
          const double re = rng.gaussian(sidx, rp, 2 * r);
          const double im = rng.gaussian(sidx, rp, 2 * r + 1);
          z(r) = Complex(re, im) / std::sqrt(2.0);
        }
        const Eigen::VectorXcd xi = s * (root.values[rp] * z);
        const std::int64_t rn = g.negate_index(rp);
        for (int r = 0; r < g.m; ++r) {
          hat[rp * g.m + r] = xi(r);
          hat[rn * g.m + r] = std::conj(xi(r));
        }
      }
      if (zero_root) {
        Eigen::VectorXd zg(g.m);
        for (int r = 0; r < g.m; ++r) zg(r) = rng.gaussian(sidx, zero, 2 * r);
        const Eigen::VectorXd xi0 = s * (*zero_root * zg);
        for (int r = 0; r < g.m; ++r) hat[zero * g.m + r] = xi0(r);
      }
      plan.inverse(hat, g.m);
      Field& f = batch.fields[sidx];
      double resid = 0, scale = 0;
      for (std::int64_t x = 0; x < g.volume; ++x)
        for (int r = 0; r < g.m; ++r) {
          f.at(x, r) = hat[x * g.m + r].real();
          resid = std::max(resid, std::abs(hat[x * g.m + r].imag()));
          scale = std::max(scale, std::abs(f.at(x, r)));
        }
      if (resid > 1e-12 * std::max(scale, 1e-300))
        throw std::runtime_error("sample: conjugate symmetry lost, field not real");
    }
  });
  return batch;
}

double empirical_covariance(const SampleBatch& batch, std::int64_t x, int i, std::int64_t y,
                            int j) {
  KahanSum acc;
  for (const Field& f : batch.fields) acc.add(f.at(x, i) * f.at(y, j));
  return acc.value() / batch.count;
}

RangeCheckReport gradient_range_check(const SampleBatch& batch, int k, int max_pairs,
                                      std::uint64_t pair_seed) {
  if (batch.fields.empty()) throw std::invalid_argument("gradient_range_check: empty batch");
  const TorusGeometry& g = batch.fields[0].geom;
  const double min_dist = std::pow(static_cast<double>(g.L), k) / 2.0 + 1.0;
  RangeCheckReport rep;
  const CounterRng rng(pair_seed);

  // Gradient caches per sample would be large; compute per chosen pair instead.
  auto grad_at = [&](const Field& f, std::int64_t x, int axis, int r) {
    return f.at(g.shift_index(x, axis, +1), r) - f.at(x, r);
  };

  int found = 0;
  for (std::uint64_t trial = 0; trial < 10000 && found < max_pairs; ++trial) {
    const std::int64_t x =
        static_cast<std::int64_t>(rng.uniform(trial, 0) * g.volume) % g.volume;
    const std::int64_t y =
        static_cast<std::int64_t>(rng.uniform(trial, 1) * g.volume) % g.volume;
    // Separation of the pair on the torus.
    const std::vector<int> xc = g.site_coords(x), yc = g.site_coords(y);
    std::vector<int> diff(g.d);
    for (int i = 0; i < g.d; ++i) diff[i] = xc[i] - yc[i];
    if (g.dinf(g.site_index(diff)) < min_dist) continue;
    ++found;
    const int i = static_cast<int>(rng.uniform(trial, 2) * g.d) % g.d;
    const int j = static_cast<int>(rng.uniform(trial, 3) * g.d) % g.d;
    const int r = static_cast<int>(rng.uniform(trial, 4) * g.m) % g.m;
    const int s = static_cast<int>(rng.uniform(trial, 5) * g.m) % g.m;

    KahanSum cov, var_x, var_y;
    for (const Field& f : batch.fields) {
      const double gx = grad_at(f, x, i, r);
      const double gy = grad_at(f, y, j, s);
      cov.add(gx * gy);
      var_x.add(gx * gx);
      var_y.add(gy * gy);
    }
    const int n = batch.count;
    RangeCheckRow row;
    row.x = x;
    row.y = y;
    row.i = i;
    row.j = j;
    row.r = r;
    row.s = s;
    row.empirical = cov.value() / n;
    row.band = 4.0 / std::sqrt(static_cast<double>(n)) *
               std::sqrt(var_x.value() / n) * std::sqrt(var_y.value() / n);
    row.pass = std::abs(row.empirical) <= row.band;
    if (!row.pass) ++rep.violations;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace frd
