#include "frd/decomposition.hpp"

#include <cmath>
#include <stdexcept>

#include "frd/linalg.hpp"
#include "frd/numeric.hpp"
#include "frd/parallel.hpp"

namespace frd {

double Decomposition::sum_identity_defect(const SpectralKernel& green) const {
  const std::int64_t zero = green.zero_mode();
  double worst = 0;
  for (std::int64_t p = 0; p < geom.volume; ++p) {
    if (p == zero) continue;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(geom.m, geom.m);
    for (const auto& sk : spectral) sum += sk.values[p];
    worst = std::max(worst, (sum - green.values[p]).norm() / green.values[p].norm());
  }
  return worst;
}

double Decomposition::finite_range_defect(int k) const {
  const MatrixKernel& pk = position[k - 1];
  const double scale = pk.max_norm();
  const std::int64_t ref = tail_reference_site(geom, k);
  const double range = std::pow(static_cast<double>(geom.L), k) / 2.0;
  double worst = 0;
  for (std::int64_t x = 0; x < geom.volume; ++x) {
    if (geom.dinf(x) < range) continue;
    worst = std::max(worst, spectral_norm(pk.values[x] - pk.values[ref]));
  }
  return worst / scale;
}

double Decomposition::min_mode_eigenvalue_rel(int k) const {
  const SpectralKernel& sk = spectral[k - 1];
  const std::int64_t zero = sk.zero_mode();
  double worst = 0;
  for (std::int64_t p = 0; p < geom.volume; ++p) {
    if (p == zero) continue;
    const double scale = std::max(spectral_norm(sk.values[p]), 1e-300);
    worst = std::min(worst, lambda_min(sk.values[p]) / scale);
  }
  return worst;
}

std::int64_t tail_reference_site(const TorusGeometry& g, int k) {
  std::vector<int> x(g.d, 0);
  const double range = std::pow(static_cast<double>(g.L), k) / 2.0;
  x[0] = g.wrap1(static_cast<std::int64_t>(std::ceil(range)));
  return g.site_index(x);
}

BaseBuilder::BaseBuilder(const TorusGeometry& g, const Generator& A, double B_override,
                         int workers)
    : geom_(g), A_(A), workers_(std::max(1, workers)) {
  if (g.m != A.m) throw std::invalid_argument("BaseBuilder: component mismatch");
  if (g.d != A.mset.d()) throw std::invalid_argument("BaseBuilder: dimension mismatch");
  zero_mode_ = SpectralKernel(g).zero_mode();

  evals_.resize(g.volume);
  evecs_.resize(g.volume);
  parallel_for(g.volume, workers_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      if (p == zero_mode_) {
        evals_[p] = Eigen::VectorXd::Zero(g.m);
        evecs_[p] = Eigen::MatrixXcd::Identity(g.m, g.m);
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(symbol(A_, g.momentum(p)));
      evals_[p] = es.eigenvalues();
      evecs_[p] = es.eigenvectors();
    }
  });
  for (std::int64_t p = 0; p < g.volume; ++p)
    symbol_max_ = std::max(symbol_max_, evals_[p](g.m - 1));

  const double B =
      B_override > 0 ? B_override : family_spectral_cap(A_.mset, A_.Omega0);
  if (B < symbol_max_)
    throw std::runtime_error("BaseBuilder: spectral cap below the symbol spectrum");
  WFamily::Config wcfg;
  wcfg.B = B;
  wf_ = std::make_shared<WFamily>(wcfg);

  // Scale quadratures on [L^(k-1)/2R, L^k/2R]; k = 1 starts at t = 0.
  const double R = A_.mset.range();
  rules_.resize(geom_.N);
  for (int k = 1; k <= geom_.N; ++k) {
    ScaleRule& r = rules_[k - 1];
    r.t_lo = (k == 1) ? 0.0 : std::pow(static_cast<double>(geom_.L), k - 1) / (2.0 * R);
    r.t_hi = std::pow(static_cast<double>(geom_.L), k) / (2.0 * R);
    const int nodes = static_cast<int>(
        std::ceil(8.0 * std::log2(std::pow(static_cast<double>(geom_.L), k))));
    GaussLegendre gl(nodes);
    r.t.resize(nodes);
    r.w.resize(nodes);
    r.fn.reserve(nodes);
    for (int i = 0; i < nodes; ++i) {
      r.t[i] = 0.5 * (r.t_lo + r.t_hi) + 0.5 * (r.t_hi - r.t_lo) * gl.nodes[i];
      r.w[i] = 0.5 * (r.t_hi - r.t_lo) * gl.weights[i];
      r.fn.push_back(wf_->node_fn(wf_->cheb_coeffs(r.t[i])));
    }
  }
}

SpectralKernel BaseBuilder::green() const {
  SpectralKernel out(geom_);
  for (std::int64_t p = 0; p < geom_.volume; ++p) {
    if (p == zero_mode_) continue;
    out.values[p] = evecs_[p] * evals_[p].cwiseInverse().asDiagonal() * evecs_[p].adjoint();
  }
  return out;
}

Decomposition BaseBuilder::build() const {
  const auto& g = geom_;
  Decomposition dec;
  dec.geom = g;
  dec.kind = DecompKind::Base;
  dec.spectral.assign(g.N + 1, SpectralKernel(g));
  dec.position.reserve(g.N + 1);
  dec.tail.resize(g.N + 1);

  parallel_for(g.volume, workers_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      if (p == zero_mode_) continue;
      const Eigen::VectorXd& lam = evals_[p];
      const Eigen::MatrixXcd& U = evecs_[p];
      Eigen::VectorXd remainder = lam.cwiseInverse();
      for (int k = 1; k <= g.N; ++k) {
        const ScaleRule& r = rules_[k - 1];
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(g.m);
        for (std::size_t i = 0; i < r.t.size(); ++i)
          for (int a = 0; a < g.m; ++a)
            acc(a) += r.w[i] * r.t[i] * r.fn[i].f(lam(a));
        dec.spectral[k - 1].values[p] = U * acc.asDiagonal() * U.adjoint();
        remainder -= acc;
      }
      for (int a = 0; a < g.m; ++a) {
        if (remainder(a) < -1e-8 / lam(a))
          throw std::runtime_error(
              "base_decomposition: negative remainder mode, family miscalibrated");
        if (remainder(a) < 0) remainder(a) = 0;
      }
      dec.spectral[g.N].values[p] = U * remainder.asDiagonal() * U.adjoint();
    }
  });

  for (int k = 1; k <= g.N + 1; ++k) {
    dec.position.push_back(idft_real(dec.spectral[k - 1]));
    const std::int64_t ref = tail_reference_site(g, std::min(k, g.N));
    dec.tail[k - 1] = dec.position[k - 1].values[ref];
    if (k <= g.N) dec.position[k - 1].tail = dec.tail[k - 1];
  }
  return dec;
}

std::vector<SpectralKernel> BaseBuilder::build_derivative(const Generator& Adot,
                                                          int ell) const {
  if (ell != 1 && ell != 2)
    throw std::invalid_argument("build_derivative: ell must be 1 or 2");
  const auto& g = geom_;
  std::vector<SpectralKernel> out(g.N + 1, SpectralKernel(g));

  parallel_for(g.volume, workers_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      if (p == zero_mode_) continue;
      const Eigen::VectorXd& lam = evals_[p];
      const Eigen::MatrixXcd& U = evecs_[p];
      const Eigen::MatrixXcd Bt = U.adjoint() * symbol(Adot, g.momentum(p)) * U;
      Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(g.m, g.m);
      for (int k = 1; k <= g.N; ++k) {
        const ScaleRule& r = rules_[k - 1];
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(g.m, g.m);
        for (std::size_t i = 0; i < r.t.size(); ++i) {
          const double wt = r.w[i] * r.t[i];
          if (ell == 1) {
            for (int a = 0; a < g.m; ++a)
              for (int b = 0; b < g.m; ++b)
                acc(a, b) += wt * divided_difference(r.fn[i], lam(a), lam(b)) * Bt(a, b);
          } else {
            for (int a = 0; a < g.m; ++a)
              for (int b = 0; b < g.m; ++b) {
                Complex s(0);
                for (int c = 0; c < g.m; ++c)
                  s += divided_difference2(r.fn[i], lam(a), lam(c), lam(b)) * Bt(a, c) *
                       Bt(c, b);
                acc(a, b) += wt * 2.0 * s;
              }
          }
        }
        out[k - 1].values[p] = U * acc * U.adjoint();
        total += out[k - 1].values[p];
      }
      // Remainder scale: differentiate A_hat^{-1} directly.
      const Eigen::MatrixXcd Ainv =
          (evals_[p].cwiseInverse()).asDiagonal().toDenseMatrix().cast<Complex>();
      Eigen::MatrixXcd dinv;
      if (ell == 1)
        dinv = -Ainv * Bt * Ainv;
      else
        dinv = 2.0 * Ainv * Bt * Ainv * Bt * Ainv;
      out[g.N].values[p] = U * dinv * U.adjoint() - total;
    }
  });
  return out;
}

double MixCoefficients::column_sum(int j) const {
  double s = 0;
  for (int k = j; k <= N + 1; ++k) s += at(k, j);
  return s;
}

MixCoefficients mix_coefficients(int L, int N, int d, int n) {
  if (n < 1) throw std::invalid_argument("mix_coefficients: n must be >= 1");
  MixCoefficients mc;
  mc.L = L;
  mc.N = N;
  mc.d = d;
  mc.n = n;
  mc.table = Eigen::MatrixXd::Zero(N + 1, N + 1);
  const double decay = -static_cast<double>(d) + 1.0 - n;
  for (int k = 1; k <= N + 1; ++k)
    for (int j = 1; j < k; ++j)
      mc.table(k - 1, j - 1) = std::pow(static_cast<double>(L), (k - j) * decay);
  for (int k = 1; k <= N + 1; ++k) {
    double below = 0;
    for (int l = k + 1; l <= N + 1; ++l) below += mc.table(l - 1, k - 1);
    mc.table(k - 1, k - 1) = 1.0 - below;
  }
  return mc;
}

Decomposition improved_decomposition(const Decomposition& base, int n) {
  if (base.kind != DecompKind::Base)
    throw std::invalid_argument("improved_decomposition: input must be a base kind");
  const auto& g = base.geom;
  const MixCoefficients mix = mix_coefficients(g.L, g.N, g.d, n);
  Decomposition dec;
  dec.geom = g;
  dec.kind = DecompKind::Improved;
  dec.n = n;
  dec.spectral.assign(g.N + 1, SpectralKernel(g));
  dec.position.assign(g.N + 1, MatrixKernel(g));
  dec.tail.assign(g.N + 1, Eigen::MatrixXd::Zero(g.m, g.m));
  for (int k = 1; k <= g.N + 1; ++k) {
    for (int j = 1; j <= k; ++j) {
      const double lam = mix.at(k, j);
      for (std::int64_t p = 0; p < g.volume; ++p)
        dec.spectral[k - 1].values[p] += lam * base.spectral[j - 1].values[p];
      for (std::int64_t x = 0; x < g.volume; ++x)
        dec.position[k - 1].values[x] += lam * base.position[j - 1].values[x];
      dec.tail[k - 1] += lam * base.tail[j - 1];
    }
    if (k <= g.N) dec.position[k - 1].tail = dec.tail[k - 1];
  }
  return dec;
}

std::vector<SpectralKernel> improved_derivative(const MixCoefficients& mix,
                                                const std::vector<SpectralKernel>& base_deriv) {
  const int scales = static_cast<int>(base_deriv.size());
  std::vector<SpectralKernel> out(scales, SpectralKernel(base_deriv[0].geom));
  for (int k = 1; k <= scales; ++k)
    for (int j = 1; j <= k; ++j) {
      const double lam = mix.at(k, j);
      for (std::int64_t p = 0; p < base_deriv[0].geom.volume; ++p)
        out[k - 1].values[p] += lam * base_deriv[j - 1].values[p];
    }
  return out;
}

double estimate_K(const Decomposition& improved_A, const Decomposition& improved_ref,
                  int ntilde) {
  if (improved_A.kind != DecompKind::Improved || improved_ref.kind != DecompKind::Improved)
    throw std::invalid_argument("estimate_K: inputs must be improved kinds");
  if (improved_A.n != ntilde || improved_ref.n != ntilde)
    throw std::invalid_argument("estimate_K: decompositions must be built with order ntilde");
  const auto& g = improved_A.geom;
  const std::int64_t zero = improved_A.spectral[0].zero_mode();
  const double denom_pow =
      std::pow(static_cast<double>(g.L), 2.0 * (g.d + ntilde) + 1.0);
  double sup = 0;
  for (int k = 1; k <= g.N + 1; ++k) {
    for (std::int64_t p = 0; p < g.volume; ++p) {
      if (p == zero) continue;
      const double lmin = lambda_min(improved_A.spectral[k - 1].values[p]);
      if (lmin <= 0)
        throw std::runtime_error("estimate_K: improved decomposition lost positivity");
      const double num = spectral_norm(improved_ref.spectral[k - 1].values[p]);
      sup = std::max(sup, num / (lmin * denom_pow));
    }
  }
  return 1.1 * sup;
}

Decomposition final_decomposition(const Decomposition& improved_A_ntilde,
                                  const Decomposition& improved_ref_ntilde,
                                  const Decomposition& improved_ref_n, double K) {
  const auto& g = improved_A_ntilde.geom;
  const int ntilde = improved_A_ntilde.n;
  const int n = improved_ref_n.n;
  if (improved_ref_ntilde.n != ntilde)
    throw std::invalid_argument("final_decomposition: reference ntilde mismatch");
  if (!(ntilde > n))
    throw std::invalid_argument("final_decomposition: need ntilde > n");
  if (!(K > 0)) throw std::invalid_argument("final_decomposition: K must be positive");
  const double beta =
      std::pow(static_cast<double>(g.L), -2.0 * (g.d + ntilde) - 1.0) / K;

  Decomposition dec;
  dec.geom = g;
  dec.kind = DecompKind::Final;
  dec.n = n;
  dec.ntilde = ntilde;
  dec.K = K;
  dec.spectral.assign(g.N + 1, SpectralKernel(g));
  dec.position.assign(g.N + 1, MatrixKernel(g));
  dec.tail.assign(g.N + 1, Eigen::MatrixXd::Zero(g.m, g.m));
  const std::int64_t zero = improved_A_ntilde.spectral[0].zero_mode();
  for (int k = 1; k <= g.N + 1; ++k) {
    for (std::int64_t p = 0; p < g.volume; ++p) {
      dec.spectral[k - 1].values[p] =
          improved_A_ntilde.spectral[k - 1].values[p] -
          beta * (improved_ref_ntilde.spectral[k - 1].values[p] -
                  improved_ref_n.spectral[k - 1].values[p]);
      if (p != zero) {
        const double scale =
            std::max(spectral_norm(dec.spectral[k - 1].values[p]), 1e-300);
        if (lambda_min(dec.spectral[k - 1].values[p]) < -1e-10 * scale)
          throw std::runtime_error(
              "final_decomposition: negative mode, K too small - re-estimate");
      }
    }
    for (std::int64_t x = 0; x < g.volume; ++x)
      dec.position[k - 1].values[x] =
          improved_A_ntilde.position[k - 1].values[x] -
          beta * (improved_ref_ntilde.position[k - 1].values[x] -
                  improved_ref_n.position[k - 1].values[x]);
    dec.tail[k - 1] = improved_A_ntilde.tail[k - 1] -
                      beta * (improved_ref_ntilde.tail[k - 1] - improved_ref_n.tail[k - 1]);
    if (k <= g.N) dec.position[k - 1].tail = dec.tail[k - 1];
  }
  return dec;
}

std::vector<SpectralKernel> final_derivative(const MixCoefficients& mix_ntilde,
                                             const std::vector<SpectralKernel>& base_deriv_A) {
  return improved_derivative(mix_ntilde, base_deriv_A);
}

ToyDecomposition toy_scaled_decomposition(const Generator& A, const Generator& Adot,
                                          const TorusGeometry& g) {
  if (g.m != 1) throw std::invalid_argument("toy_scaled_decomposition: scalar fields only");
  ToyDecomposition toy;
  const int scales = g.N + 1;
  toy.spectral.assign(scales, SpectralKernel(g));
  toy.derivative.assign(scales, SpectralKernel(g));
  const std::int64_t zero = toy.spectral[0].zero_mode();
  const double c = 1.0 / scales;
  for (std::int64_t p = 0; p < g.volume; ++p) {
    if (p == zero) continue;
    const std::vector<double> mom = g.momentum(p);
    const double a = symbol(A, mom)(0, 0).real();
    const double adot = symbol(Adot, mom)(0, 0).real();
    for (int k = 0; k < scales; ++k) {
      toy.spectral[k].values[p](0, 0) = c / a;
      toy.derivative[k].values[p](0, 0) = -c * adot / (a * a);
    }
  }
  return toy;
}

}  // namespace frd
