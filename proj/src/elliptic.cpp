#include "frd/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "frd/linalg.hpp"
#include "frd/rng.hpp"

namespace frd {

namespace {
bool lex_less(const MultiIndex& a, const MultiIndex& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}
}  // namespace

MultiIndexSet::MultiIndexSet(int d, std::vector<MultiIndex> indices) : d_(d) {
  if (d < 1) throw std::invalid_argument("MultiIndexSet: d must be >= 1");
  for (auto& a : indices) {
    if (static_cast<int>(a.size()) != d)
      throw std::invalid_argument("MultiIndexSet: index dimension mismatch");
    int order = 0;
    for (int v : a) {
      if (v < 0) throw std::invalid_argument("MultiIndexSet: negative entry");
      order += v;
    }
    if (order == 0) throw std::invalid_argument("MultiIndexSet: zero index not allowed");
  }
  std::sort(indices.begin(), indices.end(), lex_less);
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  // All first-order indices must be present.
  for (int i = 0; i < d; ++i) {
    MultiIndex e(d, 0);
    e[i] = 1;
    if (!std::binary_search(indices.begin(), indices.end(), e, lex_less))
      throw std::invalid_argument("MultiIndexSet: must contain all first-order indices");
  }
  indices_ = std::move(indices);
  R_ = 0;
  for (const auto& a : indices_)
    R_ = std::max(R_, *std::max_element(a.begin(), a.end()));
}

int MultiIndexSet::find(const MultiIndex& alpha) const {
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), alpha, lex_less);
  if (it == indices_.end() || *it != alpha) return -1;
  return static_cast<int>(it - indices_.begin());
}

MultiIndexSet MultiIndexSet::gradients(int d) {
  std::vector<MultiIndex> idx;
  for (int i = 0; i < d; ++i) {
    MultiIndex e(d, 0);
    e[i] = 1;
    idx.push_back(e);
  }
  return MultiIndexSet(d, std::move(idx));
}

MultiIndexSet MultiIndexSet::gradients_plus(int d) {
  if (d < 2) throw std::invalid_argument("gradients_plus: needs d >= 2");
  std::vector<MultiIndex> idx;
  for (int i = 0; i < d; ++i) {
    MultiIndex e(d, 0);
    e[i] = 1;
    idx.push_back(e);
  }
  MultiIndex mixed(d, 0);
  mixed[0] = 1;
  mixed[1] = 1;
  idx.push_back(mixed);
  MultiIndex second(d, 0);
  second[0] = 2;
  idx.push_back(second);
  return MultiIndexSet(d, std::move(idx));
}

double Generator::op_norm() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blocks, Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)),
                  std::abs(es.eigenvalues()(blocks.rows() - 1)));
}

bool Generator::is_symmetric(double tol) const {
  const double scale = std::max(1.0, blocks.norm());
  return (blocks - blocks.transpose()).norm() <= tol * scale;
}

Generator laplacian_generator(const MultiIndexSet& mset, int m, double omega0,
                              double Omega0) {
  Generator A{mset, m, Eigen::MatrixXd::Zero(m * mset.size(), m * mset.size()), omega0,
              Omega0};
  for (int i = 0; i < mset.size(); ++i) {
    int order = 0;
    for (int v : mset[i]) order += v;
    if (order == 1)
      A.blocks.block(i * m, i * m, m, m) = Eigen::MatrixXd::Identity(m, m);
  }
  return A;
}

Generator diagonal_generator(const MultiIndexSet& mset, int m,
                             const std::vector<double>& gradient_coeffs, double omega0,
                             double Omega0) {
  if (static_cast<int>(gradient_coeffs.size()) != mset.d())
    throw std::invalid_argument("diagonal_generator: need one coefficient per axis");
  Generator A{mset, m, Eigen::MatrixXd::Zero(m * mset.size(), m * mset.size()), omega0,
              Omega0};
  for (int i = 0; i < mset.size(); ++i) {
    const MultiIndex& a = mset[i];
    int order = 0, axis = -1;
    for (int k = 0; k < mset.d(); ++k) {
      order += a[k];
      if (a[k] > 0) axis = k;
    }
    if (order == 1)
      A.blocks.block(i * m, i * m, m, m) =
          gradient_coeffs[axis] * Eigen::MatrixXd::Identity(m, m);
  }
  return A;
}

Generator random_generator(const MultiIndexSet& mset, int m, double omega0, double Omega0,
                           std::uint64_t seed) {
  if (!(Omega0 > omega0) || omega0 <= 0)
    throw std::invalid_argument("random_generator: need Omega0 > omega0 > 0");
  const int n = m * mset.size();
  CounterRng rng(seed);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian(1, i, j);
  Eigen::MatrixXd S = G * G.transpose();
  S /= spectral_norm(S);
  const double u = rng.uniform(2, 0, 0);
  Generator A = laplacian_generator(mset, m, omega0, Omega0);
  A.blocks = omega0 * A.blocks + (Omega0 - omega0) * u * S;
  return A;
}

Generator random_direction(const MultiIndexSet& mset, int m, std::uint64_t seed) {
  const int n = m * mset.size();
  CounterRng rng(seed);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian(3, i, j);
  Eigen::MatrixXd S = 0.5 * (G + G.transpose());
  S /= spectral_norm(S);
  Generator A{mset, m, std::move(S), 0.0, 1.0};
  return A;
}

Complex q_factor(const std::vector<double>& p, const MultiIndex& alpha) {
  Complex q(1.0, 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const Complex qi = std::polar(1.0, p[i]) - 1.0;
    for (int rep = 0; rep < alpha[i]; ++rep) q *= qi;
  }
  return q;
}

double q_norm_sq(const std::vector<double>& p) {
  double s = 0;
  for (double pi : p) s += 2.0 - 2.0 * std::cos(pi);
  return s;
}

Eigen::MatrixXcd symbol(const Generator& A, const std::vector<double>& p) {
  const int m = A.m;
  const int M = A.mset.size();
  Eigen::VectorXcd q(M);
  for (int i = 0; i < M; ++i) q(i) = q_factor(p, A.mset[i]);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      out += std::conj(q(a)) * q(b) * A.block(a, b);
  // Symmetrize away roundoff; a genuinely asymmetric generator is rejected.
  const double defect = (out - out.adjoint().eval()).norm();
  if (defect > 1e-10 * std::max(1.0, out.norm()))
    throw std::runtime_error("symbol: non-Hermitian output, generator not symmetric");
  return 0.5 * (out + out.adjoint().eval());
}

double omega_envelope(const Generator& A) { return 4.0 * A.omega0 / (M_PI * M_PI); }

double Omega_envelope(const Generator& A) {
  const int d = A.mset.d();
  const int R = A.mset.range();
  return A.Omega0 * A.mset.size() * std::pow(d * M_PI * M_PI, d * R);
}

double family_spectral_cap(const MultiIndexSet& mset, double Omega0) {
  double s = 0;
  for (const MultiIndex& a : mset.indices()) {
    int order = 0;
    for (int v : a) order += v;
    s += std::pow(4.0, order);
  }
  return Omega0 * s;
}

SymbolBounds verify_symbol_bounds(const Generator& A, const TorusGeometry& g) {
  SymbolBounds sb;
  sb.omega = omega_envelope(A);
  sb.Omega = Omega_envelope(A);
  sb.measured_min = std::numeric_limits<double>::infinity();
  sb.measured_max = 0;
  const std::int64_t zero = SpectralKernel(g).zero_mode();
  for (std::int64_t idx = 0; idx < g.volume; ++idx) {
    if (idx == zero) continue;
    const std::vector<double> p = g.momentum(idx);
    const double p2 = g.momentum_norm(idx) * g.momentum_norm(idx);
    const Eigen::VectorXd ev = hermitian_eigenvalues(symbol(A, p));
    sb.measured_min = std::min(sb.measured_min, ev(0) / p2);
    sb.measured_max = std::max(sb.measured_max, ev(ev.size() - 1) / p2);
  }
  return sb;
}

Field apply_operator(const Generator& A, const Field& phi) {
  const auto& g = phi.geom;
  if (g.m != A.m) throw std::invalid_argument("apply_operator: component mismatch");
  const int M = A.mset.size();
  // Cache grad^b phi per multi-index.
  std::vector<Field> d_phi;
  d_phi.reserve(M);
  for (int b = 0; b < M; ++b) d_phi.push_back(multi_diff(phi, A.mset[b]));
  Field out(g);
  for (int a = 0; a < M; ++a) {
    Field acc(g);
    for (int b = 0; b < M; ++b) {
      const Eigen::MatrixXd Aab = A.block(a, b);
      if (Aab.isZero(0.0)) continue;
      for (std::int64_t x = 0; x < g.volume; ++x)
        for (int r = 0; r < g.m; ++r) {
          double v = 0;
          for (int s = 0; s < g.m; ++s) v += Aab(r, s) * d_phi[b].at(x, s);
          acc.at(x, r) += v;
        }
    }
    // Apply (grad^a)^* = product of backward differences.
    const MultiIndex& alpha = A.mset[a];
    for (int axis = 0; axis < g.d; ++axis)
      for (int rep = 0; rep < alpha[axis]; ++rep) acc = backward_diff(acc, axis);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += acc.values[i];
  }
  return out;
}

SpectralKernel green_spectral(const Generator& A, const TorusGeometry& g) {
  SpectralKernel out(g);
  const std::int64_t zero = out.zero_mode();
  const double omega = omega_envelope(A);
  for (std::int64_t idx = 0; idx < g.volume; ++idx) {
    if (idx == zero) continue;
    const std::vector<double> p = g.momentum(idx);
    const double p2 = g.momentum_norm(idx) * g.momentum_norm(idx);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(symbol(A, p));
    if (es.eigenvalues()(0) < 0.5 * omega * p2)
      throw std::runtime_error("green_spectral: ellipticity violation at a dual point");
    out.values[idx] = es.eigenvectors() *
                      es.eigenvalues().cwiseInverse().asDiagonal() *
                      es.eigenvectors().adjoint();
  }
  return out;
}

Eigen::MatrixXcd mat_fn(const Eigen::MatrixXcd& H, const SmoothFn& fn) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXd fl(es.eigenvalues().size());
  for (int i = 0; i < fl.size(); ++i) fl(i) = fn.f(es.eigenvalues()(i));
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {
constexpr double kDegenerate = 1e-7;
}

double divided_difference(const SmoothFn& fn, double x, double y) {
  if (std::abs(x - y) < kDegenerate * (1.0 + std::abs(x)))
    return fn.df(0.5 * (x + y));
  return (fn.f(x) - fn.f(y)) / (x - y);
}

double divided_difference2(const SmoothFn& fn, double x, double y, double z) {
  // Symmetric in (x, y, z); pivot on the widest gap.
  double a = x, b = y, c = z;
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  if (c - a < kDegenerate * (1.0 + std::abs(a)))
    return 0.5 * fn.d2f((a + b + c) / 3.0);
  return (divided_difference(fn, a, b) - divided_difference(fn, b, c)) / (a - c);
}

Eigen::MatrixXcd mat_fn_deriv(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& B,
                              const SmoothFn& fn, int ell) {
  if (ell != 1 && ell != 2) throw std::invalid_argument("mat_fn_deriv: ell must be 1 or 2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXcd& U = es.eigenvectors();
  const Eigen::MatrixXcd Bt = U.adjoint() * B * U;
  const int n = static_cast<int>(lam.size());
  Eigen::MatrixXcd out(n, n);
  if (ell == 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(i, j) = divided_difference(fn, lam(i), lam(j)) * Bt(i, j);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Complex acc(0);
        for (int c = 0; c < n; ++c)
          acc += divided_difference2(fn, lam(i), lam(c), lam(j)) * Bt(i, c) * Bt(c, j);
        out(i, j) = 2.0 * acc;
      }
  }
  return U * out * U.adjoint();
}

MatFnBoundReport verify_matfn_bound(const std::vector<Eigen::MatrixXcd>& Hs,
                                    const std::vector<Eigen::MatrixXcd>& Bs,
                                    const SmoothFn& fn, int ell) {
  if (Hs.size() != Bs.size()) throw std::invalid_argument("verify_matfn_bound: size mismatch");
  MatFnBoundReport rep;
  for (std::size_t k = 0; k < Hs.size(); ++k) {
    const Eigen::VectorXd lam = hermitian_eigenvalues(Hs[k]);
    const double bnorm = spectral_norm(Bs[k]);
    double sup = 0;
    const int grid = 512;
    for (int i = 0; i <= grid; ++i) {
      const double lo = lam(0), hi = lam(lam.size() - 1);
      const double x = lo + (hi - lo) * i / grid;
      sup = std::max(sup, std::abs(ell == 1 ? fn.df(x) : fn.d2f(x)));
    }
    const double denom = sup * std::pow(bnorm, ell);
    if (denom == 0) continue;
    const double num = spectral_norm(mat_fn_deriv(Hs[k], Bs[k], fn, ell));
    rep.max_ratio = std::max(rep.max_ratio, num / denom);
    ++rep.samples;
  }
  return rep;
}

}  // namespace frd
