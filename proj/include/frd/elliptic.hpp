#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "frd/lattice.hpp"

namespace frd {

/// Finite set of multi-indices labelling the discrete derivatives a generator
/// couples; must contain all first-order indices e_1..e_d. Stored in
/// lexicographic order, which also fixes the block ordering of generators.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  MultiIndexSet(int d, std::vector<MultiIndex> indices);

  int d() const { return d_; }
  int size() const { return static_cast<int>(indices_.size()); }
  int range() const { return R_; }  // max |alpha|_inf
  const MultiIndex& operator[](int i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  int find(const MultiIndex& alpha) const;  // -1 if absent

  static MultiIndexSet gradients(int d);            // {e_1, ..., e_d}
  static MultiIndexSet gradients_plus(int d);       // adds e_1 + e_2 and 2 e_1
  bool operator==(const MultiIndexSet& o) const {
    return d_ == o.d_ && indices_ == o.indices_;
  }

 private:
  int d_ = 0;
  int R_ = 0;
  std::vector<MultiIndex> indices_;
};

/// Symmetric generator A on G = (R^m)^M, stored as the dense block matrix in
/// the lexicographic order of the multi-index set. omega0 / Omega0 are the
/// declared ellipticity constants of the family the generator belongs to.
struct Generator {
  MultiIndexSet mset;
  int m = 1;
  Eigen::MatrixXd blocks;  // (m * |M|) x (m * |M|), symmetric
  double omega0 = 1.0;
  double Omega0 = 1.0;

  int dim() const { return m * mset.size(); }
  Eigen::Block<const Eigen::MatrixXd> block(int a, int b) const {
    return blocks.block(a * m, b * m, m, m);
  }
  double op_norm() const;
  bool is_symmetric(double tol = 1e-12) const;
};

Generator laplacian_generator(const MultiIndexSet& mset, int m, double omega0 = 1.0,
                              double Omega0 = 1.0);
Generator diagonal_generator(const MultiIndexSet& mset, int m,
                             const std::vector<double>& gradient_coeffs, double omega0,
                             double Omega0);
/// omega0 * P_grad + (Omega0 - omega0) * u * S with S a random PSD contraction;
/// lies in the family (omega0, Omega0) by construction.
Generator random_generator(const MultiIndexSet& mset, int m, double omega0, double Omega0,
                           std::uint64_t seed);
/// Random symmetric direction with unit operator norm.
Generator random_direction(const MultiIndexSet& mset, int m, std::uint64_t seed);

/// q(p)^alpha = prod_i (e^{i p_i} - 1)^{alpha_i}.
Complex q_factor(const std::vector<double>& p, const MultiIndex& alpha);
/// |q(p)|^2 over the gradient indices.
double q_norm_sq(const std::vector<double>& p);

/// Fourier symbol A_hat(p) = sum_{a,b} conj(q^a) A_ab q^b; Hermitian, zero at 0.
Eigen::MatrixXcd symbol(const Generator& A, const std::vector<double>& p);

/// Spectral envelope constants of the family: all symbol eigenvalues lie in
/// [omega |p|^2, Omega |p|^2].
double omega_envelope(const Generator& A);  // 4 omega0 / pi^2
double Omega_envelope(const Generator& A);  // Omega0 |M| (d pi^2)^(dR)

/// Sharp family-wide spectral cap: ||A_hat(p)|| <= ||A|| sum_a |q(p)^a|^2 and
/// each |q_i|^2 <= 4, so max_p lambda_max(A_hat(p)) <= Omega0 sum_a 4^|a|_1
/// for every generator of the family. Much tighter than the |M| (d pi^2)^(dR)
/// chain and still independent of the individual generator.
double family_spectral_cap(const MultiIndexSet& mset, double Omega0);

struct SymbolBounds {
  double omega = 0, Omega = 0;          // envelope constants
  double measured_min = 0;              // min over p != 0 of lambda_min / |p|^2
  double measured_max = 0;              // max over p != 0 of lambda_max / |p|^2
  bool pass(double tol = 1e-12) const {
    return measured_min >= omega * (1 - tol) && measured_max <= Omega * (1 + tol);
  }
};
SymbolBounds verify_symbol_bounds(const Generator& A, const TorusGeometry& g);

/// Position-space application of the elliptic difference operator
/// sum (grad^a)^* A_ab grad^b; agrees with spectral multiplication by the symbol.
Field apply_operator(const Generator& A, const Field& phi);

/// Green's function multiplier: C_hat(p) = A_hat(p)^{-1} for p != 0, 0 at p = 0.
/// Throws if some eigenvalue drops below omega |p|^2 / 2.
SpectralKernel green_spectral(const Generator& A, const TorusGeometry& g);

/// Scalar function together with two derivatives, as needed by the divided
/// difference calculus below.
struct SmoothFn {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

/// f(H) for Hermitian H via eigendecomposition.
Eigen::MatrixXcd mat_fn(const Eigen::MatrixXcd& H, const SmoothFn& fn);

/// d^l/ds^l f(H + sB) at s = 0 for Hermitian H, B and l in {1, 2}, evaluated
/// with first/second divided differences on eigenvalue pairs/triples.
/// Near-degenerate eigenvalues (gap < 1e-7 (1 + |lambda|)) switch to
/// derivative values to avoid cancellation.
Eigen::MatrixXcd mat_fn_deriv(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& B,
                              const SmoothFn& fn, int ell);

/// Divided differences with the degeneracy rules above; exposed for tests.
double divided_difference(const SmoothFn& fn, double x, double y);
double divided_difference2(const SmoothFn& fn, double x, double y, double z);

struct MatFnBoundReport {
  double max_ratio = 0;      // ||d^l f|| / (sup |f^(l)| ||B||^l), max over ensemble
  int samples = 0;
};
/// Measures the divided-difference derivative against the scalar envelope
/// sup_{[lambda_1, lambda_m]} |f^(l)|; reports the fitted constant.
MatFnBoundReport verify_matfn_bound(const std::vector<Eigen::MatrixXcd>& Hs,
                                    const std::vector<Eigen::MatrixXcd>& Bs,
                                    const SmoothFn& fn, int ell);

}  // namespace frd
