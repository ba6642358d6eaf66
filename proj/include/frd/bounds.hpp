#pragma once

#include <string>
#include <vector>

#include "frd/decomposition.hpp"

namespace frd {

struct ReportRow {
  std::string suite;
  std::string quantity;
  int k = -1;
  int j = -1;
  double measured = 0;
  double bound = 0;
  double ratio = 0;
  bool pass = true;
};

struct BoundsReport {
  std::vector<ReportRow> rows;
  void add(ReportRow r) { rows.push_back(std::move(r)); }
  bool all_pass() const;
  /// Largest ratio among rows of a suite (fitted upper constant).
  double fitted_max(const std::string& suite) const;
  /// Smallest ratio among rows of a suite (fitted lower constant).
  double fitted_min(const std::string& suite) const;
  const ReportRow* find(const std::string& suite, const std::string& quantity) const;
};

/// Per-annulus envelope measurements for a base decomposition: upper and lower
/// Fourier envelopes per (k, j) cell, the k = 1 floor, A-derivative envelopes
/// along the supplied directions, and position-space decay slopes.
BoundsReport verify_akm_bounds(const BaseBuilder& builder, const Decomposition& dec,
                               const std::vector<Generator>& directions, int ell_max);

/// Envelope and quotient measurements for a final decomposition: the global
/// lower envelope, the ntilde-governed derivative envelopes, the quotient
/// decay fit in (k - j), and the tripled discrete-derivative constant check
/// against fitted base constants.
BoundsReport verify_final_bounds(const Decomposition& final_dec, const BaseBuilder& builder_A,
                                 const Decomposition& base_A, const Decomposition& base_ref,
                                 const std::vector<Generator>& directions);

/// min over k <= N+1 and p != 0 of lambda_min(C_hat_{A,k}(p)) divided by the
/// final-kind lower envelope
///   L^(-2(d+nt)-1) L^(2j) L^((k-j)(-d+1-n))   (j < k)
///   L^(-2(d+nt)-1) L^(2k)                     (j >= k).
double final_lower_envelope_c(const Decomposition& final_dec);

struct QuotientStats {
  double slope = 0;        // fit of log max-quotient against (k - j) log L, j < k
  double slope_target = 0; // n - ntilde
  double spread_near = 0;  // max/min of the per-cell quotient over j >= k cells
  int far_cells = 0;
  int near_cells = 0;
};
/// Quotient ||dC_hat/ds|| * ||C_hat^{-1}|| statistics per annulus cell; the
/// per-cell value is the sup over the supplied direction ensemble, matching
/// the sup over ||Adot|| <= 1 in the displayed bounds.
QuotientStats quotient_decay_stats(const Decomposition& dec,
                                   const std::vector<std::vector<SpectralKernel>>& derivs);

/// First scale whose filters carry enough polynomial degree to resolve the
/// spectrum: degree floor(L^k / 2R) >= 8. Below it the kernels sit in the
/// flat, preasymptotic part of the filter family and scaling fits are
/// meaningless.
int scaling_window_kmin(const TorusGeometry& g, int range);

/// Regression slope of log sup_x ||grad^alpha C_k|| against k. Fits over the
/// scaling window [k_min, N] when it holds at least two scales, otherwise over
/// every scale. With derivative position kernels supplied, measures the D^ell
/// variant.
double position_decay_slope(const Decomposition& dec, const MultiIndex& alpha,
                            const std::vector<MatrixKernel>* deriv_position = nullptr,
                            int k_min = 1);

/// sup_x ||grad^alpha K|| for a position kernel.
double position_sup_norm(const MatrixKernel& kernel, const MultiIndex& alpha);

/// Position kernels of derivative spectral kernels (idft per scale).
std::vector<MatrixKernel> derivative_position_kernels(const std::vector<SpectralKernel>& deriv);

}  // namespace frd
