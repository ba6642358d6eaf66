#pragma once

#include <vector>

#include "frd/elliptic.hpp"

namespace frd {

/// Scale-indexed family of spectral filters W_t on [0, B] with
///   - W_t a polynomial of degree at most t (finite propagation),
///   - W_t >= 0,
///   - integral_0^inf t W_t(lambda) dt = 1/lambda after calibration,
///   - W_t(lambda) >= eps > 0 for lambda <= B min(1, t^-2),
///   - quantitative decay in t^2 lambda.
///
/// Construction: W_t(lambda) = sum_n phi(arccos(1 - lambda/2B) t - 2 pi n t)
/// with phi = kappa^2 and kappa_hat a smooth even bump supported in
/// [-1/2, 1/2]. The 2 pi-periodization has the cosine series
///   W_t(lambda) = sum_j c_j T_j(1 - lambda/2B),
/// and the coefficients come from the autocorrelation of kappa_hat at
/// frequency j/t, which vanishes for j > t — that support cutoff is what
/// makes W_t a polynomial of degree <= t.
class WFamily {
 public:
  struct Config {
    double B = 1.0;              // spectral cap, must dominate the symbol spectrum
    int kappa_quad_nodes = 2048; // cosine-integral rule for kappa
    int rho_quad_nodes = 96;     // per-point rule when building the table
    int rho_table_size = 8193;   // autocorrelation samples on [0, 1]
    int panel_nodes = 16;        // Gauss-Legendre nodes per t-panel
    double panel_width = 2.0;    // t-panel width for the calibration integral
    double tail_rel = 1e-13;     // relative stop threshold for t-integrals
    double calib_lambda_frac = 0.1;  // calibration point lambda_ref = frac * B
  };

  explicit WFamily(const Config& cfg);

  double B() const { return cfg_.B; }
  double c_norm() const { return c_norm_; }

  /// The bump profile kappa_hat: exp(-1/(1-(2u)^2)) on |u| < 1/2, else 0.
  static double bump(double u);

  /// kappa(x) = (1/2pi) int kappa_hat(u) cos(u x) du.
  double kappa(double x) const;
  double phi(double x) const { return kappa(x) * kappa(x); }

  /// Autocorrelation rho(w) = int kappa_hat(u) kappa_hat(w - u) du, |w| <= 1.
  double rho(double w) const;         // table + local cubic interpolation
  double rho_direct(double w) const;  // direct quadrature, test oracle

  /// Chebyshev coefficients of W_t; calibrated unless raw. Length floor(t)+1.
  std::vector<double> cheb_coeffs(double t) const;
  std::vector<double> cheb_coeffs_raw(double t) const;

  /// Clenshaw evaluation of the calibrated W_t(lambda), lambda in [0, B].
  double eval(double t, double lambda) const;
  /// l-th lambda-derivative of the calibrated W_t (l <= 2).
  double eval_dlambda(double t, double lambda, int order) const;
  /// Direct periodized sum (uncalibrated); independent oracle for the series.
  double eval_direct_raw(double t, double lambda) const;

  /// High-resolution quadrature of int_0^inf t W_t(lambda) dt (calibrated);
  /// after calibration this equals 1/lambda up to quadrature error.
  double integral_tW(double lambda) const;

  /// Same integral restricted to [t_lo, t_hi] (calibrated).
  double integral_tW_window(double lambda, double t_lo, double t_hi) const;

  /// Scalar function view of the calibrated W_t built from a fixed coefficient
  /// vector; supplies the two derivatives needed by the matrix calculus.
  SmoothFn node_fn(const std::vector<double>& coeffs) const;

 private:
  double integral_tW_raw(double lambda) const;

  Config cfg_;
  std::vector<double> kq_nodes_, kq_weights_;  // kappa quadrature on [-1/2, 1/2]
  std::vector<double> rho_table_;              // rho on uniform grid over [0, 1]
  double c_norm_ = 1.0;
};

}  // namespace frd
