#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace frd {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

/// Discrete torus (Z / side Z)^d with side = L^N (L odd), carrying m-component
/// fields. Sites and dual points share the same centered integer window
/// [-(side-1)/2, (side-1)/2]^d and the same linear indexing.
struct TorusGeometry {
  int L = 3;
  int N = 1;
  int d = 2;
  int m = 1;
  std::int64_t side = 3;
  std::int64_t volume = 9;

  TorusGeometry() = default;
  TorusGeometry(int L_, int N_, int d_, int m_);

  std::int64_t half() const { return (side - 1) / 2; }

  /// Canonical representative of an integer coordinate in the centered window.
  int wrap1(std::int64_t c) const;
  std::vector<int> wrap(const std::vector<int>& x) const;

  std::vector<int> site_coords(std::int64_t idx) const;
  std::int64_t site_index(const std::vector<int>& x) const;  // wraps first
  std::int64_t shift_index(std::int64_t idx, int axis, int step) const;
  std::int64_t negate_index(std::int64_t idx) const;

  /// d_inf distance of the canonical representative from the origin.
  int dinf(std::int64_t idx) const;
  int dinf(const std::vector<int>& x) const;

  /// Momentum p = 2*pi*a/side of the dual point with integer coordinates a.
  std::vector<double> momentum(std::int64_t idx) const;
  double momentum_norm(std::int64_t idx) const;

  bool operator==(const TorusGeometry& o) const {
    return L == o.L && N == o.N && d == o.d && m == o.m;
  }
};

struct Field {
  TorusGeometry geom;
  std::vector<double> values;  // site-major, m entries per site

  Field() = default;
  explicit Field(const TorusGeometry& g) : geom(g), values(g.volume * g.m, 0.0) {}
  double& at(std::int64_t site, int r) { return values[site * geom.m + r]; }
  double at(std::int64_t site, int r) const { return values[site * geom.m + r]; }
  double max_abs() const;
  /// Componentwise site average.
  Eigen::VectorXd mean() const;
};

struct SpectralField {
  TorusGeometry geom;
  std::vector<Complex> values;  // mode-major, m entries per mode

  SpectralField() = default;
  explicit SpectralField(const TorusGeometry& g) : geom(g), values(g.volume * g.m, Complex(0)) {}
  Complex& at(std::int64_t mode, int r) { return values[mode * geom.m + r]; }
  Complex at(std::int64_t mode, int r) const { return values[mode * geom.m + r]; }
};

/// Translation-invariant operator kernel in position space: one real m x m
/// matrix per site, entries averaging to zero over the torus. `tail` optionally
/// records the constant far-site value of a finite range kernel.
struct MatrixKernel {
  TorusGeometry geom;
  std::vector<Eigen::MatrixXd> values;
  std::optional<Eigen::MatrixXd> tail;

  MatrixKernel() = default;
  explicit MatrixKernel(const TorusGeometry& g)
      : geom(g), values(g.volume, Eigen::MatrixXd::Zero(g.m, g.m)) {}
  double max_norm() const;  // sup over sites of the spectral matrix norm
};

/// Fourier side of a translation-invariant operator: one Hermitian m x m
/// multiplier per dual point, zero at p = 0.
struct SpectralKernel {
  TorusGeometry geom;
  std::vector<Eigen::MatrixXcd> values;

  SpectralKernel() = default;
  explicit SpectralKernel(const TorusGeometry& g)
      : geom(g), values(g.volume, Eigen::MatrixXcd::Zero(g.m, g.m)) {}

  std::int64_t zero_mode() const;  // index of p = 0
  double hermitian_defect() const;
  double conjugate_symmetry_defect() const;
};

/// Separable DFT plan; forward is psi_hat(p) = sum_x exp(-i p.x) psi(x),
/// one dense length-side transform per axis. Odd sides only, no FFT needed
/// at the scales this library targets.
class DftPlan {
 public:
  explicit DftPlan(const TorusGeometry& g);
  /// In-place transform of a flat [site][channel] complex array.
  void forward(std::vector<Complex>& data, int channels) const;
  void inverse(std::vector<Complex>& data, int channels) const;

 private:
  void apply_axis(std::vector<Complex>& data, int channels, int axis,
                  const Eigen::MatrixXcd& mat) const;
  TorusGeometry geom_;
  Eigen::MatrixXcd fwd_;  // side x side twiddles
  Eigen::MatrixXcd inv_;
};

SpectralField dft(const Field& f);
Field idft_real(const SpectralField& s, double* imag_residue = nullptr);
SpectralKernel dft(const MatrixKernel& k);
MatrixKernel idft_real(const SpectralKernel& k, double* imag_residue = nullptr);

Field forward_diff(const Field& f, int axis);
Field backward_diff(const Field& f, int axis);
Field multi_diff(const Field& f, const MultiIndex& alpha);
MatrixKernel forward_diff(const MatrixKernel& k, int axis);
MatrixKernel multi_diff(const MatrixKernel& k, const MultiIndex& alpha);

double inner(const Field& a, const Field& b);

bool is_zero_mean(const Field& f, double tol = 1e-12);

/// Convolution (A * B)(x) = sum_y A(x - y) B(y); computed spectrally.
MatrixKernel convolve(const MatrixKernel& a, const MatrixKernel& b);
/// Direct double-sum route, O(volume^2); test oracle.
MatrixKernel convolve_direct(const MatrixKernel& a, const MatrixKernel& b);

/// Dyadic annulus index of a dual point: j = 0 when |p| > 1/L, otherwise the
/// N-capped j with L^(-j-1) < |p| <= L^(-j). Rejects p = 0.
int annulus_index(const TorusGeometry& g, std::int64_t mode);
int annulus_index_of_norm(const TorusGeometry& g, double pnorm);

/// Mode indices per annulus j = 0..N (p = 0 excluded; annuli may be empty).
std::vector<std::vector<std::int64_t>> annuli(const TorusGeometry& g);

/// Componentwise projection T_N -> T_Nbar (group homomorphism mod L^Nbar).
TorusGeometry coarse_geometry(const TorusGeometry& fine, int Nbar);
std::int64_t coarse_project(const TorusGeometry& fine, const TorusGeometry& coarse,
                            std::int64_t site);
/// Pull-back (tau phi)(x) = phi(pi x); preserves zero mean.
Field pullback(const TorusGeometry& fine, const Field& coarse_field);
/// Adjoint of the pull-back: fiber sums.
Field pullback_adjoint(const TorusGeometry& coarse, const Field& fine_field);

}  // namespace frd
