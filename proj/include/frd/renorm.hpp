#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "frd/bounds.hpp"
#include "frd/decomposition.hpp"
#include "frd/sampler.hpp"

namespace frd {

/// Scale-k measure transported to the coarse torus T_Nbar: the kernel is the
/// Fourier subsample of C_k_hat plus the constant tail correction
/// (L^((N-Nbar)d) - 1) * M with M = -tail (PSD). Restricted to any block of
/// diameter <= (L^Nbar - 1)/2 it has the same covariance as the fine measure.
struct CoarseKernel {
  TorusGeometry coarse;
  int parent_scale = 0;
  double lambda_tail = 0;
  Eigen::MatrixXd parentM;          // PSD tail matrix
  MatrixKernel kernel;              // position form on T_Nbar
  SpectralKernel spectral;          // subsampled modes, zero at p = 0
  Eigen::MatrixXd zero_mode_cov;    // D_hat(0) = lambda * L^(Nbar d) * M
  double route_defect = 0;          // Fourier-subsample vs fiber-sum disagreement
};

/// Builds the coarse kernel by both routes and cross-checks them; throws when
/// the routes disagree beyond 1e-9 relative. Requires k <= Nbar <= N.
CoarseKernel coarse_kernel(const Decomposition& dec, int k, int Nbar);

/// Coarse transport of a derivative kernel: pure Fourier subsample (the tail
/// matrix does not depend on the generator, so its derivative vanishes).
CoarseKernel coarse_kernel_of_derivative(const SpectralKernel& deriv, int k, int Nbar);

/// Dense covariance matrix over coarse sites: M[(x,r),(y,s)] = D(x - y)_{rs}.
Eigen::MatrixXd dense_covariance(const CoarseKernel& ck);

/// Functional of a field restricted to an explicit support set.
struct LocalFunctional {
  std::vector<std::int64_t> support;  // fine-torus sites
  std::function<double(const Eigen::VectorXd&)> eval;  // site-major x m values
  int diameter(const TorusGeometry& g) const;
};

/// Smallest Nbar with L^Nbar >= 2D, clamped to [k, N].
int choose_Nbar(const TorusGeometry& g, int k, int diameter);

struct LocalizationReport {
  int Nbar = 0;
  double fine_mean = 0, fine_se = 0;
  double coarse_mean = 0, coarse_se = 0;
  double combined_se = 0;
  bool pass = false;  // |difference| <= 3 combined standard errors
};
/// Monte Carlo check of the localization identity: E_{mu_k} F on T_N equals
/// E_nu F(tau psi) on T_Nbar. The coarse size follows choose_Nbar unless
/// forced; a support too large for the coarse torus is rejected.
LocalizationReport localization_check(const Decomposition& dec, int k,
                                      const LocalFunctional& F, int count,
                                      std::uint64_t seed, int workers = 1,
                                      int forced_Nbar = 0);

/// Exact two-point version: both measures give C_k(x0 - y0).
double localization_quadratic_gap(const Decomposition& dec, int k, std::int64_t x0,
                                  std::int64_t y0, int r, int s, int Nbar);

/// F(x) = <x, H x> - c0 on R^s.
struct QuadraticFunctional {
  Eigen::MatrixXd H;
  double c0 = 0;
};

struct DerivReport {
  int ell = 1;
  double weight_value = 0;   // expectation of F times the density-derivative weight
  double closed_form = 0;    // tr(H Mdot) resp. tr(H Mddot) for quadratic F
  double hs_dot = 0;         // ||M^(-1/2) Mdot M^(-1/2)||_HS
  double hs_ddot = 0;
  double mc_se = 0;          // Monte Carlo standard error (generic F only)
};

/// Derivative of a Gaussian expectation in the covariance: ell = 1 uses the
/// weight <x, M^-1 Mdot M^-1 x> - tr(M^-1 Mdot) (halved), ell = 2 the four-term
/// second-order weight. Quadratic functionals are integrated exactly via
/// Gaussian moments; generic functionals by Monte Carlo.
DerivReport gauss_expectation_deriv(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mdot,
                                    const std::optional<Eigen::MatrixXd>& Mddot,
                                    const QuadraticFunctional& F, int ell);
DerivReport gauss_expectation_deriv_mc(const Eigen::MatrixXd& M, const Eigen::MatrixXd& Mdot,
                                       const std::optional<Eigen::MatrixXd>& Mddot,
                                       const std::function<double(const Eigen::VectorXd&)>& F,
                                       int ell, int count, std::uint64_t seed);

/// Sum over p in T_Nbar \ {0} of ||C_hat^(-1/2) Cdot_hat C_hat^(-1/2)||_HS^2.
double hs_quotient_sum(const SpectralKernel& C, const SpectralKernel& Cdot, int Nbar);

struct SmoothnessRow {
  int D = 0;
  int Nbar = 0;
  int ell = 1;
  double deriv_abs = 0;
  double fnorm = 0;
  double ratio = 0;
};
struct SmoothnessReport {
  std::vector<SmoothnessRow> rows;
  double slope_ell1 = 0;  // fitted exponent of ratio in D
  double slope_ell2 = 0;
  int scale = 0;
};

/// Scaling of |d^ell E F| / ||F||_L2 across block supports of diameter D for
/// the scale k+1 measure, computed through the coarse localization route with
/// exact Gaussian moments (quadratic block energy for ell = 1, its square for
/// ell = 2). Expected exponents d/2 and d.
SmoothnessReport smoothness_suite(const Decomposition& final_dec, const BaseBuilder& builder_A,
                                  const Generator& Adot, int k,
                                  const std::vector<int>& diameters);

struct WhittleRow {
  int size = 0;
  double s = 0;
  double ratio = 0;  // E|<x,Ax> - tr A|^s / ||A||_HS^s
};
struct WhittleReport {
  std::vector<WhittleRow> rows;
  double fitted_C = 0;
  double id_s2_ratio = 0;  // A = Id, s = 2: expected 2
  double id_s2_se = 0;
  bool id_pass = false;
};
/// Monte Carlo moment-quotient scan over random matrices of the given sizes.
WhittleReport whittle_check(const std::vector<int>& sizes, int per_size,
                            const std::vector<double>& s_values, int count,
                            std::uint64_t seed);

}  // namespace frd
