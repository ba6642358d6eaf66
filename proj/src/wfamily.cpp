#include "frd/wfamily.hpp"

#include <cmath>
#include <stdexcept>

#include "frd/numeric.hpp"

namespace frd {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

double theta_of_lambda(double lambda, double B) {
  const double u = 1.0 - lambda / (2.0 * B);
  return std::acos(std::clamp(u, -1.0, 1.0));
}
}  // namespace

double WFamily::bump(double u) {
  const double s = 2.0 * u;
  const double w = 1.0 - s * s;
  if (w <= 0.0) return 0.0;
  return std::exp(-1.0 / w);
}

WFamily::WFamily(const Config& cfg) : cfg_(cfg) {
  if (cfg_.B <= 0) throw std::invalid_argument("WFamily: B must be positive");
  GaussLegendre gl(cfg_.kappa_quad_nodes);
  kq_nodes_.resize(gl.nodes.size());
  kq_weights_.resize(gl.nodes.size());
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    kq_nodes_[i] = 0.5 * gl.nodes[i];  // map [-1,1] -> [-1/2,1/2]
    kq_weights_[i] = 0.5 * gl.weights[i] * bump(kq_nodes_[i]);
  }
  // Autocorrelation table on [0, 1].
  rho_table_.resize(cfg_.rho_table_size);
  const double h = 1.0 / (cfg_.rho_table_size - 1);
  for (int i = 0; i < cfg_.rho_table_size; ++i) rho_table_[i] = rho_direct(i * h);
  // Calibration: c_norm = lambda_ref * int t W_t(lambda_ref) dt with the raw
  // coefficients; dividing the series by it pins int t W_t dt = 1/lambda.
  const double lambda_ref = cfg_.calib_lambda_frac * cfg_.B;
  c_norm_ = lambda_ref * integral_tW_raw(lambda_ref);
  if (!(c_norm_ > 0)) throw std::runtime_error("WFamily: calibration failed");
}

double WFamily::kappa(double x) const {
  double acc = 0;
  for (std::size_t i = 0; i < kq_nodes_.size(); ++i)
    acc += kq_weights_[i] * std::cos(kq_nodes_[i] * x);
  return acc / kTwoPi;
}

double WFamily::rho_direct(double w) const {
  const double aw = std::abs(w);
  if (aw >= 1.0) return 0.0;
  // Overlap of supports: u in [aw - 1/2, 1/2].
  const double lo = aw - 0.5, hi = 0.5;
  GaussLegendre gl(cfg_.rho_quad_nodes);
  return gl.integrate(lo, hi, [&](double u) { return bump(u) * bump(aw - u); });
}

double WFamily::rho(double w) const {
  const double aw = std::abs(w);
  if (aw >= 1.0) return 0.0;
  const int M = cfg_.rho_table_size;
  const double h = 1.0 / (M - 1);
  const double s = aw / h;
  int i1 = static_cast<int>(std::floor(s));
  if (i1 > M - 2) i1 = M - 2;
  // Centered four-point cubic Lagrange; mirror across 0, zero beyond 1.
  const double x = s - i1;
  auto tab = [&](int i) -> double {
    if (i < 0) return rho_table_[-i];
    if (i >= M) return 0.0;
    return rho_table_[i];
  };
  const double f0 = tab(i1 - 1), f1 = tab(i1), f2 = tab(i1 + 1), f3 = tab(i1 + 2);
  const double a = -f0 / 6 + f1 / 2 - f2 / 2 + f3 / 6;
  const double b = f0 / 2 - f1 + f2 / 2;
  const double c = -f0 / 3 - f1 / 2 + f2 - f3 / 6;
  const double d = f1;
  return ((a * x + b) * x + c) * x + d;
}

std::vector<double> WFamily::cheb_coeffs_raw(double t) const {
  if (!(t > 0)) throw std::invalid_argument("cheb_coeffs: t must be positive");
  const int deg = static_cast<int>(std::floor(t));
  std::vector<double> c(deg + 1, 0.0);
  const double pref = 1.0 / (4.0 * kPi * kPi * t);
  c[0] = pref * rho(0.0);
  for (int j = 1; j <= deg; ++j) c[j] = 2.0 * pref * rho(j / t);
  return c;
}

std::vector<double> WFamily::cheb_coeffs(double t) const {
  std::vector<double> c = cheb_coeffs_raw(t);
  for (double& v : c) v /= c_norm_;
  return c;
}

double WFamily::eval(double t, double lambda) const {
  const std::vector<double> c = cheb_coeffs(t);
  return clenshaw(c, 1.0 - lambda / (2.0 * cfg_.B));
}

double WFamily::eval_dlambda(double t, double lambda, int order) const {
  std::vector<double> c = cheb_coeffs(t);
  for (int k = 0; k < order; ++k) c = cheb_derivative(c);
  const double chain = std::pow(-1.0 / (2.0 * cfg_.B), order);
  return chain * clenshaw(c, 1.0 - lambda / (2.0 * cfg_.B));
}

double WFamily::eval_direct_raw(double t, double lambda) const {
  const double theta = theta_of_lambda(lambda, cfg_.B);
  double acc = phi(theta * t);
  for (int n = 1; n < 100000; ++n) {
    const double up = phi((theta - kTwoPi * n) * t);
    const double dn = phi((theta + kTwoPi * n) * t);
    acc += up + dn;
    if (up + dn < 1e-18 * (1.0 + acc) && kTwoPi * n * t > 8.0) break;
  }
  return acc;
}

double WFamily::integral_tW_raw(double lambda) const {
  const double theta = theta_of_lambda(lambda, cfg_.B);
  if (theta <= 0) throw std::invalid_argument("integral_tW: lambda must be positive");
  GaussLegendre gl(cfg_.panel_nodes);
  double total = 0;
  int quiet = 0;
  const int max_panels = 1 << 20;
  for (int panel = 0; panel < max_panels; ++panel) {
    const double a = panel * cfg_.panel_width;
    const double b = a + cfg_.panel_width;
    const double part = gl.integrate(a, b, [&](double t) {
      const std::vector<double> c = cheb_coeffs_raw(t);
      return t * clenshaw(c, 1.0 - lambda / (2.0 * cfg_.B));
    });
    total += part;
    // The integrand is nonnegative up to roundoff; once past the main mass
    // (t theta large) consecutive negligible panels terminate the sum.
    if (b * theta > 12.0 && std::abs(part) < cfg_.tail_rel * std::abs(total)) {
      if (++quiet >= 4) break;
    } else {
      quiet = 0;
    }
  }
  return total;
}

double WFamily::integral_tW(double lambda) const {
  return integral_tW_raw(lambda) / c_norm_;
}

double WFamily::integral_tW_window(double lambda, double t_lo, double t_hi) const {
  GaussLegendre gl(cfg_.panel_nodes);
  const int panels =
      std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) / cfg_.panel_width)));
  double total = 0;
  for (int i = 0; i < panels; ++i) {
    const double a = t_lo + (t_hi - t_lo) * i / panels;
    const double b = t_lo + (t_hi - t_lo) * (i + 1) / panels;
    total += gl.integrate(a, b, [&](double t) {
      const std::vector<double> c = cheb_coeffs_raw(t);
      return t * clenshaw(c, 1.0 - lambda / (2.0 * cfg_.B));
    });
  }
  return total / c_norm_;
}

SmoothFn WFamily::node_fn(const std::vector<double>& coeffs) const {
  const double B = cfg_.B;
  auto d1 = cheb_derivative(coeffs);
  auto d2 = cheb_derivative(d1);
  const double ch = -1.0 / (2.0 * B);
  return SmoothFn{
      [coeffs, B](double lam) { return clenshaw(coeffs, 1.0 - lam / (2.0 * B)); },
      [d1, B, ch](double lam) { return ch * clenshaw(d1, 1.0 - lam / (2.0 * B)); },
      [d2, B, ch](double lam) { return ch * ch * clenshaw(d2, 1.0 - lam / (2.0 * B)); }};
}

}  // namespace frd
