#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace frd {

/// Gauss-Legendre rule on [-1, 1]; nodes via Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: n must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double p1 = 1.0, p2 = 0.0;
      auto legendre = [&](double xx) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * xx * p2 - j * p3) / (j + 1.0);
        }
        return n * (xx * p1 - p2) / (xx * xx - 1.0);  // P_n'(xx)
      };
      double dp = legendre(x);
      for (int it = 0; it < 100; ++it) {
        const double dx = p1 / dp;
        x -= dx;
        dp = legendre(x);
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }

  /// Integrates f over [a, b] with this rule.
  template <typename F>
  double integrate(double a, double b, F&& f) const {
    const double mid = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(mid + halfw * nodes[i]);
    return acc * halfw;
  }
};

/// Clenshaw evaluation of sum_j c[j] T_j(u), |u| <= 1 (small overshoot tolerated).
inline double clenshaw(const std::vector<double>& c, double u) {
  if (c.empty()) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const double b0 = 2.0 * u * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

/// Chebyshev series of the derivative: if f = sum c_j T_j then f' = sum d_j T_j,
/// via the recurrence d[j] = d[j+2] + 2(j+1) c[j+1].
inline std::vector<double> cheb_derivative(const std::vector<double>& c) {
  const std::size_t n = c.size();
  if (n <= 1) return {0.0};
  std::vector<double> d(n - 1, 0.0);
  for (std::size_t j = n - 1; j-- > 0;) {
    const double above = (j + 2 <= n - 2) ? d[j + 2] : 0.0;
    d[j] = above + 2.0 * (j + 1.0) * c[j + 1];
  }
  d[0] *= 0.5;
  return d;
}

/// Kahan compensated accumulator for long Monte Carlo reductions.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace frd
