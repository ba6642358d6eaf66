#include <doctest.h>

#include <cmath>

#include "frd/elliptic.hpp"
#include "frd/linalg.hpp"
#include "frd/rng.hpp"
#include "frd/wfamily.hpp"

using namespace frd;

namespace {

Field random_zero_mean(const TorusGeometry& g, std::uint64_t seed) {
  CounterRng rng(seed);
  Field f(g);
  for (std::int64_t x = 0; x < g.volume; ++x)
    for (int r = 0; r < g.m; ++r) f.at(x, r) = rng.gaussian(x, r);
  const Eigen::VectorXd mu = f.mean();
  for (std::int64_t x = 0; x < g.volume; ++x)
    for (int r = 0; r < g.m; ++r) f.at(x, r) -= mu(r);
  return f;
}

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXcd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      H(i, j) = Complex(rng.gaussian(i, j, 0), rng.gaussian(i, j, 1));
  return 0.5 * (H + H.adjoint().eval());
}

}  // namespace

TEST_CASE("multi-index sets: ordering, range, validation") {
  const MultiIndexSet ms = MultiIndexSet::gradients_plus(2);
  CHECK(ms.size() == 4);
  CHECK(ms.range() == 2);
  CHECK(ms.find({1, 0}) >= 0);
  CHECK(ms.find({2, 0}) >= 0);
  CHECK(ms.find({0, 2}) == -1);
  CHECK_THROWS(MultiIndexSet(2, {{1, 1}}));  // first-order indices missing
  CHECK_THROWS(MultiIndexSet(2, {{0, 0}, {1, 0}, {0, 1}}));
}

TEST_CASE("q factor values and envelope") {
  const std::vector<double> p = {2.0 * M_PI / 3.0, 0.0};
  const Complex q = q_factor(p, {1, 0});
  CHECK(std::abs(q - (std::polar(1.0, 2.0 * M_PI / 3.0) - 1.0)) < 1e-15);
  CHECK(std::norm(q) == doctest::Approx(3.0));

  const Complex q2 = q_factor(p, {2, 0});
  CHECK(std::abs(q2 - q * q) < 1e-15);

  TorusGeometry g(3, 2, 2, 1);
  for (std::int64_t idx = 0; idx < g.volume; ++idx) {
    const double pn2 = g.momentum_norm(idx) * g.momentum_norm(idx);
    const double qn2 = q_norm_sq(g.momentum(idx));
    CHECK(qn2 >= 4.0 / (M_PI * M_PI) * pn2 - 1e-12);
    CHECK(qn2 <= pn2 + 1e-12);
  }
}

TEST_CASE("symbol of the Laplacian") {
  for (int m : {1, 2}) {
    const MultiIndexSet ms = MultiIndexSet::gradients(2);
    const Generator lap = laplacian_generator(ms, m);
    const std::vector<double> p = {2.0 * M_PI / 3.0, 0.0};
    const Eigen::MatrixXcd s = symbol(lap, p);
    CHECK((s - 3.0 * Eigen::MatrixXcd::Identity(m, m)).norm() < 1e-12);
    CHECK(symbol(lap, {0.0, 0.0}).norm() < 1e-15);
  }
}

TEST_CASE("symbol eigenvalue window over the whole dual torus") {
  TorusGeometry g(3, 2, 2, 2);
  const MultiIndexSet ms = MultiIndexSet::gradients_plus(2);
  const Generator A = random_generator(ms, 2, 0.5, 2.0, 42);
  CHECK(A.is_symmetric());
  CHECK(A.op_norm() <= 2.0 + 1e-12);
  const SymbolBounds sb = verify_symbol_bounds(A, g);
  CHECK(sb.pass());
  // Conjugate symmetry of the symbol.
  for (std::int64_t idx : {std::int64_t(5), std::int64_t(17), std::int64_t(33)}) {
    const auto p = g.momentum(idx);
    const auto pm = g.momentum(g.negate_index(idx));
    CHECK((symbol(A, pm) - symbol(A, p).conjugate()).norm() < 1e-12);
  }
}

TEST_CASE("operator application: positivity, spectral agreement, range") {
  TorusGeometry g(3, 1, 2, 2);
  const MultiIndexSet ms = MultiIndexSet::gradients_plus(2);
  const Generator A = random_generator(ms, 2, 0.5, 2.0, 7);
  const Field phi = random_zero_mean(g, 21);

  // Quadratic form dominates the gradient energy.
  const Field Aphi = apply_operator(A, phi);
  double grad_sq = 0;
  for (int axis = 0; axis < g.d; ++axis) {
    const Field df = forward_diff(phi, axis);
    grad_sq += inner(df, df);
  }
  CHECK(inner(phi, Aphi) >= A.omega0 * grad_sq - 1e-10);

  // Position route equals the spectral route.
  SpectralField ph = dft(phi);
  for (std::int64_t p = 0; p < g.volume; ++p) {
    const Eigen::MatrixXcd s = symbol(A, g.momentum(p));
    Eigen::VectorXcd v(g.m);
    for (int r = 0; r < g.m; ++r) v(r) = ph.at(p, r);
    const Eigen::VectorXcd w = s * v;
    for (int r = 0; r < g.m; ++r) ph.at(p, r) = w(r);
  }
  const Field via_fourier = idft_real(ph);
  double worst = 0;
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    worst = std::max(worst, std::abs(via_fourier.values[i] - Aphi.values[i]));
  CHECK(worst <= 1e-10 * std::max(1.0, Aphi.max_abs()));

  // Finite range of the operator itself.
  TorusGeometry big(3, 2, 2, 1);
  const Generator lap1 = laplacian_generator(MultiIndexSet::gradients(2), 1);
  Field delta(big);
  delta.at(big.site_index({0, 0}), 0) = 1.0;
  const Field col = apply_operator(lap1, delta);
  for (std::int64_t x = 0; x < big.volume; ++x)
    if (big.dinf(x) > lap1.mset.range()) CHECK(std::abs(col.at(x, 0)) < 1e-14);
}

TEST_CASE("Green's function inverts the operator on zero-mean fields") {
  TorusGeometry g(3, 1, 2, 1);
  const Generator lap = laplacian_generator(MultiIndexSet::gradients(2), 1);
  const SpectralKernel green = green_spectral(lap, g);
  const std::int64_t q = g.site_index({1, 0});
  CHECK(green.values[q](0, 0).real() == doctest::Approx(1.0 / 3.0));

  const Field phi = random_zero_mean(g, 31);
  SpectralField ph = dft(phi);
  for (std::int64_t p = 0; p < g.volume; ++p) {
    Eigen::VectorXcd v(g.m);
    for (int r = 0; r < g.m; ++r) v(r) = ph.at(p, r);
    const Eigen::VectorXcd w = green.values[p] * v;
    for (int r = 0; r < g.m; ++r) ph.at(p, r) = w(r);
  }
  const Field green_phi = idft_real(ph);
  const Field round = apply_operator(lap, green_phi);
  double worst = 0;
  for (std::size_t i = 0; i < phi.values.size(); ++i)
    worst = std::max(worst, std::abs(round.values[i] - phi.values[i]));
  CHECK(worst <= 1e-10 * std::max(1.0, phi.max_abs()));
}

TEST_CASE("matrix functions: exact identities") {
  const Eigen::MatrixXcd H = random_hermitian(3, 1);
  const Eigen::MatrixXcd B = random_hermitian(3, 2);
  const SmoothFn ident{[](double x) { return x; }, [](double) { return 1.0; },
                       [](double) { return 0.0; }};
  CHECK((mat_fn_deriv(H, B, ident, 1) - B).norm() < 1e-12);

  const SmoothFn square{[](double x) { return x * x; }, [](double x) { return 2.0 * x; },
                        [](double) { return 2.0; }};
  CHECK((mat_fn_deriv(H, B, square, 1) - (H * B + B * H)).norm() < 1e-10);
  // Second derivative of x^2 along B is the constant 2 B^2.
  CHECK((mat_fn_deriv(H, B, square, 2) - 2.0 * B * B).norm() < 1e-10);
}

TEST_CASE("matrix function derivative matches finite differences for a spectral filter") {
  WFamily::Config cfg;
  cfg.B = 4.0;
  const WFamily wf(cfg);
  const SmoothFn fn = wf.node_fn(wf.cheb_coeffs(7.3));

  // Eigenvalues inside (0, B).
  Eigen::MatrixXcd H = random_hermitian(3, 3);
  H = 0.3 * H + 2.0 * Eigen::MatrixXcd::Identity(3, 3);
  Eigen::MatrixXcd B = random_hermitian(3, 4);
  B /= spectral_norm(B);

  const double h = 1e-4;
  for (int ell : {1, 2}) {
    const Eigen::MatrixXcd analytic = mat_fn_deriv(H, B, fn, ell);
    Eigen::MatrixXcd fd;
    if (ell == 1)
      fd = (mat_fn(H + h * B, fn) - mat_fn(H - h * B, fn)) / (2.0 * h);
    else
      fd = (mat_fn(H + h * B, fn) - 2.0 * mat_fn(H, fn) + mat_fn(H - h * B, fn)) / (h * h);
    CHECK((analytic - fd).norm() <= 2e-6 * std::max(1.0, analytic.norm()));
  }
}

TEST_CASE("near-degenerate eigenvalues stay accurate") {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(3, 3);
  H(0, 0) = 1.0;
  H(1, 1) = 1.0 + 2e-9;
  H(2, 2) = 2.5;
  const Eigen::MatrixXcd B = random_hermitian(3, 5);
  const SmoothFn cube{[](double x) { return x * x * x; },
                      [](double x) { return 3.0 * x * x; }, [](double x) { return 6.0 * x; }};
  const Eigen::MatrixXcd analytic = mat_fn_deriv(H, B, cube, 1);
  const Eigen::MatrixXcd exact = H * H * B + H * B * H + B * H * H;
  CHECK((analytic - exact).norm() <= 1e-6 * exact.norm());
}

TEST_CASE("derivative is linear in the direction and respects conjugation") {
  const Eigen::MatrixXcd H = random_hermitian(3, 6);
  const Eigen::MatrixXcd B1 = random_hermitian(3, 7), B2 = random_hermitian(3, 8);
  const SmoothFn expfn{[](double x) { return std::exp(0.3 * x); },
                       [](double x) { return 0.3 * std::exp(0.3 * x); },
                       [](double x) { return 0.09 * std::exp(0.3 * x); }};
  const Eigen::MatrixXcd lin =
      mat_fn_deriv(H, B1 + 2.0 * B2, expfn, 1) -
      (mat_fn_deriv(H, B1, expfn, 1) + 2.0 * mat_fn_deriv(H, B2, expfn, 1));
  CHECK(lin.norm() < 1e-10);

  // f(U H U*) = U f(H) U* for a unitary from a Hermitian exponential.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(random_hermitian(3, 9));
  Eigen::VectorXcd phases(3);
  for (int i = 0; i < 3; ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  const Eigen::MatrixXcd U =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  const Eigen::MatrixXcd lhs = mat_fn(U * H * U.adjoint(), expfn);
  const Eigen::MatrixXcd rhs = U * mat_fn(H, expfn) * U.adjoint();
  CHECK((lhs - rhs).norm() < 1e-10 * rhs.norm());
}

TEST_CASE("matrix derivative envelope constants") {
  // Linear f: second derivative vanishes identically.
  const SmoothFn lin{[](double x) { return 2.0 * x + 1.0; }, [](double) { return 2.0; },
                     [](double) { return 0.0; }};
  const Eigen::MatrixXcd H = random_hermitian(3, 10), B = random_hermitian(3, 11);
  CHECK(mat_fn_deriv(H, B, lin, 2).norm() < 1e-12);

  // Scalar case: the ratio is exactly one (chain rule).
  const SmoothFn cube{[](double x) { return x * x * x; },
                      [](double x) { return 3.0 * x * x; }, [](double x) { return 6.0 * x; }};
  std::vector<Eigen::MatrixXcd> hs, bs;
  for (int i = 0; i < 20; ++i) {
    hs.push_back(random_hermitian(1, 100 + i));
    bs.push_back(random_hermitian(1, 200 + i));
  }
  const MatFnBoundReport scalar = verify_matfn_bound(hs, bs, cube, 1);
  CHECK(scalar.max_ratio <= 1.0 + 1e-9);

  // Ensemble of 100 random pairs with a spectral filter: finite fitted constant.
  WFamily::Config cfg;
  cfg.B = 4.0;
  const WFamily wf(cfg);
  const SmoothFn fn = wf.node_fn(wf.cheb_coeffs(6.0));
  hs.clear();
  bs.clear();
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXcd h = random_hermitian(3, 300 + i);
    hs.push_back(0.3 * h + 2.0 * Eigen::MatrixXcd::Identity(3, 3));
    Eigen::MatrixXcd b = random_hermitian(3, 400 + i);
    bs.push_back(b / spectral_norm(b));
  }
  for (int ell : {1, 2}) {
    const MatFnBoundReport rep = verify_matfn_bound(hs, bs, fn, ell);
    CHECK(rep.samples == 100);
    CHECK(std::isfinite(rep.max_ratio));
    CHECK(rep.max_ratio > 0);
  }
}

TEST_CASE("generator serialization shape is symmetric") {
  const MultiIndexSet ms = MultiIndexSet::gradients_plus(2);
  const Generator A = random_generator(ms, 2, 0.5, 2.0, 99);
  for (int a = 0; a < ms.size(); ++a)
    for (int b = 0; b < ms.size(); ++b)
      CHECK((A.block(a, b) - A.block(b, a).transpose()).norm() < 1e-14);
}
