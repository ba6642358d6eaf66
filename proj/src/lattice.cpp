#include "frd/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "frd/linalg.hpp"

namespace frd {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (1LL << 40) / base) throw std::overflow_error("torus volume too large");
    r *= base;
  }
  return r;
}
}  // namespace

TorusGeometry::TorusGeometry(int L_, int N_, int d_, int m_) : L(L_), N(N_), d(d_), m(m_) {
  if (L < 3 || L % 2 == 0) throw std::invalid_argument("TorusGeometry: L must be odd and >= 3");
  if (N < 1) throw std::invalid_argument("TorusGeometry: N must be >= 1");
  if (d < 2) throw std::invalid_argument("TorusGeometry: d must be >= 2");
  if (m < 1) throw std::invalid_argument("TorusGeometry: m must be >= 1");
  side = ipow(L, N);
  volume = ipow(side, d);
}

int TorusGeometry::wrap1(std::int64_t c) const {
  std::int64_t r = c % side;
  if (r < 0) r += side;
  if (r > half()) r -= side;
  return static_cast<int>(r);
}

std::vector<int> TorusGeometry::wrap(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("wrap: bad dimension");
  std::vector<int> out(d);
  for (int i = 0; i < d; ++i) out[i] = wrap1(x[i]);
  return out;
}

std::vector<int> TorusGeometry::site_coords(std::int64_t idx) const {
  std::vector<int> x(d);
  for (int i = 0; i < d; ++i) {
    x[i] = static_cast<int>(idx % side - half());
    idx /= side;
  }
  return x;
}

std::int64_t TorusGeometry::site_index(const std::vector<int>& x) const {
  const std::vector<int> w = wrap(x);
  std::int64_t idx = 0;
  for (int i = d - 1; i >= 0; --i) idx = idx * side + (w[i] + half());
  return idx;
}

std::int64_t TorusGeometry::shift_index(std::int64_t idx, int axis, int step) const {
  std::int64_t stride = 1;
  for (int i = 0; i < axis; ++i) stride *= side;
  const std::int64_t c = (idx / stride) % side;
  std::int64_t nc = (c + step) % side;
  if (nc < 0) nc += side;
  return idx + (nc - c) * stride;
}

std::int64_t TorusGeometry::negate_index(std::int64_t idx) const {
  std::int64_t out = 0;
  std::int64_t stride = 1;
  for (int i = 0; i < d; ++i) {
    const std::int64_t c = (idx / stride) % side;  // c = x_i + half
    out += (side - 1 - c) * stride;
    stride *= side;
  }
  return out;
}

int TorusGeometry::dinf(std::int64_t idx) const {
  int r = 0;
  for (int i = 0; i < d; ++i) {
    const int c = static_cast<int>(idx % side - half());
    idx /= side;
    r = std::max(r, std::abs(c));
  }
  return r;
}

int TorusGeometry::dinf(const std::vector<int>& x) const {
  const std::vector<int> w = wrap(x);
  int r = 0;
  for (int c : w) r = std::max(r, std::abs(c));
  return r;
}

std::vector<double> TorusGeometry::momentum(std::int64_t idx) const {
  const std::vector<int> a = site_coords(idx);
  std::vector<double> p(d);
  for (int i = 0; i < d; ++i) p[i] = kTwoPi * a[i] / static_cast<double>(side);
  return p;
}

double TorusGeometry::momentum_norm(std::int64_t idx) const {
  double s = 0;
  for (double pi : momentum(idx)) s += pi * pi;
  return std::sqrt(s);
}

double Field::max_abs() const {
  double r = 0;
  for (double v : values) r = std::max(r, std::abs(v));
  return r;
}

Eigen::VectorXd Field::mean() const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(geom.m);
  for (std::int64_t x = 0; x < geom.volume; ++x)
    for (int r = 0; r < geom.m; ++r) s[r] += at(x, r);
  return s / static_cast<double>(geom.volume);
}

double MatrixKernel::max_norm() const {
  double r = 0;
  for (const auto& v : values) r = std::max(r, spectral_norm(v));
  return r;
}

std::int64_t SpectralKernel::zero_mode() const {
  std::vector<int> z(geom.d, 0);
  return geom.site_index(z);
}

double SpectralKernel::hermitian_defect() const {
  double r = 0;
  for (const auto& v : values) {
    const double scale = std::max(1.0, v.norm());
    r = std::max(r, (v - v.adjoint().eval()).norm() / scale);
  }
  return r;
}

double SpectralKernel::conjugate_symmetry_defect() const {
  double r = 0;
  for (std::int64_t i = 0; i < geom.volume; ++i) {
    const std::int64_t ni = geom.negate_index(i);
    const double scale = std::max(1.0, values[i].norm());
    r = std::max(r, (values[ni] - values[i].conjugate()).norm() / scale);
  }
  return r;
}

DftPlan::DftPlan(const TorusGeometry& g) : geom_(g) {
  const std::int64_t s = g.side;
  fwd_.resize(s, s);
  inv_.resize(s, s);
  for (std::int64_t a = 0; a < s; ++a) {
    for (std::int64_t x = 0; x < s; ++x) {
      const double ang = kTwoPi * static_cast<double>((a - g.half()) * (x - g.half())) /
                         static_cast<double>(s);
      fwd_(a, x) = Complex(std::cos(ang), -std::sin(ang));
      inv_(x, a) = Complex(std::cos(ang) / s, std::sin(ang) / s);
    }
  }
}

void DftPlan::apply_axis(std::vector<Complex>& data, int channels, int axis,
                         const Eigen::MatrixXcd& mat) const {
  const std::int64_t s = geom_.side;
  std::int64_t stride = 1;
  for (int i = 0; i < axis; ++i) stride *= s;
  const std::int64_t nlines = geom_.volume / s;
  Eigen::MatrixXcd line(s, channels), out(s, channels);
  for (std::int64_t l = 0; l < nlines; ++l) {
    // Base site of the line: distribute l over the axes other than `axis`.
    const std::int64_t lo = l % stride;
    const std::int64_t hi = l / stride;
    const std::int64_t base = lo + hi * stride * s;
    for (std::int64_t c = 0; c < s; ++c)
      for (int ch = 0; ch < channels; ++ch)
        line(c, ch) = data[(base + c * stride) * channels + ch];
    out.noalias() = mat * line;
    for (std::int64_t c = 0; c < s; ++c)
      for (int ch = 0; ch < channels; ++ch)
        data[(base + c * stride) * channels + ch] = out(c, ch);
  }
}

void DftPlan::forward(std::vector<Complex>& data, int channels) const {
  for (int axis = 0; axis < geom_.d; ++axis) apply_axis(data, channels, axis, fwd_);
}

void DftPlan::inverse(std::vector<Complex>& data, int channels) const {
  for (int axis = 0; axis < geom_.d; ++axis) apply_axis(data, channels, axis, inv_);
}

SpectralField dft(const Field& f) {
  const auto& g = f.geom;
  std::vector<Complex> buf(f.values.begin(), f.values.end());
  DftPlan plan(g);
  plan.forward(buf, g.m);
  SpectralField out(g);
  out.values = std::move(buf);
  return out;
}

Field idft_real(const SpectralField& s, double* imag_residue) {
  const auto& g = s.geom;
  std::vector<Complex> buf = s.values;
  DftPlan plan(g);
  plan.inverse(buf, g.m);
  Field out(g);
  double resid = 0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out.values[i] = buf[i].real();
    resid = std::max(resid, std::abs(buf[i].imag()));
  }
  if (imag_residue) *imag_residue = resid;
  return out;
}

SpectralKernel dft(const MatrixKernel& k) {
  const auto& g = k.geom;
  const int ch = g.m * g.m;
  std::vector<Complex> buf(g.volume * ch);
  for (std::int64_t x = 0; x < g.volume; ++x)
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) buf[x * ch + i * g.m + j] = k.values[x](i, j);
  DftPlan plan(g);
  plan.forward(buf, ch);
  SpectralKernel out(g);
  for (std::int64_t p = 0; p < g.volume; ++p)
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) out.values[p](i, j) = buf[p * ch + i * g.m + j];
  return out;
}

MatrixKernel idft_real(const SpectralKernel& k, double* imag_residue) {
  const auto& g = k.geom;
  const int ch = g.m * g.m;
  std::vector<Complex> buf(g.volume * ch);
  for (std::int64_t p = 0; p < g.volume; ++p)
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) buf[p * ch + i * g.m + j] = k.values[p](i, j);
  DftPlan plan(g);
  plan.inverse(buf, ch);
  MatrixKernel out(g);
  double resid = 0;
  for (std::int64_t x = 0; x < g.volume; ++x)
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) {
        const Complex v = buf[x * ch + i * g.m + j];
        out.values[x](i, j) = v.real();
        resid = std::max(resid, std::abs(v.imag()));
      }
  if (imag_residue) *imag_residue = resid;
  return out;
}

Field forward_diff(const Field& f, int axis) {
  const auto& g = f.geom;
  Field out(g);
  for (std::int64_t x = 0; x < g.volume; ++x) {
    const std::int64_t xp = g.shift_index(x, axis, +1);
    for (int r = 0; r < g.m; ++r) out.at(x, r) = f.at(xp, r) - f.at(x, r);
  }
  return out;
}

Field backward_diff(const Field& f, int axis) {
  const auto& g = f.geom;
  Field out(g);
  for (std::int64_t x = 0; x < g.volume; ++x) {
    const std::int64_t xm = g.shift_index(x, axis, -1);
    for (int r = 0; r < g.m; ++r) out.at(x, r) = f.at(xm, r) - f.at(x, r);
  }
  return out;
}

Field multi_diff(const Field& f, const MultiIndex& alpha) {
  Field out = f;
  for (int axis = 0; axis < static_cast<int>(alpha.size()); ++axis)
    for (int rep = 0; rep < alpha[axis]; ++rep) out = forward_diff(out, axis);
  return out;
}

MatrixKernel forward_diff(const MatrixKernel& k, int axis) {
  const auto& g = k.geom;
  MatrixKernel out(g);
  for (std::int64_t x = 0; x < g.volume; ++x) {
    const std::int64_t xp = g.shift_index(x, axis, +1);
    out.values[x] = k.values[xp] - k.values[x];
  }
  return out;
}

MatrixKernel multi_diff(const MatrixKernel& k, const MultiIndex& alpha) {
  MatrixKernel out = k;
  for (int axis = 0; axis < static_cast<int>(alpha.size()); ++axis)
    for (int rep = 0; rep < alpha[axis]; ++rep) out = forward_diff(out, axis);
  return out;
}

double inner(const Field& a, const Field& b) {
  if (!(a.geom == b.geom)) throw std::invalid_argument("inner: geometry mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

bool is_zero_mean(const Field& f, double tol) {
  const Eigen::VectorXd mu = f.mean();
  const double scale = std::max(f.max_abs(), 1e-300);
  return mu.lpNorm<Eigen::Infinity>() <= tol * scale;
}

MatrixKernel convolve(const MatrixKernel& a, const MatrixKernel& b) {
  if (!(a.geom == b.geom)) throw std::invalid_argument("convolve: geometry mismatch");
  SpectralKernel ah = dft(a), bh = dft(b);
  SpectralKernel prod(a.geom);
  for (std::int64_t p = 0; p < a.geom.volume; ++p) prod.values[p] = ah.values[p] * bh.values[p];
  return idft_real(prod);
}

MatrixKernel convolve_direct(const MatrixKernel& a, const MatrixKernel& b) {
  if (!(a.geom == b.geom)) throw std::invalid_argument("convolve: geometry mismatch");
  const auto& g = a.geom;
  MatrixKernel out(g);
  for (std::int64_t x = 0; x < g.volume; ++x) {
    const std::vector<int> xc = g.site_coords(x);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(g.m, g.m);
    for (std::int64_t y = 0; y < g.volume; ++y) {
      const std::vector<int> yc = g.site_coords(y);
      std::vector<int> diff(g.d);
      for (int i = 0; i < g.d; ++i) diff[i] = xc[i] - yc[i];
      acc += a.values[g.site_index(diff)] * b.values[y];
    }
    out.values[x] = acc;
  }
  return out;
}

int annulus_index_of_norm(const TorusGeometry& g, double pnorm) {
  if (pnorm <= 0) throw std::invalid_argument("annulus_index: p = 0 has no annulus");
  const double invL = 1.0 / g.L;
  if (pnorm > invL) return 0;
  // Largest j with |p| <= L^-j; boundary |p| = L^-j belongs to annulus j.
  const double t = -std::log(pnorm) / std::log(static_cast<double>(g.L));
  int j = static_cast<int>(std::floor(t + 1e-12));
  return std::min(j, g.N);
}

int annulus_index(const TorusGeometry& g, std::int64_t mode) {
  return annulus_index_of_norm(g, g.momentum_norm(mode));
}

std::vector<std::vector<std::int64_t>> annuli(const TorusGeometry& g) {
  std::vector<std::vector<std::int64_t>> out(g.N + 1);
  std::vector<int> zero(g.d, 0);
  const std::int64_t z = g.site_index(zero);
  for (std::int64_t p = 0; p < g.volume; ++p) {
    if (p == z) continue;
    out[annulus_index(g, p)].push_back(p);
  }
  return out;
}

TorusGeometry coarse_geometry(const TorusGeometry& fine, int Nbar) {
  if (Nbar < 1 || Nbar > fine.N)
    throw std::invalid_argument("coarse_geometry: need 1 <= Nbar <= N");
  return TorusGeometry(fine.L, Nbar, fine.d, fine.m);
}

std::int64_t coarse_project(const TorusGeometry& fine, const TorusGeometry& coarse,
                            std::int64_t site) {
  if (coarse.N > fine.N) throw std::invalid_argument("coarse_project: Nbar > N");
  const std::vector<int> x = fine.site_coords(site);
  std::vector<int> xc(fine.d);
  for (int i = 0; i < fine.d; ++i) xc[i] = coarse.wrap1(x[i]);
  return coarse.site_index(xc);
}

Field pullback(const TorusGeometry& fine, const Field& coarse_field) {
  const TorusGeometry& cg = coarse_field.geom;
  if (cg.N > fine.N) throw std::invalid_argument("pullback: Nbar > N");
  Field out(fine);
  for (std::int64_t x = 0; x < fine.volume; ++x) {
    const std::int64_t xc = coarse_project(fine, cg, x);
    for (int r = 0; r < fine.m; ++r) out.at(x, r) = coarse_field.at(xc, r);
  }
  return out;
}

Field pullback_adjoint(const TorusGeometry& coarse, const Field& fine_field) {
  const TorusGeometry& fg = fine_field.geom;
  if (coarse.N > fg.N) throw std::invalid_argument("pullback_adjoint: Nbar > N");
  Field out(coarse);
  for (std::int64_t x = 0; x < fg.volume; ++x) {
    const std::int64_t xc = coarse_project(fg, coarse, x);
    for (int r = 0; r < fg.m; ++r) out.at(xc, r) += fine_field.at(x, r);
  }
  return out;
}

}  // namespace frd
