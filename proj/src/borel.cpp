#include "cubres/borel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/multiprecision/mpfr.hpp>
#include <limits>

#include "cubres/errors.hpp"

namespace cubres {

namespace {

namespace bmp = boost::multiprecision;
using Real = bmp::number<bmp::mpfr_float_backend<160>, bmp::et_off>;

struct CReal {
  Real re, im;
};

Real to_real(const Rational& q) {
  if (q.get_den() == 1) return Real(q.get_num().get_str());
  return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}

// p(z) / q(z) by Horner in extended precision, rounded to double.
Complex eval_rational(const std::vector<Real>& p, const std::vector<Real>& q, Complex z) {
  const Real zr = z.real(), zi = z.imag();
  auto horner = [&](const std::vector<Real>& c) {
    CReal acc{Real(0), Real(0)};
    for (std::size_t i = c.size(); i-- > 0;) {
      Real re = acc.re * zr - acc.im * zi + c[i];
      Real im = acc.re * zi + acc.im * zr;
      acc.re = std::move(re);
      acc.im = std::move(im);
    }
    return acc;
  };
  const CReal a = horner(p), b = horner(q);
  const Real den = b.re * b.re + b.im * b.im;
  if (den == 0) return Complex{std::numeric_limits<double>::infinity(), 0.0};
  const Real re = (a.re * b.re + a.im * b.im) / den;
  const Real im = (a.im * b.re - a.re * b.im) / den;
  return Complex{re.convert_to<double>(), im.convert_to<double>()};
}

// [l/mq] Pade approximant of sum c_k t^k.  Returns false if the linear
// system for the denominator is singular.
bool pade(const std::vector<Real>& c, int l, int mq, std::vector<Real>& p, std::vector<Real>& q) {
  q.assign(static_cast<std::size_t>(mq) + 1, Real(0));
  q[0] = 1;
  auto coef = [&](int k) { return k >= 0 ? c[static_cast<std::size_t>(k)] : Real(0); };
  if (mq > 0) {
    const std::size_t m = static_cast<std::size_t>(mq);
    std::vector<std::vector<Real>> a(m, std::vector<Real>(m + 1));
    Real scale = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const int k = l + 1 + static_cast<int>(r);
      for (std::size_t j = 1; j <= m; ++j) {
        a[r][j - 1] = coef(k - static_cast<int>(j));
        scale = std::max(scale, Real(abs(a[r][j - 1])));
      }
      a[r][m] = -coef(k);
    }
    if (scale == 0) return false;
    const Real tiny = scale * std::numeric_limits<Real>::epsilon() * Real(1e15);
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (abs(a[r][col]) > abs(a[piv][col])) piv = r;
      if (abs(a[piv][col]) <= tiny) return false;
      std::swap(a[piv], a[col]);
      for (std::size_t r = col + 1; r < m; ++r) {
        const Real f = a[r][col] / a[col][col];
        if (f == 0) continue;
        for (std::size_t j = col; j <= m; ++j) a[r][j] -= f * a[col][j];
      }
    }
    for (std::size_t r = m; r-- > 0;) {
      Real s = a[r][m];
      for (std::size_t j = r + 1; j < m; ++j) s -= a[r][j] * q[j + 1];
      q[r + 1] = s / a[r][r];
    }
  }
  p.assign(static_cast<std::size_t>(l) + 1, Real(0));
  for (int k = 0; k <= l; ++k) {
    Real s = 0;
    for (int j = 0; j <= std::min(k, mq); ++j) s += q[static_cast<std::size_t>(j)] * coef(k - j);
    p[static_cast<std::size_t>(k)] = s;
  }
  return true;
}

// Diagonal [m/m] if it exists, otherwise the nearest [2m-j / j] with the
// largest nonsingular denominator degree j (degenerate inputs such as an
// exactly rational Borel transform).
void robust_pade(const std::vector<Real>& c, int m, std::vector<Real>& p, std::vector<Real>& q) {
  for (int mq = m; mq >= 0; --mq)
    if (pade(c, 2 * m - mq, mq, p, q)) return;
}

struct GaussLegendre {
  std::vector<double> x, w;  // on [-1, 1]
};

GaussLegendre make_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.x.resize(static_cast<std::size_t>(n));
  gl.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    gl.x[static_cast<std::size_t>(i)] = z;
    gl.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return gl;
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> table;
  std::lock_guard<std::mutex> lock(mu);
  auto it = table.find(n);
  if (it == table.end()) it = table.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

template <class F>
Complex gl_panel(const F& f, double a, double b, const GaussLegendre& gl) {
  const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
  Complex s{};
  for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * f(mid + h * gl.x[i]);
  return h * s;
}

template <class F>
bool adaptive(const F& f, double a, double b, double tol, int depth,
              const GaussLegendre& g1, const GaussLegendre& g2, Complex& out) {
  const Complex i1 = gl_panel(f, a, b, g1);
  const Complex i2 = gl_panel(f, a, b, g2);
  if (!std::isfinite(i2.real()) || !std::isfinite(i2.imag())) return false;
  if (std::abs(i1 - i2) <= std::max(tol, 1e-15 * std::abs(i2))) {
    out = i2;
    return true;
  }
  if (depth <= 0) return false;
  const double mid = 0.5 * (a + b);
  Complex l, r;
  if (!adaptive(f, a, mid, 0.5 * tol, depth - 1, g1, g2, l)) return false;
  if (!adaptive(f, mid, b, 0.5 * tol, depth - 1, g1, g2, r)) return false;
  out = l + r;
  return true;
}

// int_0^inf e^{-t} t^b R(g t) dt along t = s e^{i phi}.
bool laplace(const std::vector<Real>& p, const std::vector<Real>& q, Complex g,
             double phi, const ResummationConfig& cfg, Complex& out) {
  const Complex dir = std::polar(1.0, phi);
  const double b = cfg.borel_b;
  auto f = [&](double s) -> Complex {
    const Complex t = s * dir;
    Complex w = std::exp(-t) * dir * eval_rational(p, q, g * t);
    if (b != 0.0) w *= std::pow(t, b);
    return w;
  };
  const double s_max = cfg.cutoff / std::cos(phi);
  const GaussLegendre& g1 = gauss_legendre(cfg.nodes);
  const GaussLegendre& g2 = gauss_legendre(2 * cfg.nodes);
  const double scale = std::max(1.0, std::abs(eval_rational(p, q, Complex{})));
  Complex total{};
  double a = 0.0, b_edge = 0.5;
  while (a < s_max) {
    b_edge = std::min(b_edge, s_max);
    Complex piece;
    if (!adaptive(f, a, b_edge, cfg.quad_tol * scale, cfg.max_depth, g1, g2, piece)) return false;
    total += piece;
    a = b_edge;
    b_edge *= 2.0;
  }
  out = total;
  return std::isfinite(out.real()) && std::isfinite(out.imag());
}

ResummedValue resum(const std::vector<Real>& a, Complex g, const ResummationConfig& cfg) {
  if (a.size() < 4) throw DomainError("Borel-Pade needs at least four coefficients");
  if (g == Complex{}) throw DomainError("Borel-Pade needs g != 0");
  if (cfg.window < 1 || cfg.min_order < 0 || cfg.max_order < cfg.min_order) {
    throw DomainError("invalid resummation order window");
  }
  ResummedValue out;
  if (std::all_of(a.begin(), a.end(), [](const Real& x) { return x == 0; })) {
    out.value = 0.0;
    return out;
  }
  if (cfg.contour == Contour::real_axis && g.imag() == 0.0 && g.real() > 0.0) {
    bool same_sign = true;
    int sign = 0;
    for (std::size_t k = 1; k < a.size(); ++k) {
      const int s = a[k] > 0 ? 1 : (a[k] < 0 ? -1 : 0);
      if (s == 0) continue;
      if (sign == 0) sign = s;
      if (s != sign) same_sign = false;
    }
    if (same_sign && sign != 0) {
      throw DomainError("nonalternating series at positive g has Borel poles on the real axis; use the C+1 contour");
    }
  }

  std::vector<Real> c(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    c[k] = a[k] / bmp::tgamma(Real(static_cast<double>(k) + 1.0 + cfg.borel_b));
  }
  // real_axis is the principal-value contour C0 = (C+1 + C-1) / 2: Pade poles
  // may sit on the Laplace path even for alternating input.
  const double phi = cfg.ray_angle;
  const bool principal = cfg.contour == Contour::real_axis;
  const int m_max = std::min(cfg.max_order, static_cast<int>(a.size() - 1) / 2);
  std::vector<Real> p, q;
  std::vector<Complex> finite;
  for (int m = std::max(cfg.min_order, 0); m <= m_max; ++m) {
    robust_pade(c, m, p, q);
    PadeOrder po;
    po.m = m;
    po.finite = laplace(p, q, g, phi, cfg, po.value);
    if (po.finite && principal) {
      if (g.imag() == 0.0) {
        // real coefficients and real g: the C-1 integral is the conjugate
        po.value = Complex{po.value.real(), 0.0};
      } else {
        Complex lower;
        po.finite = laplace(p, q, g, -phi, cfg, lower);
        po.value = 0.5 * (po.value + lower);
      }
    }
    if (po.finite) finite.push_back(po.value);
    out.orders.push_back(po);
  }
  if (static_cast<int>(finite.size()) < cfg.window) {
    std::ostringstream msg;
    msg << "only " << finite.size() << " Pade orders gave a finite Laplace integral, "
        << cfg.window << " needed";
    throw ConvergenceError(msg.str());
  }
  const std::size_t w = static_cast<std::size_t>(cfg.window);
  const std::size_t first = finite.size() - w;
  Complex sum{};
  double spread = 0.0;
  for (std::size_t i = first; i < finite.size(); ++i) {
    sum += finite[i];
    for (std::size_t j = i + 1; j < finite.size(); ++j) spread = std::max(spread, std::abs(finite[i] - finite[j]));
  }
  out.value = sum / static_cast<double>(w);
  out.uncertainty = spread;
  out.orders_used = static_cast<int>(w);
  return out;
}

// Extended-precision copies of the exact B series, cached per order count.
const std::vector<std::vector<Real>>& b_series_real(int k_max) {
  static std::mutex mu;
  static std::map<int, std::vector<std::vector<Real>>> table;
  std::lock_guard<std::mutex> lock(mu);
  auto it = table.find(k_max);
  if (it != table.end()) return it->second;
  const BivariateSeries s = b_series(k_max);
  std::vector<std::vector<Real>> conv;
  for (const auto& poly : s.orders) {
    std::vector<Real> row;
    for (const auto& q : poly.c) row.push_back(to_real(q));
    conv.push_back(std::move(row));
  }
  return table.emplace(k_max, std::move(conv)).first->second;
}

int orders_needed(const ResummationConfig& cfg) { return 2 * cfg.max_order + 1; }

}  // namespace

ResummedValue borel_pade(const std::vector<double>& coeffs, Complex g, const ResummationConfig& cfg) {
  std::vector<Real> a;
  a.reserve(coeffs.size());
  for (double x : coeffs) a.emplace_back(x);
  return resum(a, g, cfg);
}

ResummedValue borel_pade(const std::vector<Rational>& coeffs, Complex g, const ResummationConfig& cfg) {
  std::vector<Real> a;
  a.reserve(coeffs.size());
  for (const auto& x : coeffs) a.push_back(to_real(x));
  return resum(a, g, cfg);
}

ResummedValue b_resummed(double e, Complex g, const ResummationConfig& cfg) {
  if (!std::isfinite(e)) throw DomainError("energy must be finite");
  if (g == Complex{}) {
    ResummedValue out;
    out.value = e;
    return out;
  }
  const int k_max = orders_needed(cfg) - 1;
  const auto& series = b_series_real(k_max);
  const Real er(e);
  std::vector<Real> a;
  a.reserve(series.size());
  for (const auto& row : series) {
    Real acc = 0;
    for (std::size_t i = row.size(); i-- > 0;) acc = acc * er + row[i];
    a.push_back(std::move(acc));
  }
  return resum(a, g, cfg);
}

ResummedValue pt_energy(int n, double beta, const ResummationConfig& cfg) {
  if (n < 0) throw DomainError("level must be nonnegative");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be a nonnegative real");
  const double target = n + 0.5;
  if (beta == 0.0) {
    ResummedValue out;
    out.value = target;
    return out;
  }
  const Complex g{-beta * beta, 0.0};
  auto f = [&](double e) { return b_resummed(e, g, cfg).value.real() - target; };

  // Bracket upward from the unperturbed level (B(E, g) < E for g < 0).
  double a = target, fa = f(a);
  double step = 0.05 * (1.0 + n);
  double b = a + step, fb = f(b);
  int tries = 0;
  while ((fa > 0) == (fb > 0)) {
    if (++tries > 40) throw ConvergenceError("pt_energy: could not bracket the root");
    if (fa > 0) {
      b = a;
      fb = fa;
      a = std::max(0.0, a - step);
      fa = f(a);
    } else {
      a = b;
      fa = fb;
      b = a + step;
      fb = f(b);
    }
    step *= 2.0;
  }
  // Illinois regula falsi down to a narrow bracket.
  int side = 0;
  for (int it = 0; it < 60 && std::abs(b - a) > 1e-8; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (fc == 0.0) {
      a = b = c;
      fa = fb = 0.0;
      break;
    }
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  double e = std::abs(fa) < std::abs(fb) ? a : b;
  // Newton polish with a central-difference slope.
  const double h = 1e-6;
  double slope = 1.0;
  for (int it = 0; it < 8; ++it) {
    slope = (f(e + h) - f(e - h)) / (2.0 * h);
    const double fe = f(e);
    if (std::abs(fe) <= 1e-12 || slope == 0.0) break;
    const double de = fe / slope;
    e -= de;
    if (std::abs(de) < 1e-15 * std::max(1.0, std::abs(e))) break;
  }
  ResummedValue bv = b_resummed(e, g, cfg);
  ResummedValue out;
  out.value = Complex{e, 0.0};
  out.uncertainty = bv.uncertainty / std::abs(slope);
  out.orders_used = bv.orders_used;
  out.orders = std::move(bv.orders);
  if (out.uncertainty > cfg.ceiling) {
    std::ostringstream msg;
    msg << "pt_energy uncertainty " << out.uncertainty << " exceeds ceiling " << cfg.ceiling;
    throw ConvergenceError(msg.str());
  }
  return out;
}

ResummedValue resummed_energy(int n, double g, const ResummationConfig& cfg) {
  if (n < 0) throw DomainError("level must be nonnegative");
  if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("resummed_energy needs real g > 0");
  const RsptTable t = rspt_coefficients(n, orders_needed(cfg) - 1);
  ResummedValue out = borel_pade(t.coefficients, Complex{g, 0.0}, cfg);
  if (out.value.imag() > out.uncertainty) {
    std::ostringstream msg;
    msg << "resummed energy has Im E = " << out.value.imag() << " > 0";
    throw NumericalError(msg.str());
  }
  if (out.uncertainty > cfg.ceiling) {
    std::ostringstream msg;
    msg << "resummed energy uncertainty " << out.uncertainty << " exceeds ceiling " << cfg.ceiling;
    throw ConvergenceError(msg.str());
  }
  return out;
}

ResummationConfig resonance_config() {
  ResummationConfig cfg;
  cfg.contour = Contour::c_plus_one;
  return cfg;
}

}  // namespace cubres
