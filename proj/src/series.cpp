#include "cubres/series.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cubres/errors.hpp"

namespace cubres {

namespace {

Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

// Truncated Laurent series in x with dyadic coefficients: the coefficient
// of x^(lo + i) is c[i] / 2^shift.  At integer E every quantity in the
// Riccati recursion is dyadic, so integer arithmetic avoids gcd work.
struct Laurent {
  int lo = 0;
  unsigned long shift = 0;
  std::vector<mpz_class> c;

  int hi() const { return lo + static_cast<int>(c.size()) - 1; }
  mpz_class& at(int p) { return c[static_cast<std::size_t>(p - lo)]; }
  const mpz_class& at(int p) const { return c[static_cast<std::size_t>(p - lo)]; }
};

Laurent zeros(int lo, int hi, unsigned long shift) {
  return Laurent{lo, shift, std::vector<mpz_class>(static_cast<std::size_t>(hi - lo + 1))};
}

// Raise the common denominator of `a` to 2^shift.
Laurent with_shift(const Laurent& a, unsigned long shift) {
  Laurent out = a;
  const unsigned long d = shift - a.shift;
  if (d > 0)
    for (auto& v : out.c) mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), d);
  out.shift = shift;
  return out;
}

// out += sign * a * b on the powers covered by out; requires
// out.shift == a.shift + b.shift.
void add_product(Laurent& out, const Laurent& a, const Laurent& b, int sign) {
  const int lo = out.lo, hi = out.hi();
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (sgn(a.c[i]) == 0) continue;
    const int pa = a.lo + static_cast<int>(i);
    const int jmin = std::max(0, lo - pa - b.lo);
    const int jmax = std::min(static_cast<int>(b.c.size()) - 1, hi - pa - b.lo);
    for (int j = jmin; j <= jmax; ++j) {
      mpz_ptr dst = out.at(pa + b.lo + j).get_mpz_t();
      if (sign > 0)
        mpz_addmul(dst, a.c[i].get_mpz_t(), b.c[static_cast<std::size_t>(j)].get_mpz_t());
      else
        mpz_submul(dst, a.c[i].get_mpz_t(), b.c[static_cast<std::size_t>(j)].get_mpz_t());
    }
  }
}

// Strip common factors of two from the numerators.
void reduce(Laurent& a) {
  unsigned long v = a.shift;
  for (const auto& x : a.c) {
    if (v == 0) break;
    if (sgn(x) != 0) v = std::min<unsigned long>(v, mpz_scan1(x.get_mpz_t(), 0));
  }
  if (v == 0) return;
  for (auto& x : a.c) mpz_fdiv_q_2exp(x.get_mpz_t(), x.get_mpz_t(), v);
  a.shift -= v;
}

Rational value_of(const mpz_class& num, unsigned long shift) {
  mpz_class den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), shift);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Riccati construction at a fixed integer energy.  With x = sqrt(g) q and
// w = -g psi'/psi, the Schroedinger equation becomes
//   w^2 - g w' = x^2 (1 + 2x) - 2 g E,
// expanded as w = sum_k g^k w_k with w_0 = x sqrt(1 + 2x).  Each w_k is a
// Laurent series at x = 0, and the quantization condition reads
//   N + 1/2 = B(E, g) = E - sum_{k>=1} g^k Res w_{k+1}.
// w_k is only needed on powers [-(2k-1), 2(K-k)+2] to resolve the residues
// up to order K.  Returns b_0 .. b_K at this E.
std::vector<Rational> b_at_energy(long e, int k_max) {
  const int big_k = k_max;
  auto top = [big_k](int k) { return 2 * (big_k - k) + 2; };
  const int n = 2 * big_k + 8;

  // (1 + 2x)^{1/2} = sum s_k x^k and (1 + 2x)^{-1/2} = sum t_k x^k; with
  // denominators 2^k both have integer numerators 2^k s_k, 2^k t_k.
  std::vector<Rational> s(static_cast<std::size_t>(n)), t(static_cast<std::size_t>(n));
  s[0] = 1;
  t[0] = 1;
  for (int k = 1; k < n; ++k) {
    s[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k - 1)] * frac(3 - 2 * k, k);
    t[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k - 1)] * frac(1 - 2 * k, k);
  }
  const unsigned long sh = static_cast<unsigned long>(n);
  Laurent w0 = zeros(1, n, sh);
  Laurent half_inv = zeros(-1, n - 2, sh + 1);  // 1 / (2 w0)
  for (int k = 0; k < n; ++k) {
    mpz_class scale = 1;
    mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), sh);
    const Rational a = s[static_cast<std::size_t>(k)] * scale;
    const Rational b = t[static_cast<std::size_t>(k)] * scale;
    if (a.get_den() != 1 || b.get_den() != 1) throw NumericalError("binomial series not dyadic");
    w0.c[static_cast<std::size_t>(k)] = a.get_num();
    half_inv.c[static_cast<std::size_t>(k)] = b.get_num();
  }
  reduce(w0);
  reduce(half_inv);

  std::vector<Laurent> w;
  w.push_back(w0);

  Laurent num = w0;
  num.lo = 0;
  for (std::size_t i = 0; i < num.c.size(); ++i) num.c[i] *= static_cast<long>(i) + 1;
  {
    mpz_class two_e = 2 * e;
    mpz_mul_2exp(two_e.get_mpz_t(), two_e.get_mpz_t(), num.shift);
    num.at(0) -= two_e;
  }
  Laurent w1 = zeros(-1, top(1), num.shift + half_inv.shift);
  add_product(w1, num, half_inv, +1);
  reduce(w1);
  w.push_back(std::move(w1));

  std::vector<Rational> b(static_cast<std::size_t>(big_k) + 1);
  b[0] = Rational(e);
  for (int k = 2; k <= big_k + 1; ++k) {
    const int lo = -(2 * k - 1), hi = top(k);
    const Laurent& prev = w[static_cast<std::size_t>(k - 1)];
    unsigned long acc_shift = prev.shift;
    for (int i = 1; 2 * i <= k; ++i)
      acc_shift = std::max(acc_shift, w[static_cast<std::size_t>(i)].shift + w[static_cast<std::size_t>(k - i)].shift);

    Laurent acc = zeros(lo + 1, hi + 1, acc_shift);
    const unsigned long dp = acc_shift - prev.shift;
    for (int p = acc.lo; p <= acc.hi(); ++p) {
      const int src = p + 1;  // d/dx x^src = src x^p
      if (src < prev.lo || src > prev.hi()) continue;
      mpz_class v = prev.at(src) * src;
      mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), dp);
      acc.at(p) = v;
    }
    for (int i = 1; 2 * i <= k; ++i) {
      const Laurent& a = w[static_cast<std::size_t>(i)];
      const Laurent& c = w[static_cast<std::size_t>(k - i)];
      Laurent a2 = with_shift(a, acc_shift - c.shift);
      if (2 * i != k)
        for (auto& v : a2.c) v *= 2;
      add_product(acc, a2, c, -1);
    }
    Laurent wk = zeros(lo, hi, acc.shift + half_inv.shift);
    add_product(wk, acc, half_inv, +1);
    reduce(wk);
    b[static_cast<std::size_t>(k - 1)] = -value_of(wk.at(-1), wk.shift);
    w.push_back(std::move(wk));
  }
  return b;
}

// Newton interpolation through (u_i, y_i), returned in monomial form.
std::vector<Rational> interpolate(const std::vector<Rational>& u, std::vector<Rational> y) {
  const std::size_t m = u.size();
  for (std::size_t j = 1; j < m; ++j)
    for (std::size_t i = m - 1; i >= j; --i) {
      y[i] = (y[i] - y[i - 1]) / (u[i] - u[i - j]);
      if (i == j) break;
    }
  std::vector<Rational> poly(m);
  // Horner on the Newton form: p = y[m-1]; p = p*(x - u[i]) + y[i]
  for (std::size_t ii = m; ii-- > 0;) {
    for (std::size_t d = m - 1; d > 0; --d) poly[d] = poly[d - 1] - u[ii] * poly[d];
    poly[0] = -u[ii] * poly[0];
    poly[0] += y[ii];
  }
  return poly;
}

Rational eval_poly(const std::vector<Rational>& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

BivariateSeries generate(int k_max) {
  // b_k has degree k+1 and the parity of k+1, so b_k(E) = E^{(k+1) mod 2} r_k(E^2)
  // with deg r_k = floor((k+1)/2).  Integer nodes E = 1 .. m give enough points
  // for every order plus one spare node to verify the interpolant.
  const int m = (k_max + 1) / 2 + 2;
  std::vector<std::vector<Rational>> values;
  for (int e = 1; e <= m; ++e) values.push_back(b_at_energy(e, k_max));

  BivariateSeries out;
  out.orders.resize(static_cast<std::size_t>(k_max) + 1);
  out.orders[0].c = {Rational(0), Rational(1)};
  for (int k = 1; k <= k_max; ++k) {
    const bool odd = (k + 1) % 2 == 1;
    const int deg_r = (k + 1) / 2;
    const int need = deg_r + 1;
    std::vector<Rational> u, y;
    for (int i = 0; i < need; ++i) {
      const Rational e(i + 1);
      u.push_back(e * e);
      Rational v = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (odd) v /= e;
      y.push_back(v);
    }
    const std::vector<Rational> r = interpolate(u, y);
    // verify at the spare node
    const Rational e_chk(need + 1);
    Rational chk = eval_poly(r, e_chk * e_chk);
    if (odd) chk *= e_chk;
    if (chk != values[static_cast<std::size_t>(need)][static_cast<std::size_t>(k)]) {
      std::ostringstream msg;
      msg << "B-series order " << k << " fails the parity/degree check";
      throw NumericalError(msg.str());
    }
    Polynomial p;
    p.c.assign(static_cast<std::size_t>(k) + 2, Rational(0));
    for (int j = 0; j <= deg_r; ++j) p.c[static_cast<std::size_t>(2 * j + (odd ? 1 : 0))] = r[static_cast<std::size_t>(j)];
    while (!p.c.empty() && sgn(p.c.back()) == 0) p.c.pop_back();
    out.orders[static_cast<std::size_t>(k)] = std::move(p);
  }
  return out;
}

std::mutex cache_mutex;
BivariateSeries cache;

}  // namespace

int Polynomial::degree() const {
  for (std::size_t i = c.size(); i-- > 0;)
    if (sgn(c[i]) != 0) return static_cast<int>(i);
  return -1;
}

Rational Polynomial::operator()(const Rational& e) const { return eval_poly(c, e); }

double Polynomial::operator()(double e) const {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * e + c[i].get_d();
  return acc;
}

bool Polynomial::operator==(const Polynomial& o) const {
  const std::size_t n = std::max(c.size(), o.c.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Rational a = i < c.size() ? c[i] : Rational(0);
    const Rational b = i < o.c.size() ? o.c[i] : Rational(0);
    if (a != b) return false;
  }
  return true;
}

std::vector<double> BivariateSeries::coefficients_at(double e) const {
  std::vector<double> out;
  out.reserve(orders.size());
  for (const auto& p : orders) out.push_back(p(e));
  return out;
}

void BivariateSeries::write_text(std::ostream& os) const {
  for (std::size_t k = 0; k < orders.size(); ++k) {
    const auto& p = orders[k];
    for (std::size_t d = 0; d < p.c.size(); ++d) {
      if (sgn(p.c[d]) == 0) continue;
      os << k << ' ' << d << ' ' << p.c[d].get_num().get_str() << ' '
         << p.c[d].get_den().get_str() << '\n';
    }
  }
}

BivariateSeries BivariateSeries::read_text(std::istream& is) {
  BivariateSeries out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::size_t k = 0, d = 0;
    std::string num, den;
    if (!(ls >> k >> d >> num >> den)) throw DomainError("malformed series line: " + line);
    if (out.orders.size() <= k) out.orders.resize(k + 1);
    auto& c = out.orders[k].c;
    if (c.size() <= d) c.resize(d + 1);
    try {
      c[d] = Rational(mpz_class(num), mpz_class(den));
    } catch (const std::invalid_argument&) {
      throw DomainError("malformed series line: " + line);
    }
    if (c[d].get_den() == 0) throw DomainError("zero denominator in series line: " + line);
    c[d].canonicalize();
  }
  return out;
}

BivariateSeries b_series(int k_max) {
  if (k_max < 1) throw DomainError("b_series needs k_max >= 1");
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (cache.k_max() < k_max) cache = generate(k_max);
  BivariateSeries out;
  out.orders.assign(cache.orders.begin(), cache.orders.begin() + k_max + 1);
  return out;
}

std::vector<double> RsptTable::as_double() const {
  std::vector<double> out;
  for (const auto& q : coefficients) out.push_back(q.get_d());
  return out;
}

RsptTable rspt_coefficients(int level, int k_max) {
  if (k_max < 1) throw DomainError("rspt_coefficients needs k_max >= 1");
  return rspt_coefficients(b_series(k_max), level, k_max);
}

RsptTable rspt_coefficients(const BivariateSeries& series, int level, int k_max) {
  if (level < 0) throw DomainError("level must be nonnegative");
  if (k_max < 0 || series.k_max() < k_max) throw DomainError("B series too short for the requested order");
  // e[K] = -sum_{k=1..K} [g^{K-k}] b_k(E(g)); powers of E(g) kept as
  // truncated series pw[d][m] = [g^m] E(g)^d, filled as the e[K] appear.
  const std::size_t kk = static_cast<std::size_t>(k_max);
  std::size_t max_deg = 0;
  for (std::size_t k = 1; k <= kk; ++k)
    max_deg = std::max<std::size_t>(max_deg, static_cast<std::size_t>(std::max(0, series.orders[k].degree())));

  std::vector<Rational> e(kk + 1);
  e[0] = Rational(2 * level + 1, 2);
  std::vector<std::vector<Rational>> pw(max_deg + 1, std::vector<Rational>(kk + 1));
  auto fill = [&](std::size_t m) {
    pw[0][m] = m == 0 ? 1 : 0;
    for (std::size_t d = 1; d <= max_deg; ++d) {
      Rational acc = 0;
      for (std::size_t j = 0; j <= m; ++j) acc += e[j] * pw[d - 1][m - j];
      pw[d][m] = acc;
    }
  };
  fill(0);
  for (std::size_t big = 1; big <= kk; ++big) {
    Rational acc = 0;
    for (std::size_t k = 1; k <= big; ++k) {
      const auto& c = series.orders[k].c;
      for (std::size_t d = 0; d < c.size(); ++d) {
        if (sgn(c[d]) != 0) acc += c[d] * pw[d][big - k];
      }
    }
    e[big] = -acc;
    fill(big);
  }
  return RsptTable{level, std::move(e)};
}

double InstantonData::profile(double t) { return 1.0 / (std::cosh(t) + 1.0); }

double InstantonData::a_leading(double g) { return a_function_leading(g); }

double instanton_width(double g) {
  if (!(g > 0.0)) throw DomainError("instanton_width needs g > 0");
  const double v = std::exp(-2.0 / (15.0 * g)) / std::sqrt(std::numbers::pi * g);
  return -v;
}

double a_function_leading(double g) {
  if (!(g > 0.0)) throw DomainError("a_function_leading needs g > 0");
  return 2.0 / (15.0 * g);
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace cubres
