#pragma once

// Exact perturbative data of the cubic oscillator: the B(E, g) series, the
// Rayleigh-Schroedinger energy coefficients obtained from B(E, g) = N + 1/2,
// and the leading instanton quantities.

#include <iosfwd>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cubres {

using Rational = mpq_class;

/// Polynomial in E with exact rational coefficients; c[i] multiplies E^i.
struct Polynomial {
  std::vector<Rational> c;

  int degree() const;  // -1 for the zero polynomial
  Rational operator()(const Rational& e) const;
  double operator()(double e) const;
  bool operator==(const Polynomial& o) const;
};

/// B(E, g) = sum_k g^k b_k(E).  orders[0] is exactly E.
struct BivariateSeries {
  std::vector<Polynomial> orders;

  int k_max() const { return static_cast<int>(orders.size()) - 1; }
  /// b_0(E) .. b_kmax(E) at a fixed energy, rounded to double.
  std::vector<double> coefficients_at(double e) const;

  /// One line per nonzero coefficient: "k degree numerator denominator".
  void write_text(std::ostream& os) const;
  static BivariateSeries read_text(std::istream& is);
};

/// b_0 .. b_kmax from the Riccati equation for the logarithmic derivative of
/// the wave function.  Results are cached, so repeated calls are cheap and
/// the function is safe to call from several threads.
BivariateSeries b_series(int k_max);

struct RsptTable {
  int level = 0;
  std::vector<Rational> coefficients;  // E_{N,K}, K = 0 .. k_max

  std::vector<double> as_double() const;
};

/// E_N(g) = sum_K E_{N,K} g^K by reverting B(E, g) = N + 1/2 order by order.
RsptTable rspt_coefficients(int level, int k_max);

/// Same, reusing an already generated B series (needs series.k_max() >= k_max).
RsptTable rspt_coefficients(const BivariateSeries& series, int level, int k_max);

struct InstantonData {
  Rational action{2, 15};
  /// chi_cl(t) = 1 / (cosh t + 1), the bounce in the rescaled coordinate.
  static double profile(double t);
  /// 2 / (15 g).
  static double a_leading(double g);
};

/// -(pi g)^{-1/2} exp(-2 / (15 g)); returns -0.0 once the exponential
/// underflows.  Throws DomainError for g <= 0.
double instanton_width(double g);

/// Leading term of the instanton A function, 2 / (15 g).
double a_function_leading(double g);

std::string to_string(const Rational& q);

}  // namespace cubres
