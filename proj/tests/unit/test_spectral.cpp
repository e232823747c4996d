#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cubres/errors.hpp"
#include "cubres/spectral.hpp"
#include "oracles.hpp"

using namespace cubres;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::vector<Complex> sorted(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

}  // namespace

TEST_CASE("eig_complex: small matrices") {
  SUBCASE("diagonal") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = Complex{1, 2};
    m(1, 1) = 3.0;
    std::vector<Complex> ev;
    for (const auto& p : eig_complex(m, 1e-12)) ev.push_back(p.value);
    ev = sorted(ev);
    CHECK(std::abs(ev[0] - Complex{1, 2}) <= 1e-14);
    CHECK(std::abs(ev[1] - 3.0) <= 1e-14);
  }
  SUBCASE("zero diagonal, i off-diagonal") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = m(1, 0) = Complex{0, 1};
    std::vector<Complex> ev;
    for (const auto& p : eig_complex(m, 1e-12)) ev.push_back(p.value);
    ev = sorted(ev);
    // lambda^2 + 1 = 0
    CHECK(std::abs(ev[0] - Complex{0, -1}) <= 1e-14);
    CHECK(std::abs(ev[1] - Complex{0, 1}) <= 1e-14);
  }
  SUBCASE("free oscillator, n_max = 10") {
    const auto pairs = eig_complex(assemble_hamiltonian({Complex{}, 0.0, 10}), 1e-12);
    REQUIRE(pairs.size() == 11);
    std::vector<Complex> ev;
    for (const auto& p : pairs) ev.push_back(p.value);
    ev = sorted(ev);
    for (int n = 0; n <= 10; ++n) CHECK(std::abs(ev[static_cast<std::size_t>(n)] - (n + 0.5)) <= 1e-12);
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(eig_complex(ComplexMatrix::Zero(2, 3), 1e-10), DomainError);
    CHECK_THROWS_AS(eig_complex(ComplexMatrix::Identity(2, 2), 0.0), DomainError);
  }
}

TEST_CASE("eig_complex residual contract on random complex symmetric matrices") {
  oracle::Gen gen(2024);
  const double tol = 1e-10;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.integer(1, 60);
    const ComplexMatrix m = gen.symmetric(n);
    const auto pairs = eig_complex(m, tol);
    REQUIRE(static_cast<int>(pairs.size()) == n);
    const double fro = m.norm();
    for (const auto& p : pairs) {
      CHECK(std::abs(p.vector.norm() - 1.0) <= 1e-12);
      CHECK((m * p.vector - p.value * p.vector).norm() <= tol * fro);
    }
    // trace is the eigenvalue sum, multiplicities counted
    Complex sum{};
    for (const auto& p : pairs) sum += p.value;
    CHECK(std::abs(sum - m.trace()) <= 1e-10 * (1 + fro));
    // eigenvalues-only path agrees
    const auto ev = sorted(eigenvalues(m));
    std::vector<Complex> ev2;
    for (const auto& p : pairs) ev2.push_back(p.value);
    ev2 = sorted(ev2);
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - ev2[i]) <= 1e-10 * (1 + fro));
  }
}

TEST_CASE("resonances: worked values") {
  SUBCASE("g = 0.6 ground resonance") {
    const auto set = resonances(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 200), 1);
    const Complex e = set.levels[0].energy;
    CHECK(std::abs(e.real() - 0.554053519) <= 1e-8);
    CHECK(std::abs(e.imag() + 0.351401778) <= 1e-8);
    CHECK(set.levels[0].width == doctest::Approx(-2 * e.imag()));
    CHECK(set.levels[0].uncertainty <= 1e-9);
  }
  SUBCASE("PT beta = 1/10 ground state") {
    const auto set = resonances(OscillatorSpec::pt_symmetric(0.1, 0.0, 200), 1);
    CHECK(std::abs(set.levels[0].energy.real() - 0.512538145) <= 1e-9);
    CHECK(std::abs(set.levels[0].energy.imag()) < 1e-9);
  }
  SUBCASE("nearly free") {
    const auto set = resonances({Complex{1e-6, 0.0}, 27 * kDeg, 200}, 3);
    for (int n = 0; n < 3; ++n) CHECK(std::abs(set.levels[static_cast<std::size_t>(n)].energy - (n + 0.5)) <= 1e-5);
  }
  SUBCASE("free oscillator at theta != 0") {
    const auto set = resonances({Complex{}, 0.3, 80}, 5);
    for (int n = 0; n < 5; ++n) {
      const auto& lv = set.levels[static_cast<std::size_t>(n)];
      CHECK(std::abs(lv.energy - (n + 0.5)) <= 1e-8);
      CHECK(std::abs(Complex(lv.coefficients.transpose() * lv.coefficients) - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("resonances: error cases") {
  CHECK_THROWS_AS(resonances(OscillatorSpec::real_coupling(0.6, 36 * kDeg, 200), 1), DomainError);
  CHECK_THROWS_AS(resonances(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 20), 6), DomainError);
  CHECK_THROWS_AS(resonances(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 200), 0), DomainError);
  // a real coupling without rotation has no stable resonances
  CHECK_THROWS_AS(resonances(OscillatorSpec::real_coupling(0.6, 0.0, 200), 1), DomainError);
  ResonanceOptions strict;
  strict.ceiling = 1e-30;
  CHECK_THROWS_AS(resonances(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 200), 1, strict), ConvergenceError);
}

TEST_CASE("theta independence at in-wedge angles") {
  const auto spec = OscillatorSpec::real_coupling(0.1, 25 * kDeg, 200);
  const auto spread = theta_stability(spec, {20 * kDeg, 25 * kDeg, 30 * kDeg}, 1);
  CHECK(spread[0] < 1e-8);
  SUBCASE("free oscillator") {
    const auto s = theta_stability({Complex{}, 0.2, 40}, {0.1, 0.2, 0.3}, 4);
    for (double x : s) CHECK(x == 0.0);
  }
  SUBCASE("single angle") {
    const auto s = theta_stability(spec, {25 * kDeg}, 2);
    for (double x : s) CHECK(x == 0.0);
  }
  SUBCASE("angles outside the wedge") {
    CHECK_THROWS_AS(theta_stability(spec, {30 * kDeg, 36 * kDeg, 42 * kDeg}, 1), DomainError);
  }
}

TEST_CASE("truncation uncertainty") {
  CHECK(truncation_uncertainty({Complex{}, 0.2, 40}, 3, 10)[0] == 0.0);
  const auto big = truncation_uncertainty(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 200), 1, 40);
  CHECK(big[0] <= 1e-9);
  const auto small = truncation_uncertainty(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 20), 1, 10);
  CHECK(small[0] > big[0]);
  CHECK_THROWS_AS(truncation_uncertainty(OscillatorSpec::real_coupling(0.6, 27 * kDeg, 20), 1, 0), DomainError);
}

TEST_CASE("resonance set invariants") {
  const std::vector<OscillatorSpec> specs{
      OscillatorSpec::real_coupling(0.1, 27 * kDeg, 200),
      OscillatorSpec::real_coupling(0.6, 27 * kDeg, 200),
      OscillatorSpec::real_coupling(0.02, 20 * kDeg, 160),
  };
  for (const auto& spec : specs) {
    const auto set = resonances(spec, 4);
    for (std::size_t a = 0; a < set.levels.size(); ++a) {
      const auto& ca = set.levels[a].coefficients;
      CHECK(std::abs(Complex(ca.transpose() * ca) - 1.0) <= 1e-10);
      CHECK(set.levels[a].width >= 0.0);
      if (a > 0) CHECK(set.levels[a].energy.real() >= set.levels[a - 1].energy.real());
      for (std::size_t b = a + 1; b < set.levels.size(); ++b) {
        const auto& cb = set.levels[b].coefficients;
        CHECK(std::abs(Complex(ca.transpose() * cb)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("PT reality") {
  for (double beta : {0.1, 0.125, 0.25, 0.5}) {
    const auto set = resonances(OscillatorSpec::pt_symmetric(beta, 0.0, 200), 4);
    for (const auto& lv : set.levels) {
      INFO("beta=" << beta << " N=" << lv.index);
      CHECK(std::abs(lv.energy.imag()) <= std::max(lv.uncertainty, 1e-12));
    }
  }
}

TEST_CASE("conjugation: theta and -theta give conjugate spectra") {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 5; ++trial) {
    const double g_root = gen.uniform(0.1, 0.8);
    const double th = gen.uniform(0.2, 0.6);
    const Complex r = std::polar(1.0, th), rm = std::conj(r);
    const auto plus = sorted(eigenvalues(cubic_operator(1.0 / (r * r), r * r, g_root * r * r * r, 120)));
    auto minus = eigenvalues(cubic_operator(1.0 / (rm * rm), rm * rm, g_root * rm * rm * rm, 120));
    for (auto& z : minus) z = std::conj(z);
    minus = sorted(minus);
    const auto set = resonances({Complex{g_root, 0.0}, th, 120}, 2);
    for (const auto& lv : set.levels) {
      const std::size_t i = nearest_match(lv.energy, plus);
      const std::size_t j = nearest_match(lv.energy, minus);
      CHECK(std::abs(plus[i] - minus[j]) <= 1e-10);
    }
  }
}

TEST_CASE("nearest_match and c_normalize") {
  CHECK(nearest_match(1.1, {0.0, 1.0, 2.0}) == 1);
  CHECK_THROWS_AS(nearest_match(1.5, {1.0, 1.2}), MatchingAmbiguityError);
  CHECK_THROWS_AS(nearest_match(1.5, {}), DomainError);
  ComplexVector v(3);
  v << Complex{1, 1}, Complex{0.5, -0.2}, Complex{-2, 0.3};
  const auto c = c_normalize(v);
  CHECK(std::abs(Complex(c.transpose() * c) - 1.0) <= 1e-14);
  Eigen::Index imax;
  c.cwiseAbs().maxCoeff(&imax);
  CHECK(c(imax).real() > 0.0);
  ComplexVector iso(2);
  iso << 1.0, Complex{0, 1};
  CHECK_THROWS_AS(c_normalize(iso), NumericalError);
}

TEST_CASE("resonance basis for the dynamics configuration") {
  const auto set = resonance_basis({Complex{0.04, 0.0}, 0.05, 200}, 60);
  CHECK(set.levels.size() >= 10);
  for (const auto& lv : set.levels) {
    CHECK(lv.uncertainty <= 1e-6);
    CHECK(lv.width >= 0.0);
  }
  CHECK(std::abs(set.levels[0].energy.real() - 0.5) < 0.01);
}
