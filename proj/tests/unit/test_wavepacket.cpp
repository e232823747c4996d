#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cubres/errors.hpp"
#include "cubres/spectral.hpp"
#include "cubres/wavepacket.hpp"
#include "oracles.hpp"

using namespace cubres;

namespace {

// e^{-q^2} / (pi/2)^{1/4}
const GaussianPacket kPacket{};

std::shared_ptr<const ResonanceSet> dynamics_basis() {
  static const auto set = std::make_shared<const ResonanceSet>(resonance_basis(PipelineConfig{}.spec, 60));
  return set;
}

PacketState dynamics_modes() {
  const QuadratureGrid grid;
  return expand(scale_packet(PacketState::gaussian(kPacket), PipelineConfig{}.spec.theta, grid), dynamics_basis());
}

double grid_norm(const std::vector<Complex>& v, const QuadratureGrid& grid) {
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::norm(v[i]);
  return s;
}

}  // namespace

TEST_CASE("Gaussian packet closed form") {
  CHECK(std::abs(kPacket(0.0) - std::pow(2.0 / M_PI, 0.25)) <= 1e-15);
  const Complex z{0.3, -0.2};
  CHECK(std::abs(kPacket(z) - std::exp(-z * z) / std::pow(M_PI / 2, 0.25)) <= 1e-15);
  const QuadratureGrid grid;
  const auto q = grid.points();
  CHECK(q.size() == 4801);
  CHECK(q.front() == -12.0);
  CHECK(q.back() == doctest::Approx(12.0).epsilon(1e-15));
  std::vector<Complex> v;
  for (double x : q) v.push_back(kPacket(x));
  CHECK(grid_norm(v, grid) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((QuadratureGrid{1.0, -1.0, 0.1}.points()), DomainError);
  CHECK_THROWS_AS((QuadratureGrid{0.0, 1.0, 0.3}.points()), DomainError);
}

TEST_CASE("scale_packet") {
  const QuadratureGrid grid;
  const auto q = grid.points();
  const auto psi = PacketState::gaussian(kPacket);
  SUBCASE("theta = 0 is the identity on samples") {
    const auto s = scale_packet(psi, 0.0, grid);
    const auto direct = packet_samples(psi, q);
    CHECK(s.frame == Frame::scaled);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(s.samples[i] == direct[i]);
  }
  SUBCASE("closed form at theta = pi/5") {
    const double th = std::numbers::pi / 5;
    const auto s = scale_packet(psi, th, grid);
    for (std::size_t i = 0; i < q.size(); i += 97) {
      const Complex z = q[i] * std::polar(1.0, th);
      const Complex want = std::exp(-z * z) / std::pow(M_PI / 2, 0.25);
      CHECK(std::abs(s.samples[i] - want) <= 1e-14 * std::max(1.0, std::abs(want)));
    }
    const auto at1 = scale_packet(psi, th, QuadratureGrid{0.0, 1.0, 0.5});
    const Complex want1 = std::exp(-std::polar(1.0, 2 * th)) / std::pow(M_PI / 2, 0.25);
    CHECK(std::abs(at1.samples.back() - want1) <= 1e-15);
  }
  SUBCASE("linearity") {
    oracle::Gen gen(4);
    for (int trial = 0; trial < 5; ++trial) {
      GaussianPacket g1{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(0.5, 2), 1.0};
      GaussianPacket g2{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(0.5, 2), 1.0};
      const Complex a = gen.complex_disk(2.0), b = gen.complex_disk(2.0);
      GaussianPacket ga = g1, gb = g2;
      ga.amplitude = a;
      gb.amplitude = b;
      const double th = gen.uniform(0.0, 0.5);
      const auto sum = scale_packet(PacketState::from_terms({ga, gb}), th, grid);
      const auto s1 = scale_packet(PacketState::gaussian(g1), th, grid);
      const auto s2 = scale_packet(PacketState::gaussian(g2), th, grid);
      for (std::size_t i = 0; i < q.size(); i += 31)
        CHECK(std::abs(sum.samples[i] - (a * s1.samples[i] + b * s2.samples[i])) <=
              1e-13 * (1 + std::abs(sum.samples[i])));
    }
  }
  SUBCASE("oscillator coefficients") {
    ComplexVector c = ComplexVector::Zero(6);
    c(0) = 0.6;
    c(5) = Complex{0, 0.8};
    const double th = 0.3;
    const auto s = scale_packet(PacketState::from_oscillator(c), th, grid);
    for (std::size_t i = 0; i < q.size(); i += 211) {
      const Complex z = q[i] * std::polar(1.0, th);
      const Complex want = 0.6 * oracle::phi_complex(0, z) + Complex{0, 0.8} * oracle::phi_complex(5, z);
      CHECK(std::abs(s.samples[i] - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
  SUBCASE("grid and modal input rejected") {
    const auto g = PacketState::from_grid(q, packet_samples(psi, q));
    CHECK_THROWS_AS(scale_packet(g, 0.1, grid), DomainError);
    CHECK_THROWS_AS(scale_packet(dynamics_modes(), 0.1, grid), DomainError);
    CHECK_THROWS_AS(scale_packet(scale_packet(psi, 0.1, grid), 0.1, grid), DomainError);
  }
}

TEST_CASE("expand") {
  const OscillatorSpec spec{Complex{0.2, 0.0}, 0.4, 120};
  const auto set = std::make_shared<const ResonanceSet>(resonances(spec, 6));
  SUBCASE("an eigenvector expands to a unit coefficient") {
    const auto phi3 = PacketState::from_oscillator(set->levels[3].coefficients, Frame::scaled);
    const auto m = expand(phi3, set, {6, 1e-6});
    for (int n = 0; n < 6; ++n) CHECK(std::abs(m.modes(n) - (n == 3 ? 1.0 : 0.0)) <= 1e-9);
    CHECK(m.residual <= 1e-9);
  }
  SUBCASE("zero input") {
    const auto zero = PacketState::from_oscillator(ComplexVector::Zero(121), Frame::scaled);
    const auto m = expand(zero, set, {6, 1e-6});
    CHECK(m.modes.cwiseAbs().maxCoeff() == 0.0);
    const QuadratureGrid grid;
    const auto zg = PacketState::from_grid(grid.points(), std::vector<Complex>(grid.points().size()), Frame::scaled);
    auto zs = zg;
    zs.theta = 0.4;
    const auto mg = expand(zs, set, {6, 1e-6});
    CHECK(mg.modes.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("errors") {
    const auto normal = PacketState::from_oscillator(set->levels[0].coefficients);
    CHECK_THROWS_AS(expand(normal, set), DomainError);
    const auto phi0 = PacketState::from_oscillator(set->levels[0].coefficients, Frame::scaled);
    CHECK_THROWS_AS(expand(phi0, nullptr), DomainError);
    CHECK_THROWS_AS(expand(phi0, set, {0, 1.0}), DomainError);
    // not representable by the six lowest modes
    ComplexVector far = ComplexVector::Zero(121);
    far(40) = 1.0;
    CHECK_THROWS_AS(expand(PacketState::from_oscillator(far, Frame::scaled), set, {6, 1e-3}), ConvergenceError);
    // scaled at a different angle than the basis
    CHECK_THROWS_AS(expand(scale_packet(PacketState::gaussian(kPacket), 0.1), set), DomainError);
  }
}

TEST_CASE("expand: residual of the dynamics packet with 40 requested modes") {
  const QuadratureGrid grid;
  const auto scaled = scale_packet(PacketState::gaussian(kPacket), PipelineConfig{}.spec.theta, grid);
  const auto m = expand(scaled, dynamics_basis(), {40, 1.0});
  INFO("modes available " << m.modes.size() << ", residual " << m.residual);
  CHECK(m.modes.size() >= 40);
  CHECK(m.residual < 1e-6);
}

TEST_CASE("propagate") {
  const auto m0 = dynamics_modes();
  const auto& levels = m0.basis->levels;
  SUBCASE("t = 0 is the identity") {
    const auto m = propagate(m0, 0.0);
    CHECK((m.modes - m0.modes).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single-mode modulus") {
    for (std::size_t n = 0; n < levels.size(); ++n) {
      for (double t : {0.5, 3.0, 25.0}) {
        const auto m = propagate(m0, t);
        const double want = std::norm(m0.modes(static_cast<long>(n))) * std::exp(-levels[n].width * t);
        CHECK(std::norm(m.modes(static_cast<long>(n))) == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
  SUBCASE("delta = 1 doubles the decay exponent") {
    const int n = static_cast<int>(levels.size()) - 1;
    REQUIRE(levels[static_cast<std::size_t>(n)].width > 0.0);
    DissipationProfile d;
    d.delta[n] = 1.0;
    const double t = 7.0;
    const auto a = propagate(m0, t), b = propagate(m0, t, d);
    const double ea = std::log(std::norm(a.modes(n)) / std::norm(m0.modes(n)));
    const double eb = std::log(std::norm(b.modes(n)) / std::norm(m0.modes(n)));
    CHECK(eb == doctest::Approx(2.0 * ea).epsilon(1e-10));
    for (int k = 0; k < n; ++k) CHECK(a.modes(k) == b.modes(k));
  }
  SUBCASE("semigroup") {
    oracle::Gen gen(8);
    for (int trial = 0; trial < 20; ++trial) {
      const double t1 = gen.uniform(0, 10), t2 = gen.uniform(0, 10);
      DissipationProfile d;
      d.delta[gen.integer(0, 5)] = gen.uniform(-0.5, 2.0);
      const auto two = propagate(propagate(m0, t1, d), t2, d);
      const auto one = propagate(m0, t1 + t2, d);
      CHECK((two.modes - one.modes).cwiseAbs().maxCoeff() <= 1e-14 * (1 + one.modes.cwiseAbs().maxCoeff()));
      CHECK(two.time == doctest::Approx(t1 + t2));
    }
  }
  SUBCASE("monotone envelope") {
    double prev = modal_norm(m0);
    for (int i = 1; i <= 250; ++i) {
      const double now = modal_norm(propagate(m0, 0.1 * i));
      CHECK(now <= prev);
      prev = now;
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(propagate(m0, -0.1), DomainError);
    DissipationProfile bad;
    bad.delta[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(propagate(m0, 1.0, bad), DomainError);
    CHECK_THROWS_AS(propagate(PacketState::gaussian(kPacket), 1.0), DomainError);
  }
}

TEST_CASE("dissipation profile") {
  DissipationProfile d;
  d.delta[2] = 0.5;
  CHECK(d.at(2) == 0.5);
  CHECK(d.at(3) == 0.0);
  d.delta[4] = std::nan("");
  CHECK_THROWS_AS(d.validate(), DomainError);
}

TEST_CASE("back_transform") {
  const QuadratureGrid grid;
  const auto q = grid.points();
  const auto psi = PacketState::gaussian(kPacket);
  const auto direct = packet_samples(psi, q);
  SUBCASE("scaled grid at theta = 0 round trip") {
    const auto back = back_transform(scale_packet(psi, 0.0, grid), q);
    CHECK(back.frame == Frame::normal);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(back.samples[i] - direct[i]) <= 1e-10);
    CHECK_THROWS_AS(back_transform(scale_packet(psi, 0.2, grid), q), DomainError);
    CHECK_THROWS_AS(back_transform(scale_packet(psi, 0.0, grid), std::vector<double>{0.0, 1.0}), DomainError);
  }
  SUBCASE("free oscillator, theta = 0, t = 0") {
    const auto set = std::make_shared<const ResonanceSet>(resonance_basis({Complex{}, 0.0, 200}, 60));
    const auto m = expand(scale_packet(psi, 0.0, grid), set, {60, 1e-8});
    const auto back = back_transform(m, q);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(back.samples[i] - direct[i]) <= 1e-8);
  }
  SUBCASE("nearly harmonic coupling") {
    const auto set = std::make_shared<const ResonanceSet>(resonance_basis({Complex{1e-8, 0.0}, 0.05, 200}, 60));
    const auto m = expand(scale_packet(psi, 0.05, grid), set, {60, 1e-5});
    const auto back = back_transform(m, q);
    double worst = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(back.samples[i] - direct[i]));
    CHECK(worst <= 1e-6);
  }
  SUBCASE("norm of the dynamics packet at t = 0") {
    const auto back = back_transform(dynamics_modes(), q);
    CHECK(std::abs(grid_norm(back.samples, grid) - 1.0) <= 1e-6);
  }
  SUBCASE("analytic input rejected") {
    CHECK_THROWS_AS(back_transform(psi, q), DomainError);
  }
}

TEST_CASE("autocorrelation") {
  SUBCASE("P(0) = 1 for the dynamics packet") {
    const Pipeline p{PipelineConfig{}};
    const auto tr = p.autocorrelation({0.0});
    CHECK(std::abs(tr[0].p - 1.0) <= 1e-6);
    CHECK(tr[0].p_normalized == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("harmonic revivals") {
    PipelineConfig cfg;
    cfg.spec = {Complex{}, 0.0, 200};
    const Pipeline p{cfg};
    std::vector<double> times;
    for (int k = 0; k <= 6; ++k) times.push_back(k * std::numbers::pi);
    for (const auto& pt : p.autocorrelation(times)) {
      INFO("t=" << pt.t);
      CHECK(std::abs(pt.p - 1.0) <= 1e-6);
    }
    // in between the packet breathes
    CHECK(p.autocorrelation({std::numbers::pi / 2})[0].p < 0.95);
  }
  SUBCASE("P stays in [0, 1] and the free function matches the class") {
    std::vector<double> times;
    for (int i = 0; i <= 50; ++i) times.push_back(0.5 * i);
    const auto a = autocorrelation(times, PipelineConfig{});
    const Pipeline p{PipelineConfig{}};
    const auto b = p.autocorrelation(times);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].p >= 0.0);
      CHECK(a[i].p <= 1.0 + 1e-6);
      CHECK(a[i].p == b[i].p);
      if (i > 0) CHECK(a[i].modal_norm <= a[i - 1].modal_norm);
    }
  }
}

TEST_CASE("dynamics checkpoint") {
  std::vector<double> times;
  for (int i = 0; i <= 2500; ++i) times.push_back(0.01 * i);
  const auto tr = autocorrelation(times, PipelineConfig{});
  const auto peaks = local_maxima(tr);
  const AutocorrelationPoint* best = nullptr;
  for (const auto& pk : peaks)
    if (std::abs(pk.t - 19.29) <= 0.3 && (!best || pk.p > best->p)) best = &pk;
  REQUIRE(best != nullptr);
  CHECK(std::abs(best->t - 19.29) <= 0.05);
  CHECK(std::abs(best->p - 0.9939) <= 5e-4);
}

TEST_CASE("local_maxima") {
  std::vector<AutocorrelationPoint> tr;
  const double p[] = {1.0, 0.5, 0.7, 0.7, 0.2, 0.9, 0.1, 0.3};
  for (int i = 0; i < 8; ++i) tr.push_back({0.1 * i, p[i], p[i], {}, 0.0});
  const auto m = local_maxima(tr);
  REQUIRE(m.size() == 1);
  CHECK(m[0].p == 0.9);
  CHECK(local_maxima({}).empty());
}

TEST_CASE("adiabatic_step") {
  const auto m0 = dynamics_modes();
  const auto same = adiabatic_step(m0, dynamics_basis(), 1.5);
  const auto ref = propagate(m0, 1.5);
  CHECK((same.modes - ref.modes).cwiseAbs().maxCoeff() <= 1e-10);
  const auto other = std::make_shared<const ResonanceSet>(resonance_basis({Complex{0.04, 0.0}, 0.1, 300}, 60));
  CHECK_THROWS_AS(adiabatic_step(m0, other, 1.0), DomainError);
  CHECK_THROWS_AS(adiabatic_step(m0, dynamics_basis(), -1.0), DomainError);
}
