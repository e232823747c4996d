#include "cubres/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cubres/errors.hpp"

namespace cubres {

namespace {

constexpr double kPi = std::numbers::pi;

// Rows of phi_J(z_i), J = 0..j_max.
ComplexMatrix basis_matrix(int j_max, const std::vector<Complex>& z) {
  ComplexMatrix m(static_cast<long>(z.size()), j_max + 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto row = basis_functions(j_max, z[i]);
    for (int j = 0; j <= j_max; ++j) m(static_cast<long>(i), j) = row[static_cast<std::size_t>(j)];
  }
  return m;
}

std::vector<Complex> rotate(const std::vector<double>& q, double theta) {
  const Complex r = std::polar(1.0, theta);
  std::vector<Complex> z;
  z.reserve(q.size());
  for (double x : q) z.push_back(x * r);
  return z;
}

// Columns c_{N,J} of the first `modes` levels.
ComplexMatrix coefficient_matrix(const ResonanceSet& set, int modes) {
  const long rows = set.spec.n_max + 1;
  ComplexMatrix v(rows, modes);
  for (int n = 0; n < modes; ++n) v.col(n) = set.levels[static_cast<std::size_t>(n)].coefficients;
  return v;
}

// Trapezoid weights for an arbitrary increasing coordinate list.
std::vector<double> trapezoid(const std::vector<double>& q) {
  std::vector<double> w(q.size(), 0.0);
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const double h = 0.5 * (q[i + 1] - q[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

void require_modal(const PacketState& s, const char* who) {
  if (s.representation != Representation::modal || !s.basis) {
    throw DomainError(std::string(who) + " needs a modal packet");
  }
}

// Samples of a normal-frame analytic or oscillator packet at complex points.
std::vector<Complex> evaluate_packet(const PacketState& psi, const std::vector<Complex>& z) {
  std::vector<Complex> out(z.size());
  if (psi.representation == Representation::analytic) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      Complex s{};
      for (const auto& g : psi.terms) s += g(z[i]);
      out[i] = s;
    }
    return out;
  }
  if (psi.representation == Representation::oscillator) {
    const int j_max = static_cast<int>(psi.oscillator.size()) - 1;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (j_max < 0) break;
      const auto row = basis_functions(j_max, z[i]);
      Complex s{};
      for (int j = 0; j <= j_max; ++j) s += psi.oscillator(j) * row[static_cast<std::size_t>(j)];
      out[i] = s;
    }
    return out;
  }
  throw DomainError("packet has no analytic form; complex scaling needs a closed form or oscillator coefficients");
}

}  // namespace

Complex GaussianPacket::operator()(Complex z) const {
  const double norm = std::pow(2.0 * alpha / kPi, 0.25);
  const Complex d = z - center;
  return amplitude * norm * std::exp(-alpha * d * d + Complex{0.0, momentum} * z);
}

std::vector<double> QuadratureGrid::points() const {
  if (!(spacing > 0.0) || !(hi > lo)) throw DomainError("quadrature grid needs hi > lo and spacing > 0");
  const double count = (hi - lo) / spacing;
  const long n = std::lround(count);
  if (std::abs(count - static_cast<double>(n)) > 1e-9 * std::max(1.0, count)) {
    throw DomainError("quadrature grid width is not an integer multiple of the spacing");
  }
  std::vector<double> q(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) q[static_cast<std::size_t>(i)] = lo + spacing * static_cast<double>(i);
  return q;
}

std::vector<double> QuadratureGrid::weights() const {
  std::vector<double> w(points().size(), spacing);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

PacketState PacketState::gaussian(const GaussianPacket& g) { return from_terms({g}); }

PacketState PacketState::from_terms(std::vector<GaussianPacket> terms) {
  PacketState s;
  s.representation = Representation::analytic;
  s.terms = std::move(terms);
  return s;
}

PacketState PacketState::from_oscillator(ComplexVector coefficients, Frame frame) {
  PacketState s;
  s.frame = frame;
  s.representation = Representation::oscillator;
  s.oscillator = std::move(coefficients);
  return s;
}

PacketState PacketState::from_grid(std::vector<double> q, std::vector<Complex> values, Frame frame) {
  if (q.size() != values.size()) throw DomainError("grid and sample counts differ");
  if (!std::is_sorted(q.begin(), q.end())) throw DomainError("grid coordinates must be increasing");
  PacketState s;
  s.frame = frame;
  s.representation = Representation::grid;
  s.grid = std::move(q);
  s.samples = std::move(values);
  return s;
}

double DissipationProfile::at(int level) const {
  auto it = delta.find(level);
  return it == delta.end() ? 0.0 : it->second;
}

void DissipationProfile::validate() const {
  for (const auto& [n, d] : delta) {
    if (!std::isfinite(d) || !(1.0 + d > 0.0)) {
      std::ostringstream msg;
      msg << "width correction for level " << n << " gives 1 + delta = " << 1.0 + d << " <= 0";
      throw DomainError(msg.str());
    }
  }
}

PacketState scale_packet(const PacketState& psi, double theta, const QuadratureGrid& grid) {
  if (psi.frame != Frame::normal) throw DomainError("scale_packet expects a normal-frame packet");
  if (psi.representation == Representation::grid || psi.representation == Representation::modal) {
    throw DomainError("scale_packet needs an analytic or oscillator packet; grid samples cannot be continued to complex q");
  }
  std::vector<double> q = grid.points();
  std::vector<Complex> values = evaluate_packet(psi, rotate(q, theta));
  PacketState out = PacketState::from_grid(std::move(q), std::move(values), Frame::scaled);
  out.time = psi.time;
  out.theta = theta;
  return out;
}

std::vector<Complex> packet_samples(const PacketState& psi, const std::vector<double>& q) {
  if (psi.frame != Frame::normal) throw DomainError("packet_samples expects a normal-frame packet");
  return evaluate_packet(psi, std::vector<Complex>(q.begin(), q.end()));
}

PacketState expand(const PacketState& psi_scaled, std::shared_ptr<const ResonanceSet> basis,
                   const ExpandOptions& opt) {
  if (!basis || basis->levels.empty()) throw DomainError("expand needs a nonempty resonance basis");
  if (psi_scaled.frame != Frame::scaled) throw DomainError("expand expects a scaled-frame packet");
  if (opt.n_modes < 1) throw DomainError("n_modes must be positive");
  const int modes = std::min<int>(opt.n_modes, static_cast<int>(basis->levels.size()));
  const int j_max = basis->spec.n_max;
  const ComplexMatrix v = coefficient_matrix(*basis, modes);

  ComplexVector proj;  // (phi_J | Psi_c)
  double residual = 0.0;
  if (psi_scaled.representation == Representation::oscillator) {
    proj = ComplexVector::Zero(j_max + 1);
    const long n = std::min<long>(psi_scaled.oscillator.size(), j_max + 1);
    proj.head(n) = psi_scaled.oscillator.head(n);
    const ComplexVector b = v.transpose() * proj;
    double tail = 0.0;
    for (long j = n; j < psi_scaled.oscillator.size(); ++j) tail += std::norm(psi_scaled.oscillator(j));
    residual = std::sqrt((v * b - proj).squaredNorm() + tail);
    PacketState out;
    out.frame = Frame::scaled;
    out.representation = Representation::modal;
    out.time = psi_scaled.time;
    out.basis = std::move(basis);
    out.modes = b;
    out.residual = residual;
    if (residual > opt.tolerance) {
      std::ostringstream msg;
      msg << "reconstruction residual " << residual << " above tolerance " << opt.tolerance;
      throw ConvergenceError(msg.str());
    }
    return out;
  }
  if (psi_scaled.representation != Representation::grid) {
    throw DomainError("expand needs grid samples or oscillator coefficients");
  }
  if (psi_scaled.theta != basis->spec.theta) {
    throw DomainError("packet was scaled at a different angle than the basis");
  }
  const auto& q = psi_scaled.grid;
  const auto w = trapezoid(q);
  std::vector<Complex> zq(q.begin(), q.end());
  const ComplexMatrix phi = basis_matrix(j_max, zq);  // real q: real values
  ComplexVector f(static_cast<long>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) f(static_cast<long>(i)) = w[i] * psi_scaled.samples[i];
  proj = phi.transpose() * f;
  const ComplexVector b = v.transpose() * proj;
  const ComplexVector recon = phi * (v * b);
  for (std::size_t i = 0; i < q.size(); ++i) {
    residual += w[i] * std::norm(psi_scaled.samples[i] - recon(static_cast<long>(i)));
  }
  residual = std::sqrt(residual);

  PacketState out;
  out.frame = Frame::scaled;
  out.representation = Representation::modal;
  out.time = psi_scaled.time;
  out.basis = std::move(basis);
  out.modes = b;
  out.residual = residual;
  if (residual > opt.tolerance) {
    std::ostringstream msg;
    msg << "reconstruction residual " << residual << " above tolerance " << opt.tolerance
        << " with " << modes << " modes";
    throw ConvergenceError(msg.str());
  }
  return out;
}

PacketState propagate(const PacketState& modal, double t, const DissipationProfile& dissipation) {
  require_modal(modal, "propagate");
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("propagate needs t >= 0: decaying modes grow without bound backward in time");
  }
  dissipation.validate();
  PacketState out = modal;
  for (long n = 0; n < modal.modes.size(); ++n) {
    const ResonanceLevel& lv = modal.basis->levels[static_cast<std::size_t>(n)];
    const double gamma = lv.width * (1.0 + dissipation.at(lv.index));
    out.modes(n) = modal.modes(n) * std::exp(-0.5 * gamma * t) * std::polar(1.0, -lv.energy.real() * t);
  }
  out.time = modal.time + t;
  return out;
}

PacketState back_transform(const PacketState& state, const std::vector<double>& q) {
  if (state.representation == Representation::grid && state.frame == Frame::scaled) {
    // grid samples can't be continued to q e^{-i theta}; only the theta = 0
    // identity is possible, on the same grid
    if (state.theta != 0.0) throw DomainError("scaled-grid samples can only be back-transformed at theta = 0");
    if (state.grid != q) throw DomainError("scaled-grid back-transform needs the same grid");
    PacketState out = state;
    out.frame = Frame::normal;
    return out;
  }
  require_modal(state, "back_transform");
  const ResonanceSet& set = *state.basis;
  const int modes = static_cast<int>(state.modes.size());
  const ComplexMatrix phi = basis_matrix(set.spec.n_max, rotate(q, -set.spec.theta));
  const ComplexVector values = phi * (coefficient_matrix(set, modes) * state.modes);
  std::vector<Complex> samples(values.data(), values.data() + values.size());
  PacketState out = PacketState::from_grid(q, std::move(samples), Frame::normal);
  out.time = state.time;
  return out;
}

double modal_norm(const PacketState& modal) {
  require_modal(modal, "modal_norm");
  return modal.modes.squaredNorm();
}

PacketState adiabatic_step(const PacketState& modal, std::shared_ptr<const ResonanceSet> next,
                           double dt, const DissipationProfile& dissipation) {
  require_modal(modal, "adiabatic_step");
  if (!next || next->levels.empty()) throw DomainError("adiabatic_step needs a nonempty basis");
  const ResonanceSet& cur = *modal.basis;
  if (cur.spec.n_max != next->spec.n_max || cur.spec.theta != next->spec.theta) {
    throw DomainError("adiabatic steps must share theta and n_max");
  }
  const ComplexVector psi = coefficient_matrix(cur, static_cast<int>(modal.modes.size())) * modal.modes;
  PacketState osc = PacketState::from_oscillator(psi, Frame::scaled);
  osc.time = modal.time;
  ExpandOptions opt;
  opt.n_modes = static_cast<int>(next->levels.size());
  opt.tolerance = std::numeric_limits<double>::infinity();
  return propagate(expand(osc, std::move(next), opt), dt, dissipation);
}

Pipeline::Pipeline(const PipelineConfig& cfg) : cfg_(cfg) {
  cfg_.dissipation.validate();
  basis_ = std::make_shared<const ResonanceSet>(
      resonance_basis(cfg_.spec, cfg_.expand.n_modes, cfg_.resonance));
  const PacketState scaled = scale_packet(cfg_.packet, cfg_.spec.theta, cfg_.grid);
  modal0_ = expand(scaled, basis_, cfg_.expand);

  const auto q = cfg_.grid.points();
  const auto w = cfg_.grid.weights();
  std::vector<Complex> zq(q.begin(), q.end());
  const std::vector<Complex> psi0 = evaluate_packet(cfg_.packet, zq);
  const ComplexMatrix phi = basis_matrix(cfg_.spec.n_max, rotate(q, -cfg_.spec.theta));
  ComplexVector f(static_cast<long>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) f(static_cast<long>(i)) = w[i] * std::conj(psi0[i]);
  const ComplexVector phi_f = phi.transpose() * f;
  u_ = coefficient_matrix(*basis_, static_cast<int>(modal0_.modes.size())).transpose() * phi_f;
}

// <Psi(t)|Psi(0)> = conj(sum_N b_N(t) u_N)
Complex Pipeline::overlap(double t) const {
  const PacketState s = propagate(modal0_, t, cfg_.dissipation);
  return std::conj((s.modes.array() * u_.array()).sum());
}

std::vector<AutocorrelationPoint> Pipeline::autocorrelation(const std::vector<double>& times) const {
  std::vector<AutocorrelationPoint> out;
  out.reserve(times.size());
  const double p0 = std::norm(overlap(0.0));
  for (double t : times) {
    const PacketState s = propagate(modal0_, t, cfg_.dissipation);
    AutocorrelationPoint pt;
    pt.t = t;
    pt.overlap = std::conj((s.modes.array() * u_.array()).sum());
    pt.p = std::norm(pt.overlap);
    pt.p_normalized = p0 > 0.0 ? pt.p / p0 : 0.0;
    pt.modal_norm = s.modes.squaredNorm();
    out.push_back(pt);
  }
  return out;
}

std::vector<AutocorrelationPoint> autocorrelation(const std::vector<double>& times,
                                                  const PipelineConfig& cfg) {
  return Pipeline(cfg).autocorrelation(times);
}

std::vector<AutocorrelationPoint> local_maxima(const std::vector<AutocorrelationPoint>& trace) {
  std::vector<AutocorrelationPoint> out;
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    if (trace[i].p > trace[i - 1].p && trace[i].p > trace[i + 1].p) out.push_back(trace[i]);
  }
  return out;
}

}  // namespace cubres
