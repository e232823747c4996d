#pragma once

// Spectral propagation in complex-scaled coordinates.
//
//   Psi_c(q, 0) = Psi(q e^{i theta}, 0)          (no Jacobian factor)
//   b_N         = (Phi_N | Psi_c)                (c-product, no conjugation)
//   b_N(t)      = b_N exp(-Gamma_N (1 + delta_N) t / 2) exp(-i Re E_N t)
//   Psi(q, t)   = Psi_c(q e^{-i theta}, t)
//   P(t)        = |<Psi(t) | Psi(0)>|^2          (normal frame, conjugating)
//
// Because the scaling carries no Jacobian, normalization is checked through
// P(0) instead of being assumed.

#include <map>
#include <memory>
#include <vector>

#include "cubres/basis.hpp"
#include "cubres/spectral.hpp"

namespace cubres {

/// amplitude (2 alpha / pi)^{1/4} exp(-alpha (z - center)^2 + i momentum z)
struct GaussianPacket {
  double center = 0.0;
  double momentum = 0.0;
  double alpha = 1.0;
  Complex amplitude = 1.0;
  Complex operator()(Complex z) const;
};

/// Uniform trapezoid grid on [lo, hi].
struct QuadratureGrid {
  double lo = -12.0;
  double hi = 12.0;
  double spacing = 0.005;
  std::vector<double> points() const;
  std::vector<double> weights() const;
};

enum class Frame { normal, scaled };
enum class Representation { analytic, oscillator, grid, modal };

struct PacketState {
  Frame frame = Frame::normal;
  Representation representation = Representation::analytic;
  double time = 0.0;
  double theta = 0.0;  // rotation angle of a scaled-frame grid state

  std::vector<GaussianPacket> terms;  // analytic: sum of Gaussians
  ComplexVector oscillator;           // oscillator: coefficients over phi_J
  std::vector<double> grid;           // grid: coordinates
  std::vector<Complex> samples;       //       and values
  std::shared_ptr<const ResonanceSet> basis;  // modal: resonance basis
  ComplexVector modes;                        //        and b_N

  double residual = 0.0;  // reconstruction residual reported by expand

  static PacketState gaussian(const GaussianPacket& g);
  static PacketState from_terms(std::vector<GaussianPacket> terms);
  static PacketState from_oscillator(ComplexVector coefficients, Frame frame = Frame::normal);
  static PacketState from_grid(std::vector<double> q, std::vector<Complex> values,
                               Frame frame = Frame::normal);
};

/// Multiplicative width corrections Gamma_N -> Gamma_N (1 + delta_N).
struct DissipationProfile {
  std::map<int, double> delta;
  double at(int level) const;
  void validate() const;  // DomainError unless 1 + delta_N > 0
};

/// Normal-frame analytic or oscillator packet -> scaled-frame grid packet
/// with samples Psi(q e^{i theta}) on `grid`.  Grid input is rejected with
/// DomainError: continuation to complex q needs analytic data.
PacketState scale_packet(const PacketState& psi, double theta, const QuadratureGrid& grid = {});

/// Values of a normal-frame analytic or oscillator packet at real points.
std::vector<Complex> packet_samples(const PacketState& psi, const std::vector<double>& q);

struct ExpandOptions {
  int n_modes = 60;
  double tolerance = 5e-3;  // ConvergenceError above this reconstruction residual
};

/// Coefficients b_N = (Phi_N | Psi_c) over the first n_modes levels of
/// `basis`.  Grid input: phi_J projections by the trapezoid rule on the
/// state's grid; oscillator input: exact.  The residual
/// ||Psi_c - sum_N b_N Phi_N|| (L2 on the grid, or coefficient norm) is
/// stored in the result.
PacketState expand(const PacketState& psi_scaled, std::shared_ptr<const ResonanceSet> basis,
                   const ExpandOptions& opt = {});

/// Closed-form modal evolution by t >= 0 (DomainError for t < 0).
PacketState propagate(const PacketState& modal, double t, const DissipationProfile& dissipation = {});

/// Normal-frame samples sum_N b_N(t) sum_J c_{N,J} phi_J(q e^{-i theta}) on
/// the real grid `q`.  Scaled-grid input is accepted only at theta = 0.
PacketState back_transform(const PacketState& state, const std::vector<double>& q);

/// Sum of |b_N|^2.
double modal_norm(const PacketState& modal);

/// One step of the adiabatic driven mode: re-expand a modal state in the
/// eigenbasis of the next spec (same theta and n_max) and propagate by dt.
PacketState adiabatic_step(const PacketState& modal, std::shared_ptr<const ResonanceSet> next,
                           double dt, const DissipationProfile& dissipation = {});

struct PipelineConfig {
  OscillatorSpec spec{Complex{0.04, 0.0}, 0.03, 300};
  PacketState packet = PacketState::gaussian(GaussianPacket{});
  QuadratureGrid grid{};
  ExpandOptions expand{};
  ResonanceOptions resonance{};
  DissipationProfile dissipation{};
};

struct AutocorrelationPoint {
  double t = 0.0;
  double p = 0.0;             // |<Psi(t)|Psi(0)>|^2
  double p_normalized = 0.0;  // p / p(0)
  Complex overlap;            // <Psi(t)|Psi(0)>
  double modal_norm = 0.0;    // sum_N |b_N(t)|^2
};

/// Precomputed scale -> expand -> propagate -> back_transform chain.
class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& cfg);
  const PipelineConfig& config() const { return cfg_; }
  const ResonanceSet& basis() const { return *basis_; }
  const PacketState& initial_modes() const { return modal0_; }
  double residual() const { return modal0_.residual; }
  /// Overlap <Psi(t)|Psi(0)> in the normal frame.
  Complex overlap(double t) const;
  std::vector<AutocorrelationPoint> autocorrelation(const std::vector<double>& times) const;

 private:
  PipelineConfig cfg_;
  std::shared_ptr<const ResonanceSet> basis_;
  PacketState modal0_;
  ComplexVector u_;  // u_N = sum_q w_q Phi_N(q e^{-i theta}) conj(Psi(q, 0))
};

std::vector<AutocorrelationPoint> autocorrelation(const std::vector<double>& times,
                                                  const PipelineConfig& cfg);

/// Local maxima of P on a sampled trace (strictly greater than both neighbours).
std::vector<AutocorrelationPoint> local_maxima(const std::vector<AutocorrelationPoint>& trace);

}  // namespace cubres
