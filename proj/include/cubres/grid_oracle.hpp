#pragma once

// Crank-Nicolson propagation of i dPsi/dt = [-1/2 d^2 + q^2/2 + sqrt(g) q^3] Psi
// on a Dirichlet box [-L, L].  Independent of the spectral machinery: it is
// the reference the modal pipeline is checked against.

#include <vector>

#include "cubres/basis.hpp"
#include "cubres/wavepacket.hpp"

namespace cubres {

struct GridConfig {
  double half_width = 300.0;  // L
  double spacing = 0.02;      // dq
  double time_step = 0.002;   // dt
  void validate() const;      // DomainError unless 2L/dq is an integer and dt > 0
  /// Interior points -L + i dq, i = 1 .. 2L/dq - 1 (walls excluded, psi = 0 there).
  std::vector<double> points() const;
};

/// One step (I + i H dt/2) psi' = (I - i H dt/2) psi, central-difference
/// kinetic term, tridiagonal solve.
std::vector<Complex> cn_step(const std::vector<Complex>& samples, const GridConfig& cfg, double g_root);

/// Repeated stepping with a factorization shared across steps.
class CrankNicolson {
 public:
  CrankNicolson(const GridConfig& cfg, double g_root);
  void step(std::vector<Complex>& psi) const;
  const std::vector<double>& grid() const { return q_; }

 private:
  GridConfig cfg_;
  std::vector<double> q_;
  std::vector<Complex> rhs_diag_;  // 1 - i dt/2 (1/dq^2 + V)
  Complex off_;                    // i dt/2 * (-1/(2 dq^2)), same on both sides
  std::vector<Complex> cprime_;    // Thomas forward-elimination coefficients
  std::vector<Complex> denom_;
};

struct CnResult {
  std::vector<AutocorrelationPoint> trace;  // modal_norm holds ||psi||^2 on the grid
  double edge_amplitude = 0.0;  // max |psi| within 5% of either wall, over the recorded times
  bool boundary_warning = false;  // edge_amplitude > 1e-6
  double norm_loss = 0.0;         // 1 - ||psi(t_end)||^2 / ||psi(0)||^2
};

/// P(t) = |<psi(t)|psi(0)>|^2 at each requested time.  Times must be
/// nonnegative, increasing and integer multiples of dt.
CnResult cn_autocorrelation(const PacketState& packet, const std::vector<double>& times,
                            const GridConfig& cfg, double g_root);

}  // namespace cubres
