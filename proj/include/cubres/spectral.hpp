#pragma once

// Method I: diagonalization of the complex-scaled Hamiltonian, separation of
// resonances from the rotated continuum, c-normalized eigenvectors and
// truncation uncertainties.

#include <vector>

#include "cubres/basis.hpp"

namespace cubres {

struct EigenPair {
  Complex value;
  ComplexVector vector;  // unit 2-norm; empty when vectors were not requested
};

/// All eigenvalues (and optionally right eigenvectors) of a square complex
/// matrix.  Every returned pair satisfies ||m v - lambda v|| <= tol ||m||_F.
/// Throws EigenConvergenceError if the Schur iteration stalls and
/// NumericalError if the residual contract fails.
std::vector<EigenPair> eig_complex(const ComplexMatrix& m, double tol,
                                   bool vectors = true);

/// Eigenvalues only, no residual check.
std::vector<Complex> eigenvalues(const ComplexMatrix& m);

struct ResonanceLevel {
  int index = 0;  // N, position after sorting by Re E
  Complex energy;
  double width = 0.0;          // -2 Im E, clipped at zero
  ComplexVector coefficients;  // c_{N,J}, sum_J c^2 = 1
  double uncertainty = 0.0;
  double theta_spread = 0.0;   // |E(theta) - E(theta')| seen by the filter
};

struct ResonanceSet {
  OscillatorSpec spec;
  std::vector<ResonanceLevel> levels;
};

struct ResonanceOptions {
  int delta_n = 40;              // basis increase for the truncation estimate
  double delta_theta = 0.05;     // angle shift for the stability filter (rad)
  double stability_factor = 100; // theta spread allowed per unit truncation error
  double ceiling = 1e-6;         // largest acceptable uncertainty
  double eig_tol = 1e-10;
};

/// Default rotation angle: 3pi/20 for real coupling, 0 for the PT case.
double default_theta(Complex g_root);

/// True when arg(sqrt g) + 5 theta lies strictly inside (-pi, pi) and is not 0,
/// i.e. the rotated cubic term still confines the oscillator basis.
bool theta_in_wedge(const OscillatorSpec& spec);

/// The `count` lowest stable levels, sorted by Re E.
/// DomainError: invalid spec, count > n_max/4, theta outside the wedge.
/// ConvergenceError: too few stable levels, or uncertainty above the ceiling.
/// NumericalError: real positive g with Im E above its uncertainty.
ResonanceSet resonances(const OscillatorSpec& spec, int count,
                        const ResonanceOptions& opt = {});

/// Every stable level whose uncertainty is below the ceiling, up to
/// `max_modes`.  Used as the modal basis for propagation.
ResonanceSet resonance_basis(const OscillatorSpec& spec, int max_modes,
                             const ResonanceOptions& opt = {});

/// Max pairwise spread of each of the `count` lowest levels over the angle
/// set.  Levels are identified at thetas[0] and tracked by nearest match.
std::vector<double> theta_stability(const OscillatorSpec& spec,
                                    const std::vector<double>& thetas, int count,
                                    const ResonanceOptions& opt = {});

/// |E(n_max) - E(n_max + delta_n)| for the `count` lowest theta-stable levels.
std::vector<double> truncation_uncertainty(const OscillatorSpec& spec, int count,
                                           int delta_n,
                                           const ResonanceOptions& opt = {});

/// Index of the element of `pool` nearest to z.  Throws MatchingAmbiguityError
/// when the runner-up is as close to the winner as z is.
std::size_t nearest_match(Complex z, const std::vector<Complex>& pool);

/// Scale v so that sum_J v_J^2 = 1 (no conjugation).  The largest component
/// is given a positive real part.
ComplexVector c_normalize(const ComplexVector& v);

}  // namespace cubres
