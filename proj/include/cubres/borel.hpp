#pragma once

// Borel-Pade resummation of divergent power series, the PT quantization
// condition B(E, g) = N + 1/2, and resummed resonance energies.

#include <vector>

#include "cubres/basis.hpp"
#include "cubres/series.hpp"

namespace cubres {

enum class Contour { real_axis, c_plus_one };

struct ResummationConfig {
  int max_order = 25;        // largest Pade index M of the diagonal [M/M]
  int min_order = 2;
  Contour contour = Contour::real_axis;
  double ray_angle = std::numbers::pi / 4;  // angle of the C+1 ray above the axis
  double borel_b = 0.0;      // generalized transform: a_k / Gamma(k + 1 + b)
  int nodes = 16;            // Gauss-Legendre points per panel (checked against 2x)
  double cutoff = 60.0;      // Laplace integral truncated at Re(t) = cutoff
  double quad_tol = 1e-14;
  int max_depth = 16;        // bisections per panel before the order is dropped
  int window = 5;            // finite top orders entering value and spread
  double ceiling = 1e-2;     // pt_energy / resummed_energy uncertainty ceiling
};

struct PadeOrder {
  int m = 0;
  Complex value;
  bool finite = false;
};

struct ResummedValue {
  Complex value;
  double uncertainty = 0.0;
  int orders_used = 0;
  std::vector<PadeOrder> orders;  // every attempted M, for diagnostics
};

/// Borel-Pade sum of sum_k a_k g^k.  Throws DomainError for fewer than four
/// coefficients or g == 0, ConvergenceError when fewer than cfg.window orders
/// give a finite Laplace integral.
ResummedValue borel_pade(const std::vector<double>& coeffs, Complex g,
                         const ResummationConfig& cfg);
ResummedValue borel_pade(const std::vector<Rational>& coeffs, Complex g,
                         const ResummationConfig& cfg);

/// Resummed B(E, g) with coefficients b_k(E) from the exact series.
/// B(E, 0) = E exactly.
ResummedValue b_resummed(double e, Complex g, const ResummationConfig& cfg);

/// Real root of B(E, -beta^2) = n + 1/2.  The value's uncertainty is the
/// B spread divided by the local slope dB/dE.
ResummedValue pt_energy(int n, double beta, const ResummationConfig& cfg);

/// Resummed Rayleigh-Schroedinger energy of level n at real g > 0 along C+1.
ResummedValue resummed_energy(int n, double g, const ResummationConfig& cfg);

/// Default configuration for resonance energies: C+1 contour.
ResummationConfig resonance_config();

}  // namespace cubres
