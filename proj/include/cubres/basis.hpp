#pragma once

// Harmonic-oscillator basis and the complex-scaled cubic Hamiltonian.
//
// The unit-frequency basis phi_j(q) = H_j(q) exp(-q^2/2) / (pi^{1/4} sqrt(2^j j!))
// is used throughout.  Under the dilation q -> q e^{i theta} the operator
//
//   H = -1/2 d^2/dq^2 + 1/2 q^2 + sqrt(g) q^3
//
// becomes e^{-2i theta} (-1/2 d^2 + 1/2 q^2 e^{4i theta} + sqrt(g) q^3 e^{5i theta}),
// a complex symmetric (not Hermitian) matrix in this basis.

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace cubres {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Problem definition.  The coupling is stored through its square root; a
/// purely imaginary root i*beta selects the PT-symmetric Hamiltonian.
struct OscillatorSpec {
  Complex g_root{0.0, 0.0};
  double theta = 0.0;  // rotation angle in radians
  int n_max = 200;     // highest basis index kept

  Complex coupling() const { return g_root * g_root; }
  bool is_pt() const { return g_root.real() == 0.0 && g_root.imag() != 0.0; }
  bool is_free() const { return g_root == Complex{}; }

  /// Throws DomainError unless n_max >= 1 and 0 <= theta < pi/4.
  void validate() const;

  static OscillatorSpec real_coupling(double g, double theta, int n_max);
  static OscillatorSpec pt_symmetric(double beta, double theta, int n_max);
};

/// Upper bound (exclusive) on the rotation angle: the Gaussian factor of the
/// basis functions at argument q e^{-i theta} must still decay.
inline constexpr double kMaxTheta = std::numbers::pi / 4.0;

/// <n| q^2 |m>.
double q2_element(int n, int m);
/// <n| q^3 |m>.
double q3_element(int n, int m);
/// <n| p^2 |m> with p = -i d/dq.
double p2_element(int n, int m);

/// Matrix of  kinetic * p^2/2 + quadratic * q^2/2 + cubic * q^3  on
/// phi_0 .. phi_{n_max}.  No validation; building block for the scaled and
/// Symanzik-scaled operators.
ComplexMatrix cubic_operator(Complex kinetic, Complex quadratic, Complex cubic,
                             int n_max);

/// The complex-scaled cubic Hamiltonian for `spec`.  Rejects invalid specs.
ComplexMatrix assemble_hamiltonian(const OscillatorSpec& spec);

/// phi_j(z) at complex z, via the three-term recurrence on the weighted
/// functions.  Throws BasisOverflowError when the value is not representable.
Complex basis_function(int j, Complex z);

/// phi_0(z) .. phi_{j_max}(z) in one pass.
std::vector<Complex> basis_functions(int j_max, Complex z);

/// Phase of the rotated cubic term relative to the kinetic term,
/// arg(sqrt g) + 5 theta.  The rotated eigenproblem is well posed in the
/// oscillator basis only when this lies strictly inside (0, pi).
double stokes_phase(const OscillatorSpec& spec);

}  // namespace cubres
