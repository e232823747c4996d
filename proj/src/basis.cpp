#include "cubres/basis.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cubres/errors.hpp"

namespace cubres {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// sqrt((n+1)(n+2)...(n+k)), the ladder factor <n+k| (a^dagger)^k |n>.
double rising_root(int n, int k) {
  double prod = 1.0;
  for (int i = 1; i <= k; ++i) prod *= static_cast<double>(n + i);
  return std::sqrt(prod);
}

}  // namespace

void OscillatorSpec::validate() const {
  if (n_max < 1) {
    throw DomainError("n_max must be at least 1");
  }
  if (!(theta >= 0.0 && theta < kMaxTheta)) {
    std::ostringstream msg;
    msg << "rotation angle " << theta << " rad outside [0, pi/4)";
    throw DomainError(msg.str());
  }
  if (!std::isfinite(g_root.real()) || !std::isfinite(g_root.imag())) {
    throw DomainError("coupling root must be finite");
  }
}

OscillatorSpec OscillatorSpec::real_coupling(double g, double theta, int n_max) {
  if (g < 0.0) throw DomainError("real coupling g must be nonnegative");
  return OscillatorSpec{Complex{std::sqrt(g), 0.0}, theta, n_max};
}

OscillatorSpec OscillatorSpec::pt_symmetric(double beta, double theta, int n_max) {
  return OscillatorSpec{Complex{0.0, beta}, theta, n_max};
}

double q2_element(int n, int m) {
  if (n > m) std::swap(n, m);
  if (m == n) return n + 0.5;
  if (m == n + 2) return 0.5 * rising_root(n, 2);
  return 0.0;
}

double p2_element(int n, int m) {
  if (n > m) std::swap(n, m);
  if (m == n) return n + 0.5;
  if (m == n + 2) return -0.5 * rising_root(n, 2);
  return 0.0;
}

double q3_element(int n, int m) {
  // q^3 = (a + a^dagger)^3 / (2 sqrt 2); normal ordering gives
  // <n+1|q^3|n> = 3 (n+1)^{3/2} / (2 sqrt 2), <n+3|q^3|n> = sqrt((n+1)(n+2)(n+3)) / (2 sqrt 2).
  if (n > m) std::swap(n, m);
  const double scale = 0.5 * kInvSqrt2;
  if (m == n + 1) return scale * 3.0 * std::pow(static_cast<double>(n + 1), 1.5);
  if (m == n + 3) return scale * rising_root(n, 3);
  return 0.0;
}

ComplexMatrix cubic_operator(Complex kinetic, Complex quadratic, Complex cubic,
                             int n_max) {
  const int dim = n_max + 1;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    h(n, n) = 0.5 * (kinetic + quadratic) * (n + 0.5);
    if (n + 2 < dim) {
      const double r = 0.5 * rising_root(n, 2);
      const Complex v = 0.5 * (quadratic - kinetic) * r;
      h(n, n + 2) = v;
      h(n + 2, n) = v;
    }
    if (cubic != Complex{}) {
      if (n + 1 < dim) {
        const Complex v = cubic * q3_element(n, n + 1);
        h(n, n + 1) = v;
        h(n + 1, n) = v;
      }
      if (n + 3 < dim) {
        const Complex v = cubic * q3_element(n, n + 3);
        h(n, n + 3) = v;
        h(n + 3, n) = v;
      }
    }
  }
  return h;
}

ComplexMatrix assemble_hamiltonian(const OscillatorSpec& spec) {
  spec.validate();
  const Complex rot = std::polar(1.0, spec.theta);
  const Complex kinetic = 1.0 / (rot * rot);
  const Complex quadratic = rot * rot;
  const Complex cubic = spec.g_root * rot * rot * rot;
  return cubic_operator(kinetic, quadratic, cubic, spec.n_max);
}

std::vector<Complex> basis_functions(int j_max, Complex z) {
  if (j_max < 0) throw DomainError("basis index must be nonnegative");
  std::vector<Complex> phi(static_cast<std::size_t>(j_max) + 1);

  // pi^{-1/4} e^{-z^2/2}; the modulus is e^{-Re(z^2)/2}.
  const Complex z2 = z * z;
  const double log_mod = -0.5 * z2.real();
  if (log_mod > 700.0) {
    throw BasisOverflowError("Gaussian weight exceeds the double range", 0, z);
  }
  const double pi_quarter = 0.75112554446494248286;  // pi^{-1/4}
  phi[0] = pi_quarter * std::exp(-0.5 * z2);
  if (j_max >= 1) phi[1] = std::sqrt(2.0) * z * phi[0];
  for (int j = 1; j < j_max; ++j) {
    const double a = std::sqrt(2.0 / (j + 1));
    const double b = std::sqrt(static_cast<double>(j) / (j + 1));
    phi[j + 1] = a * z * phi[j] - b * phi[j - 1];
    if (!std::isfinite(phi[j + 1].real()) || !std::isfinite(phi[j + 1].imag())) {
      throw BasisOverflowError("basis function overflow", j + 1, z);
    }
  }
  return phi;
}

Complex basis_function(int j, Complex z) { return basis_functions(j, z).back(); }

double stokes_phase(const OscillatorSpec& spec) {
  return std::arg(spec.g_root) + 5.0 * spec.theta;
}

}  // namespace cubres
