#include "cubres/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cubres/errors.hpp"

namespace cubres {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix rotated_matrix(Complex g_root, double theta, int n_max) {
  const Complex rot = std::polar(1.0, theta);
  return cubic_operator(1.0 / (rot * rot), rot * rot, g_root * rot * rot * rot,
                        n_max);
}

// Wrap to (-pi, pi].
double wrap_phase(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

// Last row whose subdiagonal entry in the (partially) reduced Schur form is
// still nonnegligible.
long unreduced_index(const ComplexMatrix& m) {
  Eigen::ComplexSchur<ComplexMatrix> schur(m.rows());
  schur.compute(m, false);
  const ComplexMatrix& t = schur.matrixT();
  const double eps = std::numeric_limits<double>::epsilon();
  for (long i = t.rows() - 1; i > 0; --i) {
    const double scale = std::abs(t(i, i)) + std::abs(t(i - 1, i - 1));
    if (std::abs(t(i, i - 1)) > eps * scale) return i;
  }
  return 0;
}

struct Candidate {
  Complex energy;
  long column = -1;  // column in the eigenvector matrix
  double trunc = 0.0;
  double spread = 0.0;
};

struct Classified {
  std::vector<Candidate> stable;  // sorted by Re E
  std::vector<EigenPair> pairs;
  std::vector<Complex> bigger;
  std::vector<Complex> shifted;
};

double shifted_theta(const OscillatorSpec& spec, double dtheta) {
  const double phase = wrap_phase(stokes_phase(spec));
  const double centre = phase > 0.0 ? kPi / 2.0 : -kPi / 2.0;
  const double theta_c = spec.theta + (centre - phase) / 5.0;
  return spec.theta + (theta_c >= spec.theta ? dtheta : -dtheta);
}

double nearest_distance(Complex z, const std::vector<Complex>& pool) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& w : pool) best = std::min(best, std::abs(z - w));
  return best;
}

void require_wedge(const OscillatorSpec& spec) {
  spec.validate();
  if (!theta_in_wedge(spec)) {
    std::ostringstream msg;
    msg << "rotation angle " << spec.theta << " rad puts the cubic term at phase "
        << stokes_phase(spec) << ", outside the open wedge where the oscillator "
        << "basis converges";
    throw DomainError(msg.str());
  }
}

Classified classify(const OscillatorSpec& spec, const ResonanceOptions& opt,
                    bool vectors) {
  require_wedge(spec);
  if (opt.delta_n < 1) throw DomainError("delta_n must be at least 1");
  Classified out;
  out.pairs = eig_complex(assemble_hamiltonian(spec), opt.eig_tol, vectors);
  out.bigger = eigenvalues(rotated_matrix(spec.g_root, spec.theta, spec.n_max + opt.delta_n));
  const double theta2 = shifted_theta(spec, opt.delta_theta);
  out.shifted = eigenvalues(rotated_matrix(spec.g_root, theta2, spec.n_max));

  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    Candidate c;
    c.energy = out.pairs[i].value;
    c.column = static_cast<long>(i);
    c.trunc = nearest_distance(c.energy, out.bigger);
    c.spread = nearest_distance(c.energy, out.shifted);
    const double mag = std::abs(c.energy);
    const bool tight = c.spread <= std::max(opt.stability_factor * c.trunc, 1e-9 * (1.0 + mag));
    const bool moving = c.spread > 0.1 * opt.delta_theta * mag;
    if (tight && !moving) out.stable.push_back(c);
  }
  std::stable_sort(out.stable.begin(), out.stable.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.energy.real() < b.energy.real();
                   });
  return out;
}

ResonanceLevel make_level(int index, const Candidate& c, const Classified& cl) {
  ResonanceLevel lv;
  lv.index = index;
  lv.energy = c.energy;
  lv.width = std::max(0.0, -2.0 * c.energy.imag());
  lv.uncertainty = std::max(c.trunc, 1e-12 * (1.0 + std::abs(c.energy)));
  lv.theta_spread = c.spread;
  if (cl.pairs[static_cast<std::size_t>(c.column)].vector.size() > 0) {
    lv.coefficients = c_normalize(cl.pairs[static_cast<std::size_t>(c.column)].vector);
  }
  return lv;
}

// g = 0: energies are N + 1/2 exactly.  At theta != 0 the eigenvectors of the
// rotated matrix are no longer unit vectors; they are taken from the
// diagonalization and only levels whose eigenvalue reproduces N + 1/2 are kept.
ResonanceSet harmonic_set(const OscillatorSpec& spec, int count) {
  ResonanceSet set{spec, {}};
  if (spec.theta == 0.0) {
    for (int n = 0; n < count; ++n) {
      ResonanceLevel lv;
      lv.index = n;
      lv.energy = Complex{n + 0.5, 0.0};
      lv.coefficients = ComplexVector::Zero(spec.n_max + 1);
      lv.coefficients(n) = 1.0;
      set.levels.push_back(std::move(lv));
    }
    return set;
  }
  const auto pairs = eig_complex(rotated_matrix(Complex{}, spec.theta, spec.n_max), 1e-10, true);
  std::vector<Complex> values;
  for (const auto& p : pairs) values.push_back(p.value);
  for (int n = 0; n < count; ++n) {
    const Complex exact{n + 0.5, 0.0};
    const std::size_t k = nearest_match(exact, values);
    const double err = std::abs(values[k] - exact);
    if (err > 1e-8 * (1.0 + n)) break;
    ResonanceLevel lv;
    lv.index = n;
    lv.energy = exact;
    lv.coefficients = c_normalize(pairs[k].vector);
    lv.uncertainty = err;
    set.levels.push_back(std::move(lv));
  }
  if (set.levels.empty()) throw ConvergenceError("rotated harmonic basis did not converge");
  return set;
}

void check_count(const OscillatorSpec& spec, int count) {
  if (count < 1) throw DomainError("level count must be positive");
  if (count > spec.n_max / 4) {
    std::ostringstream msg;
    msg << "requested " << count << " levels but n_max=" << spec.n_max
        << " supports at most n_max/4";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::vector<EigenPair> eig_complex(const ComplexMatrix& m, double tol, bool vectors) {
  if (m.rows() != m.cols()) throw DomainError("eig_complex needs a square matrix");
  if (!(tol > 0.0)) throw DomainError("eig_complex tolerance must be positive");
  std::vector<EigenPair> out;
  if (m.rows() == 0) return out;

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, vectors);
  if (solver.info() != Eigen::Success) {
    const long idx = unreduced_index(m);
    throw EigenConvergenceError("Schur iteration did not converge", idx);
  }
  const auto& vals = solver.eigenvalues();
  const double bound = tol * m.norm();
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (long i = 0; i < m.rows(); ++i) {
    EigenPair p;
    p.value = vals(i);
    if (vectors) {
      p.vector = solver.eigenvectors().col(i);
      p.vector.normalize();
      const double res = (m * p.vector - p.value * p.vector).norm();
      if (!(res <= bound)) {
        std::ostringstream msg;
        msg << "eigenpair " << i << " residual " << res << " exceeds " << bound;
        throw NumericalError(msg.str());
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw EigenConvergenceError("Schur iteration did not converge", unreduced_index(m));
  }
  const auto& vals = solver.eigenvalues();
  return std::vector<Complex>(vals.data(), vals.data() + vals.size());
}

double default_theta(Complex g_root) {
  if (g_root.real() == 0.0 && g_root.imag() != 0.0) return 0.0;
  return 3.0 * kPi / 20.0;
}

bool theta_in_wedge(const OscillatorSpec& spec) {
  if (spec.is_free()) return true;
  const double phase = wrap_phase(stokes_phase(spec));
  return phase != 0.0 && std::abs(phase) < kPi;
}

std::size_t nearest_match(Complex z, const std::vector<Complex>& pool) {
  if (pool.empty()) throw DomainError("nearest_match on an empty pool");
  std::size_t i1 = pool.size(), i2 = pool.size();
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double d = std::abs(z - pool[i]);
    if (d < d1) {
      d2 = d1;
      i2 = i1;
      d1 = d;
      i1 = i;
    } else if (d < d2) {
      d2 = d;
      i2 = i;
    }
  }
  if (i2 < pool.size() && std::abs(pool[i1] - pool[i2]) <= d1) {
    std::ostringstream msg;
    msg << "ambiguous match for " << z << ": candidates " << pool[i1] << " and "
        << pool[i2] << " are closer to each other than the distance " << d1;
    throw MatchingAmbiguityError(msg.str());
  }
  return i1;
}

ComplexVector c_normalize(const ComplexVector& v) {
  const Complex s = (v.array() * v.array()).sum();
  if (std::abs(s) < 1e-14 * v.squaredNorm() || std::abs(s) == 0.0) {
    throw NumericalError("vector is (nearly) self-orthogonal under the c-product");
  }
  ComplexVector out = v / std::sqrt(s);
  Eigen::Index imax = 0;
  out.cwiseAbs().maxCoeff(&imax);
  if (out(imax).real() < 0.0) out = -out;
  return out;
}

ResonanceSet resonances(const OscillatorSpec& spec, int count,
                        const ResonanceOptions& opt) {
  spec.validate();
  check_count(spec, count);
  if (spec.is_free()) {
    ResonanceSet set = harmonic_set(spec, count);
    if (static_cast<int>(set.levels.size()) < count) {
      throw ConvergenceError("rotated harmonic basis resolves fewer levels than requested");
    }
    return set;
  }

  const Classified cl = classify(spec, opt, true);
  if (static_cast<int>(cl.stable.size()) < count) {
    std::ostringstream msg;
    msg << "only " << cl.stable.size() << " theta-stable levels found, " << count
        << " requested (rotation angle too small or basis too small)";
    throw ConvergenceError(msg.str());
  }
  const bool real_g = spec.g_root.imag() == 0.0 && spec.g_root.real() > 0.0;
  ResonanceSet set{spec, {}};
  for (int n = 0; n < count; ++n) {
    const Candidate& c = cl.stable[static_cast<std::size_t>(n)];
    nearest_match(c.energy, cl.bigger);
    nearest_match(c.energy, cl.shifted);
    ResonanceLevel lv = make_level(n, c, cl);
    if (lv.uncertainty > opt.ceiling) {
      std::ostringstream msg;
      msg << "level " << n << " uncertainty " << lv.uncertainty << " exceeds ceiling "
          << opt.ceiling;
      throw ConvergenceError(msg.str());
    }
    if (real_g && lv.energy.imag() > lv.uncertainty) {
      std::ostringstream msg;
      msg << "level " << n << " has Im E = " << lv.energy.imag()
          << " > 0 for real positive coupling";
      throw NumericalError(msg.str());
    }
    set.levels.push_back(std::move(lv));
  }
  return set;
}

ResonanceSet resonance_basis(const OscillatorSpec& spec, int max_modes,
                             const ResonanceOptions& opt) {
  spec.validate();
  if (max_modes < 1) throw DomainError("max_modes must be positive");
  if (spec.is_free()) {
    return harmonic_set(spec, std::min(max_modes, spec.n_max + 1));
  }
  const Classified cl = classify(spec, opt, true);
  ResonanceSet set{spec, {}};
  for (const Candidate& c : cl.stable) {
    if (static_cast<int>(set.levels.size()) >= max_modes) break;
    ResonanceLevel lv = make_level(static_cast<int>(set.levels.size()), c, cl);
    if (lv.uncertainty > opt.ceiling) continue;
    set.levels.push_back(std::move(lv));
  }
  if (set.levels.empty()) throw ConvergenceError("no converged resonance found");
  return set;
}

std::vector<double> theta_stability(const OscillatorSpec& spec,
                                    const std::vector<double>& thetas, int count,
                                    const ResonanceOptions& opt) {
  if (thetas.empty()) throw DomainError("theta_stability needs at least one angle");
  for (double th : thetas) {
    OscillatorSpec s = spec;
    s.theta = th;
    require_wedge(s);
  }
  check_count(spec, count);
  std::vector<double> spread(static_cast<std::size_t>(count), 0.0);
  if (spec.is_free()) return spread;

  OscillatorSpec s0 = spec;
  s0.theta = thetas.front();
  const ResonanceSet ref = resonances(s0, count, opt);
  std::vector<std::vector<Complex>> seen(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) seen[static_cast<std::size_t>(n)].push_back(ref.levels[static_cast<std::size_t>(n)].energy);

  for (std::size_t a = 1; a < thetas.size(); ++a) {
    OscillatorSpec s = spec;
    s.theta = thetas[a];
    const std::vector<Complex> ev = eigenvalues(assemble_hamiltonian(s));
    for (int n = 0; n < count; ++n) {
      const Complex e0 = ref.levels[static_cast<std::size_t>(n)].energy;
      seen[static_cast<std::size_t>(n)].push_back(ev[nearest_match(e0, ev)]);
    }
  }
  for (int n = 0; n < count; ++n) {
    const auto& v = seen[static_cast<std::size_t>(n)];
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) worst = std::max(worst, std::abs(v[i] - v[j]));
    spread[static_cast<std::size_t>(n)] = worst;
  }
  return spread;
}

std::vector<double> truncation_uncertainty(const OscillatorSpec& spec, int count,
                                           int delta_n, const ResonanceOptions& opt) {
  spec.validate();
  if (delta_n < 1) throw DomainError("delta_n must be at least 1");
  if (count < 1) throw DomainError("level count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  if (spec.is_free()) return out;

  ResonanceOptions o = opt;
  o.delta_n = delta_n;
  const Classified cl = classify(spec, o, false);
  if (static_cast<int>(cl.stable.size()) < count) {
    throw ConvergenceError("too few theta-stable levels for a truncation estimate");
  }
  for (int n = 0; n < count; ++n) {
    const Candidate& c = cl.stable[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(n)] = std::abs(c.energy - cl.bigger[nearest_match(c.energy, cl.bigger)]);
  }
  return out;
}

}  // namespace cubres
