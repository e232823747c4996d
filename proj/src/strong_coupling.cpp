#include "cubres/strong_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include <Eigen/SVD>

#include "cubres/errors.hpp"
#include "cubres/spectral.hpp"

namespace cubres {

namespace {

constexpr double kPi = std::numbers::pi;

void check_theta(double theta) {
  if (!(theta > kPi / 10.0 && theta < kPi / 5.0)) {
    std::ostringstream msg;
    msg << "rotation angle " << theta
        << " rad outside (pi/10, pi/5): the q^3 resonances are either not uncovered "
        << "or the rotated operator leaves the convergence wedge";
    throw DomainError(msg.str());
  }
}

double distance_to(Complex z, const std::vector<Complex>& pool) {
  double best = std::numeric_limits<double>::infinity();
  for (const Complex& w : pool) best = std::min(best, std::abs(z - w));
  return best;
}

// Stable eigenvalues of H_l + lambda q^2/2, sorted by Re.
std::vector<Complex> stable_levels(double lambda, const StrongCouplingOptions& opt) {
  const double mid = 3.0 * kPi / 20.0;
  const double theta2 = opt.theta + (opt.theta <= mid ? opt.delta_theta : -opt.delta_theta);
  const auto base = eigenvalues(symanzik_hamiltonian(lambda, opt.theta, opt.n_max));
  const auto bigger = eigenvalues(symanzik_hamiltonian(lambda, opt.theta, opt.n_max + opt.delta_n));
  const auto shifted = eigenvalues(symanzik_hamiltonian(lambda, theta2, opt.n_max));
  std::vector<Complex> out;
  for (const Complex& e : base) {
    const double trunc = distance_to(e, bigger);
    const double spread = distance_to(e, shifted);
    const double mag = std::abs(e);
    if (spread <= std::max(100.0 * trunc, 1e-9 * (1.0 + mag)) && spread <= 0.1 * opt.delta_theta * mag &&
        trunc <= 1e-6 * (1.0 + mag)) {
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  return out;
}

void check_ladder(const std::vector<double>& ladder, int k_max) {
  if (k_max < 1) throw DomainError("k_max must be at least 1");
  if (static_cast<int>(ladder.size()) < 2 * k_max) {
    throw DomainError("coupling ladder needs at least 2 k_max points");
  }
  const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
  if (!(*lo > 0.0)) throw DomainError("coupling ladder must be positive");
  if (*hi < 10.0 * *lo) throw DomainError("coupling ladder must span at least one decade");
}

}  // namespace

const StrongCouplingRow& StrongCouplingTable::row(int level) const {
  for (const auto& r : rows)
    if (r.level == level) return r;
  throw DomainError("level not present in the strong-coupling table");
}

ComplexMatrix symanzik_hamiltonian(double lambda, double theta, int n_max) {
  const Complex rot = std::polar(1.0, theta);
  return cubic_operator(1.0 / (rot * rot), lambda * rot * rot, rot * rot * rot, n_max);
}

std::vector<Complex> leading_spectrum(double theta, int n_max, int count) {
  check_theta(theta);
  if (count < 1 || count > n_max / 4) throw DomainError("level count must lie in [1, n_max/4]");
  StrongCouplingOptions opt;
  opt.theta = theta;
  opt.n_max = n_max;
  std::vector<Complex> lv = stable_levels(0.0, opt);
  if (static_cast<int>(lv.size()) < count) {
    throw ConvergenceError("too few theta-stable levels of the leading Hamiltonian");
  }
  lv.resize(static_cast<std::size_t>(count));
  return lv;
}

std::vector<double> default_ladder() {
  std::vector<double> g;
  for (int i = 0; i <= 12; ++i) g.push_back(std::pow(10.0, 1.0 + 0.25 * i));
  return g;
}

StrongCouplingTable fit_table(int count, const std::vector<double>& g_ladder, int k_max,
                              const StrongCouplingOptions& opt) {
  check_theta(opt.theta);
  check_ladder(g_ladder, k_max);
  if (count < 1) throw DomainError("level count must be positive");

  // Track each level from lambda = 0 upward (g downward) by nearest match.
  std::vector<double> lam;
  for (double g : g_ladder) lam.push_back(std::pow(g, -0.4));
  std::sort(lam.begin(), lam.end());

  std::vector<Complex> current = stable_levels(0.0, opt);
  if (static_cast<int>(current.size()) < count) {
    throw ConvergenceError("too few theta-stable levels of the leading Hamiltonian");
  }
  current.resize(static_cast<std::size_t>(count));
  std::vector<std::future<std::vector<Complex>>> jobs;
  for (double l : lam) {
    jobs.push_back(std::async(std::launch::async, [l, &opt] {
      return eigenvalues(symanzik_hamiltonian(l, opt.theta, opt.n_max));
    }));
  }
  std::vector<std::vector<Complex>> y(static_cast<std::size_t>(count));
  for (auto& job : jobs) {
    const auto ev = job.get();
    for (int n = 0; n < count; ++n) {
      const Complex e = ev[nearest_match(current[static_cast<std::size_t>(n)], ev)];
      current[static_cast<std::size_t>(n)] = e;
      y[static_cast<std::size_t>(n)].push_back(e);
    }
  }

  const long rows = static_cast<long>(lam.size()), cols = k_max + 1;
  Eigen::MatrixXd a(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long k = 0; k < cols; ++k) a(i, k) = std::pow(lam[static_cast<std::size_t>(i)], static_cast<double>(k));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!std::isfinite(cond) || cond > 1e13) {
    std::ostringstream msg;
    msg << "strong-coupling design matrix is ill-conditioned (condition " << cond << ")";
    throw NumericalError(msg.str());
  }

  StrongCouplingTable table;
  for (int n = 0; n < count; ++n) {
    const auto& yn = y[static_cast<std::size_t>(n)];
    Eigen::VectorXd re(rows), im(rows);
    for (long i = 0; i < rows; ++i) {
      re(i) = yn[static_cast<std::size_t>(i)].real();
      im(i) = yn[static_cast<std::size_t>(i)].imag();
    }
    const Eigen::VectorXd cre = svd.solve(re), cim = svd.solve(im);
    StrongCouplingRow row;
    row.level = n;
    row.condition = cond;
    for (long k = 0; k < cols; ++k) row.coefficients.emplace_back(cre(k), cim(k));
    const Eigen::VectorXd rre = a * cre - re, rim = a * cim - im;
    double worst = 0.0;
    for (long i = 0; i < rows; ++i) worst = std::max(worst, std::hypot(rre(i), rim(i)));
    row.residual = worst;
    table.rows.push_back(std::move(row));
  }
  return table;
}

StrongCouplingRow fit_coefficients(int level, const std::vector<double>& g_ladder, int k_max,
                                   const StrongCouplingOptions& opt) {
  if (level < 0) throw DomainError("level must be nonnegative");
  StrongCouplingTable t = fit_table(level + 1, g_ladder, k_max, opt);
  return t.rows.back();
}

Complex evaluate(int level, double g, const StrongCouplingTable& table, int k_max) {
  if (!(g > 0.0)) throw DomainError("evaluate needs g > 0");
  const StrongCouplingRow& r = table.row(level);
  if (k_max < 0 || k_max >= static_cast<int>(r.coefficients.size())) {
    throw DomainError("table has fewer coefficients than k_max");
  }
  const double lam = std::pow(g, -0.4);
  Complex acc{};
  for (int k = k_max; k >= 0; --k) acc = acc * lam + r.coefficients[static_cast<std::size_t>(k)];
  return std::pow(g, 0.2) * acc;
}

}  // namespace cubres
