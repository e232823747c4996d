#pragma once

// Strong-coupling expansion E_N(g) = g^{1/5} sum_K L_{N,K} g^{-2K/5}.
//
// Under q -> g^{-1/10} q the cubic Hamiltonian becomes
//   g^{1/5} [ -1/2 d^2 + q^3 + lambda q^2 / 2 ],   lambda = g^{-2/5},
// so E_N(g) g^{-1/5} is an eigenvalue of H_l + lambda q^2/2 and the L_{N,K}
// are its Taylor coefficients in lambda.

#include <vector>

#include "cubres/basis.hpp"

namespace cubres {

struct StrongCouplingOptions {
  double theta = 5.0 * std::numbers::pi / 36.0;  // 25 deg
  int n_max = 240;
  int delta_n = 40;
  double delta_theta = 0.03;
};

struct StrongCouplingRow {
  int level = 0;
  std::vector<Complex> coefficients;  // L_{N,0} .. L_{N,k_max}
  double residual = 0.0;              // max |fit - data| over the ladder
  double condition = 0.0;             // 2-norm condition of the design matrix
};

struct StrongCouplingTable {
  std::vector<StrongCouplingRow> rows;
  const StrongCouplingRow& row(int level) const;
};

/// Matrix of e^{-2i theta} p^2/2 + lambda e^{2i theta} q^2/2 + e^{3i theta} q^3.
ComplexMatrix symanzik_hamiltonian(double lambda, double theta, int n_max);

/// The `count` lowest (by Re) theta-stable eigenvalues of the rotated
/// H_l = -1/2 d^2 + q^3.  Requires pi/10 < theta < pi/5.
std::vector<Complex> leading_spectrum(double theta, int n_max, int count);

/// Geometric ladder 10^1 .. 10^4 with 13 points.
std::vector<double> default_ladder();

/// Least-squares fit of E_N(g) g^{-1/5} against powers of g^{-2/5}.
/// DomainError for a ladder spanning less than a decade or with fewer than
/// 2 k_max points; NumericalError for an ill-conditioned design matrix.
StrongCouplingRow fit_coefficients(int level, const std::vector<double>& g_ladder,
                                   int k_max, const StrongCouplingOptions& opt = {});

/// Rows for levels 0 .. count-1 sharing one set of ladder diagonalizations.
StrongCouplingTable fit_table(int count, const std::vector<double>& g_ladder, int k_max,
                              const StrongCouplingOptions& opt = {});

/// g^{1/5} sum_{K <= k_max} L_{N,K} g^{-2K/5}.
Complex evaluate(int level, double g, const StrongCouplingTable& table, int k_max);

}  // namespace cubres
