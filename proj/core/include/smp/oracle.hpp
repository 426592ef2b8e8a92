#pragma once

#include <functional>
#include <vector>

#include "smp/matrix.hpp"
#include "smp/model.hpp"

namespace smp {

/// Truncated probability table produced by direct convolution dynamic
/// programming, independent of the linear-system solvers. values[i-1][n]
/// holds the probability for start state i at time n, n = 0..n_max.
struct SeriesTable {
  /// Target state j of the underlying hitting problem.
  int target = 0;
  /// Occupied state s for occupation tables; 0 for hitting-time tables.
  int occupation = 0;
  int n_max = 0;
  std::vector<Vector> values;
  /// A trailing run of zeros at least this long certifies that the table's
  /// support has genuinely ended (no path of any length can revive it).
  int support_window = 0;
};

/// g_ij(n) = P_i{ mu_j = n, j hit before 0 }, computed by convolving the
/// kernel over the first jump:
///   g_ij(n) = Q_ij(n) + sum_{l != 0, j} sum_{k <= n} Q_il(k) g_lj(n - k).
SeriesTable dp_g(const SemiMarkovModel& model, double eps, int j, int n_max = 2000);

/// h_ijs(n) = P_i{ state at time n is s, neither 0 nor j hit by n }:
///   h_ijs(n) = 1{i = s} P_i{kappa > n} + sum_{l != 0, j} sum_{k <= n} Q_il(k) h_ljs(n - k).
SeriesTable dp_h(const SemiMarkovModel& model, double eps, int j, int s, int n_max = 2000);

/// Transition probabilities of the process killed at absorption, from start
/// state i: result[j-1][n] = P_i{ state at time n is j, 0 not hit by n }.
/// Computed over jump epochs: the epoch measure of landings in each state,
/// convolved with the holding-time survivor function.
std::vector<Vector> dp_transition(const SemiMarkovModel& model, double eps, int i, int n_max);

struct SeriesMoment {
  double value = 0.0;
  /// Certified upper bound on the mass lost to truncation at n_max.
  double tail_bound = 0.0;
};

/// sum_n n^r e^(rho n) * values[i-1][n], truncated at n_max, with a
/// geometric tail bound. When the table's support has demonstrably ended the
/// bound is zero. Otherwise the decay ratio q is read off the last 20
/// entries and the tail is bounded by the final term times
/// sum_{m >= 1} (q e^rho e^(r/n_max))^m. Throws TailNotCertified when the
/// entries are not yet decaying geometrically at n_max (raise n_max and
/// retry), i.e. whenever that geometric ratio reaches one.
SeriesMoment series_moment(const SeriesTable& table, int i, double rho, int r);

struct FdFit {
  Vector coeffs;
  /// Infinity-norm condition number of the normal equations on the integer
  /// grid (the exact power-of-h rescaling of coefficients is not included).
  double condition = 0.0;
};

/// Recovers expansion coefficients of a scalar function of eps by a
/// least-squares fit of a degree-k polynomial over the grid
/// {m h : m = 0..k+2}, h = eps_max / 32. The fit is performed in the scaled
/// variable eps/h and rescaled exactly afterwards. Exact for polynomial
/// inputs of degree <= k; for analytic inputs the highest fitted coefficient
/// absorbs an O(h) truncation bias from the first neglected term. Throws
/// IllConditioned when the grid's condition diagnostic exceeds 1e10.
FdFit fd_expansion_coeffs(const std::function<double(double)>& evaluator, int k, double eps_max);

}  // namespace smp
