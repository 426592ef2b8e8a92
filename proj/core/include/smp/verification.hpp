#pragma once

#include <string>
#include <vector>

#include "smp/model.hpp"

namespace smp {

/// Outcome of one cross-module consistency check. max_error is the largest
/// observed discrepancy in the check's own error measure (entries may be
/// signed slack; see each check), pass means max_error <= tolerance and no
/// semantic error interrupted the check.
struct CheckResult {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct OracleCheckOptions {
  /// Initial truncation of the probability tables; doubled on an uncertified
  /// tail until the cap.
  int n_max = 2000;
  int n_cap = 32000;
  /// Derivative orders r = 0..max_order are compared.
  int max_order = 2;
};

/// Hitting moments from the linear systems vs the truncated-series oracle,
/// all start states, r = 0..max_order. Error measure: |system - series| -
/// tail_bound, so slack is visible when negative.
CheckResult check_phi_against_oracle(const SemiMarkovModel& model, double eps, double rho, int j,
                                     const OracleCheckOptions& options = {});

/// Occupation moments vs the oracle, all start states and all occupied
/// states s, same error measure.
CheckResult check_omega_against_oracle(const SemiMarkovModel& model, double eps, double rho, int j,
                                       const OracleCheckOptions& options = {});

/// r = 1 and r = 2 solutions vs finite differences in rho of the r = 0
/// solve, for phi and omega. Step sizes are chosen per model from its own
/// higher moments to balance truncation against cancellation, and probes
/// never cross rho_ceiling (pass a value known finite, e.g. the root
/// bracket); the error measure is |fd - system| / (1 + |system|).
CheckResult check_rho_derivatives(const SemiMarkovModel& model, double eps, double rho, int j,
                                  double rho_ceiling = 1e300);

/// Max residual of the pairwise return/crossing identity over all state
/// pairs. Valid for rho at or below the characteristic root.
CheckResult check_solidarity(const SemiMarkovModel& model, double eps, double rho);

/// Occupation moments summed over the occupied state vs the stopped-time
/// transform: for rho != 0 compares against (E e^(rho min(mu_0, mu_j)) - 1)
/// / (e^rho - 1), at rho = 0 against E min(mu_0, mu_j).
CheckResult check_occupation_sum(const SemiMarkovModel& model, double eps, double rho, int j);

/// Coefficient-wise residual of the expanded linear systems: for each
/// derivative order r, the phi (and omega, for occupied state s) expansion
/// must satisfy x[n] = rhs[n] + sum_q B[0][q] x[n-q] per eps-order n, scaled
/// by 1 + |x[n]|.
CheckResult check_expansion_residuals(const SemiMarkovModel& model, double rho, int j, int s, int k);

/// Defining identity of the inverse expansion: sum_q (I delta_q0 - B[q])
/// U[n-q] equals the identity at n = 0 and vanishes for n = 1..k.
CheckResult check_u_identity(const SemiMarkovModel& model, double rho, int j, int k);

/// Order-zero eps-coefficients of the expansions vs direct solves at eps=0.
CheckResult check_expansion_base(const SemiMarkovModel& model, double rho, int j, int s, int k);

/// Expansion coefficients vs an independent polynomial fit of the concrete
/// solves over a small eps grid. Exact only when the functionals are
/// polynomials in eps of degree <= fitted degree, so restrict to such
/// models; degree is the model's kernel polynomial degree.
CheckResult check_expansion_vs_fit(const SemiMarkovModel& model, double rho, int j, int s, int k);

/// On models whose functionals are eps-polynomials of degree <= k - r, the
/// truncated expansion reproduces the concrete solve exactly: remainder at
/// eps within 1e-10 for every r with k - r >= degree.
CheckResult check_polynomial_remainder(const SemiMarkovModel& model, double eps, double rho, int j,
                                       int k, int degree);

/// Agreement of the three finiteness verdicts at (eps, rho, j): the
/// power-decay detector, solve_phi completing vs throwing, and solve_omega
/// completing vs throwing. max_error is the number of disagreements.
CheckResult check_finiteness_agreement(const SemiMarkovModel& model, double eps, double rho, int j);

/// Smallest rho at which the taboo block for target j stops contracting,
/// located by doubling and bisection on the detector. Returns infinity when
/// no divergence occurs (nilpotent taboo structure).
double divergence_threshold(const SemiMarkovModel& model, double eps, int j);

/// First-return decomposition of the killed transition probabilities:
/// P_ij(n) = h_iij(n) + sum_{k<=n} g_ii(k) P_ij(n-k) for n <= horizon, all
/// pairs, straight from the oracle tables.
CheckResult check_renewal_identity(const SemiMarkovModel& model, double eps, int horizon = 50);

/// Halves eps from eps_max until the gaps |phi(eps)-phi(0)|,
/// |omega(eps)-omega(0)| and |root(eps)-root(0)| (each normalized by
/// 1 + the quantity's own scale at eps_max) all fall below 1e-6, requiring
/// at least min_halvings steps, allowing at most max_halvings, and requiring
/// the gap sequences to be non-increasing throughout.
CheckResult check_convergence(const SemiMarkovModel& model, int j, int s, int min_halvings = 6,
                              int max_halvings = 60);

/// The standard per-model suite run by the command-line verifier: oracle
/// equivalence, derivative systems, solidarity, occupation sums, expansion
/// residuals and base points, the inverse-expansion identity, and root
/// consistency, at rho = 0 and at half the characteristic root.
std::vector<CheckResult> verify_model(const SemiMarkovModel& model, int target = 1);

}  // namespace smp
