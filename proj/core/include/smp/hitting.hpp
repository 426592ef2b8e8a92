#pragma once

#include <map>
#include <vector>

#include "smp/matrix.hpp"
#include "smp/model.hpp"

namespace smp {

/// Diagnostics for whether (I - P)^-1 exists as a convergent Neumann series,
/// where P is a taboo transition-moment block. Divergence of the series is
/// exactly divergence of the corresponding hitting-time functionals, so the
/// check doubles as a finiteness test for them.
struct FinitenessReport {
  /// Root of the max row sum of the highest matrix power examined.
  double spectral_radius_proxy = 0.0;
  bool invertible = false;
  /// Power of the matrix at which decay (or the cutoff) was observed.
  int neumann_terms = 0;
};

/// Power-decay test on an N x N taboo block: squares the matrix up to
/// power 256 looking for an infinity norm below 1 - 1e-10, then cross-checks
/// the resolvent's pivots. Both tests must pass for invertible = true.
FinitenessReport finiteness_check(const Matrix& taboo_block);

/// Convenience overload building the block for target state j at (eps, rho).
FinitenessReport finiteness_check(const SemiMarkovModel& model, double eps, double rho, int j);

/// Mixed power-exponential moments of the first-hitting time mu_j and of
/// occupation counts on the way to it:
///
///   phi[r][i-1]      = E_i mu_j^r e^(rho mu_j) 1{hit j before 0}
///   omega[s][r][i-1] = moments of time spent in state s before min(mu_0, mu_j)
///
/// for r = 0..max_order. Values solve taboo linear systems; the r >= 1
/// systems share the factorization of the r = 0 system and differ only in
/// their right-hand sides.
struct HittingMoments {
  double rho = 0.0;
  int target = 0;
  std::vector<Vector> phi;
  std::map<int, std::vector<Vector>> omega;
};

/// Hitting-time moments phi for target j, orders 0..max_order.
/// Throws NotFinite when the functionals diverge at this rho.
HittingMoments solve_phi(const SemiMarkovModel& model, double eps, double rho, int j, int max_order);

/// Occupation moments omega for target j and occupied state s.
HittingMoments solve_omega(const SemiMarkovModel& model, double eps, double rho, int j, int s,
                           int max_order);

/// Hitting moment of j with the additional taboo set T avoided on the way:
/// E_i mu_j-transform restricted to paths that touch neither 0 nor T.
/// Requires j not in T. Indexed by start state i-1.
Vector taboo_phi(const SemiMarkovModel& model, double eps, double rho, int j,
                 const std::vector<int>& taboo);

/// Residual of the two-state return/crossing identity
///   (1 - phi_ii)(1 - iphi_jj) - (1 - phi_jj)(1 - jphi_ii)
/// which vanishes wherever the four functionals are finite. Identical
/// states give zero by construction.
double solidarity_residual(const SemiMarkovModel& model, double eps, double rho, int i, int j);

/// E_i min(mu_0, mu_j)^r e^(rho min(mu_0, mu_j)) for every start state i and
/// r = 0..max_order. Used to cross-check that occupation moments summed over
/// s reproduce the stopped-time transform.
std::vector<Vector> min_hit_exp_moment(const SemiMarkovModel& model, double eps, double rho, int j,
                                       int max_order = 0);

}  // namespace smp
