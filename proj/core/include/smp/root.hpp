#pragma once

#include <string>
#include <vector>

#include "smp/matrix.hpp"
#include "smp/model.hpp"

namespace smp {

/// Root of the characteristic equation phi_ii(rho) = 1, where phi_ii is the
/// exponential transform of the return time to i under taboo of state 0.
struct RootResult {
  double rho_root = 0.0;
  /// |phi_ii(rho_root) - 1| at the reference state.
  double residual = 0.0;
  /// Root recomputed from every state's own return equation; these coincide
  /// for communicating models.
  Vector per_state_roots;
  /// Largest exponent at which the transform was verified finite while
  /// bracketing; the divergence threshold is at or above this value.
  double delta_proxy = 0.0;
};

/// Finds the root by doubling an upper bracket until the transform exceeds
/// one, bisecting to 1e-14, then polishing with a few Newton steps using the
/// exact first derivative. Throws NoRoot when the transform stays at or
/// below one everywhere it is finite, and NotFinite when it diverges already
/// at rho = 0.
RootResult characteristic_root(const SemiMarkovModel& model, double eps, int reference_state = 1);

struct ScanPoint {
  double eps = 0.0;
  bool ok = false;
  RootResult root;
  std::string error;
  /// |rho_root(eps) - rho_root(0)|; NaN when either side failed.
  double gap_to_limit = 0.0;
};

/// Evaluates the root across a list of eps values, recording per-point
/// failures without aborting the scan, plus each point's distance to the
/// unperturbed root.
std::vector<ScanPoint> root_convergence_scan(const SemiMarkovModel& model,
                                             const std::vector<double>& eps_values,
                                             int reference_state = 1);

}  // namespace smp
