#pragma once

#include <string>
#include <vector>

#include "smp/eps_poly.hpp"
#include "smp/matrix.hpp"

namespace smp {

/// Transition kernel of a discrete-time process on states {0, 1, ..., N}
/// with every entry a polynomial in the perturbation parameter eps.
///
/// State 0 is absorbing and is never a source: entries are Q_ij(k) with
/// i in 1..N, j in 0..N, and holding time k in 1..Kmax. Q_ij(k) is the
/// probability that the next jump lands in state j after exactly k time
/// units. Rows must sum to one at every admissible eps, so each row is a
/// joint distribution over (destination, holding time).
class PerturbedKernel {
 public:
  PerturbedKernel() = default;
  PerturbedKernel(int n_states, int k_max);

  int n_states() const { return n_; }
  int k_max() const { return k_max_; }

  /// Largest polynomial degree across entries.
  int max_degree() const;

  const EpsPoly& q(int i, int j, int k) const;
  void set_q(int i, int j, int k, EpsPoly p);

 private:
  std::size_t index(int i, int j, int k) const;

  int n_ = 0;
  int k_max_ = 0;
  std::vector<EpsPoly> q_;
};

struct SemiMarkovModel {
  PerturbedKernel kernel;
  /// Admissible perturbation range is [0, eps_max].
  double eps_max = 0.0;
  std::string label;

  int n_states() const { return kernel.n_states(); }
  int k_max() const { return kernel.k_max(); }
};

/// Kernel evaluated at a concrete eps.
class ConcreteKernel {
 public:
  ConcreteKernel() = default;
  ConcreteKernel(int n_states, int k_max);

  int n_states() const { return n_; }
  int k_max() const { return k_max_; }

  double q(int i, int j, int k) const;
  double& q(int i, int j, int k);

  /// P{next jump from i lands in j}, summed over holding times.
  double jump_probability(int i, int j) const;

  /// P{holding time from i exceeds u}.
  double survivor(int i, int u) const;

 private:
  int n_ = 0;
  int k_max_ = 0;
  std::vector<double> q_;
};

struct ConditionReport {
  /// Entries converge as eps -> 0 (always true for polynomial kernels);
  /// limit_transition holds the eps = 0 jump probabilities, rows i = 1..N,
  /// columns j = 0..N.
  bool a_holds = false;
  Matrix limit_transition;

  /// Every state in 1..N can reach every other (and return to itself)
  /// through states 1..N in the unperturbed embedded chain.
  bool b_holds = false;
  std::vector<std::vector<bool>> reachable;

  /// The unperturbed return-time transform from state 1 exceeds one at some
  /// finite exponent; (c_beta, c_phi_value) witness the crossing.
  bool c_holds = false;
  double c_beta = 0.0;
  double c_phi_value = 0.0;

  bool all_hold() const { return a_holds && b_holds && c_holds; }
};

/// Reads a model from disk and validates it. The file is a JSON document:
///
///   {
///     "label":    "M1",
///     "n_states": 1,
///     "k_max":    1,
///     "eps_max":  0.2,
///     "entries": [
///       {"i": 1, "j": 1, "k": 1, "coeffs": [0.5, -1.0]},
///       {"i": 1, "j": 0, "k": 1, "coeffs": [0.5,  1.0]}
///     ]
///   }
///
/// Omitted (i, j, k) combinations are identically zero. Coefficient arrays
/// may have different lengths. Throws ParseError on malformed input and
/// ValidationError when a kernel invariant fails; the message names the
/// offending entry and eps.
SemiMarkovModel load_model(const std::string& path, int eps_grid_points = 5);

/// Same as load_model but from an in-memory JSON string.
SemiMarkovModel model_from_json(const std::string& text, int eps_grid_points = 5);

/// Re-checks kernel invariants on a uniform eps grid over [0, eps_max]:
/// every entry within [0, 1] and every row summing to one within 1e-12.
void validate_model(const SemiMarkovModel& model, int eps_grid_points = 5);

/// Evaluates the kernel at a concrete eps in [0, eps_max].
ConcreteKernel eval_kernel(const SemiMarkovModel& model, double eps);

/// Checks the three structural conditions the asymptotic theory needs:
/// continuity of the kernel at eps = 0, communication of states 1..N under
/// taboo of state 0, and a finite exponent at which the unperturbed
/// return-time transform exceeds one.
ConditionReport validate_conditions(const SemiMarkovModel& model);

}  // namespace smp
