#include "smp/root.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "smp/errors.hpp"
#include "smp/hitting.hpp"

namespace smp {
namespace {

constexpr double kBisectTol = 1e-14;
constexpr int kNewtonSteps = 5;
constexpr int kDoublingSteps = 60;
constexpr int kRefineSteps = 200;

struct StateRoot {
  double rho = 0.0;
  double residual = 0.0;
  double delta_proxy = 0.0;
};

// phi_ii(rho) and its first derivative for one state.
class ReturnTransform {
 public:
  ReturnTransform(const SemiMarkovModel& model, double eps, int state)
      : model_(model), eps_(eps), state_(state) {}

  double value(double rho) const {
    return solve_phi(model_, eps_, rho, state_, 0).phi[0][static_cast<std::size_t>(state_ - 1)];
  }

  double derivative(double rho) const {
    return solve_phi(model_, eps_, rho, state_, 1).phi[1][static_cast<std::size_t>(state_ - 1)];
  }

 private:
  const SemiMarkovModel& model_;
  double eps_;
  int state_;
};

StateRoot root_for_state(const SemiMarkovModel& model, double eps, int state) {
  const ReturnTransform transform(model, eps, state);
  StateRoot out;

  const double at_zero = transform.value(0.0);  // NotFinite propagates
  out.delta_proxy = 0.0;
  if (at_zero >= 1.0 - 1e-14) {
    // Certain return: the transform already equals one with no discounting.
    out.rho = 0.0;
    out.residual = std::abs(at_zero - 1.0);
    return out;
  }

  // Bracket: double rho until the transform crosses one, refining toward the
  // divergence threshold when a probe lands beyond it.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::quiet_NaN();
  double probe = 1.0;
  for (int step = 0; step < kDoublingSteps && !(hi == hi); ++step) {
    bool finite = true;
    double value = 0.0;
    try {
      value = transform.value(probe);
    } catch (const NotFinite&) {
      finite = false;
    }
    if (finite) {
      out.delta_proxy = probe;
      if (value > 1.0) {
        hi = probe;
      } else {
        lo = probe;
        probe *= 2.0;
      }
      continue;
    }
    // Threshold lies in (lo, probe): search that gap for a crossing.
    double lo_f = lo;
    double hi_f = probe;
    for (int refine = 0; refine < kRefineSteps && !(hi == hi); ++refine) {
      const double mid = 0.5 * (lo_f + hi_f);
      try {
        const double value_mid = transform.value(mid);
        out.delta_proxy = std::max(out.delta_proxy, mid);
        if (value_mid > 1.0) {
          hi = mid;
        } else {
          lo = lo_f = mid;
        }
      } catch (const NotFinite&) {
        hi_f = mid;
      }
    }
    if (!(hi == hi)) {
      std::ostringstream msg;
      msg << "characteristic equation for state " << state
          << " has no root: transform stays below one up to its divergence threshold (last finite rho "
          << out.delta_proxy << ")";
      throw NoRoot(msg.str(), out.delta_proxy);
    }
  }
  if (!(hi == hi)) {
    std::ostringstream msg;
    msg << "characteristic equation for state " << state << " has no root below rho=" << probe;
    throw NoRoot(msg.str(), out.delta_proxy);
  }

  while (hi - lo > kBisectTol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (transform.value(mid) > 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  double x = 0.5 * (lo + hi);
  for (int step = 0; step < kNewtonSteps; ++step) {
    const double f = transform.value(x) - 1.0;
    const double fp = transform.derivative(x);
    if (!(std::abs(fp) > 0.0)) break;
    double next = x - f / fp;
    if (next < lo || next > hi) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }

  out.rho = x;
  out.residual = std::abs(transform.value(x) - 1.0);
  out.delta_proxy = std::max(out.delta_proxy, x);
  return out;
}

}  // namespace

RootResult characteristic_root(const SemiMarkovModel& model, double eps, int reference_state) {
  const int n = model.n_states();
  if (reference_state < 1 || reference_state > n) {
    throw std::invalid_argument("characteristic_root: reference state outside 1..N");
  }

  RootResult out;
  out.per_state_roots.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const StateRoot root = root_for_state(model, eps, i);
    out.per_state_roots[static_cast<std::size_t>(i - 1)] = root.rho;
    if (i == reference_state) {
      out.rho_root = root.rho;
      out.residual = root.residual;
      out.delta_proxy = root.delta_proxy;
    }
  }
  return out;
}

std::vector<ScanPoint> root_convergence_scan(const SemiMarkovModel& model,
                                             const std::vector<double>& eps_values,
                                             int reference_state) {
  double limit_root = std::numeric_limits<double>::quiet_NaN();
  try {
    limit_root = characteristic_root(model, 0.0, reference_state).rho_root;
  } catch (const std::exception&) {
    // Per-point results still carry their own roots; gaps stay NaN.
  }

  std::vector<ScanPoint> out;
  out.reserve(eps_values.size());
  for (double eps : eps_values) {
    ScanPoint point;
    point.eps = eps;
    try {
      point.root = characteristic_root(model, eps, reference_state);
      point.ok = true;
      point.gap_to_limit = std::abs(point.root.rho_root - limit_root);
    } catch (const std::exception& e) {
      point.error = e.what();
      point.gap_to_limit = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace smp
