#include "smp/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "smp/errors.hpp"
#include "smp/hitting.hpp"

namespace smp {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kEntryTol = 1e-12;

std::string format_eps(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", eps);
  return buf;
}

}  // namespace

PerturbedKernel::PerturbedKernel(int n_states, int k_max) : n_(n_states), k_max_(k_max) {
  if (n_states < 1) throw std::invalid_argument("PerturbedKernel: n_states must be >= 1");
  if (k_max < 1) throw std::invalid_argument("PerturbedKernel: k_max must be >= 1");
  q_.assign(static_cast<std::size_t>(n_) * (n_ + 1) * k_max_, EpsPoly());
}

std::size_t PerturbedKernel::index(int i, int j, int k) const {
  if (i < 1 || i > n_ || j < 0 || j > n_ || k < 1 || k > k_max_) {
    throw std::invalid_argument("PerturbedKernel: index out of range");
  }
  return (static_cast<std::size_t>(i - 1) * (n_ + 1) + j) * k_max_ + (k - 1);
}

int PerturbedKernel::max_degree() const {
  int deg = 0;
  for (const EpsPoly& p : q_) deg = std::max(deg, p.order());
  return deg;
}

const EpsPoly& PerturbedKernel::q(int i, int j, int k) const { return q_[index(i, j, k)]; }

void PerturbedKernel::set_q(int i, int j, int k, EpsPoly p) { q_[index(i, j, k)] = std::move(p); }

ConcreteKernel::ConcreteKernel(int n_states, int k_max)
    : n_(n_states), k_max_(k_max), q_(static_cast<std::size_t>(n_states) * (n_states + 1) * k_max, 0.0) {}

double ConcreteKernel::q(int i, int j, int k) const {
  return q_[(static_cast<std::size_t>(i - 1) * (n_ + 1) + j) * k_max_ + (k - 1)];
}

double& ConcreteKernel::q(int i, int j, int k) {
  return q_[(static_cast<std::size_t>(i - 1) * (n_ + 1) + j) * k_max_ + (k - 1)];
}

double ConcreteKernel::jump_probability(int i, int j) const {
  double s = 0.0;
  for (int k = 1; k <= k_max_; ++k) s += q(i, j, k);
  return s;
}

double ConcreteKernel::survivor(int i, int u) const {
  if (u < 0) return 1.0;
  double s = 0.0;
  for (int k = u + 1; k <= k_max_; ++k) {
    for (int j = 0; j <= n_; ++j) s += q(i, j, k);
  }
  return s;
}

SemiMarkovModel model_from_json(const std::string& text, int eps_grid_points) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model: top level must be an object");

  SemiMarkovModel model;
  try {
    const int n_states = doc.at("n_states").get<int>();
    const int k_max = doc.at("k_max").get<int>();
    model.eps_max = doc.at("eps_max").get<double>();
    model.label = doc.value("label", std::string());
    if (n_states < 1) throw ParseError("model: n_states must be >= 1");
    if (k_max < 1) throw ParseError("model: k_max must be >= 1");
    if (!(model.eps_max > 0.0) || !std::isfinite(model.eps_max)) {
      throw ParseError("model: eps_max must be a positive finite number");
    }
    model.kernel = PerturbedKernel(n_states, k_max);

    std::set<std::tuple<int, int, int>> seen;
    for (const auto& entry : doc.at("entries")) {
      const int i = entry.at("i").get<int>();
      const int j = entry.at("j").get<int>();
      const int k = entry.at("k").get<int>();
      if (i < 1 || i > n_states || j < 0 || j > n_states || k < 1 || k > k_max) {
        std::ostringstream msg;
        msg << "model: entry (i=" << i << ", j=" << j << ", k=" << k << ") out of range";
        throw ParseError(msg.str());
      }
      if (!seen.insert({i, j, k}).second) {
        std::ostringstream msg;
        msg << "model: duplicate entry (i=" << i << ", j=" << j << ", k=" << k << ")";
        throw ParseError(msg.str());
      }
      const auto coeffs = entry.at("coeffs").get<std::vector<double>>();
      if (coeffs.empty()) throw ParseError("model: entry has empty coefficient list");
      model.kernel.set_q(i, j, k, EpsPoly(coeffs));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: missing or mistyped field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }

  validate_model(model, eps_grid_points);
  return model;
}

SemiMarkovModel load_model(const std::string& path, int eps_grid_points) {
  std::ifstream in(path);
  if (!in) throw ParseError("model: cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str(), eps_grid_points);
}

void validate_model(const SemiMarkovModel& model, int eps_grid_points) {
  if (eps_grid_points < 2) throw std::invalid_argument("validate_model: need at least 2 grid points");
  const int n = model.n_states();
  const int k_max = model.k_max();
  for (int t = 0; t < eps_grid_points; ++t) {
    const double eps = model.eps_max * t / (eps_grid_points - 1);
    for (int i = 1; i <= n; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j <= n; ++j) {
        for (int k = 1; k <= k_max; ++k) {
          const double v = model.kernel.q(i, j, k).eval(eps);
          if (v < -kEntryTol || v > 1.0 + kEntryTol) {
            std::ostringstream msg;
            msg << "model: kernel entry (i=" << i << ", j=" << j << ", k=" << k << ") = " << v
                << " at eps=" << format_eps(eps) << " lies outside [0, 1]";
            throw ValidationError(msg.str());
          }
          row_sum += v;
        }
      }
      if (std::abs(row_sum - 1.0) > kRowSumTol) {
        std::ostringstream msg;
        msg << "model: row " << i << " sums to " << row_sum << " at eps=" << format_eps(eps)
            << " (expected 1 within 1e-12)";
        throw ValidationError(msg.str());
      }
    }
  }
}

ConcreteKernel eval_kernel(const SemiMarkovModel& model, double eps) {
  if (!(eps >= 0.0) || eps > model.eps_max) {
    std::ostringstream msg;
    msg << "eval_kernel: eps=" << format_eps(eps) << " outside [0, " << format_eps(model.eps_max) << "]";
    throw std::invalid_argument(msg.str());
  }
  const int n = model.n_states();
  const int k_max = model.k_max();
  ConcreteKernel out(n, k_max);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 1; k <= k_max; ++k) out.q(i, j, k) = model.kernel.q(i, j, k).eval(eps);
    }
  }
  return out;
}

namespace {

// Largest finite return-time transform value found for state 1 while doubling
// the exponent; refines between the last convergent exponent and the first
// divergent one so a crossing just below the divergence point is still found.
void probe_return_transform(const SemiMarkovModel& model, ConditionReport& report) {
  const auto phi_11 = [&](double beta) {
    return solve_phi(model, 0.0, beta, 1, 0).phi[0][0];
  };
  double last_finite = 0.0;
  double beta = 1.0;
  for (int step = 0; step < 7; ++step) {
    double value = 0.0;
    bool finite = true;
    try {
      value = phi_11(beta);
    } catch (const NotFinite&) {
      finite = false;
    }
    if (finite) {
      last_finite = beta;
      if (value > 1.0) {
        report.c_holds = true;
        report.c_beta = beta;
        report.c_phi_value = value;
        return;
      }
      beta *= 2.0;
      continue;
    }
    double lo = last_finite;
    double hi = beta;
    for (int refine = 0; refine < 24; ++refine) {
      const double mid = 0.5 * (lo + hi);
      try {
        const double value_mid = phi_11(mid);
        lo = mid;
        if (value_mid > 1.0) {
          report.c_holds = true;
          report.c_beta = mid;
          report.c_phi_value = value_mid;
          return;
        }
      } catch (const NotFinite&) {
        hi = mid;
      }
    }
    report.c_beta = lo;
    return;
  }
  report.c_beta = last_finite;
}

}  // namespace

ConditionReport validate_conditions(const SemiMarkovModel& model) {
  const int n = model.n_states();
  ConditionReport report;

  // Polynomial entries are continuous in eps, so the limit kernel exists;
  // record the eps = 0 jump probabilities as its witness.
  report.a_holds = true;
  report.limit_transition = Matrix(n, n + 1);
  const ConcreteKernel base = eval_kernel(model, 0.0);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) report.limit_transition(i - 1, j) = base.jump_probability(i, j);
  }

  // Communication of 1..N avoiding state 0, in one or more jumps.
  std::vector<std::vector<bool>> adjacent(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) adjacent[i - 1][j - 1] = base.jump_probability(i, j) > 0.0;
  }
  report.reachable.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  report.b_holds = true;
  for (int i = 1; i <= n; ++i) {
    std::vector<int> stack;
    for (int j = 1; j <= n; ++j) {
      if (adjacent[i - 1][j - 1] && !report.reachable[i - 1][j - 1]) {
        report.reachable[i - 1][j - 1] = true;
        stack.push_back(j);
      }
    }
    while (!stack.empty()) {
      const int l = stack.back();
      stack.pop_back();
      for (int j = 1; j <= n; ++j) {
        if (adjacent[l - 1][j - 1] && !report.reachable[i - 1][j - 1]) {
          report.reachable[i - 1][j - 1] = true;
          stack.push_back(j);
        }
      }
    }
    for (int j = 1; j <= n; ++j) {
      if (!report.reachable[i - 1][j - 1]) report.b_holds = false;
    }
  }

  probe_return_transform(model, report);
  return report;
}

}  // namespace smp
