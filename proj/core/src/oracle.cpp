#include "smp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "smp/errors.hpp"

namespace smp {
namespace {

constexpr int kDecayWindow = 20;
constexpr double kRatioSafety = 1.0 + 1e-6;

// Probabilities below this floor are flushed to exact zero so that decayed
// tails terminate instead of sticking at the smallest subnormal, where
// rounding makes successive entries equal and decay undetectable.
constexpr double kFlushFloor = 1e-300;

double flushed(double p) { return p < kFlushFloor ? 0.0 : p; }

int support_window_for(const SemiMarkovModel& model) {
  return (model.n_states() + 1) * model.k_max() + 1;
}

void check_states(const SemiMarkovModel& model, int state, const char* what) {
  if (state < 1 || state > model.n_states()) {
    std::ostringstream msg;
    msg << what << " outside 1..N";
    throw std::invalid_argument(msg.str());
  }
}

// n^r e^(rho n) without materializing e^(rho n) on its own; the product is
// bounded whenever the table entry is, even where the bare exponential
// overflows.
double weighted(double entry, int n, double rho, int r) {
  if (entry == 0.0) return 0.0;
  if (n == 0) return r == 0 ? entry : 0.0;
  const double log_weight = rho * n + r * std::log(static_cast<double>(n));
  return entry > 0.0 ? std::exp(std::log(entry) + log_weight)
                     : -std::exp(std::log(-entry) + log_weight);
}

}  // namespace

SeriesTable dp_g(const SemiMarkovModel& model, double eps, int j, int n_max) {
  check_states(model, j, "dp_g: target j");
  if (n_max < 1) throw std::invalid_argument("dp_g: n_max must be >= 1");
  const int n_states = model.n_states();
  const int k_max = model.k_max();
  const ConcreteKernel kernel = eval_kernel(model, eps);

  SeriesTable table;
  table.target = j;
  table.n_max = n_max;
  table.support_window = support_window_for(model);
  table.values.assign(static_cast<std::size_t>(n_states), Vector(static_cast<std::size_t>(n_max) + 1, 0.0));

  for (int n = 1; n <= n_max; ++n) {
    for (int i = 1; i <= n_states; ++i) {
      double acc = n <= k_max ? kernel.q(i, j, n) : 0.0;
      for (int l = 1; l <= n_states; ++l) {
        if (l == j) continue;
        const Vector& g_l = table.values[static_cast<std::size_t>(l - 1)];
        const int k_hi = std::min(n, k_max);
        for (int k = 1; k <= k_hi; ++k) acc += kernel.q(i, l, k) * g_l[static_cast<std::size_t>(n - k)];
      }
      table.values[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(n)] = flushed(acc);
    }
  }
  return table;
}

SeriesTable dp_h(const SemiMarkovModel& model, double eps, int j, int s, int n_max) {
  check_states(model, j, "dp_h: target j");
  check_states(model, s, "dp_h: occupied state s");
  if (n_max < 1) throw std::invalid_argument("dp_h: n_max must be >= 1");
  const int n_states = model.n_states();
  const int k_max = model.k_max();
  const ConcreteKernel kernel = eval_kernel(model, eps);

  SeriesTable table;
  table.target = j;
  table.occupation = s;
  table.n_max = n_max;
  table.support_window = support_window_for(model);
  table.values.assign(static_cast<std::size_t>(n_states), Vector(static_cast<std::size_t>(n_max) + 1, 0.0));

  for (int n = 0; n <= n_max; ++n) {
    for (int i = 1; i <= n_states; ++i) {
      double acc = i == s ? kernel.survivor(i, n) : 0.0;
      for (int l = 1; l <= n_states; ++l) {
        if (l == j) continue;
        const Vector& h_l = table.values[static_cast<std::size_t>(l - 1)];
        const int k_hi = std::min(n, k_max);
        for (int k = 1; k <= k_hi; ++k) acc += kernel.q(i, l, k) * h_l[static_cast<std::size_t>(n - k)];
      }
      table.values[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(n)] = flushed(acc);
    }
  }
  return table;
}

std::vector<Vector> dp_transition(const SemiMarkovModel& model, double eps, int i, int n_max) {
  check_states(model, i, "dp_transition: start state i");
  if (n_max < 0) throw std::invalid_argument("dp_transition: n_max must be >= 0");
  const int n_states = model.n_states();
  const int k_max = model.k_max();
  const ConcreteKernel kernel = eval_kernel(model, eps);

  // epoch[l-1][t]: probability that some jump epoch lands in state l at time
  // t with no epoch in state 0 up to then. Time 0 counts as an epoch in i.
  std::vector<Vector> epoch(static_cast<std::size_t>(n_states),
                            Vector(static_cast<std::size_t>(n_max) + 1, 0.0));
  epoch[static_cast<std::size_t>(i - 1)][0] = 1.0;
  for (int t = 1; t <= n_max; ++t) {
    for (int l = 1; l <= n_states; ++l) {
      double acc = 0.0;
      for (int src = 1; src <= n_states; ++src) {
        const Vector& e_src = epoch[static_cast<std::size_t>(src - 1)];
        const int k_hi = std::min(t, k_max);
        for (int k = 1; k <= k_hi; ++k) acc += e_src[static_cast<std::size_t>(t - k)] * kernel.q(src, l, k);
      }
      epoch[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(t)] = flushed(acc);
    }
  }

  std::vector<Vector> out(static_cast<std::size_t>(n_states),
                          Vector(static_cast<std::size_t>(n_max) + 1, 0.0));
  for (int j = 1; j <= n_states; ++j) {
    const Vector& e_j = epoch[static_cast<std::size_t>(j - 1)];
    for (int n = 0; n <= n_max; ++n) {
      double acc = 0.0;
      for (int t = std::max(0, n - k_max + 1); t <= n; ++t) {
        const double mass = e_j[static_cast<std::size_t>(t)];
        if (mass != 0.0) acc += mass * kernel.survivor(j, n - t);
      }
      out[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(n)] = acc;
    }
  }
  return out;
}

SeriesMoment series_moment(const SeriesTable& table, int i, double rho, int r) {
  if (i < 1 || i > static_cast<int>(table.values.size())) {
    throw std::invalid_argument("series_moment: start state outside 1..N");
  }
  if (r < 0) throw std::invalid_argument("series_moment: r must be >= 0");
  const Vector& row = table.values[static_cast<std::size_t>(i - 1)];
  const int n_max = table.n_max;

  SeriesMoment out;
  for (int n = 0; n <= n_max; ++n) out.value += weighted(row[static_cast<std::size_t>(n)], n, rho, r);

  int last_nonzero = -1;
  for (int n = n_max; n >= 0; --n) {
    if (row[static_cast<std::size_t>(n)] != 0.0) {
      last_nonzero = n;
      break;
    }
  }
  if (last_nonzero < 0 || n_max - last_nonzero >= table.support_window) {
    out.tail_bound = 0.0;
    return out;
  }

  const int window_lo = n_max - (kDecayWindow - 1);
  if (window_lo < 1) {
    throw TailNotCertified("series_moment: table too short to estimate a decay ratio");
  }
  double q = 0.0;
  for (int n = window_lo; n < n_max; ++n) {
    const double cur = row[static_cast<std::size_t>(n)];
    const double next = row[static_cast<std::size_t>(n + 1)];
    if (cur <= 0.0 || next < 0.0) {
      throw TailNotCertified(
          "series_moment: entries are not strictly positive in the decay window; raise n_max");
    }
    q = std::max(q, next / cur);
  }
  q *= kRatioSafety;

  const double growth = q * std::exp(rho) * std::exp(static_cast<double>(r) / n_max);
  if (!(growth < 1.0)) {
    std::ostringstream msg;
    msg << "series_moment: tail not geometrically decaying at n_max=" << n_max << " (ratio " << growth
        << "); raise n_max";
    throw TailNotCertified(msg.str());
  }
  const double final_term = weighted(row[static_cast<std::size_t>(n_max)], n_max, rho, r);
  out.tail_bound = final_term * growth / (1.0 - growth);
  return out;
}

FdFit fd_expansion_coeffs(const std::function<double(double)>& evaluator, int k, double eps_max) {
  if (k < 0) throw std::invalid_argument("fd_expansion_coeffs: k must be >= 0");
  if (!(eps_max > 0.0)) throw std::invalid_argument("fd_expansion_coeffs: eps_max must be > 0");
  const double h = eps_max / 32.0;
  const int points = k + 3;
  const int unknowns = k + 1;

  Vector samples(static_cast<std::size_t>(points));
  for (int t = 0; t < points; ++t) {
    const double y = evaluator(t * h);
    if (!std::isfinite(y)) {
      throw std::invalid_argument("fd_expansion_coeffs: evaluator returned a non-finite value");
    }
    samples[static_cast<std::size_t>(t)] = y;
  }

  // Normal equations in the scaled variable t = eps / h.
  Matrix design(points, unknowns);
  for (int t = 0; t < points; ++t) {
    double p = 1.0;
    for (int n = 0; n < unknowns; ++n) {
      design(t, n) = p;
      p *= t;
    }
  }
  Matrix gram(unknowns, unknowns);
  Vector rhs(static_cast<std::size_t>(unknowns), 0.0);
  for (int a = 0; a < unknowns; ++a) {
    for (int b = 0; b < unknowns; ++b) {
      double acc = 0.0;
      for (int t = 0; t < points; ++t) acc += design(t, a) * design(t, b);
      gram(a, b) = acc;
    }
    double acc = 0.0;
    for (int t = 0; t < points; ++t) acc += design(t, a) * samples[static_cast<std::size_t>(t)];
    rhs[static_cast<std::size_t>(a)] = acc;
  }

  const LuFactorization lu(gram);
  const double condition = lu.min_pivot() == 0.0
                               ? std::numeric_limits<double>::infinity()
                               : gram.inf_norm() * lu.inverse().inf_norm();
  if (!(condition <= 1e10)) {
    std::ostringstream msg;
    msg << "fd_expansion_coeffs: normal equations condition " << condition << " exceeds 1e10";
    throw IllConditioned(msg.str(), condition);
  }

  Vector scaled = lu.solve(rhs);
  FdFit out;
  out.condition = condition;
  out.coeffs.resize(static_cast<std::size_t>(unknowns));
  double scale = 1.0;
  for (int n = 0; n < unknowns; ++n) {
    out.coeffs[static_cast<std::size_t>(n)] = scaled[static_cast<std::size_t>(n)] / scale;
    scale *= h;
  }
  return out;
}

}  // namespace smp
