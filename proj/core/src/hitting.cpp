#include "smp/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "smp/errors.hpp"
#include "smp/moments.hpp"

namespace smp {
namespace {

constexpr double kDecayMargin = 1e-10;
constexpr double kPivotTol = 1e-12;
constexpr int kMaxPower = 256;
constexpr double kOverflowCut = 1e100;

std::vector<int> with_target(int target, std::vector<int> taboo) {
  taboo.push_back(target);
  std::sort(taboo.begin(), taboo.end());
  taboo.erase(std::unique(taboo.begin(), taboo.end()), taboo.end());
  return taboo;
}

void zero_columns(Matrix& block, const std::vector<int>& taboo) {
  for (int j : taboo) {
    for (int i = 0; i < block.rows(); ++i) block(i, j - 1) = 0.0;
  }
}

[[noreturn]] void throw_not_finite(double rho, int target, const FinitenessReport& report) {
  std::ostringstream msg;
  msg << "moment functionals diverge at rho=" << rho << " for target " << target
      << " (spectral radius proxy " << report.spectral_radius_proxy << ")";
  throw NotFinite(msg.str());
}

// Builds the taboo moment blocks for orders 0..max_order, verifies that the
// order-0 block contracts, and factors its resolvent once for all orders.
class TabooSolver {
 public:
  TabooSolver(const SemiMarkovModel& model, double eps, double rho, int target,
              const std::vector<int>& extra_taboo, int max_order)
      : n_(model.n_states()), target_(target) {
    if (target < 1 || target > n_) throw std::invalid_argument("hitting: target outside 1..N");
    const std::vector<int> taboo = with_target(target, extra_taboo);
    full_.reserve(static_cast<std::size_t>(max_order) + 1);
    blocks_.reserve(static_cast<std::size_t>(max_order) + 1);
    for (int r = 0; r <= max_order; ++r) {
      full_.push_back(moment_p(model, eps, rho, r));
      Matrix block = full_.back().interior_block();
      zero_columns(block, taboo);
      blocks_.push_back(std::move(block));
    }

    const FinitenessReport report = finiteness_check(blocks_[0]);
    if (!report.invertible) throw_not_finite(rho, target, report);
    lu_.emplace(Matrix::identity(n_) - blocks_[0]);
    if (lu_->singular(kPivotTol)) throw_not_finite(rho, target, report);
  }

  /// Solves x[r] = rhs[r] + sum_{m=1..r} C(r, m) B[m] x[r-m] + B[0] x[r]
  /// order by order, reusing the factorization.
  std::vector<Vector> solve_orders(const std::vector<Vector>& rhs) const {
    std::vector<Vector> x;
    x.reserve(rhs.size());
    for (std::size_t r = 0; r < rhs.size(); ++r) {
      Vector b = rhs[r];
      for (std::size_t m = 1; m <= r; ++m) {
        const Vector term = blocks_[m] * x[r - m];
        const double c = binomial(static_cast<int>(r), static_cast<int>(m));
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += c * term[i];
      }
      Vector sol = lu_->solve(b);
      for (double v : sol) {
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "moment solve produced a non-finite value for target " << target_;
          throw NotFinite(msg.str());
        }
      }
      x.push_back(std::move(sol));
    }
    return x;
  }

  Vector target_column(int r) const { return full_[static_cast<std::size_t>(r)].column(target_); }

  Vector absorbing_column(int r) const {
    const MomentMatrix& m = full_[static_cast<std::size_t>(r)];
    Vector out(static_cast<std::size_t>(n_));
    for (int i = 1; i <= n_; ++i) out[static_cast<std::size_t>(i - 1)] = m.at(i, 0);
    return out;
  }

  int n() const { return n_; }

 private:
  int n_;
  int target_;
  std::vector<MomentMatrix> full_;
  std::vector<Matrix> blocks_;
  std::optional<LuFactorization> lu_;
};

}  // namespace

FinitenessReport finiteness_check(const Matrix& taboo_block) {
  FinitenessReport report;
  const int n = taboo_block.rows();

  // An acyclic support pattern makes the block nilpotent, hence the Neumann
  // series a finite sum, whatever the entry magnitudes. Deciding this on the
  // pattern keeps the verdict right even where large rho overflows entries.
  {
    std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) reach[i][j] = taboo_block(i, j) != 0.0;
    }
    for (int mid = 0; mid < n; ++mid) {
      for (int i = 0; i < n; ++i) {
        if (!reach[i][mid]) continue;
        for (int j = 0; j < n; ++j) {
          if (reach[mid][j]) reach[i][j] = true;
        }
      }
    }
    bool cyclic = false;
    for (int i = 0; i < n; ++i) cyclic = cyclic || reach[i][i];
    if (!cyclic) {
      report.spectral_radius_proxy = 0.0;
      report.neumann_terms = n;
      report.invertible = true;
      return report;
    }
  }

  Matrix cur = taboo_block;
  int power = 1;
  bool decays = false;
  for (;;) {
    const bool finite = cur.all_finite();
    const double norm = finite ? cur.inf_norm() : std::numeric_limits<double>::infinity();
    report.neumann_terms = power;
    report.spectral_radius_proxy = std::pow(norm, 1.0 / power);
    if (!finite || norm > kOverflowCut) break;
    if (norm < 1.0 - kDecayMargin) {
      decays = true;
      break;
    }
    if (power >= kMaxPower) break;
    cur = cur * cur;
    power *= 2;
  }

  bool resolvent_ok = false;
  if (taboo_block.all_finite()) {
    const LuFactorization lu(Matrix::identity(n) - taboo_block);
    resolvent_ok = !lu.singular(kPivotTol);
  }
  report.invertible = decays && resolvent_ok;
  return report;
}

FinitenessReport finiteness_check(const SemiMarkovModel& model, double eps, double rho, int j) {
  if (j < 1 || j > model.n_states()) throw std::invalid_argument("finiteness_check: j outside 1..N");
  Matrix block = moment_p(model, eps, rho, 0).interior_block();
  zero_columns(block, {j});
  return finiteness_check(block);
}

HittingMoments solve_phi(const SemiMarkovModel& model, double eps, double rho, int j, int max_order) {
  if (max_order < 0) throw std::invalid_argument("solve_phi: max_order must be >= 0");
  TabooSolver solver(model, eps, rho, j, {}, max_order);
  std::vector<Vector> rhs;
  rhs.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int r = 0; r <= max_order; ++r) rhs.push_back(solver.target_column(r));

  HittingMoments out;
  out.rho = rho;
  out.target = j;
  out.phi = solver.solve_orders(rhs);
  return out;
}

HittingMoments solve_omega(const SemiMarkovModel& model, double eps, double rho, int j, int s,
                           int max_order) {
  if (max_order < 0) throw std::invalid_argument("solve_omega: max_order must be >= 0");
  if (s < 1 || s > model.n_states()) throw std::invalid_argument("solve_omega: s outside 1..N");
  TabooSolver solver(model, eps, rho, j, {}, max_order);
  const SojournMoments sojourn = sojourn_moments(model, eps, rho, max_order);

  std::vector<Vector> rhs(static_cast<std::size_t>(max_order) + 1,
                          Vector(static_cast<std::size_t>(solver.n()), 0.0));
  for (int r = 0; r <= max_order; ++r) {
    rhs[static_cast<std::size_t>(r)][static_cast<std::size_t>(s - 1)] =
        sojourn.varphi[static_cast<std::size_t>(r)][static_cast<std::size_t>(s - 1)];
  }

  HittingMoments out;
  out.rho = rho;
  out.target = j;
  out.omega[s] = solver.solve_orders(rhs);
  return out;
}

Vector taboo_phi(const SemiMarkovModel& model, double eps, double rho, int j,
                 const std::vector<int>& taboo) {
  for (int t : taboo) {
    if (t == j) throw std::invalid_argument("taboo_phi: target j must not be in the taboo set");
    if (t < 1 || t > model.n_states()) throw std::invalid_argument("taboo_phi: taboo state outside 1..N");
  }
  TabooSolver solver(model, eps, rho, j, taboo, 0);
  return solver.solve_orders({solver.target_column(0)})[0];
}

double solidarity_residual(const SemiMarkovModel& model, double eps, double rho, int i, int j) {
  const int n = model.n_states();
  if (i < 1 || i > n || j < 1 || j > n) {
    throw std::invalid_argument("solidarity_residual: states outside 1..N");
  }
  if (i == j) return 0.0;
  const double phi_ii = solve_phi(model, eps, rho, i, 0).phi[0][static_cast<std::size_t>(i - 1)];
  const double phi_jj = solve_phi(model, eps, rho, j, 0).phi[0][static_cast<std::size_t>(j - 1)];
  const double taboo_jj = taboo_phi(model, eps, rho, j, {i})[static_cast<std::size_t>(j - 1)];
  const double taboo_ii = taboo_phi(model, eps, rho, i, {j})[static_cast<std::size_t>(i - 1)];
  return (1.0 - phi_ii) * (1.0 - taboo_jj) - (1.0 - phi_jj) * (1.0 - taboo_ii);
}

std::vector<Vector> min_hit_exp_moment(const SemiMarkovModel& model, double eps, double rho, int j,
                                       int max_order) {
  if (max_order < 0) throw std::invalid_argument("min_hit_exp_moment: max_order must be >= 0");
  TabooSolver solver(model, eps, rho, j, {}, max_order);
  std::vector<Vector> rhs;
  rhs.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int r = 0; r <= max_order; ++r) {
    Vector b = solver.target_column(r);
    const Vector absorbed = solver.absorbing_column(r);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += absorbed[i];
    rhs.push_back(std::move(b));
  }
  return solver.solve_orders(rhs);
}

}  // namespace smp
