#include "smp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

#include "smp/errors.hpp"
#include "smp/expansions.hpp"
#include "smp/hitting.hpp"
#include "smp/moments.hpp"
#include "smp/oracle.hpp"
#include "smp/root.hpp"

namespace smp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Assumed relative accuracy of a concrete solve, used only to size
// finite-difference steps.
constexpr double kSolveAccuracy = 1e-13;

template <typename Body>
CheckResult run_check(const char* name, double tolerance, Body body) {
  CheckResult out;
  out.name = name;
  out.tolerance = tolerance;
  out.max_error = 0.0;
  try {
    body(out);
    out.pass = out.max_error <= out.tolerance;
  } catch (const std::exception& e) {
    out.pass = false;
    out.max_error = kInf;
    out.detail = e.what();
  }
  return out;
}

void track(CheckResult& out, double error, const std::string& where) {
  if (error > out.max_error) {
    out.max_error = error;
    out.detail = where;
  }
}

double max_abs(const Matrix& m) {
  double out = 0.0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out = std::max(out, std::abs(m(r, c)));
  }
  return out;
}

// Weighted sums of a probability table for all start states and derivative
// orders, rebuilding the table at doubled truncations until every tail is
// certified or the cap is reached.
std::vector<std::vector<SeriesMoment>> certified_moments(
    const std::function<SeriesTable(int)>& build, int n_states, double rho, int max_order,
    const OracleCheckOptions& options) {
  for (int n = options.n_max;; n *= 2) {
    const SeriesTable table = build(n);
    try {
      std::vector<std::vector<SeriesMoment>> out(static_cast<std::size_t>(n_states));
      for (int i = 1; i <= n_states; ++i) {
        for (int r = 0; r <= max_order; ++r) {
          out[static_cast<std::size_t>(i - 1)].push_back(series_moment(table, i, rho, r));
        }
      }
      return out;
    } catch (const TailNotCertified&) {
      if (2 * n > options.n_cap) throw;
    }
  }
}

void compare_against_oracle(CheckResult& out, const std::vector<Vector>& system,
                            const std::vector<std::vector<SeriesMoment>>& oracle, int max_order,
                            const std::string& label) {
  const int n = static_cast<int>(oracle.size());
  for (int i = 1; i <= n; ++i) {
    for (int r = 0; r <= max_order; ++r) {
      const SeriesMoment& m = oracle[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(r)];
      const double sys = system[static_cast<std::size_t>(r)][static_cast<std::size_t>(i - 1)];
      const double excess = std::abs(sys - m.value) - m.tail_bound;
      std::ostringstream where;
      where << label << " i=" << i << " r=" << r << " system=" << sys << " series=" << m.value
            << " tail=" << m.tail_bound;
      track(out, excess, where.str());
    }
  }
}

}  // namespace

CheckResult check_phi_against_oracle(const SemiMarkovModel& model, double eps, double rho, int j,
                                     const OracleCheckOptions& options) {
  return run_check("oracle-phi", 1e-9, [&](CheckResult& out) {
    const HittingMoments sys = solve_phi(model, eps, rho, j, options.max_order);
    const auto oracle =
        certified_moments([&](int n_max) { return dp_g(model, eps, j, n_max); }, model.n_states(),
                          rho, options.max_order, options);
    compare_against_oracle(out, sys.phi, oracle, options.max_order, "phi");
  });
}

CheckResult check_omega_against_oracle(const SemiMarkovModel& model, double eps, double rho, int j,
                                       const OracleCheckOptions& options) {
  return run_check("oracle-omega", 1e-9, [&](CheckResult& out) {
    for (int s = 1; s <= model.n_states(); ++s) {
      const HittingMoments sys = solve_omega(model, eps, rho, j, s, options.max_order);
      const auto oracle =
          certified_moments([&](int n_max) { return dp_h(model, eps, j, s, n_max); },
                            model.n_states(), rho, options.max_order, options);
      compare_against_oracle(out, sys.omega.at(s), oracle, options.max_order,
                             "omega s=" + std::to_string(s));
    }
  });
}

CheckResult check_rho_derivatives(const SemiMarkovModel& model, double eps, double rho, int j,
                                  double rho_ceiling) {
  return run_check("rho-derivatives", 1e-6, [&](CheckResult& out) {
    using FamilySolve = std::function<std::vector<Vector>(double, int)>;
    std::vector<std::pair<std::string, FamilySolve>> families;
    families.emplace_back("phi", [&](double at, int orders) {
      return solve_phi(model, eps, at, j, orders).phi;
    });
    for (int s = 1; s <= model.n_states(); ++s) {
      families.emplace_back("omega s=" + std::to_string(s), [&, s](double at, int orders) {
        return solve_omega(model, eps, at, j, s, orders).omega.at(s);
      });
    }

    for (const auto& [label, solve] : families) {
      const std::vector<Vector> deep = solve(rho, 6);
      const std::size_t dim = deep[0].size();
      const double s0 = 1.0 + inf_norm(deep[0]);
      const double s3 = std::max(inf_norm(deep[3]), s0);
      const double s6 = std::max(inf_norm(deep[6]), s0);
      double h1 = std::clamp(std::cbrt(3.0 * kSolveAccuracy * s0 / s3), 1e-8, 1e-2);
      double h2 = std::clamp(std::pow(240.0 * kSolveAccuracy * s0 / s6, 1.0 / 6.0), 1e-6, 5e-3);
      if (rho + h1 > rho_ceiling) h1 = std::max((rho_ceiling - rho) / 4.0, 1e-8);
      if (rho + 2.0 * h2 > rho_ceiling) h2 = std::max((rho_ceiling - rho) / 8.0, 1e-6);

      for (int attempt = 0;; ++attempt) {
        try {
          const Vector d1p = solve(rho + h1, 0)[0];
          const Vector d1m = solve(rho - h1, 0)[0];
          const Vector d2p = solve(rho + h2, 0)[0];
          const Vector d2m = solve(rho - h2, 0)[0];
          const Vector d2pp = solve(rho + 2.0 * h2, 0)[0];
          const Vector d2mm = solve(rho - 2.0 * h2, 0)[0];
          for (std::size_t i = 0; i < dim; ++i) {
            const double fd1 = (d1p[i] - d1m[i]) / (2.0 * h1);
            const double ex1 = deep[1][i];
            {
              std::ostringstream where;
              where << label << " r=1 i=" << i + 1 << " fd=" << fd1 << " system=" << ex1;
              track(out, std::abs(fd1 - ex1) / (1.0 + std::abs(ex1)), where.str());
            }
            const double fd2 = (-d2pp[i] + 16.0 * d2p[i] - 30.0 * deep[0][i] + 16.0 * d2m[i] -
                                d2mm[i]) /
                               (12.0 * h2 * h2);
            const double ex2 = deep[2][i];
            {
              std::ostringstream where;
              where << label << " r=2 i=" << i + 1 << " fd=" << fd2 << " system=" << ex2;
              track(out, std::abs(fd2 - ex2) / (1.0 + std::abs(ex2)), where.str());
            }
          }
          break;
        } catch (const NotFinite&) {
          if (attempt >= 4) throw;
          h1 /= 8.0;
          h2 /= 8.0;
        }
      }
    }
  });
}

CheckResult check_solidarity(const SemiMarkovModel& model, double eps, double rho) {
  return run_check("solidarity", 1e-10, [&](CheckResult& out) {
    const int n = model.n_states();
    if (n == 1) {
      out.detail = "single interior state, identity holds trivially";
      return;
    }
    for (int i = 1; i <= n; ++i) {
      for (int jj = i + 1; jj <= n; ++jj) {
        std::ostringstream where;
        where << "pair (" << i << ", " << jj << ")";
        track(out, std::abs(solidarity_residual(model, eps, rho, i, jj)), where.str());
      }
    }
  });
}

CheckResult check_occupation_sum(const SemiMarkovModel& model, double eps, double rho, int j) {
  return run_check("occupation-sum", 1e-9, [&](CheckResult& out) {
    const int n = model.n_states();
    Vector summed(static_cast<std::size_t>(n), 0.0);
    for (int s = 1; s <= n; ++s) {
      const Vector w = solve_omega(model, eps, rho, j, s, 0).omega.at(s)[0];
      for (std::size_t i = 0; i < summed.size(); ++i) summed[i] += w[i];
    }

    Vector reconstructed;
    if (std::abs(rho) < kRhoZeroTol) {
      reconstructed = min_hit_exp_moment(model, eps, rho, j, 1)[1];
    } else {
      const Vector transform = min_hit_exp_moment(model, eps, rho, j, 0)[0];
      reconstructed.resize(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < reconstructed.size(); ++i) {
        reconstructed[i] = (transform[i] - 1.0) / std::expm1(rho);
      }
    }

    for (int i = 1; i <= n; ++i) {
      std::ostringstream where;
      where << "i=" << i << " summed=" << summed[static_cast<std::size_t>(i - 1)]
            << " stopped-time=" << reconstructed[static_cast<std::size_t>(i - 1)];
      track(out,
            std::abs(summed[static_cast<std::size_t>(i - 1)] -
                     reconstructed[static_cast<std::size_t>(i - 1)]),
            where.str());
    }
  });
}

CheckResult check_expansion_residuals(const SemiMarkovModel& model, double rho, int j, int s,
                                      int k) {
  return run_check("expansion-residuals", 1e-9, [&](CheckResult& out) {
    const MatrixSeries b0 = taboo_block_series(p_expansion(model, rho, 0, k), {j});
    const ExpansionTable phi = phi_expansion(model, rho, j, k);
    const ExpansionTable omega = omega_expansion(model, rho, j, s, k);

    const auto residuals = [&](const std::vector<VectorSeries>& x,
                               const std::vector<VectorSeries>& rhs, const char* label) {
      for (int r = 0; r <= k; ++r) {
        for (int c = 0; c <= k - r; ++c) {
          Vector resid = x[static_cast<std::size_t>(r)].at(c) -
                         rhs[static_cast<std::size_t>(r)].at(c);
          for (int q = 0; q <= c; ++q) {
            resid = resid - b0.at(q) * x[static_cast<std::size_t>(r)].at(c - q);
          }
          const double scale = 1.0 + inf_norm(x[static_cast<std::size_t>(r)].at(c));
          std::ostringstream where;
          where << label << " r=" << r << " coefficient " << c;
          track(out, inf_norm(resid) / scale, where.str());
        }
      }
    };
    residuals(phi.phi, phi.phi_rhs, "phi");
    residuals(omega.omega, omega.omega_rhs, "omega");
  });
}

CheckResult check_u_identity(const SemiMarkovModel& model, double rho, int j, int k) {
  return run_check("u-identity", 1e-10, [&](CheckResult& out) {
    const MatrixSeries b = taboo_block_series(p_expansion(model, rho, 0, k), {j});
    const MatrixSeries u = inverse_expansion(b, k);
    const int n = model.n_states();
    for (int c = 0; c <= k; ++c) {
      Matrix acc = u.at(c) - b.at(0) * u.at(c);
      for (int q = 1; q <= c; ++q) acc -= b.at(q) * u.at(c - q);
      if (c == 0) acc -= Matrix::identity(n);
      std::ostringstream where;
      where << "coefficient " << c;
      track(out, max_abs(acc), where.str());
    }
  });
}

CheckResult check_expansion_base(const SemiMarkovModel& model, double rho, int j, int s, int k) {
  return run_check("expansion-base", 1e-10, [&](CheckResult& out) {
    const ExpansionTable phi = phi_expansion(model, rho, j, k);
    const ExpansionTable omega = omega_expansion(model, rho, j, s, k);
    const HittingMoments base_phi = solve_phi(model, 0.0, rho, j, k);
    const HittingMoments base_omega = solve_omega(model, 0.0, rho, j, s, k);
    for (int r = 0; r <= k; ++r) {
      {
        std::ostringstream where;
        where << "phi r=" << r;
        track(out,
              inf_norm(phi.phi[static_cast<std::size_t>(r)].at(0) -
                       base_phi.phi[static_cast<std::size_t>(r)]),
              where.str());
      }
      {
        std::ostringstream where;
        where << "omega r=" << r;
        track(out,
              inf_norm(omega.omega[static_cast<std::size_t>(r)].at(0) -
                       base_omega.omega.at(s)[static_cast<std::size_t>(r)]),
              where.str());
      }
    }
  });
}

CheckResult check_expansion_vs_fit(const SemiMarkovModel& model, double rho, int j, int s, int k) {
  return run_check("expansion-vs-fit", 1e-4, [&](CheckResult& out) {
    const ExpansionTable phi = phi_expansion(model, rho, j, k);
    const ExpansionTable omega = omega_expansion(model, rho, j, s, k);
    const int n = model.n_states();
    const int degree = model.kernel.max_degree();

    const auto compare = [&](const std::function<double(double, int)>& evaluate,
                             const std::vector<VectorSeries>& table, int i, const char* label) {
      for (int r = 0; r <= k; ++r) {
        const int fit_degree = std::max(k - r, degree);
        const FdFit fit = fd_expansion_coeffs([&](double e) { return evaluate(e, r); }, fit_degree,
                                              model.eps_max);
        for (int c = 0; c <= k - r; ++c) {
          const double exact = table[static_cast<std::size_t>(r)].at(c)[static_cast<std::size_t>(i - 1)];
          const double fitted = fit.coeffs[static_cast<std::size_t>(c)];
          std::ostringstream where;
          where << label << " i=" << i << " r=" << r << " coefficient " << c << " fit=" << fitted
                << " expansion=" << exact;
          track(out, std::abs(fitted - exact) / (1.0 + std::abs(exact)), where.str());
        }
      }
    };

    for (int i = 1; i <= n; ++i) {
      compare(
          [&](double e, int r) {
            return solve_phi(model, e, rho, j, r).phi[static_cast<std::size_t>(r)]
                                                     [static_cast<std::size_t>(i - 1)];
          },
          phi.phi, i, "phi");
      compare(
          [&](double e, int r) {
            return solve_omega(model, e, rho, j, s, r).omega.at(s)[static_cast<std::size_t>(r)]
                                                                  [static_cast<std::size_t>(i - 1)];
          },
          omega.omega, i, "omega");
    }
  });
}

CheckResult check_polynomial_remainder(const SemiMarkovModel& model, double eps, double rho, int j,
                                       int k, int degree) {
  return run_check("polynomial-remainder", 1e-10, [&](CheckResult& out) {
    const int n = model.n_states();
    const ExpansionTable phi = phi_expansion(model, rho, j, k);
    const HittingMoments sys_phi = solve_phi(model, eps, rho, j, k);

    const auto remainder = [&](const std::vector<VectorSeries>& table,
                               const std::vector<Vector>& exact, const char* label) {
      for (int r = 0; r + degree <= k; ++r) {
        for (int i = 0; i < n; ++i) {
          double series = 0.0;
          double power = 1.0;
          for (int c = 0; c <= k - r; ++c) {
            series += table[static_cast<std::size_t>(r)].at(c)[static_cast<std::size_t>(i)] * power;
            power *= eps;
          }
          std::ostringstream where;
          where << label << " r=" << r << " i=" << i + 1;
          track(out,
                std::abs(series - exact[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)]),
                where.str());
        }
      }
    };

    remainder(phi.phi, sys_phi.phi, "phi");
    for (int s = 1; s <= n; ++s) {
      const ExpansionTable omega = omega_expansion(model, rho, j, s, k);
      const HittingMoments sys_omega = solve_omega(model, eps, rho, j, s, k);
      remainder(omega.omega, sys_omega.omega.at(s), ("omega s=" + std::to_string(s)).c_str());
    }
  });
}

CheckResult check_finiteness_agreement(const SemiMarkovModel& model, double eps, double rho,
                                       int j) {
  return run_check("finiteness-agreement", 0.0, [&](CheckResult& out) {
    const bool detector = finiteness_check(model, eps, rho, j).invertible;
    bool phi_bounded = true;
    try {
      solve_phi(model, eps, rho, j, 2);
    } catch (const NotFinite&) {
      phi_bounded = false;
    }
    bool omega_bounded = true;
    try {
      solve_omega(model, eps, rho, j, 1, 2);
    } catch (const NotFinite&) {
      omega_bounded = false;
    }
    const int disagreements =
        static_cast<int>(phi_bounded != detector) + static_cast<int>(omega_bounded != detector);
    std::ostringstream what;
    what << "rho=" << rho << " detector=" << (detector ? "finite" : "divergent")
         << " phi=" << (phi_bounded ? "finite" : "divergent")
         << " omega=" << (omega_bounded ? "finite" : "divergent");
    out.detail = what.str();
    out.max_error = disagreements;
  });
}

double divergence_threshold(const SemiMarkovModel& model, double eps, int j) {
  if (!finiteness_check(model, eps, 0.0, j).invertible) return 0.0;
  double lo = 0.0;
  double hi = 0.5;
  int doublings = 0;
  while (finiteness_check(model, eps, hi, j).invertible) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 40) return kInf;
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (finiteness_check(model, eps, mid, j).invertible ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CheckResult check_renewal_identity(const SemiMarkovModel& model, double eps, int horizon) {
  return run_check("renewal-identity", 1e-12, [&](CheckResult& out) {
    const int n = model.n_states();
    for (int i = 1; i <= n; ++i) {
      const std::vector<Vector> trans = dp_transition(model, eps, i, horizon);
      const SeriesTable g = dp_g(model, eps, i, horizon);
      const Vector& g_ii = g.values[static_cast<std::size_t>(i - 1)];
      for (int jj = 1; jj <= n; ++jj) {
        const SeriesTable h = dp_h(model, eps, i, jj, horizon);
        const Vector& h_row = h.values[static_cast<std::size_t>(i - 1)];
        const Vector& p_row = trans[static_cast<std::size_t>(jj - 1)];
        for (int t = 0; t <= horizon; ++t) {
          double conv = 0.0;
          for (int u = 1; u <= t; ++u) {
            conv += g_ii[static_cast<std::size_t>(u)] * p_row[static_cast<std::size_t>(t - u)];
          }
          const double resid =
              p_row[static_cast<std::size_t>(t)] - h_row[static_cast<std::size_t>(t)] - conv;
          std::ostringstream where;
          where << "i=" << i << " j=" << jj << " n=" << t;
          track(out, std::abs(resid), where.str());
        }
      }
    }
  });
}

CheckResult check_convergence(const SemiMarkovModel& model, int j, int s, int min_halvings,
                              int max_halvings) {
  return run_check("convergence", 1e-6, [&](CheckResult& out) {
    struct Family {
      std::string label;
      std::function<Vector(double)> value;
      double scale = 1.0;
      Vector limit;
      double gap = 0.0;
    };
    std::vector<Family> families;
    families.push_back(
        {"phi", [&](double e) { return solve_phi(model, e, 0.0, j, 0).phi[0]; }, 1.0, {}, 0.0});
    families.push_back({"omega",
                        [&](double e) { return solve_omega(model, e, 0.0, j, s, 0).omega.at(s)[0]; },
                        1.0,
                        {},
                        0.0});
    families.push_back({"root",
                        [&](double e) {
                          return Vector{characteristic_root(model, e).rho_root};
                        },
                        1.0,
                        {},
                        0.0});

    // The eps_max evaluation anchors each family's scale; the monotone chain
    // runs over the halved points eps_max/2, eps_max/4, ... so a sign change
    // of the gap right at the interval end does not count against it.
    for (auto& f : families) f.limit = f.value(0.0);
    double eps = model.eps_max;
    for (auto& f : families) {
      const Vector start = f.value(eps);
      f.scale = 1.0 + inf_norm(start);
      f.gap = kInf;
    }

    int halvings = 0;
    for (int t = 1; t <= max_halvings; ++t) {
      eps *= 0.5;
      halvings = t;
      bool all_below = true;
      for (auto& f : families) {
        const double gap = inf_norm(f.value(eps) - f.limit) / f.scale;
        if (gap > f.gap * (1.0 + 1e-9) + 1e-15) {
          out.max_error = kInf;
          std::ostringstream what;
          what << f.label << " gap grew from " << f.gap << " to " << gap << " at halving " << t;
          out.detail = what.str();
          return;
        }
        f.gap = gap;
        all_below = all_below && gap <= 1e-6;
      }
      if (t >= min_halvings && all_below) break;
    }

    double final_gap = 0.0;
    for (const auto& f : families) final_gap = std::max(final_gap, f.gap);
    out.max_error = final_gap;
    std::ostringstream what;
    what << "halvings=" << halvings;
    out.detail = what.str();
  });
}

std::vector<CheckResult> verify_model(const SemiMarkovModel& model, int target) {
  std::vector<CheckResult> results;

  results.push_back(run_check("conditions", 0.0, [&](CheckResult& out) {
    const ConditionReport report = validate_conditions(model);
    if (!report.all_hold()) {
      out.max_error = 1.0;
      std::ostringstream what;
      what << "a=" << report.a_holds << " b=" << report.b_holds << " c=" << report.c_holds;
      out.detail = what.str();
    }
  }));

  const double eps = model.eps_max / 2.0;
  RootResult root;
  bool have_root = false;

  results.push_back(run_check("root-residual", 1e-12, [&](CheckResult& out) {
    root = characteristic_root(model, eps, target);
    have_root = true;
    out.max_error = root.residual;
  }));
  results.push_back(run_check("root-solidarity", 1e-10, [&](CheckResult& out) {
    if (!have_root) throw std::runtime_error("characteristic root unavailable");
    for (std::size_t i = 0; i < root.per_state_roots.size(); ++i) {
      std::ostringstream where;
      where << "state " << i + 1;
      track(out, std::abs(root.per_state_roots[i] - root.rho_root), where.str());
    }
  }));

  const double ceiling = have_root ? std::max(root.delta_proxy, root.rho_root) : 1e300;
  std::vector<std::pair<std::string, double>> rho_points = {{"rho=0", 0.0}};
  if (have_root && root.rho_root / 2.0 > kRhoZeroTol) {
    rho_points.emplace_back("rho=half-root", root.rho_root / 2.0);
  }

  for (const auto& [suffix, rho] : rho_points) {
    const auto add = [&results, &suffix](CheckResult r) {
      r.name += " @" + suffix;
      results.push_back(std::move(r));
    };
    add(check_phi_against_oracle(model, eps, rho, target));
    add(check_omega_against_oracle(model, eps, rho, target));
    add(check_rho_derivatives(model, eps, rho, target, ceiling));
    add(check_solidarity(model, eps, rho));
    add(check_occupation_sum(model, eps, rho, target));
    add(check_expansion_residuals(model, rho, target, target, 2));
    add(check_u_identity(model, rho, target, 2));
    add(check_expansion_base(model, rho, target, target, 2));
  }
  return results;
}

}  // namespace smp
