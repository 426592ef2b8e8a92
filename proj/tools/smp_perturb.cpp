#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smp/errors.hpp"
#include "smp/expansions.hpp"
#include "smp/hitting.hpp"
#include "smp/model.hpp"
#include "smp/random_model.hpp"
#include "smp/root.hpp"
#include "smp/verification.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kRecordHeader = "quantity,i,j,s,rho,r,n,value";

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Collects CSV rows per table name and writes <dir>/<table>.csv on flush.
/// Inactive when no directory was requested.
class CsvWriter {
 public:
  explicit CsvWriter(std::string dir) : dir_(std::move(dir)) {}

  void add(const std::string& table, const std::string& header, const std::string& row) {
    if (dir_.empty()) return;
    auto& lines = tables_[table];
    if (lines.empty()) lines.push_back(header);
    lines.push_back(row);
  }

  void flush() {
    if (dir_.empty() || tables_.empty()) return;
    std::filesystem::create_directories(dir_);
    for (const auto& [name, lines] : tables_) {
      std::ofstream out(std::filesystem::path(dir_) / (name + ".csv"));
      if (!out) throw smp::ParseError("csv: cannot write into directory: " + dir_);
      for (const auto& line : lines) out << line << "\n";
    }
  }

 private:
  std::string dir_;
  std::map<std::string, std::vector<std::string>> tables_;
};

ordered_json check_json(const smp::CheckResult& c) {
  ordered_json out;
  out["name"] = c.name;
  out["pass"] = c.pass;
  out["max_error"] = c.max_error;
  out["tolerance"] = c.tolerance;
  out["detail"] = c.detail;
  return out;
}

void emit_value(ordered_json& records, CsvWriter& csv, const std::string& quantity, int i, int j,
                std::optional<int> s, double rho, int r, std::optional<int> n, double value) {
  ordered_json rec;
  rec["quantity"] = quantity;
  rec["i"] = i;
  rec["j"] = j;
  rec["s"] = s ? ordered_json(*s) : ordered_json(nullptr);
  rec["rho"] = rho;
  rec["r"] = r;
  rec["n"] = n ? ordered_json(*n) : ordered_json(nullptr);
  rec["value"] = value;
  records.push_back(std::move(rec));

  std::ostringstream row;
  row << quantity << ',' << i << ',' << j << ',' << (s ? std::to_string(*s) : std::string()) << ','
      << fmt17(rho) << ',' << r << ',' << (n ? std::to_string(*n) : std::string()) << ','
      << fmt17(value);
  csv.add(quantity + "_r" + std::to_string(r), kRecordHeader, row.str());
}

int print_report(const ordered_json& report, bool checks_pass) {
  std::cout << report.dump(2) << "\n";
  return checks_pass ? 0 : 2;
}

int worker_count(int jobs) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("SMP_PERTURB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) cap = std::min(cap, parsed);
  }
  return std::min(std::max(jobs, 1), cap);
}

struct ValidateArgs {
  std::string model;
  int eps_grid = 5;
};

int run_validate(const ValidateArgs& a) {
  const smp::SemiMarkovModel model = smp::load_model(a.model, a.eps_grid);
  const smp::ConditionReport conditions = smp::validate_conditions(model);

  ordered_json limit = ordered_json::array();
  for (int i = 0; i < conditions.limit_transition.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < conditions.limit_transition.cols(); ++j) {
      row.push_back(conditions.limit_transition(i, j));
    }
    limit.push_back(std::move(row));
  }

  ordered_json report;
  report["command"] = "validate";
  report["inputs"] = {{"model", a.model}, {"eps_grid", a.eps_grid}};
  report["outputs"] = {{"label", model.label},
                       {"n_states", model.n_states()},
                       {"k_max", model.k_max()},
                       {"eps_max", model.eps_max},
                       {"kernel_degree", model.kernel.max_degree()},
                       {"conditions",
                        {{"limit_kernel", conditions.a_holds},
                         {"communication", conditions.b_holds},
                         {"return_transform", conditions.c_holds},
                         {"return_transform_exponent", conditions.c_beta},
                         {"return_transform_value", conditions.c_phi_value},
                         {"limit_transition", limit}}}};

  smp::CheckResult cond;
  cond.name = "conditions";
  cond.pass = conditions.all_hold();
  cond.max_error = cond.pass ? 0.0 : 1.0;
  cond.tolerance = 0.0;
  if (!cond.pass) {
    std::string missing;
    if (!conditions.a_holds) missing += " limit-kernel";
    if (!conditions.b_holds) missing += " communication";
    if (!conditions.c_holds) missing += " return-transform";
    cond.detail = "failed:" + missing;
  }
  report["checks"] = ordered_json::array({check_json(cond)});
  return print_report(report, cond.pass);
}

struct MomentsArgs {
  std::string model;
  double eps = 0.0;
  double rho = 0.0;
  int r = 0;
  int j = 1;
  int s = 0;
  std::string csv;
};

int run_moments(const MomentsArgs& a) {
  const smp::SemiMarkovModel model = smp::load_model(a.model);
  CsvWriter csv(a.csv);
  ordered_json records = ordered_json::array();

  const smp::HittingMoments phi = smp::solve_phi(model, a.eps, a.rho, a.j, a.r);
  for (int r = 0; r <= a.r; ++r) {
    for (int i = 1; i <= model.n_states(); ++i) {
      emit_value(records, csv, "phi", i, a.j, std::nullopt, a.rho, r, std::nullopt,
                 phi.phi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i - 1)]);
    }
  }
  if (a.s >= 1) {
    const smp::HittingMoments omega = smp::solve_omega(model, a.eps, a.rho, a.j, a.s, a.r);
    const auto& table = omega.omega.at(a.s);
    for (int r = 0; r <= a.r; ++r) {
      for (int i = 1; i <= model.n_states(); ++i) {
        emit_value(records, csv, "omega", i, a.j, a.s, a.rho, r, std::nullopt,
                   table[static_cast<std::size_t>(r)][static_cast<std::size_t>(i - 1)]);
      }
    }
  }

  ordered_json report;
  report["command"] = "moments";
  report["inputs"] = {{"model", a.model},
                      {"eps", a.eps},
                      {"rho", a.rho},
                      {"r", a.r},
                      {"j", a.j},
                      {"s", a.s >= 1 ? ordered_json(a.s) : ordered_json(nullptr)}};
  report["outputs"] = {{"records", records}};
  report["checks"] = ordered_json::array();
  csv.flush();
  return print_report(report, true);
}

struct RootArgs {
  std::string model;
  std::vector<double> eps;
  int reference = 1;
  std::string csv;
};

int run_root(const RootArgs& a) {
  const smp::SemiMarkovModel model = smp::load_model(a.model);
  CsvWriter csv(a.csv);
  ordered_json records = ordered_json::array();
  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  bool any_semantic_failure = false;

  for (const double eps : a.eps) {
    ordered_json rec;
    rec["quantity"] = "root";
    rec["eps"] = eps;
    smp::CheckResult c;
    c.name = "root-residual eps=" + fmt17(eps);
    c.tolerance = 1e-12;
    try {
      const smp::RootResult res = smp::characteristic_root(model, eps, a.reference);
      rec["value"] = res.rho_root;
      rec["residual"] = res.residual;
      rec["delta_proxy"] = res.delta_proxy;
      rec["per_state_roots"] = res.per_state_roots;
      rec["error"] = nullptr;
      c.max_error = res.residual;
      c.pass = c.max_error <= c.tolerance;
      csv.add("root", "eps,value,residual,delta_proxy",
              fmt17(eps) + "," + fmt17(res.rho_root) + "," + fmt17(res.residual) + "," +
                  fmt17(res.delta_proxy));
    } catch (const smp::NoRoot& e) {
      rec["value"] = nullptr;
      rec["error"] = e.what();
      c.max_error = std::numeric_limits<double>::infinity();
      c.pass = false;
      c.detail = e.what();
      any_semantic_failure = true;
    } catch (const smp::NotFinite& e) {
      rec["value"] = nullptr;
      rec["error"] = e.what();
      c.max_error = std::numeric_limits<double>::infinity();
      c.pass = false;
      c.detail = e.what();
      any_semantic_failure = true;
    }
    records.push_back(std::move(rec));
    checks.push_back(check_json(c));
    all_pass = all_pass && c.pass;
  }

  ordered_json report;
  report["command"] = "root";
  report["inputs"] = {{"model", a.model}, {"eps", a.eps}, {"reference", a.reference}};
  report["outputs"] = {{"records", records}};
  report["checks"] = checks;
  csv.flush();
  std::cout << report.dump(2) << "\n";
  if (any_semantic_failure) return 3;
  return all_pass ? 0 : 2;
}

struct ExpandArgs {
  std::string model;
  double rho = 0.0;
  int j = 1;
  int s = 0;
  int k = 2;
  std::string csv;
};

int run_expand(const ExpandArgs& a) {
  const smp::SemiMarkovModel model = smp::load_model(a.model);
  CsvWriter csv(a.csv);
  ordered_json records = ordered_json::array();

  const smp::ExpansionTable phi = smp::phi_expansion(model, a.rho, a.j, a.k);
  for (int r = 0; r <= a.k; ++r) {
    for (int n = 0; n <= a.k - r; ++n) {
      for (int i = 1; i <= model.n_states(); ++i) {
        emit_value(records, csv, "phi", i, a.j, std::nullopt, a.rho, r, n,
                   phi.phi[static_cast<std::size_t>(r)].at(n)[static_cast<std::size_t>(i - 1)]);
      }
    }
  }
  if (a.s >= 1) {
    const smp::ExpansionTable omega = smp::omega_expansion(model, a.rho, a.j, a.s, a.k);
    for (int r = 0; r <= a.k; ++r) {
      for (int n = 0; n <= a.k - r; ++n) {
        for (int i = 1; i <= model.n_states(); ++i) {
          emit_value(records, csv, "omega", i, a.j, a.s, a.rho, r, n,
                     omega.omega[static_cast<std::size_t>(r)].at(n)[static_cast<std::size_t>(i - 1)]);
        }
      }
    }
  }

  const smp::CheckResult resid =
      smp::check_expansion_residuals(model, a.rho, a.j, a.s >= 1 ? a.s : a.j, a.k);

  ordered_json report;
  report["command"] = "expand";
  report["inputs"] = {{"model", a.model},
                      {"rho", a.rho},
                      {"j", a.j},
                      {"s", a.s >= 1 ? ordered_json(a.s) : ordered_json(nullptr)},
                      {"k", a.k}};
  report["outputs"] = {{"records", records}};
  report["checks"] = ordered_json::array({check_json(resid)});
  csv.flush();
  return print_report(report, resid.pass);
}

struct VerifyArgs {
  std::string model;
  std::vector<std::uint64_t> random;
  int target = 1;
  std::string csv;
};

struct ModelOutcome {
  std::uint64_t seed = 0;
  bool seeded = false;
  std::string label;
  std::string error;
  std::vector<smp::CheckResult> checks;
};

int run_verify(const VerifyArgs& a) {
  if (a.model.empty() == a.random.empty()) {
    throw smp::ParseError("verify: pass exactly one of a model file or --random SEED COUNT");
  }

  std::vector<ModelOutcome> outcomes;
  if (!a.model.empty()) {
    ModelOutcome outcome;
    const smp::SemiMarkovModel model = smp::load_model(a.model);
    outcome.label = model.label.empty() ? a.model : model.label;
    outcome.checks = smp::verify_model(model, a.target);
    outcomes.push_back(std::move(outcome));
  } else {
    if (a.random[1] < 1 || a.random[1] > 100000) {
      throw smp::ParseError("verify: --random COUNT must lie in 1..100000");
    }
    const std::uint64_t seed0 = a.random[0];
    const int count = static_cast<int>(a.random[1]);
    outcomes.resize(static_cast<std::size_t>(count));
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    const int workers = worker_count(count);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int idx = cursor.fetch_add(1); idx < count; idx = cursor.fetch_add(1)) {
          ModelOutcome& slot = outcomes[static_cast<std::size_t>(idx)];
          slot.seed = seed0 + static_cast<std::uint64_t>(idx);
          slot.seeded = true;
          try {
            const smp::SemiMarkovModel model = smp::random_model(slot.seed);
            slot.label = model.label;
            slot.checks = smp::verify_model(model, a.target);
          } catch (const std::exception& e) {
            slot.error = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  CsvWriter csv(a.csv);
  ordered_json models = ordered_json::array();
  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  for (const auto& outcome : outcomes) {
    ordered_json mj;
    if (outcome.seeded) mj["seed"] = outcome.seed;
    mj["label"] = outcome.label;
    bool pass = outcome.error.empty();
    double worst_margin = -std::numeric_limits<double>::infinity();
    std::string worst_name;
    ordered_json mchecks = ordered_json::array();
    for (const auto& c : outcome.checks) {
      mchecks.push_back(check_json(c));
      pass = pass && c.pass;
      const double margin = c.max_error - c.tolerance;
      if (margin > worst_margin || worst_name.empty()) {
        worst_margin = margin;
        worst_name = c.name;
      }
      csv.add("checks", "model,check,pass,max_error,tolerance",
              outcome.label + "," + c.name + "," + (c.pass ? "1" : "0") + "," +
                  fmt17(c.max_error) + "," + fmt17(c.tolerance));
    }
    if (!outcome.error.empty()) mj["error"] = outcome.error;
    mj["checks"] = mchecks;
    models.push_back(std::move(mj));

    smp::CheckResult agg;
    agg.name = outcome.seeded ? "model seed=" + std::to_string(outcome.seed)
                              : "model " + outcome.label;
    agg.pass = pass;
    agg.max_error = worst_margin;
    agg.tolerance = 0.0;
    if (!outcome.error.empty()) {
      agg.detail = outcome.error;
    } else if (!worst_name.empty()) {
      agg.detail = (pass ? "worst margin at " : "failed at ") + worst_name;
    }
    checks.push_back(check_json(agg));
    all_pass = all_pass && pass;
  }

  ordered_json report;
  report["command"] = "verify";
  report["inputs"] = {{"model", a.model.empty() ? ordered_json(nullptr) : ordered_json(a.model)},
                      {"random_seed", a.random.empty() ? ordered_json(nullptr) : ordered_json(a.random[0])},
                      {"random_count", a.random.empty() ? ordered_json(nullptr) : ordered_json(a.random[1])},
                      {"target", a.target}};
  report["outputs"] = {{"models", models}};
  report["checks"] = checks;
  csv.flush();
  return print_report(report, all_pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moments, characteristic roots, and perturbation expansions of "
               "absorbing semi-Markov models"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check a model file and report the structural conditions");
  validate->add_option("model", validate_args.model, "Model file (JSON)")->required();
  validate->add_option("--eps-grid", validate_args.eps_grid,
                       "Grid points for positivity and row-sum validation")
      ->check(CLI::Range(2, 10000))
      ->capture_default_str();

  MomentsArgs moments_args;
  CLI::App* moments = app.add_subcommand(
      "moments", "Solve the hitting and occupation moment systems at one (eps, rho)");
  moments->add_option("model", moments_args.model, "Model file (JSON)")->required();
  moments->add_option("--eps", moments_args.eps, "Perturbation size")->required();
  moments->add_option("--rho", moments_args.rho,
                      "Exponent of the power-exponential weight (|rho| < 1e-12 is treated as 0)")
      ->required();
  moments->add_option("--r", moments_args.r, "Highest derivative order")
      ->check(CLI::Range(0, 16))
      ->capture_default_str();
  moments->add_option("--j", moments_args.j, "Target state")->required();
  moments->add_option("--s", moments_args.s, "Occupied state for omega (omit for phi only)");
  moments->add_option("--csv", moments_args.csv, "Directory for CSV tables");

  RootArgs root_args;
  CLI::App* root = app.add_subcommand("root", "Solve the characteristic equation");
  root->add_option("model", root_args.model, "Model file (JSON)")->required();
  root->add_option("--eps", root_args.eps, "Perturbation sizes (one root per value)")
      ->required()
      ->expected(1, 1000);
  root->add_option("--reference", root_args.reference, "Reference state for the reported root")
      ->capture_default_str();
  root->add_option("--csv", root_args.csv, "Directory for CSV tables");

  ExpandArgs expand_args;
  CLI::App* expand = app.add_subcommand(
      "expand", "Asymptotic eps-expansions of the moment functionals");
  expand->add_option("model", expand_args.model, "Model file (JSON)")->required();
  expand->add_option("--rho", expand_args.rho, "Exponent of the weight")->required();
  expand->add_option("--j", expand_args.j, "Target state")->required();
  expand->add_option("--s", expand_args.s, "Occupied state for omega (omit for phi only)");
  expand->add_option("--k", expand_args.k, "Expansion order")
      ->check(CLI::Range(0, 12))
      ->capture_default_str();
  expand->add_option("--csv", expand_args.csv, "Directory for CSV tables");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the cross-module consistency suite on a model file or random models");
  verify->add_option("model", verify_args.model, "Model file (JSON)");
  verify->add_option("--random", verify_args.random, "SEED COUNT: verify COUNT seeded models")
      ->expected(2);
  verify->add_option("--j", verify_args.target, "Target state for the checks")
      ->capture_default_str();
  verify->add_option("--csv", verify_args.csv, "Directory for CSV tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  const std::function<int()> selected = [&]() -> std::function<int()> {
    if (validate->parsed()) return [&] { return run_validate(validate_args); };
    if (moments->parsed()) return [&] { return run_moments(moments_args); };
    if (root->parsed()) return [&] { return run_root(root_args); };
    if (expand->parsed()) return [&] { return run_expand(expand_args); };
    return [&] { return run_verify(verify_args); };
  }();

  try {
    return selected();
  } catch (const smp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const smp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const smp::NotFinite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const smp::NoRoot& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const smp::SingularAtZero& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const smp::TailNotCertified& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const smp::IllConditioned& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
