#include <cmath>

#include <doctest.h>

#include "smp/errors.hpp"
#include "smp/root.hpp"

#include "test_support.hpp"

using smp::RootResult;
using smp::SemiMarkovModel;

TEST_CASE("characteristic root of M1 is the log of the inverse return mass") {
  const SemiMarkovModel m = load_example("M1.model");
  const RootResult at_zero = smp::characteristic_root(m, 0.0);
  CHECK(at_zero.rho_root == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(at_zero.residual <= 1e-12);

  const RootResult at_tenth = smp::characteristic_root(m, 0.1);
  CHECK(at_tenth.rho_root == doctest::Approx(std::log(2.5)).epsilon(1e-12));
  CHECK(at_tenth.per_state_roots.size() == 1);
  CHECK(at_tenth.delta_proxy >= at_tenth.rho_root);
}

TEST_CASE("characteristic root of M2 and per-state agreement") {
  const SemiMarkovModel m = load_example("M2.model");
  const RootResult res = smp::characteristic_root(m, 0.2);
  CHECK(res.rho_root == doctest::Approx(-0.5 * std::log(0.8)).epsilon(1e-12));
  REQUIRE(res.per_state_roots.size() == 2);
  CHECK(std::abs(res.per_state_roots[0] - res.rho_root) < 1e-10);
  CHECK(std::abs(res.per_state_roots[1] - res.rho_root) < 1e-10);
}

TEST_CASE("an unperturbed recurrent model has root zero") {
  const SemiMarkovModel m = load_example("M2.model");
  const RootResult res = smp::characteristic_root(m, 0.0);
  CHECK(res.rho_root == 0.0);
  CHECK(res.residual <= 1e-12);
}

TEST_CASE("no return mass means no root, with the probed range reported") {
  const SemiMarkovModel m = smp::model_from_json(R"({
    "n_states": 2, "k_max": 1, "eps_max": 0.1,
    "entries": [
      {"i": 1, "j": 2, "k": 1, "coeffs": [0.7]},
      {"i": 1, "j": 0, "k": 1, "coeffs": [0.3]},
      {"i": 2, "j": 0, "k": 1, "coeffs": [1.0]}
    ]})");
  CHECK_THROWS_AS(smp::characteristic_root(m, 0.0), smp::NoRoot);
  try {
    smp::characteristic_root(m, 0.0);
  } catch (const smp::NoRoot& e) {
    CHECK(e.delta_proxy > 1.0);
  }
}

TEST_CASE("root scan records per-point results and the gap to the limit") {
  const SemiMarkovModel m = load_example("M1.model");
  const auto scan = smp::root_convergence_scan(m, {0.2, 0.1, 0.05, 0.025});
  REQUIRE(scan.size() == 4);
  for (const auto& point : scan) CHECK(point.ok);
  for (std::size_t t = 1; t < scan.size(); ++t) {
    CHECK(scan[t].gap_to_limit < scan[t - 1].gap_to_limit);
  }
  CHECK(scan[3].root.rho_root ==
        doctest::Approx(std::log(1.0 / 0.475)).epsilon(1e-12));
}

TEST_CASE("the root is a true root of the return transform") {
  const SemiMarkovModel g = smp::model_from_json(R"({
    "label": "geom",
    "n_states": 2, "k_max": 1, "eps_max": 0.1,
    "entries": [
      {"i": 1, "j": 2, "k": 1, "coeffs": [1.0]},
      {"i": 2, "j": 2, "k": 1, "coeffs": [0.5]},
      {"i": 2, "j": 1, "k": 1, "coeffs": [0.4]},
      {"i": 2, "j": 0, "k": 1, "coeffs": [0.1]}
    ]})");
  const RootResult res = smp::characteristic_root(g, 0.05);
  CHECK(res.residual <= 1e-12);
  // Return transform: phi_11(rho) = e^(2 rho) 0.4 / (1 - 0.5 e^rho) = 1.
  const double w = std::exp(res.rho_root);
  CHECK(w * w * 0.4 / (1.0 - 0.5 * w) == doctest::Approx(1.0).epsilon(1e-11));
}
