#include <cmath>

#include <doctest.h>

#include "smp/errors.hpp"
#include "smp/hitting.hpp"

#include "test_support.hpp"

using smp::FinitenessReport;
using smp::HittingMoments;
using smp::SemiMarkovModel;

namespace {

// Geometric dwell in state 2 before returning to 1, so first-return times
// have unbounded support: 1 -> 2 surely, then 2 -> 2 (0.5), 2 -> 1 (0.4),
// 2 -> 0 (0.1).
const char* kGeometricReturn = R"({
  "label": "geom",
  "n_states": 2, "k_max": 1, "eps_max": 0.1,
  "entries": [
    {"i": 1, "j": 2, "k": 1, "coeffs": [1.0]},
    {"i": 2, "j": 2, "k": 1, "coeffs": [0.5]},
    {"i": 2, "j": 1, "k": 1, "coeffs": [0.4]},
    {"i": 2, "j": 0, "k": 1, "coeffs": [0.1]}
  ]})";

}  // namespace

TEST_CASE("finiteness detector: nilpotent taboo blocks are always invertible") {
  const SemiMarkovModel m1 = load_example("M1.model");
  CHECK(smp::finiteness_check(m1, 0.1, 5.0, 1).invertible);

  const SemiMarkovModel m2 = load_example("M2.model");
  CHECK(smp::finiteness_check(m2, 0.2, 3.0, 1).invertible);
  CHECK(smp::finiteness_check(m2, 0.2, 3.0, 2).invertible);
}

TEST_CASE("finiteness detector: the unperturbed cycle diverges") {
  const SemiMarkovModel c = load_example("cycle3.model");
  const FinitenessReport at_half = smp::finiteness_check(c, 0.05, 0.5, 1);
  CHECK_FALSE(at_half.invertible);
  const FinitenessReport at_zero = smp::finiteness_check(c, 0.05, 0.0, 1);
  CHECK_FALSE(at_zero.invertible);
  CHECK(at_zero.spectral_radius_proxy == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("finiteness detector on a geometric block localizes the threshold") {
  const SemiMarkovModel g = smp::model_from_json(kGeometricReturn);
  CHECK(smp::finiteness_check(g, 0.0, 0.5, 1).invertible);
  CHECK_FALSE(smp::finiteness_check(g, 0.0, 0.8, 1).invertible);
}

TEST_CASE("hitting moments on M1 match the closed form") {
  const SemiMarkovModel m = load_example("M1.model");
  const double w = std::exp(0.3);
  const HittingMoments h = smp::solve_phi(m, 0.1, 0.3, 1, 2);
  CHECK(h.phi[0][0] == doctest::Approx(0.4 * w).epsilon(1e-13));
  CHECK(h.phi[1][0] == doctest::Approx(0.4 * w).epsilon(1e-13));
  CHECK(h.phi[2][0] == doctest::Approx(0.4 * w).epsilon(1e-13));
}

TEST_CASE("hitting moments on M2 match the closed form") {
  const SemiMarkovModel m = load_example("M2.model");
  const HittingMoments h = smp::solve_phi(m, 0.2, 0.1, 1, 1);
  CHECK(h.phi[0][0] == doctest::Approx(0.8 * std::exp(0.2)).epsilon(1e-13));
  CHECK(h.phi[0][1] == doctest::Approx(0.8 * std::exp(0.1)).epsilon(1e-13));
  CHECK(h.phi[1][0] == doctest::Approx(1.6 * std::exp(0.2)).epsilon(1e-13));
  CHECK(h.phi[1][1] == doctest::Approx(0.8 * std::exp(0.1)).epsilon(1e-13));
}

TEST_CASE("occupation moments on M2 match the closed form") {
  const SemiMarkovModel m = load_example("M2.model");

  const HittingMoments to_2 = smp::solve_omega(m, 0.2, 0.1, 1, 2, 1);
  CHECK(to_2.omega.at(2)[0][0] == doctest::Approx(std::exp(0.1)).epsilon(1e-13));
  CHECK(to_2.omega.at(2)[1][0] == doctest::Approx(std::exp(0.1)).epsilon(1e-13));
  CHECK(to_2.omega.at(2)[0][1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(to_2.omega.at(2)[1][1] == doctest::Approx(0.0).epsilon(1e-13));

  const HittingMoments to_1 = smp::solve_omega(m, 0.2, 0.1, 1, 1, 0);
  CHECK(to_1.omega.at(1)[0][0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(to_1.omega.at(1)[0][1] == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("divergent functionals throw instead of returning garbage") {
  const SemiMarkovModel c = load_example("cycle3.model");
  CHECK_THROWS_AS(smp::solve_phi(c, 0.05, 0.5, 1, 0), smp::NotFinite);
  CHECK_THROWS_AS(smp::solve_omega(c, 0.05, 0.5, 1, 2, 0), smp::NotFinite);
}

TEST_CASE("taboo-restricted hitting moments") {
  const SemiMarkovModel m = load_example("M2.model");
  // From 2, reaching 2 again without touching 1 is impossible.
  const smp::Vector blocked = smp::taboo_phi(m, 0.2, 0.1, 2, {1});
  CHECK(blocked[1] == doctest::Approx(0.0).epsilon(1e-14));
  // With no extra taboo, 2 is reached from 1 in one sure step.
  const smp::Vector plain = smp::taboo_phi(m, 0.2, 0.1, 2, {});
  CHECK(plain[0] == doctest::Approx(std::exp(0.1)).epsilon(1e-14));
}

TEST_CASE("solidarity residual vanishes where the functionals are finite") {
  const SemiMarkovModel m = load_example("M2.model");
  CHECK(std::abs(smp::solidarity_residual(m, 0.2, 0.1, 1, 2)) < 1e-12);
  const SemiMarkovModel g = smp::model_from_json(kGeometricReturn);
  CHECK(std::abs(smp::solidarity_residual(g, 0.05, 0.2, 1, 2)) < 1e-12);
}

TEST_CASE("stopped-time transform of the earlier of absorption and hitting") {
  const SemiMarkovModel m = load_example("M2.model");
  const auto moments = smp::min_hit_exp_moment(m, 0.2, 0.1, 1, 1);
  CHECK(moments[0][0] == doctest::Approx(std::exp(0.2)).epsilon(1e-13));
  CHECK(moments[0][1] == doctest::Approx(std::exp(0.1)).epsilon(1e-13));
  CHECK(moments[1][0] == doctest::Approx(2.0 * std::exp(0.2)).epsilon(1e-13));
  CHECK(moments[1][1] == doctest::Approx(std::exp(0.1)).epsilon(1e-13));
}
