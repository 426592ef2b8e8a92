#include <cmath>

#include <doctest.h>

#include "smp/errors.hpp"
#include "smp/oracle.hpp"

#include "test_support.hpp"

using smp::SemiMarkovModel;
using smp::SeriesMoment;
using smp::SeriesTable;

namespace {

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

TEST_CASE("first-hitting table on M1") {
  const SemiMarkovModel m = load_example("M1.model");
  const SeriesTable g = smp::dp_g(m, 0.1, 1, 50);
  CHECK(g.values[0][0] == 0.0);
  CHECK(g.values[0][1] == doctest::Approx(0.4).epsilon(1e-15));
  for (int n = 2; n <= 50; ++n) CHECK(g.values[0][n] == 0.0);
}

TEST_CASE("occupation table on M1") {
  const SemiMarkovModel m = load_example("M1.model");
  const SeriesTable h = smp::dp_h(m, 0.1, 1, 1, 50);
  CHECK(h.values[0][0] == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 1; n <= 50; ++n) CHECK(h.values[0][n] == 0.0);
}

TEST_CASE("killed transition probabilities on M1 decay geometrically") {
  const SemiMarkovModel m = load_example("M1.model");
  const auto trans = smp::dp_transition(m, 0.1, 1, 10);
  for (int n = 0; n <= 10; ++n) {
    CHECK(trans[0][n] == doctest::Approx(std::pow(0.4, n)).epsilon(1e-13));
  }
}

TEST_CASE("geometric first-return distribution") {
  const SemiMarkovModel g = smp::model_from_json(kGeometricReturn);
  const SeriesTable table = smp::dp_g(g, 0.0, 1, 400);
  // First return to 1 takes n >= 2 steps: 1 -> 2, (n-2) self-loops, 2 -> 1.
  CHECK(table.values[0][0] == 0.0);
  CHECK(table.values[0][1] == 0.0);
  for (int n = 2; n <= 12; ++n) {
    CHECK(table.values[0][n] ==
          doctest::Approx(0.4 * std::pow(0.5, n - 2)).epsilon(1e-13));
  }
}

TEST_CASE("series moments with certified zero tails") {
  const SemiMarkovModel m = load_example("M1.model");
  const SeriesTable g = smp::dp_g(m, 0.1, 1, 2000);
  const SeriesMoment plain = smp::series_moment(g, 1, 0.3, 0);
  CHECK(plain.tail_bound == 0.0);
  CHECK(plain.value == doctest::Approx(0.4 * std::exp(0.3)).epsilon(1e-14));
  const SeriesMoment weighted = smp::series_moment(g, 1, 0.3, 2);
  CHECK(weighted.value == doctest::Approx(0.4 * std::exp(0.3)).epsilon(1e-14));
}

TEST_CASE("series moments with geometric tail bounds") {
  const SemiMarkovModel g = smp::model_from_json(kGeometricReturn);
  const SeriesTable table = smp::dp_g(g, 0.0, 1, 2000);
  const double rho = 0.3;
  const SeriesMoment m0 = smp::series_moment(table, 1, rho, 0);
  const double q = 0.5 * std::exp(rho);
  const double exact = 0.4 * std::exp(2.0 * rho) / (1.0 - q);
  CHECK(std::abs(m0.value - exact) <= m0.tail_bound + 1e-12);
  CHECK(m0.tail_bound < 1e-9);
}

TEST_CASE("uncertifiable tails throw instead of returning a biased sum") {
  const SemiMarkovModel g = smp::model_from_json(kGeometricReturn);
  const SeriesTable table = smp::dp_g(g, 0.0, 1, 500);
  // At rho = 0.8 the weight e^(0.8 n) outgrows the 0.5^n decay.
  CHECK_THROWS_AS(smp::series_moment(table, 1, 0.8, 0), smp::TailNotCertified);
}

TEST_CASE("polynomial fit recovers exact expansion coefficients") {
  const auto quadratic = [](double e) { return (1.0 - e) * (1.0 - e); };
  const smp::FdFit fit = smp::fd_expansion_coeffs(quadratic, 2, 0.2);
  REQUIRE(fit.coeffs.size() == 3);
  CHECK(fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.coeffs[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(fit.coeffs[2] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fit.condition < 1e10);
}

TEST_CASE("fit on an analytic function carries an O(h) bias only at the top") {
  const auto rational = [](double e) { return 1.0 / (1.0 - e); };
  const smp::FdFit fit = smp::fd_expansion_coeffs(rational, 2, 0.2);
  CHECK(fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.coeffs[1] == doctest::Approx(1.0).epsilon(1e-3));
  // The top coefficient absorbs roughly 6 h c_{k+1} of bias; just bracket it.
  CHECK(std::abs(fit.coeffs[2] - 1.0) < 0.1);
}
