#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "smp/errors.hpp"
#include "smp/expansions.hpp"

#include "test_support.hpp"

using smp::ExpansionTable;
using smp::MatrixSeries;
using smp::SemiMarkovModel;

TEST_CASE("kernel moment series on M1") {
  const SemiMarkovModel m = load_example("M1.model");
  const MatrixSeries p = smp::p_expansion(m, 0.3, 1, 2);
  const double w = std::exp(0.3);
  CHECK(p.at(0)(0, 1) == doctest::Approx(0.5 * w).epsilon(1e-14));
  CHECK(p.at(1)(0, 1) == doctest::Approx(-w).epsilon(1e-14));
  CHECK(p.at(0)(0, 0) == doctest::Approx(0.5 * w).epsilon(1e-14));
  CHECK(p.at(1)(0, 0) == doctest::Approx(w).epsilon(1e-14));
  // Each rho-derivative costs one eps-order: r = 1, k = 2 carries order 1.
  CHECK(p.order() == 1);
  CHECK_THROWS_AS(p.at(2), std::invalid_argument);
}

TEST_CASE("taboo block and column extraction") {
  const SemiMarkovModel m = load_example("M2.model");
  const MatrixSeries full = smp::p_expansion(m, 0.1, 0, 1);
  const MatrixSeries block = smp::taboo_block_series(full, {1});
  const double w = std::exp(0.1);
  CHECK(block.at(0)(0, 0) == 0.0);
  CHECK(block.at(0)(0, 1) == doctest::Approx(w).epsilon(1e-14));
  CHECK(block.at(0)(1, 0) == 0.0);
  CHECK(block.at(0)(1, 1) == 0.0);
  CHECK(block.at(1)(0, 1) == 0.0);

  const smp::VectorSeries col = smp::column_series(full, 1);
  CHECK(col.at(0)[1] == doctest::Approx(w).epsilon(1e-14));
  CHECK(col.at(1)[1] == doctest::Approx(-w).epsilon(1e-14));
}

TEST_CASE("inverse expansion of a nilpotent block terminates") {
  const SemiMarkovModel m = load_example("M2.model");
  const MatrixSeries block =
      smp::taboo_block_series(smp::p_expansion(m, 0.1, 0, 2), {1});
  const MatrixSeries u = smp::inverse_expansion(block, 2);
  const double w = std::exp(0.1);
  CHECK(u.at(0)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.at(0)(0, 1) == doctest::Approx(w).epsilon(1e-14));
  CHECK(u.at(0)(1, 0) == 0.0);
  CHECK(u.at(0)(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  for (int n = 1; n <= 2; ++n) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) CHECK(u.at(n)(a, b) == doctest::Approx(0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("inverse expansion refuses a divergent base point") {
  const SemiMarkovModel c = load_example("cycle3.model");
  const MatrixSeries block =
      smp::taboo_block_series(smp::p_expansion(c, 0.5, 0, 1), {1});
  CHECK_THROWS_AS(smp::inverse_expansion(block, 1), smp::SingularAtZero);
}

TEST_CASE("hitting-time expansion of M1 across derivative orders") {
  const SemiMarkovModel m = load_example("M1.model");
  const ExpansionTable at_zero = smp::phi_expansion(m, 0.0, 1, 2);
  CHECK(at_zero.phi[0].at(0)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at_zero.phi[0].at(1)[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(at_zero.phi[0].at(2)[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(at_zero.phi[1].at(0)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at_zero.phi[1].at(1)[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(at_zero.phi[2].at(0)[0] == doctest::Approx(0.5).epsilon(1e-14));

  const ExpansionTable tilted = smp::phi_expansion(m, 5.0, 1, 1);
  const double w = std::exp(5.0);
  CHECK(tilted.phi[0].at(0)[0] == doctest::Approx(0.5 * w).epsilon(1e-12));
  CHECK(tilted.phi[0].at(1)[0] == doctest::Approx(-w).epsilon(1e-12));
}

TEST_CASE("hitting-time expansion of M2 matches the closed form") {
  const SemiMarkovModel m = load_example("M2.model");
  const ExpansionTable table = smp::phi_expansion(m, 0.1, 1, 1);
  const double w2 = std::exp(0.2);
  const double w1 = std::exp(0.1);
  CHECK(table.phi[0].at(0)[0] == doctest::Approx(w2).epsilon(1e-13));
  CHECK(table.phi[0].at(1)[0] == doctest::Approx(-w2).epsilon(1e-13));
  CHECK(table.phi[0].at(0)[1] == doctest::Approx(w1).epsilon(1e-13));
  CHECK(table.phi[0].at(1)[1] == doctest::Approx(-w1).epsilon(1e-13));
}

TEST_CASE("sojourn factor expansion is constant for unit holding times") {
  const SemiMarkovModel m = load_example("M2.model");
  const ExpansionTable table = smp::varphi_expansion(m, 0.1, 1);
  for (int i = 0; i < 2; ++i) {
    CHECK(table.varphi[0][i].coeff(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(table.varphi[0][i].coeff(1) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("occupation expansions of M2 match the closed form") {
  const SemiMarkovModel m = load_example("M2.model");
  const ExpansionTable to_2 = smp::omega_expansion(m, 0.1, 1, 2, 1);
  const double w = std::exp(0.1);
  CHECK(to_2.omega[0].at(0)[0] == doctest::Approx(w).epsilon(1e-13));
  CHECK(to_2.omega[0].at(1)[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(to_2.omega[0].at(0)[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(to_2.omega[0].at(1)[1] == doctest::Approx(0.0).epsilon(1e-13));

  const ExpansionTable to_1 = smp::omega_expansion(m, 0.1, 1, 1, 1);
  CHECK(to_1.omega[0].at(0)[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(to_1.omega[0].at(1)[0] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(to_1.omega[0].at(0)[1] == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("rho = 0 expansions exercise the deeper sojourn recursion") {
  const SemiMarkovModel m = load_example("M2.model");
  const ExpansionTable table = smp::omega_expansion(m, 0.0, 1, 2, 2);
  // omega_112(0, 0) counts the single visit to 2 on the way back to 1.
  CHECK(table.omega[0].at(0)[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(table.omega[0].at(1)[0] == doctest::Approx(0.0).epsilon(1e-13));
  // omega_112(0, 1) weights that visit by its epoch, n = 1.
  CHECK(table.omega[1].at(0)[0] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("strict series indexing") {
  const SemiMarkovModel m = load_example("M1.model");
  const ExpansionTable table = smp::phi_expansion(m, 0.0, 1, 2);
  CHECK_THROWS_AS(table.phi[1].at(2), std::invalid_argument);
  CHECK_THROWS_AS(table.u.at(3), std::invalid_argument);
}
