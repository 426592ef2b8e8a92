#include <stdexcept>

#include <doctest.h>

#include "smp/errors.hpp"
#include "smp/model.hpp"

#include "test_support.hpp"

using smp::ConcreteKernel;
using smp::SemiMarkovModel;

TEST_CASE("loads the M1 example") {
  const SemiMarkovModel m = load_example("M1.model");
  CHECK(m.label == "M1");
  CHECK(m.n_states() == 1);
  CHECK(m.k_max() == 1);
  CHECK(m.eps_max == 0.2);
  CHECK(m.kernel.max_degree() == 1);
  CHECK(m.kernel.q(1, 1, 1).coeff(0) == 0.5);
  CHECK(m.kernel.q(1, 1, 1).coeff(1) == -1.0);
  CHECK(m.kernel.q(1, 0, 1).coeff(1) == 1.0);
}

TEST_CASE("concrete kernel evaluation, jump probabilities, survivor") {
  const SemiMarkovModel m = load_example("M1.model");
  const ConcreteKernel k = eval_kernel(m, 0.1);
  CHECK(k.q(1, 1, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(k.q(1, 0, 1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(k.jump_probability(1, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(k.survivor(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.survivor(1, 1) == 0.0);

  CHECK_THROWS_AS(eval_kernel(m, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(eval_kernel(m, -0.01), std::invalid_argument);
}

TEST_CASE("parse errors carry diagnostics") {
  CHECK_THROWS_AS(smp::model_from_json("not json"), smp::ParseError);
  CHECK_THROWS_AS(smp::model_from_json("[]"), smp::ParseError);
  CHECK_THROWS_AS(smp::model_from_json(R"({"n_states": 1, "k_max": 1})"), smp::ParseError);
  CHECK_THROWS_AS(smp::load_model(model_path("missing.model")), smp::ParseError);

  const char* duplicate = R"({
    "n_states": 1, "k_max": 1, "eps_max": 0.1,
    "entries": [
      {"i": 1, "j": 0, "k": 1, "coeffs": [0.5]},
      {"i": 1, "j": 0, "k": 1, "coeffs": [0.5]}
    ]})";
  CHECK_THROWS_AS(smp::model_from_json(duplicate), smp::ParseError);

  const char* out_of_range = R"({
    "n_states": 1, "k_max": 1, "eps_max": 0.1,
    "entries": [{"i": 2, "j": 0, "k": 1, "coeffs": [1.0]}]})";
  CHECK_THROWS_AS(smp::model_from_json(out_of_range), smp::ParseError);
}

TEST_CASE("validation rejects defective rows on the eps grid") {
  const char* short_row = R"({
    "n_states": 1, "k_max": 1, "eps_max": 0.1,
    "entries": [{"i": 1, "j": 0, "k": 1, "coeffs": [0.9]}]})";
  CHECK_THROWS_AS(smp::model_from_json(short_row), smp::ValidationError);

  const char* negative_at_eps_max = R"({
    "n_states": 1, "k_max": 1, "eps_max": 0.1,
    "entries": [
      {"i": 1, "j": 0, "k": 1, "coeffs": [0.5, -10.0]},
      {"i": 1, "j": 1, "k": 1, "coeffs": [0.5, 10.0]}
    ]})";
  CHECK_THROWS_AS(smp::model_from_json(negative_at_eps_max), smp::ValidationError);
}

TEST_CASE("structural conditions hold on the closed-form examples") {
  CHECK(smp::validate_conditions(load_example("M1.model")).all_hold());
  CHECK(smp::validate_conditions(load_example("M2.model")).all_hold());
}

TEST_CASE("the unperturbed cycle fails communication back to state 1") {
  const smp::ConditionReport report = smp::validate_conditions(load_example("cycle3.model"));
  CHECK(report.a_holds);
  CHECK_FALSE(report.b_holds);
  CHECK_FALSE(report.all_hold());
}

TEST_CASE("limit transition witness matches the eps = 0 kernel") {
  const SemiMarkovModel m = load_example("M2.model");
  const smp::ConditionReport report = smp::validate_conditions(m);
  CHECK(report.limit_transition(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(report.limit_transition(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(report.limit_transition(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
}
