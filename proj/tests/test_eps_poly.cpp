#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "smp/eps_poly.hpp"

using smp::EpsPoly;

TEST_CASE("default and constant construction") {
  EpsPoly zero;
  CHECK(zero.order() == 0);
  CHECK(zero.coeff(0) == 0.0);
  CHECK(zero.coeff(5) == 0.0);

  EpsPoly c = EpsPoly::constant(2.5, 3);
  CHECK(c.order() == 3);
  CHECK(c.coeff(0) == 2.5);
  CHECK(c.coeff(1) == 0.0);
  CHECK(c.coeff(3) == 0.0);
}

TEST_CASE("construction rejects empty or non-finite coefficient lists") {
  CHECK_THROWS_AS(EpsPoly(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(EpsPoly({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(EpsPoly({1.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST_CASE("evaluation is Horner with exact constant term at zero") {
  EpsPoly p({1.0, 2.0, 3.0});
  CHECK(p.order() == 2);
  CHECK(p.eval(0.0) == 1.0);
  CHECK(p.eval(0.5) == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(p.coeff(2) == 3.0);
  CHECK(p.coeff(3) == 0.0);
}

TEST_CASE("truncation and padding") {
  EpsPoly p({1.0, 2.0, 3.0});
  EpsPoly t = p.truncated(1);
  CHECK(t.order() == 1);
  CHECK(t.coeff(1) == 2.0);
  CHECK(t.coeff(2) == 0.0);

  EpsPoly wide = p.padded(4);
  CHECK(wide.order() == 4);
  CHECK(wide.coeff(2) == 3.0);
  CHECK(wide.coeff(4) == 0.0);
}

TEST_CASE("sum and difference carry the smaller order") {
  EpsPoly a({1.0, 1.0, 1.0});
  EpsPoly b({2.0, 1.0});
  EpsPoly sum = a + b;
  CHECK(sum.order() == 1);
  CHECK(sum.coeff(0) == 3.0);
  CHECK(sum.coeff(1) == 2.0);

  EpsPoly diff = a - b;
  CHECK(diff.order() == 1);
  CHECK(diff.coeff(0) == -1.0);
  CHECK(diff.coeff(1) == 0.0);
}

TEST_CASE("product is the truncated Cauchy product at the smaller order") {
  EpsPoly a({1.0, 1.0, 1.0});
  EpsPoly b({2.0, 1.0});
  EpsPoly prod = a * b;
  CHECK(prod.order() == 1);
  CHECK(prod.coeff(0) == 2.0);
  CHECK(prod.coeff(1) == 3.0);
  CHECK(prod.coeff(2) == 0.0);
}

TEST_CASE("scalar multiplication preserves the order") {
  EpsPoly a({1.0, -2.0, 0.5});
  EpsPoly twice = 2.0 * a;
  CHECK(twice.order() == 2);
  CHECK(twice.coeff(0) == 2.0);
  CHECK(twice.coeff(1) == -4.0);
  CHECK(twice.coeff(2) == 1.0);

  a *= -1.0;
  CHECK(a.coeff(1) == 2.0);
}

TEST_CASE("polynomial identity (1 - e)(1 + e + e^2) = 1 - e^3 within truncation") {
  EpsPoly left({1.0, -1.0, 0.0});
  EpsPoly right({1.0, 1.0, 1.0});
  EpsPoly prod = left * right;
  CHECK(prod.order() == 2);
  CHECK(prod.coeff(0) == 1.0);
  CHECK(prod.coeff(1) == 0.0);
  CHECK(prod.coeff(2) == 0.0);
}
