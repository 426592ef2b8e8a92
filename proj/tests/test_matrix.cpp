#include <cmath>

#include <doctest.h>

#include "smp/matrix.hpp"

using smp::LuFactorization;
using smp::Matrix;
using smp::Vector;

TEST_CASE("basic arithmetic and norms") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 3.0;
  a(1, 1) = 4.0;

  CHECK(a.inf_norm() == 7.0);
  CHECK(a.all_finite());

  const Vector v = a * Vector{1.0, 1.0};
  CHECK(v[0] == 3.0);
  CHECK(v[1] == 7.0);

  const Matrix eye = Matrix::identity(2);
  const Matrix sum = a + eye;
  CHECK(sum(0, 0) == 2.0);
  CHECK(sum(1, 1) == 5.0);

  const Matrix twice = 2.0 * a;
  CHECK(twice(1, 0) == 6.0);

  const Matrix square = a * a;
  CHECK(square(0, 0) == 7.0);
  CHECK(square(0, 1) == 10.0);
  CHECK(square(1, 0) == 15.0);
  CHECK(square(1, 1) == 22.0);
}

TEST_CASE("vector helpers") {
  const Vector a{1.0, -4.0};
  const Vector b{0.5, 1.0};
  CHECK(smp::inf_norm(a) == 4.0);
  const Vector sum = smp::operator+(a, b);
  CHECK(sum[1] == -3.0);
  const Vector diff = smp::operator-(a, b);
  CHECK(diff[0] == 0.5);
  const Vector scaled = smp::operator*(2.0, b);
  CHECK(scaled[1] == 2.0);
}

TEST_CASE("LU solves and inverts a well-conditioned system") {
  Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = 3.0;
  a(1, 0) = 6.0;
  a(1, 1) = 3.0;

  LuFactorization lu(a);
  CHECK_FALSE(lu.singular(1e-12));
  CHECK(lu.min_pivot() > 0.1);

  const Vector x = lu.solve(Vector{10.0, 12.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));

  const Matrix inv = lu.inverse();
  const Matrix prod = a * inv;
  CHECK(prod(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prod(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(prod(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(prod(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("LU reports singular matrices instead of throwing") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;

  LuFactorization lu(a);
  CHECK(lu.singular(1e-12));
  CHECK(lu.min_pivot() <= 1e-12);
}

TEST_CASE("matrix right-hand-side solve") {
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 5.0;
  LuFactorization lu(a);
  const Matrix sol = lu.solve(Matrix::identity(2));
  CHECK(sol(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sol(1, 1) == doctest::Approx(0.2).epsilon(1e-15));
}
