#pragma once

#include <vector>

namespace smp {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for the small state spaces this library
/// works with; no attempt at blocking or vectorization.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return d_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return d_[static_cast<std::size_t>(r) * cols_ + c]; }

  /// Maximum absolute row sum.
  double inf_norm() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix lhs, const Matrix& rhs);
  friend Matrix operator-(Matrix lhs, const Matrix& rhs);
  friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
  friend Vector operator*(const Matrix& lhs, const Vector& rhs);
  friend Matrix operator*(double s, Matrix m);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

double inf_norm(const Vector& v);
Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double s, Vector v);

/// LU factorization with partial (row) pivoting, PA = LU.
///
/// The factorization never throws on singular input; callers inspect
/// min_pivot() to decide whether solves are trustworthy.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);

  /// Smallest absolute diagonal entry of U.
  double min_pivot() const { return min_pivot_; }
  bool singular(double tol = 1e-12) const { return min_pivot_ < tol; }

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<int> perm_;
  double min_pivot_ = 0.0;
};

}  // namespace smp
