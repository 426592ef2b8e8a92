#include "smp/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace smp {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::inf_norm() const {
  double best = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int c = 0; c < cols_; ++c) s += std::abs((*this)(r, c));
    if (s > best) best = s;
  }
  return best;
}

bool Matrix::all_finite() const {
  for (double v : d_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("Matrix: shape mismatch");
  for (std::size_t t = 0; t < d_.size(); ++t) d_[t] += rhs.d_[t];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("Matrix: shape mismatch");
  for (std::size_t t = 0; t < d_.size(); ++t) d_[t] -= rhs.d_[t];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : d_) v *= s;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) {
  lhs += rhs;
  return lhs;
}

Matrix operator-(Matrix lhs, const Matrix& rhs) {
  lhs -= rhs;
  return lhs;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols_ != rhs.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
  Matrix out(lhs.rows_, rhs.cols_);
  for (int r = 0; r < lhs.rows_; ++r) {
    for (int k = 0; k < lhs.cols_; ++k) {
      const double a = lhs(r, k);
      if (a == 0.0) continue;
      for (int c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
    }
  }
  return out;
}

Vector operator*(const Matrix& lhs, const Vector& rhs) {
  if (lhs.cols_ != static_cast<int>(rhs.size())) {
    throw std::invalid_argument("Matrix: shape mismatch in matrix-vector product");
  }
  Vector out(static_cast<std::size_t>(lhs.rows_), 0.0);
  for (int r = 0; r < lhs.rows_; ++r) {
    double acc = 0.0;
    for (int c = 0; c < lhs.cols_; ++c) acc += lhs(r, c) * rhs[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

Matrix operator*(double s, Matrix m) {
  m *= s;
  return m;
}

double inf_norm(const Vector& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

Vector operator+(Vector lhs, const Vector& rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("Vector: size mismatch");
  for (std::size_t t = 0; t < lhs.size(); ++t) lhs[t] += rhs[t];
  return lhs;
}

Vector operator-(Vector lhs, const Vector& rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("Vector: size mismatch");
  for (std::size_t t = 0; t < lhs.size(); ++t) lhs[t] -= rhs[t];
  return lhs;
}

Vector operator*(double s, Vector v) {
  for (double& x : v) x *= s;
  return v;
}

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LuFactorization: matrix must be square");
  const int n = lu_.rows();
  perm_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
  min_pivot_ = (n == 0) ? 1.0 : 0.0;

  for (int col = 0; col < n; ++col) {
    int pivot_row = col;
    double pivot_mag = std::abs(lu_(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::abs(lu_(r, col));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = r;
      }
    }
    if (pivot_row != col) {
      for (int c = 0; c < n; ++c) std::swap(lu_(col, c), lu_(pivot_row, c));
      std::swap(perm_[static_cast<std::size_t>(col)], perm_[static_cast<std::size_t>(pivot_row)]);
    }
    if (col == 0 || pivot_mag < min_pivot_) min_pivot_ = pivot_mag;
    if (pivot_mag == 0.0) continue;  // leaves an exactly singular column untouched
    const double inv = 1.0 / lu_(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double factor = lu_(r, col) * inv;
      lu_(r, col) = factor;
      if (factor == 0.0) continue;
      for (int c = col + 1; c < n; ++c) lu_(r, c) -= factor * lu_(col, c);
    }
  }
}

Vector LuFactorization::solve(const Vector& b) const {
  const int n = lu_.rows();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("LuFactorization: size mismatch");
  Vector x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
  for (int i = 1; i < n; ++i) {
    double acc = x[static_cast<std::size_t>(i)];
    for (int c = 0; c < i; ++c) acc -= lu_(i, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(i)] = acc;
  }
  for (int i = n - 1; i >= 0; --i) {
    double acc = x[static_cast<std::size_t>(i)];
    for (int c = i + 1; c < n; ++c) acc -= lu_(i, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(i)] = acc / lu_(i, i);
  }
  return x;
}

Matrix LuFactorization::solve(const Matrix& b) const {
  const int n = lu_.rows();
  if (b.rows() != n) throw std::invalid_argument("LuFactorization: size mismatch");
  Matrix out(n, b.cols());
  Vector col(static_cast<std::size_t>(n));
  for (int c = 0; c < b.cols(); ++c) {
    for (int r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = b(r, c);
    Vector x = solve(col);
    for (int r = 0; r < n; ++r) out(r, c) = x[static_cast<std::size_t>(r)];
  }
  return out;
}

Matrix LuFactorization::inverse() const { return solve(Matrix::identity(lu_.rows())); }

}  // namespace smp
