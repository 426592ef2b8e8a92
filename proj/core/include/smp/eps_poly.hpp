#pragma once

#include <vector>

namespace smp {

/// Truncated power series in the perturbation parameter.
///
/// Stores coefficients a[0..m] of a(eps) = sum_n a_n eps^n. Model kernels use
/// this as an exact polynomial; derived quantities use it as a series whose
/// coefficients are valid up to the stored order, with an o(eps^m) remainder
/// beyond. Addition and multiplication keep the remainder bookkeeping honest:
/// the result carries order min(order(lhs), order(rhs)), and products are
/// truncated Cauchy products. Scalar multiplication preserves the order.
class EpsPoly {
 public:
  /// The zero polynomial of order 0.
  EpsPoly() : coeffs_{0.0} {}

  /// Coefficients a[0..m]; order is coeffs.size() - 1. All entries must be
  /// finite and the list must be nonempty.
  explicit EpsPoly(std::vector<double> coeffs);

  static EpsPoly constant(double value, int order = 0);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// Coefficient of eps^n; zero beyond the stored order.
  double coeff(int n) const;

  const std::vector<double>& coeffs() const { return coeffs_; }

  /// Horner evaluation. eval(0) returns coeff(0) exactly.
  double eval(double eps) const;

  /// Copy with coefficients beyond `order` dropped. Requires order >= 0.
  EpsPoly truncated(int order) const;

  /// Copy zero-padded up to `order`. Only meaningful for exact polynomials,
  /// where the missing high coefficients really are zero.
  EpsPoly padded(int order) const;

  EpsPoly& operator+=(const EpsPoly& rhs);
  EpsPoly& operator-=(const EpsPoly& rhs);
  EpsPoly& operator*=(double s);

  friend EpsPoly operator+(EpsPoly lhs, const EpsPoly& rhs);
  friend EpsPoly operator-(EpsPoly lhs, const EpsPoly& rhs);
  friend EpsPoly operator*(const EpsPoly& lhs, const EpsPoly& rhs);
  friend EpsPoly operator*(double s, EpsPoly p);

 private:
  std::vector<double> coeffs_;
};

}  // namespace smp
