#include "smp/eps_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smp {

EpsPoly::EpsPoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw std::invalid_argument("EpsPoly: coefficient list must be nonempty");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("EpsPoly: coefficients must be finite");
    }
  }
}

EpsPoly EpsPoly::constant(double value, int order) {
  if (order < 0) throw std::invalid_argument("EpsPoly: order must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = value;
  return EpsPoly(std::move(c));
}

double EpsPoly::coeff(int n) const {
  if (n < 0) throw std::invalid_argument("EpsPoly: coefficient index < 0");
  if (n > order()) return 0.0;
  return coeffs_[static_cast<std::size_t>(n)];
}

double EpsPoly::eval(double eps) const {
  double acc = 0.0;
  for (std::size_t t = coeffs_.size(); t-- > 0;) {
    acc = acc * eps + coeffs_[t];
  }
  return acc;
}

EpsPoly EpsPoly::truncated(int order) const {
  if (order < 0) throw std::invalid_argument("EpsPoly: order must be >= 0");
  std::vector<double> c(coeffs_.begin(),
                        coeffs_.begin() + std::min<std::size_t>(coeffs_.size(),
                                                                static_cast<std::size_t>(order) + 1));
  c.resize(static_cast<std::size_t>(order) + 1, 0.0);
  return EpsPoly(std::move(c));
}

EpsPoly EpsPoly::padded(int order) const {
  if (order < this->order()) {
    throw std::invalid_argument("EpsPoly: padded order below current order");
  }
  std::vector<double> c = coeffs_;
  c.resize(static_cast<std::size_t>(order) + 1, 0.0);
  return EpsPoly(std::move(c));
}

EpsPoly& EpsPoly::operator+=(const EpsPoly& rhs) {
  const int m = std::min(order(), rhs.order());
  coeffs_.resize(static_cast<std::size_t>(m) + 1);
  for (int n = 0; n <= m; ++n) coeffs_[static_cast<std::size_t>(n)] += rhs.coeff(n);
  return *this;
}

EpsPoly& EpsPoly::operator-=(const EpsPoly& rhs) {
  const int m = std::min(order(), rhs.order());
  coeffs_.resize(static_cast<std::size_t>(m) + 1);
  for (int n = 0; n <= m; ++n) coeffs_[static_cast<std::size_t>(n)] -= rhs.coeff(n);
  return *this;
}

EpsPoly& EpsPoly::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

EpsPoly operator+(EpsPoly lhs, const EpsPoly& rhs) {
  lhs += rhs;
  return lhs;
}

EpsPoly operator-(EpsPoly lhs, const EpsPoly& rhs) {
  lhs -= rhs;
  return lhs;
}

EpsPoly operator*(const EpsPoly& lhs, const EpsPoly& rhs) {
  const int m = std::min(lhs.order(), rhs.order());
  std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
  for (int n = 0; n <= m; ++n) {
    double acc = 0.0;
    for (int q = 0; q <= n; ++q) acc += lhs.coeff(q) * rhs.coeff(n - q);
    c[static_cast<std::size_t>(n)] = acc;
  }
  return EpsPoly(std::move(c));
}

EpsPoly operator*(double s, EpsPoly p) {
  p *= s;
  return p;
}

}  // namespace smp
