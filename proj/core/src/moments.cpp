#include "smp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smp {

Matrix MomentMatrix::interior_block() const {
  const int n = entries.rows();
  Matrix block(n, n);
  for (int r_ = 0; r_ < n; ++r_) {
    for (int c = 0; c < n; ++c) block(r_, c) = entries(r_, c + 1);
  }
  return block;
}

Vector MomentMatrix::column(int j) const {
  const int n = entries.rows();
  if (j < 1 || j > n) throw std::invalid_argument("MomentMatrix: column index outside 1..N");
  Vector out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = entries(i, j);
  return out;
}

MomentMatrix moment_p(const SemiMarkovModel& model, double eps, double rho, int r,
                      const std::vector<int>& taboo) {
  if (r < 0) throw std::invalid_argument("moment_p: r must be >= 0");
  const int n = model.n_states();
  for (int t : taboo) {
    if (t < 1 || t > n) throw std::invalid_argument("moment_p: taboo state outside 1..N");
  }
  const ConcreteKernel kernel = eval_kernel(model, eps);

  MomentMatrix out;
  out.rho = rho;
  out.r = r;
  out.taboo = taboo;
  out.entries = Matrix(n, n + 1);

  std::vector<double> weight(static_cast<std::size_t>(model.k_max()) + 1, 0.0);
  for (int k = 1; k <= model.k_max(); ++k) {
    weight[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k), r) * std::exp(rho * k);
  }

  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (j >= 1 && std::find(taboo.begin(), taboo.end(), j) != taboo.end()) continue;
      double acc = 0.0;
      for (int k = 1; k <= model.k_max(); ++k) {
        // Skip vanished entries so overflowing weights at extreme rho cannot
        // turn a structural zero into NaN.
        const double q = kernel.q(i, j, k);
        if (q != 0.0) acc += weight[static_cast<std::size_t>(k)] * q;
      }
      out.entries(i - 1, j) = acc;
    }
  }
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double acc = 1.0;
  for (int t = 1; t <= k; ++t) acc = acc * (n - k + t) / t;
  return acc;
}

SojournMoments sojourn_moments(const SemiMarkovModel& model, double eps, double rho, int max_order) {
  if (max_order < 0) throw std::invalid_argument("sojourn_moments: max_order must be >= 0");
  const int n = model.n_states();
  const bool at_zero = std::abs(rho) < kRhoZeroTol;

  // The rho = 0 recursion consumes psi one derivative order ahead.
  const int psi_orders = max_order + (at_zero ? 1 : 0);
  std::vector<Vector> psi(static_cast<std::size_t>(psi_orders) + 1);
  for (int r = 0; r <= psi_orders; ++r) {
    const MomentMatrix p = moment_p(model, eps, rho, r);
    Vector row_sums(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i <= n; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= n; ++j) acc += p.at(i, j);
      row_sums[static_cast<std::size_t>(i - 1)] = acc;
    }
    psi[static_cast<std::size_t>(r)] = std::move(row_sums);
  }

  std::vector<Vector> varphi(static_cast<std::size_t>(max_order) + 1,
                             Vector(static_cast<std::size_t>(n), 0.0));
  if (at_zero) {
    // varphi_i(0, r) = (psi_i(0, r+1) - sum_{m<r} C(r+1, m) varphi_i(0, m)) / (r+1)
    for (int r = 0; r <= max_order; ++r) {
      for (int i = 0; i < n; ++i) {
        double acc = psi[static_cast<std::size_t>(r) + 1][static_cast<std::size_t>(i)];
        for (int m = 0; m < r; ++m) {
          acc -= binomial(r + 1, m) * varphi[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
        }
        varphi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = acc / (r + 1);
      }
    }
  } else {
    // varphi_i(rho, 0) = (psi_i(rho, 0) - 1) / (e^rho - 1), and for r >= 1
    // varphi_i(rho, r) = (psi_i(rho, r) - e^rho sum_{m<r} C(r, m) varphi_i(rho, m)) / (e^rho - 1)
    const double expm1_rho = std::expm1(rho);
    const double exp_rho = std::exp(rho);
    for (int r = 0; r <= max_order; ++r) {
      for (int i = 0; i < n; ++i) {
        double acc = psi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] - (r == 0 ? 1.0 : 0.0);
        if (r >= 1) {
          double sum = 0.0;
          for (int m = 0; m < r; ++m) {
            sum += binomial(r, m) * varphi[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
          }
          acc -= exp_rho * sum;
        }
        varphi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = acc / expm1_rho;
      }
    }
  }

  SojournMoments out;
  out.rho = rho;
  out.psi.assign(psi.begin(), psi.begin() + max_order + 1);
  out.varphi = std::move(varphi);
  return out;
}

}  // namespace smp
