#pragma once

#include <vector>

#include "smp/matrix.hpp"
#include "smp/model.hpp"

namespace smp {

/// Power-exponential moments of the kernel at a fixed eps:
///
///   p_ij(rho, r) = sum_k k^r e^(rho k) Q_ij(k)
///
/// stored as an N x (N+1) matrix, rows i = 1..N, columns j = 0..N. When a
/// taboo set is given, the corresponding columns of the N x N sub-block over
/// 1..N are zeroed; these are the matrices of the taboo linear systems.
struct MomentMatrix {
  double rho = 0.0;
  int r = 0;
  std::vector<int> taboo;
  Matrix entries;

  double at(int i, int j) const { return entries(i - 1, j); }

  /// The N x N block over states 1..N (column 0 dropped).
  Matrix interior_block() const;

  /// Column j of the block over 1..N as a vector indexed by start state.
  Vector column(int j) const;
};

MomentMatrix moment_p(const SemiMarkovModel& model, double eps, double rho, int r,
                      const std::vector<int>& taboo = {});

/// Moments of a single holding time and of the discounted sojourn factor
///
///   psi_i(rho, r)    = sum_j p_ij(rho, r)
///   varphi_i(rho)    = (E_i e^(rho kappa) - 1) / (e^rho - 1),  rho != 0
///   varphi_i(0)      = E_i kappa
///
/// with varphi[r] the r-th rho-derivative, recovered recursively from psi.
/// Indexing: psi[r][i-1], varphi[r][i-1] for r = 0..max_order.
struct SojournMoments {
  double rho = 0.0;
  std::vector<Vector> psi;
  std::vector<Vector> varphi;
};

SojournMoments sojourn_moments(const SemiMarkovModel& model, double eps, double rho, int max_order);

/// Binomial coefficient as a double; exact for the small arguments used here.
double binomial(int n, int k);

/// Branch point between the rho = 0 and rho != 0 recursions.
inline constexpr double kRhoZeroTol = 1e-12;

}  // namespace smp
