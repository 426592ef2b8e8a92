#pragma once

#include <vector>

#include "smp/eps_poly.hpp"
#include "smp/matrix.hpp"
#include "smp/model.hpp"

namespace smp {

/// Matrix-valued truncated power series in eps: c[n] is the coefficient of
/// eps^n, and coefficients beyond c.size() - 1 are unknown (o(eps^order)).
struct MatrixSeries {
  std::vector<Matrix> c;
  int order() const { return static_cast<int>(c.size()) - 1; }
  const Matrix& at(int n) const;
};

struct VectorSeries {
  std::vector<Vector> c;
  int order() const { return static_cast<int>(c.size()) - 1; }
  const Vector& at(int n) const;
};

/// eps-series of the kernel moment matrix p_ij(rho, r), rows i = 1..N,
/// columns j = 0..N, carried to order k - r: differentiating r times in rho
/// costs r orders of eps-accuracy under the truncation bookkeeping used
/// throughout this module. Requires k >= r.
MatrixSeries p_expansion(const SemiMarkovModel& model, double rho, int r, int k);

/// The N x N block over states 1..N with the given columns zeroed, applied
/// coefficient-wise: the series of a taboo transition-moment block.
MatrixSeries taboo_block_series(const MatrixSeries& full, const std::vector<int>& taboo);

/// Column j of the interior block, coefficient-wise.
VectorSeries column_series(const MatrixSeries& full, int j);

/// eps-series of U = (I - B(eps))^-1 to order k, given the series of B:
///
///   U[0] = (I - B[0])^-1,   U[n] = U[0] sum_{q=1..n} B[q] U[n-q].
///
/// Throws SingularAtZero when the unperturbed series does not contract.
MatrixSeries inverse_expansion(const MatrixSeries& taboo_block_series, int k);

/// eps-expansions of the moment functionals around eps = 0 at a fixed rho.
/// phi[r] (and omega[r]) carry k - r + 1 coefficients: each derivative order
/// in rho gives up one order in eps. The right-hand sides of the derivative
/// systems are retained so the order-by-order residuals can be checked
/// externally. psi[r][i-1] and varphi[r][i-1] are scalar series per state.
struct ExpansionTable {
  double rho = 0.0;
  int target = 0;
  int occupation = 0;
  int order = 0;

  MatrixSeries u;
  std::vector<VectorSeries> phi;
  std::vector<VectorSeries> phi_rhs;
  std::vector<VectorSeries> omega;
  std::vector<VectorSeries> omega_rhs;
  std::vector<std::vector<EpsPoly>> psi;
  std::vector<std::vector<EpsPoly>> varphi;
};

/// Expansions of the hitting-time moments phi for target j, derivative
/// orders r = 0..k.
ExpansionTable phi_expansion(const SemiMarkovModel& model, double rho, int j, int k);

/// Expansions of the per-state sojourn moments psi and discounted sojourn
/// factors varphi. At rho = 0 the recursion consumes one extra derivative
/// order of psi; the required deeper kernel expansions are computed
/// internally.
ExpansionTable varphi_expansion(const SemiMarkovModel& model, double rho, int k);

/// Expansions of the occupation moments omega for target j and occupied
/// state s, derivative orders r = 0..k.
ExpansionTable omega_expansion(const SemiMarkovModel& model, double rho, int j, int s, int k);

}  // namespace smp
