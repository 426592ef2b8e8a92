#include "smp/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "smp/errors.hpp"
#include "smp/hitting.hpp"
#include "smp/moments.hpp"

namespace smp {
namespace {

// Coefficient matrices of the moment matrix p_ij(rho, r) up to the given
// eps-order, straight from the kernel polynomials.
MatrixSeries kernel_moment_series(const SemiMarkovModel& model, double rho, int r, int order) {
  const int n = model.n_states();
  const int k_max = model.k_max();

  std::vector<double> weight(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    weight[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k), r) * std::exp(rho * k);
  }

  MatrixSeries out;
  out.c.assign(static_cast<std::size_t>(order) + 1, Matrix(n, n + 1));
  for (int q = 0; q <= order; ++q) {
    Matrix& coeff = out.c[static_cast<std::size_t>(q)];
    for (int i = 1; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        double acc = 0.0;
        for (int k = 1; k <= k_max; ++k) {
          const double c = model.kernel.q(i, j, k).coeff(q);
          if (c != 0.0) acc += weight[static_cast<std::size_t>(k)] * c;
        }
        coeff(i - 1, j) = acc;
      }
    }
  }
  return out;
}

// out[n] = sum_{q <= n} A[q] x[n - q] for n = 0..order.
VectorSeries convolve(const MatrixSeries& a, const VectorSeries& x, int order) {
  VectorSeries out;
  out.c.reserve(static_cast<std::size_t>(order) + 1);
  for (int n = 0; n <= order; ++n) {
    Vector acc(static_cast<std::size_t>(a.at(0).rows()), 0.0);
    for (int q = 0; q <= n; ++q) {
      const Vector term = a.at(q) * x.at(n - q);
      for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += term[t];
    }
    out.c.push_back(std::move(acc));
  }
  return out;
}

void add_scaled(VectorSeries& into, const VectorSeries& other, double scale, int order) {
  for (int n = 0; n <= order; ++n) {
    Vector& dst = into.c[static_cast<std::size_t>(n)];
    const Vector& src = other.at(n);
    for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += scale * src[t];
  }
}

VectorSeries truncated(const VectorSeries& series, int order) {
  VectorSeries out;
  out.c.assign(series.c.begin(), series.c.begin() + order + 1);
  return out;
}

struct ExpansionContext {
  std::vector<MatrixSeries> blocks;  // taboo blocks per derivative order m, order k - m
  MatrixSeries u;
};

ExpansionContext build_context(const SemiMarkovModel& model, double rho, int j, int k) {
  ExpansionContext ctx;
  ctx.blocks.reserve(static_cast<std::size_t>(k) + 1);
  for (int m = 0; m <= k; ++m) {
    ctx.blocks.push_back(taboo_block_series(p_expansion(model, rho, m, k), {j}));
  }
  ctx.u = inverse_expansion(ctx.blocks[0], k);
  return ctx;
}

// Solves the expansion systems x[r] = rhs[r] + sum_{m>=1} C(r,m) B[m] x[r-m]
// + B[0] x[r] coefficient-wise, given U = series of (I - B[0])^-1.
void expand_orders(const ExpansionContext& ctx, const std::vector<VectorSeries>& rhs_base, int k,
                   std::vector<VectorSeries>& values, std::vector<VectorSeries>& rhs_full) {
  values.clear();
  rhs_full.clear();
  for (int r = 0; r <= k; ++r) {
    const int order = k - r;
    VectorSeries rhs = truncated(rhs_base[static_cast<std::size_t>(r)], order);
    for (int m = 1; m <= r; ++m) {
      const VectorSeries term =
          convolve(ctx.blocks[static_cast<std::size_t>(m)], values[static_cast<std::size_t>(r - m)], order);
      add_scaled(rhs, term, binomial(r, m), order);
    }
    values.push_back(convolve(ctx.u, rhs, order));
    rhs_full.push_back(std::move(rhs));
  }
}

}  // namespace

const Matrix& MatrixSeries::at(int n) const {
  if (n < 0 || n > order()) throw std::invalid_argument("MatrixSeries: coefficient index out of range");
  return c[static_cast<std::size_t>(n)];
}

const Vector& VectorSeries::at(int n) const {
  if (n < 0 || n > order()) throw std::invalid_argument("VectorSeries: coefficient index out of range");
  return c[static_cast<std::size_t>(n)];
}

MatrixSeries p_expansion(const SemiMarkovModel& model, double rho, int r, int k) {
  if (r < 0) throw std::invalid_argument("p_expansion: r must be >= 0");
  if (k < r) throw std::invalid_argument("p_expansion: requires k >= r");
  return kernel_moment_series(model, rho, r, k - r);
}

MatrixSeries taboo_block_series(const MatrixSeries& full, const std::vector<int>& taboo) {
  const int n = full.at(0).rows();
  for (int t : taboo) {
    if (t < 1 || t > n) throw std::invalid_argument("taboo_block_series: taboo state outside 1..N");
  }
  MatrixSeries out;
  out.c.reserve(full.c.size());
  for (const Matrix& coeff : full.c) {
    Matrix block(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 1; j <= n; ++j) block(i, j - 1) = coeff(i, j);
    }
    for (int t : taboo) {
      for (int i = 0; i < n; ++i) block(i, t - 1) = 0.0;
    }
    out.c.push_back(std::move(block));
  }
  return out;
}

VectorSeries column_series(const MatrixSeries& full, int j) {
  const int n = full.at(0).rows();
  if (j < 1 || j > n) throw std::invalid_argument("column_series: column outside 1..N");
  VectorSeries out;
  out.c.reserve(full.c.size());
  for (const Matrix& coeff : full.c) {
    Vector col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = coeff(i, j);
    out.c.push_back(std::move(col));
  }
  return out;
}

MatrixSeries inverse_expansion(const MatrixSeries& taboo_block_series, int k) {
  if (k < 0) throw std::invalid_argument("inverse_expansion: k must be >= 0");
  if (taboo_block_series.order() < k) {
    throw std::invalid_argument("inverse_expansion: block series carries fewer than k orders");
  }
  const Matrix& b0 = taboo_block_series.at(0);
  const int n = b0.rows();

  const FinitenessReport report = finiteness_check(b0);
  if (!report.invertible) {
    std::ostringstream msg;
    msg << "inverse_expansion: unperturbed system diverges (spectral radius proxy "
        << report.spectral_radius_proxy << ")";
    throw SingularAtZero(msg.str());
  }
  const LuFactorization lu(Matrix::identity(n) - b0);
  if (lu.singular()) {
    throw SingularAtZero("inverse_expansion: unperturbed resolvent is numerically singular");
  }

  MatrixSeries u;
  u.c.reserve(static_cast<std::size_t>(k) + 1);
  u.c.push_back(lu.inverse());
  for (int q = 1; q <= k; ++q) {
    Matrix acc(n, n);
    for (int m = 1; m <= q; ++m) acc += taboo_block_series.at(m) * u.c[static_cast<std::size_t>(q - m)];
    u.c.push_back(u.c[0] * acc);
  }
  return u;
}

ExpansionTable phi_expansion(const SemiMarkovModel& model, double rho, int j, int k) {
  if (k < 0) throw std::invalid_argument("phi_expansion: k must be >= 0");
  if (j < 1 || j > model.n_states()) throw std::invalid_argument("phi_expansion: j outside 1..N");

  ExpansionContext ctx = build_context(model, rho, j, k);
  std::vector<VectorSeries> rhs_base;
  rhs_base.reserve(static_cast<std::size_t>(k) + 1);
  for (int r = 0; r <= k; ++r) rhs_base.push_back(column_series(p_expansion(model, rho, r, k), j));

  ExpansionTable table;
  table.rho = rho;
  table.target = j;
  table.order = k;
  expand_orders(ctx, rhs_base, k, table.phi, table.phi_rhs);
  table.u = std::move(ctx.u);
  return table;
}

ExpansionTable varphi_expansion(const SemiMarkovModel& model, double rho, int k) {
  if (k < 0) throw std::invalid_argument("varphi_expansion: k must be >= 0");
  const int n = model.n_states();
  const bool at_zero = std::abs(rho) < kRhoZeroTol;

  // The rho = 0 recursion reads psi one derivative order ahead, which in turn
  // needs kernel expansions one eps-order deeper.
  const int psi_orders = k + (at_zero ? 1 : 0);
  const int depth = at_zero ? k + 1 : k;
  std::vector<std::vector<EpsPoly>> psi;
  psi.reserve(static_cast<std::size_t>(psi_orders) + 1);
  for (int r = 0; r <= psi_orders; ++r) {
    const MatrixSeries series = kernel_moment_series(model, rho, r, depth - r);
    std::vector<EpsPoly> per_state;
    per_state.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<double> coeffs(static_cast<std::size_t>(depth - r) + 1, 0.0);
      for (int q = 0; q <= depth - r; ++q) {
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) acc += series.at(q)(i, j);
        coeffs[static_cast<std::size_t>(q)] = acc;
      }
      per_state.emplace_back(std::move(coeffs));
    }
    psi.push_back(std::move(per_state));
  }

  std::vector<std::vector<EpsPoly>> varphi(static_cast<std::size_t>(k) + 1);
  if (at_zero) {
    for (int r = 0; r <= k; ++r) {
      varphi[static_cast<std::size_t>(r)].reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        EpsPoly acc = psi[static_cast<std::size_t>(r) + 1][static_cast<std::size_t>(i)];
        for (int m = 0; m < r; ++m) {
          acc -= binomial(r + 1, m) * varphi[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
        }
        varphi[static_cast<std::size_t>(r)].push_back((1.0 / (r + 1)) * acc);
      }
    }
  } else {
    const double inv_expm1 = 1.0 / std::expm1(rho);
    const double exp_rho = std::exp(rho);
    for (int r = 0; r <= k; ++r) {
      varphi[static_cast<std::size_t>(r)].reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        EpsPoly acc = psi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
        if (r == 0) {
          acc -= EpsPoly::constant(1.0, acc.order());
        } else {
          for (int m = 0; m < r; ++m) {
            acc -= (exp_rho * binomial(r, m)) *
                   varphi[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
          }
        }
        varphi[static_cast<std::size_t>(r)].push_back(inv_expm1 * acc);
      }
    }
  }

  ExpansionTable table;
  table.rho = rho;
  table.order = k;
  table.psi.resize(static_cast<std::size_t>(k) + 1);
  table.varphi.resize(static_cast<std::size_t>(k) + 1);
  for (int r = 0; r <= k; ++r) {
    for (int i = 0; i < n; ++i) {
      table.psi[static_cast<std::size_t>(r)].push_back(
          psi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)].truncated(k - r));
      table.varphi[static_cast<std::size_t>(r)].push_back(
          varphi[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)].truncated(k - r));
    }
  }
  return table;
}

ExpansionTable omega_expansion(const SemiMarkovModel& model, double rho, int j, int s, int k) {
  if (k < 0) throw std::invalid_argument("omega_expansion: k must be >= 0");
  if (j < 1 || j > model.n_states()) throw std::invalid_argument("omega_expansion: j outside 1..N");
  if (s < 1 || s > model.n_states()) throw std::invalid_argument("omega_expansion: s outside 1..N");
  const int n = model.n_states();

  ExpansionTable sojourn = varphi_expansion(model, rho, k);
  ExpansionContext ctx = build_context(model, rho, j, k);

  std::vector<VectorSeries> rhs_base;
  rhs_base.reserve(static_cast<std::size_t>(k) + 1);
  for (int r = 0; r <= k; ++r) {
    VectorSeries hat;
    const EpsPoly& factor = sojourn.varphi[static_cast<std::size_t>(r)][static_cast<std::size_t>(s - 1)];
    for (int q = 0; q <= k - r; ++q) {
      Vector coeff(static_cast<std::size_t>(n), 0.0);
      coeff[static_cast<std::size_t>(s - 1)] = factor.coeff(q);
      hat.c.push_back(std::move(coeff));
    }
    rhs_base.push_back(std::move(hat));
  }

  ExpansionTable table;
  table.rho = rho;
  table.target = j;
  table.occupation = s;
  table.order = k;
  table.psi = std::move(sojourn.psi);
  table.varphi = std::move(sojourn.varphi);
  expand_orders(ctx, rhs_base, k, table.omega, table.omega_rhs);
  table.u = std::move(ctx.u);
  return table;
}

}  // namespace smp
