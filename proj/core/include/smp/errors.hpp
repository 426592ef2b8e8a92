#pragma once

#include <stdexcept>
#include <string>

namespace smp {

/// Model file could not be read or decoded.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model violates a kernel invariant (row sums, entry range, index bounds).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested moment functional diverges: the taboo transition matrix has
/// Neumann series that fails to contract, or the resolvent is singular.
struct NotFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The characteristic equation has no root below the divergence threshold.
struct NoRoot : std::runtime_error {
  NoRoot(const std::string& what, double delta_proxy_)
      : std::runtime_error(what), delta_proxy(delta_proxy_) {}
  /// Largest exponent at which the moment functional was still finite.
  double delta_proxy;
};

/// Expansion around eps = 0 is impossible: the unperturbed system diverges.
struct SingularAtZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncated series tail cannot be bounded: entries are not yet decaying
/// geometrically at the truncation point. Raise n_max and retry.
struct TailNotCertified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares fit is numerically unreliable.
struct IllConditioned : std::runtime_error {
  IllConditioned(const std::string& what, double condition_)
      : std::runtime_error(what), condition(condition_) {}
  double condition;
};

}  // namespace smp
