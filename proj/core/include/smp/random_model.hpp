#pragma once

#include <cstdint>

#include "smp/model.hpp"

namespace smp {

struct RandomModelOptions {
  int min_states = 2;
  int max_states = 4;
  int min_k_max = 1;
  int max_k_max = 5;
  double eps_max_lo = 0.1;
  double eps_max_hi = 0.3;
};

/// Deterministic seeded model generator used by the stress and consistency
/// suites. Every row mixes a normalized random draw with a uniform floor, so
/// all transitions (including absorption) have probability bounded away from
/// zero at eps = 0, and the linear eps-terms are zero-sum per row and scaled
/// to keep every entry positive on [0, eps_max]. The same seed produces the
/// same model on every platform.
SemiMarkovModel random_model(std::uint64_t seed, const RandomModelOptions& options = {});

}  // namespace smp
