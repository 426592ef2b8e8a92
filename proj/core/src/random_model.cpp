#include "smp/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace smp {
namespace {

// mt19937_64 output is pinned by the standard; mapping the top 53 bits to a
// double keeps the stream identical across platforms, unlike the
// distribution adapters.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

  int uniform_int(int lo, int hi) {
    const int span = hi - lo + 1;
    int draw = lo + static_cast<int>(next() * span);
    return std::min(draw, hi);
  }

 private:
  std::mt19937_64 engine_;
};

constexpr double kFloorShare = 0.1;
constexpr double kSlopeHeadroom = 0.9;

SemiMarkovModel draw_model(Rng& rng, const RandomModelOptions& opt, std::uint64_t seed) {
  const int n = rng.uniform_int(opt.min_states, opt.max_states);
  const int k_max = rng.uniform_int(opt.min_k_max, opt.max_k_max);
  const double eps_max = rng.uniform(opt.eps_max_lo, opt.eps_max_hi);
  const int cells = (n + 1) * k_max;

  PerturbedKernel kernel(n, k_max);
  for (int i = 1; i <= n; ++i) {
    std::vector<double> base(static_cast<std::size_t>(cells));
    double total = 0.0;
    for (double& b : base) {
      b = 0.05 + rng.next();
      total += b;
    }
    for (double& b : base) b = (1.0 - kFloorShare) * (b / total) + kFloorShare / cells;

    std::vector<double> slope(static_cast<std::size_t>(cells));
    double mean = 0.0;
    for (double& s : slope) {
      s = rng.uniform(-1.0, 1.0);
      mean += s;
    }
    mean /= cells;
    double max_abs = 0.0;
    for (double& s : slope) {
      s -= mean;
      max_abs = std::max(max_abs, std::abs(s));
    }
    const double min_base = *std::min_element(base.begin(), base.end());
    const double scale = max_abs > 0.0 ? kSlopeHeadroom * min_base / (eps_max * max_abs) : 0.0;

    int c = 0;
    for (int j = 0; j <= n; ++j) {
      for (int k = 1; k <= k_max; ++k, ++c) {
        kernel.set_q(i, j, k,
                     EpsPoly({base[static_cast<std::size_t>(c)],
                              scale * slope[static_cast<std::size_t>(c)]}));
      }
    }
  }

  return SemiMarkovModel{std::move(kernel), eps_max, "random-" + std::to_string(seed)};
}

}  // namespace

SemiMarkovModel random_model(std::uint64_t seed, const RandomModelOptions& options) {
  if (options.min_states < 1 || options.max_states < options.min_states ||
      options.min_k_max < 1 || options.max_k_max < options.min_k_max ||
      !(options.eps_max_lo > 0.0) || options.eps_max_hi < options.eps_max_lo) {
    throw std::invalid_argument("random_model: bad options");
  }

  Rng rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SemiMarkovModel model = draw_model(rng, options, seed);
    try {
      validate_model(model);
    } catch (const std::exception&) {
      continue;
    }
    if (validate_conditions(model).all_hold()) return model;
  }
  throw std::runtime_error("random_model: no admissible model after 64 attempts");
}

}  // namespace smp
