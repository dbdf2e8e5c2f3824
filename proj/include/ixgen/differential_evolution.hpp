#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ixgen {

struct DEConfig {
  /// 0 selects 15 x dimension, capped at 120.
  int population_size = 0;
  double differential_weight = 0.8;
  double crossover_rate = 0.9;
  int max_generations = 200;
  std::uint64_t seed = 1;
  /// Stop as soon as the best objective value drops below this.
  double tolerance = 1.0;

  void validate() const;
  int effective_population(std::size_t dimension) const;
};

struct Bounds {
  double lo, hi;
};

struct DEResult {
  std::vector<double> best;
  double best_value = 0;
  int generations = 0;
  /// Best value after initialization and after every generation.
  std::vector<double> trajectory;
};

using Objective = std::function<double(std::span<const double>)>;

/// DE/rand/1/bin with greedy selection; trial vectors are clipped into the box.
DEResult differential_evolution(const Objective& objective, const std::vector<Bounds>& bounds, const DEConfig& config);

}  // namespace ixgen
