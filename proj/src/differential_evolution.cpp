#include "ixgen/differential_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ixgen/random.hpp"

namespace ixgen {

void DEConfig::validate() const {
  if (!(crossover_rate > 0 && crossover_rate <= 1)) throw std::invalid_argument("crossover rate must be in (0, 1]");
  if (!(differential_weight > 0 && differential_weight < 2)) throw std::invalid_argument("differential weight must be in (0, 2)");
  if (population_size != 0 && population_size < 4) throw std::invalid_argument("population size must be >= 4");
  if (max_generations < 0) throw std::invalid_argument("max_generations must be >= 0");
}

int DEConfig::effective_population(std::size_t dimension) const {
  if (population_size > 0) return population_size;
  return std::clamp(static_cast<int>(15 * dimension), 4, 120);
}

DEResult differential_evolution(const Objective& objective, const std::vector<Bounds>& bounds, const DEConfig& config) {
  config.validate();
  const std::size_t dim = bounds.size();
  if (dim == 0) throw std::invalid_argument("differential evolution needs at least one dimension");
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) throw std::invalid_argument("bounds must be finite and ordered");
  }

  const int np = config.effective_population(dim);
  Rng rng(config.seed);
  std::vector<std::vector<double>> pop(static_cast<std::size_t>(np), std::vector<double>(dim));
  std::vector<double> value(static_cast<std::size_t>(np));
  for (auto& x : pop) {
    for (std::size_t d = 0; d < dim; ++d) x[d] = rng.uniform(bounds[d].lo, bounds[d].hi);
  }
  for (std::size_t i = 0; i < pop.size(); ++i) value[i] = objective(pop[i]);

  // First index holding the minimum; ties resolve to the lowest index.
  auto best_index = [&] { return static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin()); };

  DEResult result;
  std::size_t best = best_index();
  result.trajectory.push_back(value[best]);

  std::vector<double> trial(dim);
  int gen = 0;
  while (gen < config.max_generations && !(value[best] < config.tolerance)) {
    ++gen;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      std::size_t a, b, c;
      do a = rng.index(pop.size()); while (a == i);
      do b = rng.index(pop.size()); while (b == i || b == a);
      do c = rng.index(pop.size()); while (c == i || c == a || c == b);
      const std::size_t forced = rng.index(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        if (d == forced || rng.uniform() < config.crossover_rate) {
          const double v = pop[a][d] + config.differential_weight * (pop[b][d] - pop[c][d]);
          trial[d] = std::clamp(v, bounds[d].lo, bounds[d].hi);
        } else {
          trial[d] = pop[i][d];
        }
      }
      const double f = objective(trial);
      if (f <= value[i]) {
        pop[i] = trial;
        value[i] = f;
      }
    }
    best = best_index();
    result.trajectory.push_back(value[best]);
  }

  result.best = pop[best];
  result.best_value = value[best];
  result.generations = gen;
  return result;
}

}  // namespace ixgen
