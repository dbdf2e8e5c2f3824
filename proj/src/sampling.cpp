#include "ixgen/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ixgen/random.hpp"

namespace ixgen {

void FeatureDomains::validate() const {
  using K = SamplingError::Kind;
  if (lane_counts.empty() || min_radii.empty() || max_slopes.empty()) {
    throw SamplingError(K::InvalidDomain, "feature domains must be nonempty");
  }
  for (int l : lane_counts) {
    if (l <= 0) throw SamplingError(K::InvalidDomain, "lane counts must be positive");
  }
  for (double r : min_radii) {
    if (!(r > 0)) throw SamplingError(K::InvalidDomain, "radii must be positive or inf");
  }
  for (double s : max_slopes) {
    if (!(s > 0) || !std::isfinite(s)) throw SamplingError(K::InvalidDomain, "slopes must be positive");
  }
}

std::vector<Parameter> feature_parameters(const LabeledDigraph& topology, const FeatureDomains& domains) {
  domains.validate();
  std::vector<double> lanes(domains.lane_counts.begin(), domains.lane_counts.end());
  std::vector<Parameter> params;
  for (auto v : topology.vertices_of(VertexKind::Road)) {
    params.push_back({"lanes:" + topology.vertex(v).name, ParamKind::Lanes, v, lanes});
  }
  for (auto v : topology.vertices_of(VertexKind::Ramp)) {
    params.push_back({"radius:" + topology.vertex(v).name, ParamKind::Radius, v, domains.min_radii});
    params.push_back({"slope:" + topology.vertex(v).name, ParamKind::Slope, v, domains.max_slopes});
  }
  return params;
}

std::uint64_t full_combination_count(const LabeledDigraph& topology, const FeatureDomains& domains) {
  domains.validate();
  std::uint64_t total = 1;
  auto mul = [&](std::uint64_t factor) {
    if (__builtin_mul_overflow(total, factor, &total)) {
      throw SamplingError(SamplingError::Kind::Overflow, "full combination count exceeds 64 bits");
    }
  };
  const std::uint64_t per_ramp = domains.min_radii.size() * domains.max_slopes.size();
  for (std::size_t i = 0; i < topology.road_count(); ++i) mul(domains.lane_counts.size());
  for (std::size_t i = 0; i < topology.ramp_count(); ++i) mul(per_ramp);
  return total;
}

namespace {

// Uncovered value pairs, one flat bitmap per parameter pair.
class PairTracker {
 public:
  explicit PairTracker(const std::vector<std::size_t>& sizes) : sizes_(sizes), k_(sizes.size()) {
    offset_.assign(k_ * k_, 0);
    std::size_t total = 0;
    for (std::size_t p = 0; p < k_; ++p) {
      for (std::size_t q = p + 1; q < k_; ++q) {
        offset_[p * k_ + q] = total;
        total += sizes[p] * sizes[q];
      }
    }
    uncovered_.assign(total, true);
    remaining_ = total;
  }

  std::size_t remaining() const { return remaining_; }

  bool uncovered(std::size_t p, std::size_t a, std::size_t q, std::size_t b) const {
    if (p > q) {
      std::swap(p, q);
      std::swap(a, b);
    }
    return uncovered_[offset_[p * k_ + q] + a * sizes_[q] + b];
  }

  std::size_t count_new(const std::vector<std::size_t>& row) const {
    std::size_t n = 0;
    for (std::size_t p = 0; p < k_; ++p) {
      for (std::size_t q = p + 1; q < k_; ++q) n += uncovered(p, row[p], q, row[q]);
    }
    return n;
  }

  void cover(const std::vector<std::size_t>& row) {
    for (std::size_t p = 0; p < k_; ++p) {
      for (std::size_t q = p + 1; q < k_; ++q) {
        auto bit = uncovered_.begin() + static_cast<std::ptrdiff_t>(offset_[p * k_ + q] + row[p] * sizes_[q] + row[q]);
        if (*bit) {
          *bit = false;
          --remaining_;
        }
      }
    }
  }

 private:
  std::vector<std::size_t> sizes_;
  std::size_t k_;
  std::vector<std::size_t> offset_;
  std::vector<bool> uncovered_;
  std::size_t remaining_ = 0;
};

std::vector<std::size_t> greedy_row(const PairTracker& tracker, const std::vector<std::size_t>& sizes, Rng& rng) {
  const std::size_t k = sizes.size();

  // Seed with the (parameter, value) involved in the most uncovered pairs; ties broken randomly.
  std::size_t best_count = 0, ties = 0, first_p = 0, first_a = 0;
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t a = 0; a < sizes[p]; ++a) {
      std::size_t c = 0;
      for (std::size_t q = 0; q < k; ++q) {
        if (q == p) continue;
        for (std::size_t b = 0; b < sizes[q]; ++b) c += tracker.uncovered(p, a, q, b);
      }
      if (c > best_count) {
        best_count = c;
        ties = 1;
        first_p = p;
        first_a = a;
      } else if (c == best_count && rng.index(++ties) == 0) {
        first_p = p;
        first_a = a;
      }
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < k; ++p) {
    if (p != first_p) order.push_back(p);
  }
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  std::vector<std::size_t> row(k, 0);
  std::vector<bool> fixed(k, false);
  row[first_p] = first_a;
  fixed[first_p] = true;
  for (auto p : order) {
    std::size_t best = 0, best_gain = 0, tie = 0;
    for (std::size_t a = 0; a < sizes[p]; ++a) {
      std::size_t gain = 0;
      for (std::size_t q = 0; q < k; ++q) {
        if (fixed[q]) gain += tracker.uncovered(p, a, q, row[q]);
      }
      if (a == 0 || gain > best_gain) {
        best = a;
        best_gain = gain;
        tie = 1;
      } else if (gain == best_gain && rng.index(++tie) == 0) {
        best = a;
      }
    }
    row[p] = best;
    fixed[p] = true;
  }
  return row;
}

}  // namespace

CoveringArray generate_covering_array(std::vector<Parameter> parameters, std::uint64_t seed, int candidates) {
  CoveringArray array{std::move(parameters), {}};
  const std::size_t k = array.parameters.size();
  if (k == 0) return array;
  std::vector<std::size_t> sizes;
  for (const auto& p : array.parameters) {
    if (p.values.empty()) throw SamplingError(SamplingError::Kind::InvalidDomain, "empty domain for " + p.name);
    sizes.push_back(p.values.size());
  }
  if (k == 1) {
    for (std::size_t a = 0; a < sizes[0]; ++a) array.rows.push_back({a});
    return array;
  }

  Rng rng(seed);
  PairTracker tracker(sizes);
  while (tracker.remaining() > 0) {
    std::vector<std::size_t> best;
    std::size_t best_gain = 0;
    for (int c = 0; c < std::max(candidates, 1); ++c) {
      auto row = greedy_row(tracker, sizes, rng);
      auto gain = tracker.count_new(row);
      if (gain > best_gain) {
        best_gain = gain;
        best = std::move(row);
      }
    }
    // The seeding step always picks a value in at least one uncovered pair, so best_gain > 0.
    tracker.cover(best);
    array.rows.push_back(std::move(best));
  }
  return array;
}

CoveringArray generate_covering_array(const LabeledDigraph& topology, const FeatureDomains& domains, std::uint64_t seed,
                                      int candidates) {
  return generate_covering_array(feature_parameters(topology, domains), seed, candidates);
}

std::optional<UncoveredPair> find_uncovered_pair(const CoveringArray& array) {
  const auto& ps = array.parameters;
  for (std::size_t p = 0; p < ps.size(); ++p) {
    for (std::size_t q = p + 1; q < ps.size(); ++q) {
      std::vector<bool> seen(ps[p].values.size() * ps[q].values.size(), false);
      for (const auto& row : array.rows) {
        if (row[p] < ps[p].values.size() && row[q] < ps[q].values.size()) {
          seen[row[p] * ps[q].values.size() + row[q]] = true;
        }
      }
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) return UncoveredPair{p, q, i / ps[q].values.size(), i % ps[q].values.size()};
      }
    }
  }
  return std::nullopt;
}

std::size_t pairwise_lower_bound(const std::vector<Parameter>& parameters) {
  if (parameters.size() == 1) return parameters[0].values.size();
  std::size_t bound = 0;
  for (std::size_t p = 0; p < parameters.size(); ++p) {
    for (std::size_t q = p + 1; q < parameters.size(); ++q) {
      bound = std::max(bound, parameters[p].values.size() * parameters[q].values.size());
    }
  }
  return bound;
}

std::vector<InterchangeFeature> features_from_array(std::shared_ptr<const LabeledDigraph> topology,
                                                    const CoveringArray& array) {
  const auto& g = *topology;
  auto expected_roads = g.vertices_of(VertexKind::Road);
  auto expected_ramps = g.vertices_of(VertexKind::Ramp);
  const auto& ps = array.parameters;
  bool ok = ps.size() == expected_roads.size() + 2 * expected_ramps.size();
  for (std::size_t i = 0; ok && i < expected_roads.size(); ++i) {
    ok = ps[i].kind == ParamKind::Lanes && ps[i].vertex == expected_roads[i] &&
         ps[i].name == "lanes:" + g.vertex(expected_roads[i]).name;
  }
  for (std::size_t j = 0; ok && j < expected_ramps.size(); ++j) {
    const auto& pr = ps[expected_roads.size() + 2 * j];
    const auto& psl = ps[expected_roads.size() + 2 * j + 1];
    const auto& name = g.vertex(expected_ramps[j]).name;
    ok = pr.kind == ParamKind::Radius && psl.kind == ParamKind::Slope && pr.vertex == expected_ramps[j] &&
         psl.vertex == expected_ramps[j] && pr.name == "radius:" + name && psl.name == "slope:" + name;
  }
  if (!ok) throw SamplingError(SamplingError::Kind::ParameterMismatch, "covering array parameters do not match topology");

  std::vector<InterchangeFeature> features;
  features.reserve(array.rows.size());
  for (std::size_t r = 0; r < array.rows.size(); ++r) {
    InterchangeFeature f{topology, {}, {}};
    for (std::size_t i = 0; i < expected_roads.size(); ++i) {
      f.lanes[expected_roads[i]] = static_cast<int>(array.value(r, i));
    }
    for (std::size_t j = 0; j < expected_ramps.size(); ++j) {
      const std::size_t base = expected_roads.size() + 2 * j;
      f.ramp_geometry[expected_ramps[j]] = {array.value(r, base), array.value(r, base + 1)};
    }
    features.push_back(std::move(f));
  }
  return features;
}

std::string format_value(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_value(const std::string& s) {
  if (s == "inf" || s == "∞") return kStraight;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw SamplingError(SamplingError::Kind::Format, "not a number: '" + s + "'");
  }
  return v;
}

std::string serialize_array(const CoveringArray& array) {
  std::ostringstream out;
  for (std::size_t p = 0; p < array.parameters.size(); ++p) out << (p ? "\t" : "") << array.parameters[p].name;
  out << '\n';
  for (std::size_t r = 0; r < array.rows.size(); ++r) {
    for (std::size_t p = 0; p < array.parameters.size(); ++p) out << (p ? "\t" : "") << format_value(array.value(r, p));
    out << '\n';
  }
  return out.str();
}

CoveringArray parse_array(const std::string& text, const std::vector<Parameter>& parameters) {
  using K = SamplingError::Kind;
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, '\t')) cells.push_back(cell);
    return cells;
  };
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SamplingError(K::Format, "covering array file has no header");
  auto header = split(line);
  if (header.size() != parameters.size()) throw SamplingError(K::ParameterMismatch, "header width does not match parameters");
  for (std::size_t p = 0; p < header.size(); ++p) {
    if (header[p] != parameters[p].name) {
      throw SamplingError(K::ParameterMismatch, "unexpected column '" + header[p] + "', wanted '" + parameters[p].name + "'");
    }
  }
  CoveringArray array{parameters, {}};
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != parameters.size()) {
      throw SamplingError(K::Format, "row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " cells");
    }
    std::vector<std::size_t> row;
    for (std::size_t p = 0; p < cells.size(); ++p) {
      double v = parse_value(cells[p]);
      const auto& vals = parameters[p].values;
      auto it = std::find(vals.begin(), vals.end(), v);
      if (it == vals.end()) {
        throw SamplingError(K::Format, "row " + std::to_string(lineno) + ": value " + cells[p] + " outside domain of " +
                                           parameters[p].name);
      }
      row.push_back(static_cast<std::size_t>(it - vals.begin()));
    }
    array.rows.push_back(std::move(row));
  }
  return array;
}

}  // namespace ixgen
