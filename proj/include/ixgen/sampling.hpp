#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixgen/topology.hpp"

namespace ixgen {

inline constexpr double kStraight = std::numeric_limits<double>::infinity();

struct FeatureDomains {
  std::vector<int> lane_counts{3, 4, 5};
  /// Meters; kStraight first, then finite radii.
  std::vector<double> min_radii{kStraight, 280, 210, 150, 100, 60, 40, 30};
  /// Percent grade.
  std::vector<double> max_slopes{1, 2, 3, 4, 5};

  void validate() const;
};

class SamplingError : public std::runtime_error {
 public:
  enum class Kind { Overflow, InvalidDomain, ParameterMismatch, Format };

  SamplingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class ParamKind { Lanes, Radius, Slope };

struct Parameter {
  std::string name;  // "lanes:R1", "radius:r1", "slope:r1"
  ParamKind kind;
  VertexId vertex;
  std::vector<double> values;

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

/// Road lane parameters in road order, then (radius, slope) for each ramp.
std::vector<Parameter> feature_parameters(const LabeledDigraph& topology, const FeatureDomains& domains);

/// Rows hold value indices into each parameter's domain.
struct CoveringArray {
  std::vector<Parameter> parameters;
  std::vector<std::vector<std::size_t>> rows;

  double value(std::size_t row, std::size_t param) const { return parameters[param].values[rows[row][param]]; }
};

struct UncoveredPair {
  std::size_t p, q;
  std::size_t a, b;  // value indices
};

/// |lanes|^n * (|radii| * |slopes|)^m, checked against 64-bit overflow.
std::uint64_t full_combination_count(const LabeledDigraph& topology, const FeatureDomains& domains);

/// Greedy AETG-style construction: every row is the best of `candidates` random
/// greedy rows, scored by newly covered value pairs.
CoveringArray generate_covering_array(const LabeledDigraph& topology, const FeatureDomains& domains, std::uint64_t seed,
                                      int candidates = 50);
CoveringArray generate_covering_array(std::vector<Parameter> parameters, std::uint64_t seed, int candidates = 50);

/// Exhaustive 2-way scan. Returns the first uncovered pair, or nullopt on full coverage.
std::optional<UncoveredPair> find_uncovered_pair(const CoveringArray& array);

/// max over parameter pairs of |dom(p)| * |dom(q)|.
std::size_t pairwise_lower_bound(const std::vector<Parameter>& parameters);

struct RampTarget {
  double min_radius;  // meters, kStraight allowed
  double max_slope;   // percent

  friend bool operator==(const RampTarget&, const RampTarget&) = default;
};

struct InterchangeFeature {
  std::shared_ptr<const LabeledDigraph> topology;
  std::map<VertexId, int> lanes;
  std::map<VertexId, RampTarget> ramp_geometry;
};

std::vector<InterchangeFeature> features_from_array(std::shared_ptr<const LabeledDigraph> topology,
                                                    const CoveringArray& array);

/// "inf" for kStraight, shortest round-trip decimal otherwise.
std::string format_value(double v);
double parse_value(const std::string& s);

/// Tab-separated: header of parameter names, one row of values per line.
std::string serialize_array(const CoveringArray& array);
/// Maps values back onto the given parameter list; Format error on unknown names or out-of-domain values.
CoveringArray parse_array(const std::string& text, const std::vector<Parameter>& parameters);

}  // namespace ixgen
