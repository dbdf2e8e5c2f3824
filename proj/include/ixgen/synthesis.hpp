#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixgen/interchange.hpp"

namespace ixgen {

struct SynthesisConfig {
  DEConfig de;
  PenaltyWeights weights;
  int retry_limit = 3;
  int ramp_lanes = 1;
  double ramp_lane_width = 3.75;
  /// Fraction of a host ramp's length at which other ramps attach.
  double attach_fraction = 0.5;
  /// Turning radius used to place attachments, as a multiple of the target radius.
  double radius_slack = 1.3;
  /// Ramps are sized so their mean grade is this fraction of the slope target.
  double grade_fill = 0.85;
  /// Shortest straight run kept between an attachment and the turn.
  double min_tail = 20.0;
  /// Radius used for placement when the target is infinite.
  double straight_placement_radius = 300.0;
};

struct FailedRamp {
  VertexId ramp;
  std::string name;
  std::string reason;
  double best_penalty;  // infinity when no fit was attempted
};

class SynthesisFailed : public std::runtime_error {
 public:
  SynthesisFailed(std::vector<FailedRamp> failures, ConcreteInterchange partial);

  const std::vector<FailedRamp>& failures() const { return failures_; }
  /// Roads plus every ramp that did fit.
  const ConcreteInterchange& partial() const { return partial_; }

 private:
  std::vector<FailedRamp> failures_;
  ConcreteInterchange partial_;
};

/// Ramp processing order: a ramp follows every ramp it attaches to. Ramps on a
/// dependency cycle are returned separately.
struct RampOrder {
  std::vector<VertexId> order;
  std::vector<VertexId> cyclic;
};
RampOrder ramp_order(const LabeledDigraph& g);

/// Fits every ramp of the feature on the given road layout. Throws SynthesisFailed
/// when any ramp misses its targets after `retry_limit` re-runs.
ConcreteInterchange synthesize_interchange(const InterchangeFeature& feature, const RoadLayout& layout,
                                           const SynthesisConfig& config, std::uint64_t seed, std::string id = "",
                                           int class_id = 0);

}  // namespace ixgen
