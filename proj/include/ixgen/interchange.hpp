#pragma once

#include <map>
#include <string>
#include <vector>

#include "ixgen/bezier.hpp"
#include "ixgen/layout.hpp"
#include "ixgen/ramp_fit.hpp"
#include "ixgen/sampling.hpp"

namespace ixgen {

struct RoadGeometry {
  BezierSpline centerline;
  int lane_count = 3;
  double lane_width = 3.75;
};

struct RampGeometry {
  BezierSpline spline;
  CurveMetrics achieved;
  PenaltyBreakdown penalty;
  int lane_count = 1;
  double lane_width = 3.75;
  int generations = 0;
  int attempts = 0;
};

/// Where a ramp leaves (departure) or joins (merge) its host.
struct ConnectionRecord {
  VertexId source;
  VertexId target;
  EdgeLabel label;
  VertexId host;
  VertexId ramp;
  double host_s = 0;  // plan-view distance along the host centerline
  Pose pose;          // ramp endpoint on the host's labeled side
};

struct ConcreteInterchange {
  std::string id;
  int topology_class = 0;
  InterchangeFeature feature;
  LayoutShape shape = LayoutShape::Single;
  std::map<VertexId, RoadGeometry> roads;
  std::map<VertexId, RampGeometry> ramps;
  std::vector<ConnectionRecord> connections;

  const LabeledDigraph& topology() const { return *feature.topology; }
  const BezierSpline& centerline(VertexId v) const;
};

}  // namespace ixgen
