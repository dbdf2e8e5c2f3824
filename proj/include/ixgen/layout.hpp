#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "ixgen/bezier.hpp"
#include "ixgen/topology.hpp"

namespace ixgen {

enum class LayoutShape { Single, TShape, CrossShape };

std::string_view to_string(LayoutShape shape);

/// Template slots. A = expressway along +x at ground level, B = crossing
/// expressway (or T stem) one level up.
enum class Slot { APos, ANeg, BPos, BNeg, StemIn, StemOut };

std::string_view to_string(Slot slot);

struct LayoutConfig {
  double level_clearance = 8.0;  // meters between crossing expressways
  double lane_width = 3.75;
  double half_length = 600.0;    // nominal road extent from the interchange center
  double endpoint_jitter = 40.0; // along-axis half-extent of each endpoint search rectangle
  double median = 6.0;           // gap between the inner edges of paired roads
  double median_jitter = 2.0;    // lateral half-extent of the search rectangles
  double crossing_jitter_deg = 12.0;
  double stem_gap = 40.0;        // distance kept between a T stem end and the through expressway
};

struct RoadPlacement {
  Point3 start;
  Point3 end;
  int lane_count = 3;
  double lane_width = 3.75;
  Slot slot = Slot::APos;

  double heading() const { return std::atan2(end.y - start.y, end.x - start.x); }
  double half_width() const { return 0.5 * lane_count * lane_width; }
  double length() const { return (end - start).norm_xy(); }
};

struct RoadLayout {
  std::map<VertexId, RoadPlacement> roads;
  LayoutShape shape = LayoutShape::Single;
  double level_clearance = 8.0;
  Point3 center;
};

class LayoutError : public std::runtime_error {
 public:
  enum class Kind { UnsupportedRoadCount, MissingLanes };
  LayoutError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Signed heading change a ramp makes between two headings, given how it
/// departs and merges. Right exits that must end up turning left become
/// clockwise loops, and vice versa.
double ramp_turn(double from_heading, double to_heading, EdgeLabel departure, EdgeLabel merge);

/// Places every one-way road of the topology on the shape template for its
/// road count (1-4). Deterministic for a fixed seed.
RoadLayout layout_roads(const LabeledDigraph& topology, const std::map<VertexId, int>& lanes, const LayoutConfig& config,
                        std::uint64_t seed);

}  // namespace ixgen
