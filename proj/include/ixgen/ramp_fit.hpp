#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixgen/bezier.hpp"
#include "ixgen/differential_evolution.hpp"

namespace ixgen {

/// Attachment point and plan-view heading (radians, counter-clockwise from +x).
struct Pose {
  Point3 point;
  double heading = 0;
};

struct RampFitProblem {
  Pose start;
  Pose end;
  double target_radius = 60;  // meters, infinity = straight
  double target_slope = 2;    // percent
  /// Signed total heading change (counter-clockwise positive). NaN picks the
  /// shortest turn between the two headings.
  double turn_angle = std::numeric_limits<double>::quiet_NaN();
  /// 0 derives the count from the turn angle.
  int segment_count = 0;
};

/// Weights applied to the raw penalty terms. A total below 1 implies the radius
/// is within `radius_band` (relative) and the slope within `slope_band` (points).
struct PenaltyWeights {
  double radius_band = 0.04;
  double slope_band = 0.15;
  /// Multiplies arc_length^2 * curvature variance.
  double curvature_scale = 2e-3;
  /// Curvature allowed for an infinite radius target.
  double straight_curvature = 1e-4;
  /// Metric samples per Bezier segment when scoring a candidate.
  int samples_per_segment = kDefaultSamplesPerSegment;
};

struct PenaltyBreakdown {
  double p_curv = 0;    // curvature variance, 1/m^2
  double p_radius = 0;  // (r_min - r_target)^2 in m^2; for straight targets the squared relative curvature excess
  double p_slope = 0;   // (s_max - s_target)^2 in %^2
  double total = 0;
};

PenaltyBreakdown ramp_penalty(const CurveMetrics& m, double target_radius, double target_slope,
                              const PenaltyWeights& weights = {});

class FitError : public std::runtime_error {
 public:
  enum class Kind { InfeasiblePose };
  FitError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct FitResult {
  BezierSpline spline;
  PenaltyBreakdown penalty;
  CurveMetrics achieved;
  int generations_used = 0;
  bool success = false;
  std::vector<double> decision;
  std::vector<double> trajectory;
};

/// Straight lead, circular arc, straight trail between two poses. `miss` is the
/// plan-view gap left at the end when no such path meets the end point exactly.
struct TurnPath {
  double lead = 0;
  double radius = 0;
  double turn = 0;
  double trail = 0;
  Point3 miss_vector;
  double miss = 0;

  double length() const { return lead + radius * std::abs(turn) + trail; }
  /// Plan-view point and heading at distance s along the path, ignoring the miss.
  Pose at(const Pose& start, double s) const;
};

/// Searches radii from `min_radius` up to four times it for the path with the
/// smallest miss, preferring short straights.
TurnPath fit_turn_path(const Pose& start, const Pose& end, double turn, double min_radius);

/// Segments by turn magnitude: one below 100 degrees, two below 300, three beyond.
int segment_count_for_turn(double turn_angle);

/// Resolves the problem's turn angle (explicit or shortest).
double resolved_turn(const RampFitProblem& problem);

/*
  Maps DE decision vectors onto splines that meet the end poses exactly.

  Decision layout:
    [0] start leg length, [1] end leg length,
    [2] z of the first inner control point, [3] z of the last inner control point,
    then per interior joint: dx, dy (offset from the reference joint), z,
    heading offset, grade, incoming leg, outgoing leg.
  Dimension = 4 + 7 * (segments - 1).
*/
class RampParameterization {
 public:
  explicit RampParameterization(const RampFitProblem& problem);

  int segments() const { return segments_; }
  std::size_t dimension() const { return bounds_.size(); }
  const std::vector<Bounds>& bounds() const { return bounds_; }
  double reference_length() const { return reference_length_; }

  BezierSpline build(std::span<const double> x) const;

 private:
  RampFitProblem problem_;
  int segments_ = 1;
  double reference_length_ = 0;
  std::vector<Point3> joint_nominal_;
  std::vector<double> joint_heading_;
  std::vector<Bounds> bounds_;
};

FitResult fit_ramp(const RampFitProblem& problem, const DEConfig& config, const PenaltyWeights& weights = {});

}  // namespace ixgen
