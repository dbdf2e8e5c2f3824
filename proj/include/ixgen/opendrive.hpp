#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixgen/interchange.hpp"

namespace ixgen {

class ExportError : public std::runtime_error {
 public:
  enum class Kind { Io, GeometryDegenerate, UnsupportedElement, Parse };
  ExportError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr double kElevationTolerance = 0.05;  // meters
inline constexpr int kJunctionId = 1000;

/// Cubic z(ds) = a + b ds + c ds^2 + d ds^3 starting at road distance s.
struct ElevationRecord {
  double s, a, b, c, d;
  double z(double road_s) const {
    const double ds = road_s - s;
    return a + ds * (b + ds * (c + ds * d));
  }
};

/// Splits each segment's z(s) into least-squares cubic pieces until every piece
/// fits within `tolerance` on a dense check grid. `max_error` receives the worst fit.
std::vector<ElevationRecord> fit_elevation(const BezierSpline& spline, double tolerance, double* max_error = nullptr);

/// Road as read back: plan view is exact, z comes from the elevation profile.
struct XodrRoad {
  int id = 0;
  std::string name;
  bool ramp = false;
  int lane_count = 0;
  double lane_width = 0;
  double length = 0;
  std::vector<double> segment_s;     // start distance of each geometry record
  std::vector<double> segment_length;
  BezierSpline plan;                 // z = 0 throughout
  std::vector<ElevationRecord> elevation;

  double elevation_at(double s) const;
  /// u in [0, plan.size()], same convention as BezierSpline::evaluate.
  Point3 evaluate(double u) const;
};

struct XodrConnection {
  int source = 0;  // road ids
  int target = 0;
  EdgeLabel label = EdgeLabel::OutR;
  double host_s = 0;
};

struct XodrNetwork {
  std::string name;
  std::vector<XodrRoad> roads;
  std::vector<XodrConnection> connections;
  int junction_count = 0;

  const XodrRoad* find(const std::string& name) const;
  /// Rebuilds the topology and an interchange whose splines carry the plan view
  /// with z taken from the elevation profile at the control points.
  ConcreteInterchange to_interchange() const;
};

std::string opendrive_string(const ConcreteInterchange& interchange);
void write_opendrive(const ConcreteInterchange& interchange, const std::filesystem::path& path);

XodrNetwork parse_opendrive(const std::string& text);
XodrNetwork read_opendrive(const std::filesystem::path& path);

}  // namespace ixgen
