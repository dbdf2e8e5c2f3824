#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ixgen {

struct Point3 {
  double x = 0, y = 0, z = 0;

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Point3 operator*(Point3 a, double s) { return s * a; }
  friend bool operator==(const Point3&, const Point3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm_xy() const { return std::hypot(x, y); }
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }
inline double distance(Point3 a, Point3 b) { return (a - b).norm(); }

class GeometryError : public std::runtime_error {
 public:
  enum class Kind { Domain, SingularTangent, Discontinuous, Degenerate };

  GeometryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Cubic Bézier curve; B(t) = sum of Bernstein-weighted control points, t in [0, 1].
struct BezierCurve {
  std::array<Point3, 4> p;

  Point3 evaluate(double t) const;
  Point3 derivative(double t) const;
  Point3 second_derivative(double t) const;

  /// Monomial coefficients c0 + c1 t + c2 t^2 + c3 t^3.
  std::array<Point3, 4> monomial() const;
};

/// Evaluation without the [0,1] check; callers guarantee the range.
Point3 bezier_point(const BezierCurve& c, double t);
Point3 bezier_velocity(const BezierCurve& c, double t);
Point3 bezier_acceleration(const BezierCurve& c, double t);

/// Signed curvature of the xy projection at t (positive = turning left).
double plan_curvature(const BezierCurve& c, double t);

/// Plan-view (xy) arc length between t0 and t1, by composite Gauss-Legendre quadrature.
double plan_length(const BezierCurve& c, double t0 = 0.0, double t1 = 1.0);
/// 3D arc length between t0 and t1.
double space_length(const BezierCurve& c, double t0 = 0.0, double t1 = 1.0);

/// Concatenated cubic segments. C0 is exact, C1 holds in tangent direction.
class BezierSpline {
 public:
  BezierSpline() = default;
  explicit BezierSpline(std::vector<BezierCurve> segments);

  static constexpr double kJointAngleTolerance = 1e-6;

  const std::vector<BezierCurve>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  Point3 start() const { return segments_.front().p[0]; }
  Point3 end() const { return segments_.back().p[3]; }

  /// u in [0, size()]: integer part selects the segment.
  Point3 evaluate(double u) const;
  Point3 tangent(double u) const;

  /// Throws GeometryError::Discontinuous when C0 is not exact or a joint turns by more than the tolerance.
  void check_continuity() const;

  double plan_length() const;

  /// Spline parameter at which the plan-view arc length reaches `fraction` of the total.
  double parameter_at_fraction(double fraction) const;

 private:
  std::vector<BezierCurve> segments_;
};

struct CurvatureSample {
  double u;
  double curvature;
};

struct CurveMetrics {
  double min_radius = 0;     // meters, infinity when max curvature < 1e-9
  double max_abs_slope = 0;  // percent
  double arc_length = 0;     // meters, 3D
  double max_curvature = 0;  // 1/m
  double curvature_mean = 0;
  double curvature_variance = 0;  // population variance over the samples
  std::vector<CurvatureSample> curvature_samples;
};

inline constexpr int kDefaultSamplesPerSegment = 100;

/// Samples t = i/(n-1), i = 0..n-1 on every segment. Throws SingularTangent when the
/// horizontal speed drops below 1e-9 at a sample.
CurveMetrics metrics(const BezierSpline& spline, int samples_per_segment = kDefaultSamplesPerSegment,
                     bool keep_samples = true);

}  // namespace ixgen
