#include "ixgen/bezier.hpp"

#include <algorithm>
#include <limits>

namespace ixgen {

namespace {

void check_domain(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw GeometryError(GeometryError::Kind::Domain, "curve parameter outside [0, 1]");
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGaussX{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                        0.9061798459386640};
constexpr std::array<double, 5> kGaussW{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                        0.2369268850561891, 0.2369268850561891};

template <class Speed>
double integrate(Speed speed, double t0, double t1, int pieces) {
  double total = 0;
  const double h = (t1 - t0) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double a = t0 + i * h;
    const double mid = a + 0.5 * h;
    for (std::size_t k = 0; k < kGaussX.size(); ++k) total += kGaussW[k] * speed(mid + 0.5 * h * kGaussX[k]);
  }
  return 0.5 * h * total;
}

}  // namespace

Point3 bezier_point(const BezierCurve& c, double t) {
  const double s = 1.0 - t;
  const double b0 = s * s * s, b1 = 3 * s * s * t, b2 = 3 * s * t * t, b3 = t * t * t;
  return b0 * c.p[0] + b1 * c.p[1] + b2 * c.p[2] + b3 * c.p[3];
}

Point3 bezier_velocity(const BezierCurve& c, double t) {
  const double s = 1.0 - t;
  return 3 * s * s * (c.p[1] - c.p[0]) + 6 * s * t * (c.p[2] - c.p[1]) + 3 * t * t * (c.p[3] - c.p[2]);
}

Point3 bezier_acceleration(const BezierCurve& c, double t) {
  const double s = 1.0 - t;
  return 6 * s * (c.p[2] - 2 * c.p[1] + c.p[0]) + 6 * t * (c.p[3] - 2 * c.p[2] + c.p[1]);
}

Point3 BezierCurve::evaluate(double t) const {
  check_domain(t);
  return bezier_point(*this, t);
}

Point3 BezierCurve::derivative(double t) const {
  check_domain(t);
  return bezier_velocity(*this, t);
}

Point3 BezierCurve::second_derivative(double t) const {
  check_domain(t);
  return bezier_acceleration(*this, t);
}

std::array<Point3, 4> BezierCurve::monomial() const {
  return {p[0], 3 * (p[1] - p[0]), 3 * (p[0] - 2 * p[1] + p[2]), p[3] - 3 * p[2] + 3 * p[1] - p[0]};
}

double plan_curvature(const BezierCurve& c, double t) {
  const Point3 d1 = bezier_velocity(c, t);
  const Point3 d2 = bezier_acceleration(c, t);
  const double speed2 = d1.x * d1.x + d1.y * d1.y;
  return (d1.x * d2.y - d1.y * d2.x) / (speed2 * std::sqrt(speed2));
}

double plan_length(const BezierCurve& c, double t0, double t1) {
  return integrate([&](double t) { return bezier_velocity(c, t).norm_xy(); }, t0, t1, 32);
}

double space_length(const BezierCurve& c, double t0, double t1) {
  return integrate([&](double t) { return bezier_velocity(c, t).norm(); }, t0, t1, 32);
}

BezierSpline::BezierSpline(std::vector<BezierCurve> segments) : segments_(std::move(segments)) {}

Point3 BezierSpline::evaluate(double u) const {
  if (segments_.empty()) throw GeometryError(GeometryError::Kind::Degenerate, "empty spline");
  if (!(u >= 0.0 && u <= static_cast<double>(segments_.size()))) {
    throw GeometryError(GeometryError::Kind::Domain, "spline parameter out of range");
  }
  auto i = std::min(static_cast<std::size_t>(u), segments_.size() - 1);
  return bezier_point(segments_[i], u - static_cast<double>(i));
}

Point3 BezierSpline::tangent(double u) const {
  if (segments_.empty()) throw GeometryError(GeometryError::Kind::Degenerate, "empty spline");
  if (!(u >= 0.0 && u <= static_cast<double>(segments_.size()))) {
    throw GeometryError(GeometryError::Kind::Domain, "spline parameter out of range");
  }
  auto i = std::min(static_cast<std::size_t>(u), segments_.size() - 1);
  return bezier_velocity(segments_[i], u - static_cast<double>(i));
}

void BezierSpline::check_continuity() const {
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    const auto& a = segments_[i];
    const auto& b = segments_[i + 1];
    if (!(a.p[3] == b.p[0])) {
      throw GeometryError(GeometryError::Kind::Discontinuous, "C0 break at joint " + std::to_string(i));
    }
    const Point3 tin = a.p[3] - a.p[2];
    const Point3 tout = b.p[1] - b.p[0];
    const double angle = std::atan2(cross(tin, tout).norm(), dot(tin, tout));
    if (tin.norm() == 0 || tout.norm() == 0 || angle > kJointAngleTolerance) {
      throw GeometryError(GeometryError::Kind::Discontinuous, "C1 break at joint " + std::to_string(i));
    }
  }
}

double BezierSpline::plan_length() const {
  double total = 0;
  for (const auto& s : segments_) total += ixgen::plan_length(s);
  return total;
}

double BezierSpline::parameter_at_fraction(double fraction) const {
  std::vector<double> lengths;
  double total = 0;
  for (const auto& s : segments_) {
    lengths.push_back(ixgen::plan_length(s));
    total += lengths.back();
  }
  double target = std::clamp(fraction, 0.0, 1.0) * total;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (target <= lengths[i] || i + 1 == segments_.size()) {
      // Bisection on the monotone arc-length function of this segment.
      double lo = 0, hi = 1;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ixgen::plan_length(segments_[i], 0, mid) < target) lo = mid; else hi = mid;
      }
      return static_cast<double>(i) + 0.5 * (lo + hi);
    }
    target -= lengths[i];
  }
  return static_cast<double>(segments_.size());
}

CurveMetrics metrics(const BezierSpline& spline, int samples_per_segment, bool keep_samples) {
  if (samples_per_segment < 16) throw std::invalid_argument("samples_per_segment must be >= 16");
  if (spline.empty()) throw GeometryError(GeometryError::Kind::Degenerate, "empty spline");

  CurveMetrics m;
  const int n = samples_per_segment;
  double sum = 0, sum_sq = 0;
  std::size_t count = 0;
  double max_kappa = 0, max_slope = 0, length = 0;
  if (keep_samples) m.curvature_samples.reserve(spline.size() * static_cast<std::size_t>(n));

  for (std::size_t s = 0; s < spline.size(); ++s) {
    const auto& c = spline.segments()[s];
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      const Point3 d1 = bezier_velocity(c, t);
      const Point3 d2 = bezier_acceleration(c, t);
      const double speed2 = d1.x * d1.x + d1.y * d1.y;
      const double hspeed = std::sqrt(speed2);
      if (hspeed < 1e-9) {
        throw GeometryError(GeometryError::Kind::SingularTangent, "horizontal speed vanishes on segment " + std::to_string(s));
      }
      const double kappa = std::abs(d1.x * d2.y - d1.y * d2.x) / (speed2 * hspeed);
      max_kappa = std::max(max_kappa, kappa);
      max_slope = std::max(max_slope, 100.0 * std::abs(d1.z) / hspeed);
      sum += kappa;
      sum_sq += kappa * kappa;
      ++count;
      if (keep_samples) m.curvature_samples.push_back({static_cast<double>(s) + t, kappa});
    }
    length += integrate([&](double t) { return bezier_velocity(c, t).norm(); }, 0.0, 1.0, n - 1);
  }

  const double mean = sum / static_cast<double>(count);
  m.curvature_mean = mean;
  m.curvature_variance = std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean);
  m.max_curvature = max_kappa;
  m.min_radius = max_kappa < 1e-9 ? std::numeric_limits<double>::infinity() : 1.0 / max_kappa;
  m.max_abs_slope = max_slope;
  m.arc_length = length;
  return m;
}

}  // namespace ixgen
