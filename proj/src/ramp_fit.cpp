#include "ixgen/ramp_fit.hpp"

#include <algorithm>
#include <functional>
#include <numbers>
#include <optional>

namespace ixgen {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvalid = 1e12;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

Point3 heading_vector(double heading, double grade = 0) { return {std::cos(heading), std::sin(heading), grade}; }

}  // namespace

Pose TurnPath::at(const Pose& start, double s) const {
  const Point3 d0 = heading_vector(start.heading);
  if (s <= lead) return {start.point + s * d0, start.heading};
  const double sgn = turn >= 0 ? 1.0 : -1.0;
  const double arc = radius * std::abs(turn);
  const double phi = std::min(s - lead, arc) / radius;
  const Point3 n0{-d0.y, d0.x, 0};
  const Point3 on_arc = start.point + lead * d0 + radius * std::sin(phi) * d0 + sgn * radius * (1 - std::cos(phi)) * n0;
  const double h = start.heading + sgn * phi;
  if (s <= lead + arc) return {on_arc, h};
  return {on_arc + (s - lead - arc) * heading_vector(h), h};
}

TurnPath fit_turn_path(const Pose& start, const Pose& end, double turn, double min_radius) {
  const Point3 d0 = heading_vector(start.heading);
  const Point3 n0{-d0.y, d0.x, 0};
  const Point3 d1 = heading_vector(start.heading + turn);
  const double sgn = turn >= 0 ? 1.0 : -1.0;
  const double abs_turn = std::abs(turn);
  const Point3 v = std::sin(abs_turn) * d0 + sgn * (1 - std::cos(abs_turn)) * n0;
  Point3 gap = end.point - start.point;
  gap.z = 0;
  const double det = d0.x * d1.y - d0.y * d1.x;

  TurnPath best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 40; ++i) {
    const double r = min_radius * (1.0 + 0.075 * i);
    const Point3 w = gap - r * v;
    std::vector<std::pair<double, double>> cand{{0, 0}, {std::max(0.0, dot(w, d0)), 0}, {0, std::max(0.0, dot(w, d1))}};
    if (std::abs(det) > 1e-6) {
      const double a = (w.x * d1.y - w.y * d1.x) / det;
      const double b = (d0.x * w.y - d0.y * w.x) / det;
      if (a >= 0 && b >= 0) cand.emplace_back(a, b);
    }
    for (auto [a, b] : cand) {
      const Point3 miss = w - a * d0 - b * d1;
      // Long straights only pay off when they close the gap.
      const double cost = miss.norm_xy() + 0.5 * std::max(0.0, a + b - 2 * r - 100.0);
      if (cost < best_cost) {
        best_cost = cost;
        best = {a, r, turn, b, miss, miss.norm_xy()};
      }
    }
  }
  return best;
}

PenaltyBreakdown ramp_penalty(const CurveMetrics& m, double target_radius, double target_slope,
                              const PenaltyWeights& weights) {
  PenaltyBreakdown p;
  p.p_curv = m.curvature_variance;
  p.p_slope = (m.max_abs_slope - target_slope) * (m.max_abs_slope - target_slope);
  double weighted_radius = 0;
  if (std::isinf(target_radius)) {
    const double excess = std::max(0.0, m.max_curvature - weights.straight_curvature) / weights.straight_curvature;
    p.p_radius = excess * excess;
    weighted_radius = p.p_radius;
  } else {
    const double r_min = std::isinf(m.min_radius) ? 1e9 : m.min_radius;
    p.p_radius = (r_min - target_radius) * (r_min - target_radius);
    const double band = weights.radius_band * target_radius;
    weighted_radius = p.p_radius / (band * band);
  }
  const double w_slope = 1.0 / (weights.slope_band * weights.slope_band);
  const double w_curv = weights.curvature_scale * m.arc_length * m.arc_length;
  p.total = weighted_radius + w_slope * p.p_slope + w_curv * p.p_curv;
  return p;
}

int segment_count_for_turn(double turn_angle) {
  const double deg = std::abs(turn_angle) * 180.0 / kPi;
  if (deg < 100) return 1;
  if (deg < 300) return 2;
  return 3;
}

double resolved_turn(const RampFitProblem& problem) {
  if (std::isfinite(problem.turn_angle)) return problem.turn_angle;
  return wrap_angle(problem.end.heading - problem.start.heading);
}

RampParameterization::RampParameterization(const RampFitProblem& problem) : problem_(problem) {
  const Point3 p0 = problem.start.point, p1 = problem.end.point;
  if (!std::isfinite(problem.start.heading) || !std::isfinite(problem.end.heading) || !std::isfinite(p0.norm()) ||
      !std::isfinite(p1.norm())) {
    throw FitError(FitError::Kind::InfeasiblePose, "non-finite pose");
  }
  const Point3 delta = p1 - p0;
  const double chord = delta.norm_xy();
  if (chord < 1e-6) throw FitError(FitError::Kind::InfeasiblePose, "start and end poses coincide");

  const double turn = resolved_turn(problem);
  const double psi0 = problem.start.heading;
  if (std::abs(wrap_angle(psi0 + turn - problem.end.heading)) > 1e-6) {
    throw FitError(FitError::Kind::InfeasiblePose, "turn angle inconsistent with end heading");
  }
  segments_ = problem.segment_count > 0 ? problem.segment_count : segment_count_for_turn(turn);

  // Reference path: a straight-arc-straight path sized for the target radius when
  // it exists, else a constant turning rate scaled by `ell`. Either gets a linear
  // correction that closes the remaining gap. Joints are nominally placed on it.
  std::function<Point3(double)> point_at;
  std::function<double(double)> heading_at;
  std::optional<TurnPath> arc_path;
  if (std::isfinite(problem.target_radius) && std::abs(turn) > 0.1) {
    TurnPath tp = fit_turn_path(problem.start, problem.end, turn, 1.02 * problem.target_radius);
    if (tp.miss < 0.25 * tp.length()) arc_path = tp;
  }
  if (arc_path) {
    const TurnPath tp = *arc_path;
    const double total = tp.length();
    point_at = [=](double u) { return tp.at(problem.start, u * total).point + u * tp.miss_vector; };
    heading_at = [=](double u) {
      const Point3 dir = heading_vector(tp.at(problem.start, u * total).heading) + (1.0 / total) * tp.miss_vector;
      return std::atan2(dir.y, dir.x);
    };
  } else {
    auto integral = [turn, psi0](double u) -> Point3 {
      if (std::abs(turn) < 1e-9) return {u * std::cos(psi0), u * std::sin(psi0), 0};
      return {(std::sin(psi0 + turn * u) - std::sin(psi0)) / turn, (std::cos(psi0) - std::cos(psi0 + turn * u)) / turn, 0};
    };
    const Point3 i1 = integral(1.0);
    const Point3 dxy{delta.x, delta.y, 0};
    const double i1n2 = dot(i1, i1);
    double ell = i1n2 > 1e-6 ? dot(dxy, i1) / i1n2 : chord;
    if (ell < 0.5 * chord) ell = chord;
    const Point3 corr = dxy - ell * i1;
    point_at = [=](double u) { return p0 + ell * integral(u) + u * corr; };
    heading_at = [=](double u) {
      const Point3 dir = ell * heading_vector(psi0 + turn * u) + corr;
      return std::atan2(dir.y, dir.x);
    };
  }

  double length = 0;
  Point3 prev = p0;
  const int steps = 256;
  for (int i = 1; i <= steps; ++i) {
    const Point3 cur = point_at(static_cast<double>(i) / steps);
    length += (cur - prev).norm_xy();
    prev = cur;
  }
  reference_length_ = length;

  const double seg = length / segments_;
  const double zlo = std::min(p0.z, p1.z) - 2.0;
  const double zhi = std::max(p0.z, p1.z) + 2.0;

  bounds_.push_back({0.02 * seg, 1.0 * seg});
  bounds_.push_back({0.02 * seg, 1.0 * seg});
  bounds_.push_back({zlo, zhi});
  bounds_.push_back({zlo, zhi});
  for (int j = 1; j < segments_; ++j) {
    const double u = static_cast<double>(j) / segments_;
    Point3 nominal = point_at(u);
    nominal.z = 0;
    joint_nominal_.push_back(nominal);
    joint_heading_.push_back(heading_at(u));
    const double z_nominal = p0.z + u * delta.z;
    const double grade_nominal = delta.z / length;
    bounds_.push_back({-0.25 * seg, 0.25 * seg});
    bounds_.push_back({-0.25 * seg, 0.25 * seg});
    bounds_.push_back({std::max(zlo, z_nominal - 2.0), std::min(zhi, z_nominal + 2.0)});
    bounds_.push_back({-0.35, 0.35});
    bounds_.push_back({grade_nominal - 0.03, grade_nominal + 0.03});
    bounds_.push_back({0.1 * seg, 0.6 * seg});
    bounds_.push_back({0.1 * seg, 0.6 * seg});
  }
}

BezierSpline RampParameterization::build(std::span<const double> x) const {
  const Pose& s = problem_.start;
  const Pose& e = problem_.end;
  struct Joint {
    Point3 at;
    double heading;
    double grade;
    double leg_in, leg_out;
  };
  std::vector<Joint> joints;
  joints.push_back({s.point, s.heading, 0, 0, x[0]});
  for (int j = 1; j < segments_; ++j) {
    const std::size_t o = 4 + 7 * static_cast<std::size_t>(j - 1);
    const Point3 nominal = joint_nominal_[static_cast<std::size_t>(j - 1)];
    joints.push_back({{nominal.x + x[o], nominal.y + x[o + 1], x[o + 2]},
                      joint_heading_[static_cast<std::size_t>(j - 1)] + x[o + 3],
                      x[o + 4],
                      x[o + 5],
                      x[o + 6]});
  }
  joints.push_back({e.point, e.heading, 0, x[1], 0});

  std::vector<BezierCurve> curves;
  for (std::size_t i = 0; i + 1 < joints.size(); ++i) {
    const Joint& a = joints[i];
    const Joint& b = joints[i + 1];
    Point3 c1 = a.at + a.leg_out * heading_vector(a.heading, a.grade);
    Point3 c2 = b.at - b.leg_in * heading_vector(b.heading, b.grade);
    if (i == 0) c1.z = x[2];
    if (i + 2 == joints.size()) c2.z = x[3];
    curves.push_back({{a.at, c1, c2, b.at}});
  }
  return BezierSpline(std::move(curves));
}

FitResult fit_ramp(const RampFitProblem& problem, const DEConfig& config, const PenaltyWeights& weights) {
  RampParameterization param(problem);
  auto objective = [&](std::span<const double> x) {
    try {
      const auto m = metrics(param.build(x), weights.samples_per_segment, false);
      const double total = ramp_penalty(m, problem.target_radius, problem.target_slope, weights).total;
      return std::isfinite(total) ? total : kInvalid;
    } catch (const GeometryError&) {
      return kInvalid;
    }
  };

  const DEResult de = differential_evolution(objective, param.bounds(), config);

  FitResult result;
  result.decision = de.best;
  result.trajectory = de.trajectory;
  result.generations_used = de.generations;
  result.spline = param.build(de.best);
  try {
    result.achieved = metrics(result.spline, weights.samples_per_segment);
    result.penalty = ramp_penalty(result.achieved, problem.target_radius, problem.target_slope, weights);
    result.success = result.penalty.total < config.tolerance;
  } catch (const GeometryError&) {
    result.penalty.total = kInvalid;
    result.success = false;
  }
  return result;
}

}  // namespace ixgen
