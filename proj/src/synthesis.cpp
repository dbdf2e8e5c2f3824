#include "ixgen/synthesis.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>

#include "ixgen/random.hpp"

namespace ixgen {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(Point3 a, Point3 b) { return a.x * b.y - a.y * b.x; }
Point3 unit_heading(double h) { return {std::cos(h), std::sin(h), 0}; }
Point3 left_normal(double h) { return {-std::sin(h), std::cos(h), 0}; }

struct HostRef {
  VertexId host;
  EdgeLabel label;
  std::size_t edge;
};

struct RampLinks {
  std::optional<HostRef> departure;
  std::optional<HostRef> merge;
  std::string problem;
};

RampLinks links_for(const LabeledDigraph& g, VertexId ramp) {
  RampLinks links;
  int departures = 0, merges = 0;
  for (auto ei : g.in_edges(ramp)) {
    const auto& e = g.edges()[ei];
    if (is_out(e.label) && departures++ == 0) links.departure = HostRef{e.source, e.label, ei};
  }
  for (auto ei : g.out_edges(ramp)) {
    const auto& e = g.edges()[ei];
    if (!is_out(e.label) && merges++ == 0) links.merge = HostRef{e.target, e.label, ei};
  }
  if (departures == 0) links.problem = "ramp has no departure host";
  else if (merges == 0) links.problem = "ramp has no merge host";
  else if (departures > 1) links.problem = "ramp departs from more than one host";
  else if (merges > 1) links.problem = "ramp merges into more than one host";
  return links;
}

// Attachment side on a host: a free line (road) or a fixed pose (fitted ramp).
struct HostSide {
  bool fixed = false;
  Point3 origin;  // offset line origin (road) or attachment point (ramp)
  double heading = 0;
  double s_min = 0, s_max = 0;
  double s_offset = 0;  // host distance at `origin` for fixed sides
  Point3 point_at(double s) const { return origin + s * unit_heading(heading); }
};

struct Placement {
  double pred_s = 0, succ_s = 0;
};

double clamp_s(double s, const HostSide& h) { return std::clamp(s, h.s_min, h.s_max); }

// Chooses distances along free hosts so a turn of `turn` radians with radius `rho`
// and total length of at least `needed` fits between them.
Placement place(const HostSide& pred, const HostSide& succ, double turn, double rho, double needed, double tail,
                Point3 center) {
  Placement out;
  const Point3 dp = unit_heading(pred.heading);
  const Point3 dq = unit_heading(succ.heading);
  const double denom = cross2(dp, dq);
  const bool parallel = std::abs(denom) <= 0.2;
  const bool loop = std::abs(turn) >= kPi;
  if (loop) rho = std::max(rho, needed / std::abs(turn));
  const double tangent = loop ? rho * std::tan((2 * kPi - std::abs(turn)) / 2) : rho * std::tan(std::abs(turn) / 2);
  const double reach = loop ? tangent : tangent + std::max(tail, (needed - rho * std::abs(turn)) / 2);
  const double straight_run = std::max(needed, 150.0);

  if (!pred.fixed && !succ.fixed) {
    if (parallel) {
      const double a0 = dot(center - pred.origin, dp);
      if (dot(dp, dq) > 0) {
        out.pred_s = a0 - straight_run / 2;
        out.succ_s = dot(center - succ.origin, dq) + straight_run / 2;
      } else {
        out.pred_s = a0 + 60.0;
        out.succ_s = dot(pred.point_at(out.pred_s) - succ.origin, dq);
      }
    } else {
      const Point3 qp = succ.origin - pred.origin;
      const double a = cross2(qp, dq) / denom;
      const double b = cross2(qp, dp) / denom;
      out.pred_s = loop ? a + reach : a - reach;
      out.succ_s = loop ? b - reach : b + reach;
    }
  } else if (!pred.fixed) {
    if (parallel) {
      out.pred_s = dot(succ.origin - pred.origin, dp) - straight_run;
    } else {
      const Point3 qp = succ.origin - pred.origin;
      const double a = cross2(qp, dq) / denom;
      const double b = cross2(qp, dp) / denom;  // intersection = succ.origin + b * dq
      const double d = std::max(std::abs(b), tail);
      out.pred_s = loop ? a + d : a - d;
    }
  } else if (!succ.fixed) {
    if (parallel) {
      out.succ_s = dot(pred.origin - succ.origin, dq) + straight_run;
    } else {
      const Point3 qp = succ.origin - pred.origin;
      const double a = cross2(qp, dq) / denom;  // intersection = pred.origin + a * dp
      const double b = cross2(qp, dp) / denom;
      const double d = std::max(std::abs(a), tail);
      out.succ_s = loop ? b - d : b + d;
    }
  }
  if (!pred.fixed) out.pred_s = clamp_s(out.pred_s, pred);
  if (!succ.fixed) out.succ_s = clamp_s(out.succ_s, succ);
  return out;
}

// How far `end` is from a straight-arc-straight path out of `start` with radius at
// least `rho`, plus a shortfall term when that path is shorter than `needed` and an
// excess term for needlessly long straights.
double arc_path_cost(const Pose& start, const Pose& end, double turn, double rho, double needed) {
  if (rho <= 0) return 0.0;
  const TurnPath tp = fit_turn_path(start, end, turn, rho);
  return tp.miss + std::max(0.0, needed - tp.length()) + 0.5 * std::max(0.0, tp.lead + tp.trail - 2 * tp.radius - 100.0);
}

BezierSpline straight_centerline(Point3 a, Point3 b) {
  const Point3 d = b - a;
  return BezierSpline({BezierCurve{{a, a + (1.0 / 3.0) * d, a + (2.0 / 3.0) * d, b}}});
}

}  // namespace

const BezierSpline& ConcreteInterchange::centerline(VertexId v) const {
  if (auto it = roads.find(v); it != roads.end()) return it->second.centerline;
  return ramps.at(v).spline;
}

SynthesisFailed::SynthesisFailed(std::vector<FailedRamp> failures, ConcreteInterchange partial)
    : std::runtime_error([&] {
        std::string msg = "synthesis failed for";
        for (const auto& f : failures) msg += " " + f.name + " (" + f.reason + ")";
        return msg;
      }()),
      failures_(std::move(failures)),
      partial_(std::move(partial)) {}

RampOrder ramp_order(const LabeledDigraph& g) {
  const auto ramps = g.vertices_of(VertexKind::Ramp);
  std::map<VertexId, std::vector<VertexId>> deps;
  for (auto r : ramps) {
    auto links = links_for(g, r);
    for (const auto& h : {links.departure, links.merge}) {
      if (h && g.vertex(h->host).kind == VertexKind::Ramp) deps[r].push_back(h->host);
    }
  }
  RampOrder out;
  std::vector<bool> done(g.vertex_count(), false);
  std::vector<VertexId> pending = ramps;
  bool progress = true;
  while (!pending.empty() && progress) {
    progress = false;
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      const auto& d = deps[*it];
      if (std::all_of(d.begin(), d.end(), [&](VertexId h) { return done[h]; })) {
        done[*it] = true;
        out.order.push_back(*it);
        pending.erase(it);
        progress = true;
        break;
      }
    }
  }
  out.cyclic = pending;
  return out;
}

ConcreteInterchange synthesize_interchange(const InterchangeFeature& feature, const RoadLayout& layout,
                                           const SynthesisConfig& config, std::uint64_t seed, std::string id,
                                           int class_id) {
  const LabeledDigraph& g = *feature.topology;
  ConcreteInterchange out;
  out.id = std::move(id);
  out.topology_class = class_id;
  out.feature = feature;
  out.shape = layout.shape;

  for (auto r : g.vertices_of(VertexKind::Road)) {
    const auto& p = layout.roads.at(r);
    out.roads[r] = {straight_centerline(p.start, p.end), p.lane_count, p.lane_width};
  }

  const double ramp_half = 0.5 * config.ramp_lanes * config.ramp_lane_width;
  std::vector<FailedRamp> failures;
  std::map<VertexId, std::vector<double>> used_fractions;

  auto host_side = [&](const HostRef& ref, double fraction) -> std::optional<HostSide> {
    const double sign = is_right(ref.label) ? -1.0 : 1.0;
    HostSide side;
    if (g.vertex(ref.host).kind == VertexKind::Road) {
      const auto& p = layout.roads.at(ref.host);
      side.heading = p.heading();
      side.origin = p.start + sign * (p.half_width() + ramp_half) * left_normal(side.heading);
      side.s_min = 5.0;
      side.s_max = p.length() - 5.0;
      return side;
    }
    auto it = out.ramps.find(ref.host);
    if (it == out.ramps.end()) return std::nullopt;
    const auto& host = it->second;
    const double u = host.spline.parameter_at_fraction(fraction);
    const Point3 t = host.spline.tangent(u);
    side.fixed = true;
    side.heading = std::atan2(t.y, t.x);
    side.origin = host.spline.evaluate(u) + sign * (0.5 * host.lane_count * host.lane_width + ramp_half) * left_normal(side.heading);
    side.s_offset = fraction * host.spline.plan_length();
    return side;
  };

  const auto order = ramp_order(g);
  for (auto r : order.cyclic) failures.push_back({r, g.vertex(r).name, "ramp attachment cycle", kInf});

  for (auto r : order.order) {
    const auto& name = g.vertex(r).name;
    auto links = links_for(g, r);
    if (!links.problem.empty()) {
      failures.push_back({r, name, links.problem, kInf});
      continue;
    }
    const RampTarget target = feature.ramp_geometry.at(r);
    const double rho = std::isinf(target.min_radius) ? config.straight_placement_radius : config.radius_slack * target.min_radius;
    const auto grade_length = [&](const HostSide& a, const HostSide& b) {
      return std::abs(b.origin.z - a.origin.z) / (config.grade_fill * target.max_slope / 100.0);
    };

    // Attachment fractions on host ramps: keep clear of earlier attachments and
    // pick the pair a turn of radius `rho` fits best.
    const bool pred_ramp = g.vertex(links.departure->host).kind == VertexKind::Ramp;
    const bool succ_ramp = g.vertex(links.merge->host).kind == VertexKind::Ramp;
    auto fractions_for = [&](bool is_ramp, VertexId host) {
      std::vector<double> out;
      if (!is_ramp) return std::vector<double>{0.0};
      for (int i = 2; i <= 18; ++i) {
        const double f = 0.05 * i;
        const auto& used = used_fractions[host];
        if (std::none_of(used.begin(), used.end(), [&](double u) { return std::abs(u - f) < 0.12; })) out.push_back(f);
      }
      if (out.empty()) out.push_back(config.attach_fraction);
      return out;
    };
    std::optional<HostSide> pred, succ;
    double pred_fraction = 0, succ_fraction = 0;
    double turn = 0;
    double best_cost = kInf;
    const double eval_radius = target.min_radius < kInf ? target.min_radius : rho;
    for (double fp : fractions_for(pred_ramp, links.departure->host)) {
      auto p = host_side(*links.departure, fp);
      if (!p) break;
      for (double fs : fractions_for(succ_ramp, links.merge->host)) {
        auto q = host_side(*links.merge, fs);
        if (!q) break;
        const double t = ramp_turn(p->heading, q->heading, links.departure->label, links.merge->label);
        double cost = 0, chosen = t;
        if (p->fixed || q->fixed) {
          const double need = grade_length(*p, *q);
          auto score = [&](double tt) {
            const Placement pl = place(*p, *q, tt, rho, need, config.min_tail, layout.center);
            const Pose a{p->fixed ? p->origin : p->point_at(pl.pred_s), p->heading};
            const Pose b{q->fixed ? q->origin : q->point_at(pl.succ_s), q->heading};
            return arc_path_cost(a, b, tt, eval_radius, need);
          };
          cost = score(t);
          // The labels fix the turn sense only up to a loop; the other sense can
          // be the only one that reaches the merge side (a ramp that must cross
          // the road it left).
          const double other = t > 0 ? t - 2 * kPi : t + 2 * kPi;
          if (const double c = score(other); c + 1.0 < cost) cost = c, chosen = other;
          cost += 1e-3 * (std::abs(fp - config.attach_fraction) + std::abs(fs - config.attach_fraction));
        }
        if (cost < best_cost) {
          best_cost = cost;
          pred = p, succ = q;
          pred_fraction = fp, succ_fraction = fs;
          turn = chosen;
        }
      }
    }
    if (!pred || !succ) {
      failures.push_back({r, name, "host ramp was not synthesized", kInf});
      continue;
    }
    const double needed = grade_length(*pred, *succ);
    const Placement pl = place(*pred, *succ, turn, rho, needed, config.min_tail, layout.center);

    Pose start{pred->fixed ? pred->origin : pred->point_at(pl.pred_s), pred->heading};
    Pose end{succ->fixed ? succ->origin : succ->point_at(pl.succ_s), succ->heading};

    RampFitProblem problem;
    problem.start = start;
    problem.end = end;
    problem.target_radius = target.min_radius;
    problem.target_slope = target.max_slope;
    problem.turn_angle = turn;

    // A straight target allows curvature up to straight_curvature, so turning by `turn`
    // takes at least |turn| / straight_curvature meters of ramp.
    if (std::isinf(target.min_radius)) {
      const double required = std::abs(turn) / config.weights.straight_curvature;
      const double span = (end.point - start.point).norm_xy();
      if (required > 2.0 * span) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "straight target cannot turn %.0f deg within %.0f m", std::abs(turn) * 180.0 / kPi,
                      span);
        failures.push_back({r, name, msg, kInf});
        continue;
      }
    }
    // A half-circle turn whose ends are less than a ramp width apart sideways:
    // leaving and arriving legs share one strip, so the ramp would have to cross
    // a host at grade to separate them.
    if (std::abs(std::abs(turn) - kPi) < 0.1) {
      const Point3 d = end.point - start.point;
      const double side = (turn > 0 ? 1.0 : -1.0) * (std::cos(start.heading) * d.y - std::sin(start.heading) * d.x);
      const double width = config.ramp_lanes * config.ramp_lane_width;
      if (side < width) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "u-turn ends are %.1f m apart sideways, less than the %.2f m ramp width", side, width);
        failures.push_back({r, name, msg, kInf});
        continue;
      }
    }

    std::optional<FitResult> best;
    int attempts = 0;
    std::string reason;
    try {
      for (int attempt = 0; attempt <= config.retry_limit; ++attempt) {
        DEConfig de = config.de;
        de.seed = derive_seed(seed, name + "#" + std::to_string(attempt));
        // Odd attempts try one more segment than the turn rule gives.
        problem.segment_count = segment_count_for_turn(turn) + attempt % 2;
        auto fit = fit_ramp(problem, de, config.weights);
        ++attempts;
        if (!best || fit.penalty.total < best->penalty.total) best = std::move(fit);
        if (best->success) break;
      }
    } catch (const FitError& e) {
      reason = e.what();
    }
    if (!best || !best->success) {
      failures.push_back({r, name, reason.empty() ? "targets not met" : reason, best ? best->penalty.total : kInf});
      continue;
    }

    RampGeometry geom;
    geom.spline = best->spline;
    geom.achieved = best->achieved;
    geom.penalty = best->penalty;
    geom.lane_count = config.ramp_lanes;
    geom.lane_width = config.ramp_lane_width;
    geom.generations = best->generations_used;
    geom.attempts = attempts;
    out.ramps[r] = std::move(geom);
    if (pred_ramp) used_fractions[links.departure->host].push_back(pred_fraction);
    if (succ_ramp) used_fractions[links.merge->host].push_back(succ_fraction);

    const auto& dep = g.edges()[links.departure->edge];
    const auto& mer = g.edges()[links.merge->edge];
    out.connections.push_back({dep.source, dep.target, dep.label, links.departure->host, r,
                               pred->fixed ? pred->s_offset : pl.pred_s, start});
    out.connections.push_back({mer.source, mer.target, mer.label, links.merge->host, r,
                               succ->fixed ? succ->s_offset : pl.succ_s, end});
  }

  if (!failures.empty()) throw SynthesisFailed(std::move(failures), std::move(out));
  return out;
}

}  // namespace ixgen
