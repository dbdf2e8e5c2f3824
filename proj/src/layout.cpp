#include "ixgen/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "ixgen/random.hpp"

namespace ixgen {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

bool on_b_axis(Slot s) { return s == Slot::BPos || s == Slot::BNeg || s == Slot::StemIn || s == Slot::StemOut; }

double slot_heading(Slot s, double beta) {
  switch (s) {
    case Slot::APos: return 0.0;
    case Slot::ANeg: return kPi;
    case Slot::BPos:
    case Slot::StemIn: return beta;
    case Slot::BNeg:
    case Slot::StemOut: return beta + kPi;
  }
  return 0.0;
}

struct RoadRamp {
  VertexId from, to;
  EdgeLabel departure, merge;
};

// Ramps whose departure host and merge host are both roads.
std::vector<RoadRamp> road_to_road_ramps(const LabeledDigraph& g) {
  std::vector<RoadRamp> out;
  for (auto r : g.vertices_of(VertexKind::Ramp)) {
    std::optional<std::pair<VertexId, EdgeLabel>> dep, mer;
    for (auto ei : g.in_edges(r)) {
      const auto& e = g.edges()[ei];
      if (is_out(e.label) && g.vertex(e.source).kind == VertexKind::Road && !dep) dep = {e.source, e.label};
    }
    for (auto ei : g.out_edges(r)) {
      const auto& e = g.edges()[ei];
      if (!is_out(e.label) && g.vertex(e.target).kind == VertexKind::Road && !mer) mer = {e.target, e.label};
    }
    if (dep && mer) out.push_back({dep->first, mer->first, dep->second, mer->second});
  }
  return out;
}

}  // namespace

std::string_view to_string(LayoutShape shape) {
  switch (shape) {
    case LayoutShape::Single: return "single";
    case LayoutShape::TShape: return "t-shape";
    case LayoutShape::CrossShape: return "cross-shape";
  }
  return "?";
}

std::string_view to_string(Slot slot) {
  switch (slot) {
    case Slot::APos: return "A+";
    case Slot::ANeg: return "A-";
    case Slot::BPos: return "B+";
    case Slot::BNeg: return "B-";
    case Slot::StemIn: return "stem-in";
    case Slot::StemOut: return "stem-out";
  }
  return "?";
}

double ramp_turn(double from_heading, double to_heading, EdgeLabel departure, EdgeLabel merge) {
  constexpr double kLoopThreshold = kPi / 6;
  double d = wrap(to_heading - from_heading);
  const bool right = is_right(departure);
  if (std::abs(std::abs(d) - kPi) < 1e-9) d = right ? -kPi : kPi;
  if (right && is_right(merge) && d > kLoopThreshold) d -= 2 * kPi;
  if (!right && !is_right(merge) && d < -kLoopThreshold) d += 2 * kPi;
  return d;
}

RoadLayout layout_roads(const LabeledDigraph& topology, const std::map<VertexId, int>& lanes, const LayoutConfig& config,
                        std::uint64_t seed) {
  const auto roads = topology.vertices_of(VertexKind::Road);
  const std::size_t n = roads.size();
  if (n == 0 || n > 4) {
    throw LayoutError(LayoutError::Kind::UnsupportedRoadCount, "no layout template for " + std::to_string(n) + " roads");
  }
  for (auto r : roads) {
    if (!lanes.count(r)) {
      throw LayoutError(LayoutError::Kind::MissingLanes, "no lane count for road '" + topology.vertex(r).name + "'");
    }
  }

  // Stem direction for a T: a road traffic mostly leaves is the inbound stem.
  auto stem_for = [&](VertexId r) {
    std::size_t diverges = 0, merges = 0;
    for (auto ei : topology.out_edges(r)) diverges += is_out(topology.edges()[ei].label);
    for (auto ei : topology.in_edges(r)) merges += !is_out(topology.edges()[ei].label);
    return diverges >= merges ? Slot::StemIn : Slot::StemOut;
  };

  // Three roads use a stem (T) or, when a stem cannot serve its ramps, a road
  // crossing the other two.
  std::vector<Slot> pool;
  if (n == 3) {
    pool = {Slot::APos, Slot::ANeg, Slot::StemIn, Slot::StemOut, Slot::BPos, Slot::BNeg};
  } else {
    pool = {Slot::APos, Slot::ANeg, Slot::BPos, Slot::BNeg};
  }
  auto is_stem = [](Slot s) { return s == Slot::StemIn || s == Slot::StemOut; };

  auto place = [&](const std::vector<Slot>& assign, double beta, double median_a, double median_b,
                   const std::vector<std::pair<double, double>>& extents) {
    const Point3 axis_b{std::cos(beta), std::sin(beta), 0};
    double widest_a = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!on_b_axis(assign[i])) widest_a = std::max(widest_a, 0.5 * lanes.at(roads[i]) * config.lane_width);
    }
    const double stem_end = median_a / 2 + widest_a + config.stem_gap;
    std::map<VertexId, RoadPlacement> out;
    for (std::size_t i = 0; i < n; ++i) {
      const Slot slot = assign[i];
      RoadPlacement p;
      p.slot = slot;
      p.lane_count = lanes.at(roads[i]);
      p.lane_width = config.lane_width;
      const double h = slot_heading(slot, beta);
      const Point3 dir{std::cos(h), std::sin(h), 0};
      const double z = on_b_axis(slot) ? config.level_clearance : 0.0;
      const auto [far_start, far_end] = extents[i];
      if (slot == Slot::StemIn) {
        p.start = -far_start * axis_b;
        p.end = -stem_end * axis_b;
      } else if (slot == Slot::StemOut) {
        p.start = -stem_end * axis_b;
        p.end = -far_end * axis_b;
      } else {
        const Point3 right{std::sin(h), -std::cos(h), 0};
        const double offset = (on_b_axis(slot) ? median_b : median_a) / 2 + p.half_width();
        p.start = -far_start * dir + offset * right;
        p.end = far_end * dir + offset * right;
      }
      p.start.z = z;
      p.end.z = z;
      out[roads[i]] = p;
    }
    return out;
  };

  // A turn of less than half a circle leaves its host before the point where
  // the two road lines cross and joins the other road after it. A loop does the
  // opposite. Either way both roads need some length on that side.
  constexpr double kReach = 100.0, kUnreachable = 100.0;
  auto reach_cost = [&](const std::map<VertexId, RoadPlacement>& placed, const RoadRamp& rr, double turn) {
    const auto& a = placed.at(rr.from);
    const auto& b = placed.at(rr.to);
    const Point3 da = (a.end - a.start), db = (b.end - b.start);
    const double cross = da.x * db.y - da.y * db.x;
    if (std::abs(cross) < 1e-6 * da.norm_xy() * db.norm_xy()) return 0.0;
    const Point3 w = b.start - a.start;
    const double ua = (w.x * db.y - w.y * db.x) / cross;
    const double ub = (w.x * da.y - w.y * da.x) / cross;
    const double la = da.norm_xy(), lb = db.norm_xy();
    const bool loop = std::abs(turn) > kPi;
    const double a_side = loop ? (1 - ua) * la : ua * la;
    const double b_side = loop ? ub * lb : (1 - ub) * lb;
    return (a_side < kReach ? kUnreachable : 0.0) + (b_side < kReach ? kUnreachable : 0.0);
  };

  // Enumerate injective road -> slot assignments; keep the one with the least total ramp turning.
  const auto ramps = road_to_road_ramps(topology);
  const std::vector<std::pair<double, double>> nominal(n, {config.half_length, config.half_length});
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Slot> best_assign;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    std::vector<Slot> assign(n);
    std::size_t stems = 0, crossing = 0;
    double cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = pool[idx[i]];
      stems += is_stem(assign[i]);
      crossing += assign[i] == Slot::BPos || assign[i] == Slot::BNeg;
      if (is_stem(assign[i]) && assign[i] != stem_for(roads[i])) cost += 1e-3;
    }
    if (stems > 1 || (stems && crossing)) {
      std::reverse(idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end());
      continue;
    }
    const auto placed = place(assign, kPi / 2, config.median, config.median, nominal);
    for (const auto& rr : ramps) {
      const double t = ramp_turn(slot_heading(placed.at(rr.from).slot, kPi / 2), slot_heading(placed.at(rr.to).slot, kPi / 2),
                                 rr.departure, rr.merge);
      cost += std::abs(t) + reach_cost(placed, rr, t);
    }
    if (cost < best_cost - 1e-9) {
      best_cost = cost;
      best_assign = assign;
    }
    // Only the first n positions matter; skip permutations of the tail.
    std::reverse(idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end());
  } while (std::next_permutation(idx.begin(), idx.end()));

  Rng rng(seed);
  const double jitter = config.crossing_jitter_deg * kPi / 180.0;
  const double beta = kPi / 2 + rng.uniform(-jitter, jitter);
  const double median_a = config.median + rng.uniform(-config.median_jitter, config.median_jitter);
  const double median_b = config.median + rng.uniform(-config.median_jitter, config.median_jitter);
  std::vector<std::pair<double, double>> extents;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = config.half_length + rng.uniform(-config.endpoint_jitter, config.endpoint_jitter);
    const double b = config.half_length + rng.uniform(-config.endpoint_jitter, config.endpoint_jitter);
    extents.emplace_back(a, b);
  }

  RoadLayout layout;
  layout.level_clearance = config.level_clearance;
  bool uses_a = false, uses_b = false, uses_stem = false;
  for (auto s : best_assign) {
    (on_b_axis(s) ? uses_b : uses_a) = true;
    uses_stem = uses_stem || is_stem(s);
  }
  layout.shape = uses_stem ? LayoutShape::TShape : (uses_a && uses_b ? LayoutShape::CrossShape : LayoutShape::Single);
  layout.roads = place(best_assign, beta, median_a, median_b, extents);
  return layout;
}

}  // namespace ixgen
