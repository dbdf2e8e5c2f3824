#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "ixgen/differential_evolution.hpp"
#include "ixgen/ramp_fit.hpp"
#include "ixgen/synthesis.hpp"
#include "oracles.hpp"

using namespace ixgen;

namespace {

double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> x) { return (1 - x[0]) * (1 - x[0]) + 100 * std::pow(x[1] - x[0] * x[0], 2); }

DEConfig analytic(int generations) {
  DEConfig c;
  c.max_generations = generations;
  c.tolerance = 0;
  c.seed = 42;
  return c;
}

constexpr double kDeg = std::numbers::pi / 180;

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("sphere") {
  const auto r = differential_evolution(sphere, std::vector<Bounds>(4, {-5, 5}), analytic(300));
  CHECK(r.best_value < 1e-8);
  CHECK(r.generations <= 300);
}

TEST_CASE("rosenbrock") {
  const auto r = differential_evolution(rosenbrock, {{-2, 2}, {-2, 2}}, analytic(1000));
  CHECK(std::abs(r.best[0] - 1) < 1e-3);
  CHECK(std::abs(r.best[1] - 1) < 1e-3);
}

TEST_CASE("constant objective runs the full budget") {
  auto cfg = analytic(25);
  const auto r = differential_evolution([](std::span<const double>) { return 7.0; }, {{0, 1}, {3, 4}}, cfg);
  CHECK(r.best_value == 7.0);
  CHECK(r.generations == 25);
  CHECK(r.best[0] >= 0);
  CHECK(r.best[0] <= 1);
  CHECK(r.best[1] >= 3);
  CHECK(r.best[1] <= 4);
}

TEST_CASE("deterministic under a fixed seed") {
  const auto a = differential_evolution(rosenbrock, {{-2, 2}, {-2, 2}}, analytic(50));
  const auto b = differential_evolution(rosenbrock, {{-2, 2}, {-2, 2}}, analytic(50));
  CHECK(a.best == b.best);
  CHECK(a.trajectory == b.trajectory);
}

TEST_CASE("property: best value never increases and stays in bounds") {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    std::vector<Bounds> box;
    for (int d = 0; d < 3; ++d) {
      const double lo = rng.uniform(-10, 0);
      box.push_back({lo, lo + rng.uniform(0.5, 10)});
    }
    auto cfg = analytic(40);
    cfg.seed = rng.next();
    const auto r = differential_evolution(sphere, box, cfg);
    for (std::size_t k = 1; k < r.trajectory.size(); ++k) CHECK(r.trajectory[k] <= r.trajectory[k - 1]);
    for (std::size_t d = 0; d < box.size(); ++d) {
      CHECK(r.best[d] >= box[d].lo);
      CHECK(r.best[d] <= box[d].hi);
    }
  }
}

TEST_CASE("config validation") {
  DEConfig c;
  c.differential_weight = 0;
  CHECK_THROWS(c.validate());
  c = {};
  c.crossover_rate = 1.5;
  CHECK_THROWS(c.validate());
  c = {};
  c.max_generations = -1;
  CHECK_THROWS(c.validate());
  CHECK(DEConfig{}.effective_population(4) == 60);
  CHECK(DEConfig{}.effective_population(100) == 120);
}

TEST_CASE("fit_ramp: 90 degree turn, 150 m, r60, s1") {
  RampFitProblem p;
  p.start = {{0, 0, 0}, 0};
  p.end = {{150 / std::numbers::sqrt2, 150 / std::numbers::sqrt2, 0}, 90 * kDeg};
  p.target_radius = 60;
  p.target_slope = 1;
  const auto r = fit_ramp(p, {});
  CHECK(r.success);
  CHECK(std::abs(r.achieved.min_radius - 60) / 60 < 0.05);
  CHECK(r.achieved.max_abs_slope <= 1.2);
  CHECK(r.spline.start() == p.start.point);
  CHECK((r.spline.end() - p.end.point).norm() < 1e-9);
  // Independent curvature check on the fitted spline.
  CHECK(oracle::sampled_min_radius(r.spline) == doctest::Approx(r.achieved.min_radius).epsilon(0.01));
}

TEST_CASE("fit_ramp: straight 300 m climbing 9 m") {
  RampFitProblem p;
  p.start = {{0, 0, 0}, 0};
  p.end = {{300, 0, 9}, 0};
  p.target_radius = kStraight;
  p.target_slope = 3;
  const auto r = fit_ramp(p, {});
  CHECK(r.success);
  CHECK(r.achieved.min_radius >= 10000);
  CHECK(std::abs(r.achieved.max_abs_slope - 3) <= 0.2);
}

TEST_CASE("fit_ramp: 10 m gap cannot hold a 280 m radius") {
  RampFitProblem p;
  p.start = {{0, 0, 0}, 0};
  p.end = {{7, 7, 0}, 90 * kDeg};
  p.target_radius = 280;
  p.target_slope = 2;
  const auto r = fit_ramp(p, {});
  CHECK(!r.success);
  CHECK(r.penalty.total >= 1);
}

TEST_CASE("fit_ramp: coincident poses") {
  RampFitProblem p;
  p.start = p.end = {{5, 5, 0}, 0};
  CHECK_THROWS_AS(fit_ramp(p, {}), FitError);
}

TEST_CASE("penalty is zero on target and grows off target") {
  CurveMetrics m;
  m.min_radius = 60;
  m.max_abs_slope = 2;
  m.arc_length = 100;
  CHECK(ramp_penalty(m, 60, 2).total == doctest::Approx(0));
  m.min_radius = 60 * 1.04;
  CHECK(ramp_penalty(m, 60, 2).total == doctest::Approx(1).epsilon(1e-9));
  m.min_radius = 60;
  m.max_abs_slope = 2.15;
  CHECK(ramp_penalty(m, 60, 2).total == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("segment counts") {
  CHECK(segment_count_for_turn(45 * kDeg) == 1);
  CHECK(segment_count_for_turn(-90 * kDeg) == 1);
  CHECK(segment_count_for_turn(180 * kDeg) == 2);
  CHECK(segment_count_for_turn(270 * kDeg) == 2);
  CHECK(segment_count_for_turn(330 * kDeg) == 3);
}

TEST_CASE("property: parameterized splines meet both poses") {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    RampFitProblem p;
    p.start = {{rng.uniform(-50, 50), rng.uniform(-50, 50), 0}, rng.uniform(-3, 3)};
    p.end = {{rng.uniform(100, 300), rng.uniform(-200, 200), rng.uniform(0, 8)}, rng.uniform(-3, 3)};
    const RampParameterization par(p);
    std::vector<double> x;
    for (const auto& b : par.bounds()) x.push_back(rng.uniform(b.lo, b.hi));
    const auto s = par.build(x);
    CHECK((s.start() - p.start.point).norm() < 1e-9);
    CHECK((s.end() - p.end.point).norm() < 1e-9);
    CHECK_NOTHROW(s.check_continuity());
    const auto t0 = s.tangent(0), t1 = s.tangent(static_cast<double>(s.size()));
    CHECK(std::abs(std::remainder(std::atan2(t0.y, t0.x) - p.start.heading, 2 * std::numbers::pi)) < 1e-9);
    CHECK(std::abs(std::remainder(std::atan2(t1.y, t1.x) - p.end.heading, 2 * std::numbers::pi)) < 1e-9);
  }
}

TEST_CASE("turn path meets the end pose") {
  const Pose a{{0, 0, 0}, 0}, b{{200, 200, 0}, 90 * kDeg};
  const auto tp = fit_turn_path(a, b, 90 * kDeg, 60);
  CHECK(tp.miss < 1e-6);
  CHECK(tp.radius >= 60);
  const auto end = tp.at(a, tp.length());
  CHECK(end.point.norm_xy() == doctest::Approx(b.point.norm_xy()).epsilon(1e-6));
  CHECK(std::abs(std::remainder(end.heading - b.heading, 2 * std::numbers::pi)) < 1e-9);
}

}  // TEST_SUITE

TEST_SUITE("synthesis") {

namespace {

InterchangeFeature uniform_feature(std::shared_ptr<const LabeledDigraph> g, int lanes, RampTarget t) {
  InterchangeFeature f{g, {}, {}};
  for (auto v : g->vertices_of(VertexKind::Road)) f.lanes[v] = lanes;
  for (auto v : g->vertices_of(VertexKind::Ramp)) f.ramp_geometry[v] = t;
  return f;
}

void check_ramps(const ConcreteInterchange& ic, const FeatureDomains& = {}) {
  for (const auto& [v, r] : ic.ramps) {
    const auto t = ic.feature.ramp_geometry.at(v);
    if (std::isfinite(t.min_radius)) CHECK(std::abs(r.achieved.min_radius - t.min_radius) / t.min_radius <= 0.05);
    CHECK(std::abs(r.achieved.max_abs_slope - t.max_slope) <= 0.2);
    CHECK_NOTHROW(r.spline.check_continuity());
  }
}

}  // namespace

TEST_CASE("J1 at r60 s2 on a cross layout") {
  const auto g = fixtures::j1_ptr();
  const auto f = uniform_feature(g, 4, {60, 2});
  const auto lay = layout_roads(*g, f.lanes, {}, 11);
  REQUIRE(lay.shape == LayoutShape::CrossShape);
  const auto ic = synthesize_interchange(f, lay, {}, 5, "J1", 1);
  CHECK(ic.ramps.size() == 4);
  CHECK(ic.roads.size() == 4);
  CHECK(ic.connections.size() == 8);
  check_ramps(ic);
  // Every ramp end lies on its recorded connection pose.
  for (const auto& c : ic.connections) {
    const auto& s = ic.ramps.at(c.ramp).spline;
    const Point3 end = is_out(c.label) ? s.start() : s.end();
    CHECK((end - c.pose.point).norm() < 1e-9);
  }
}

TEST_CASE("roads only") {
  auto g = std::make_shared<LabeledDigraph>(build_graph({"R1"}, {}, {}));
  const auto f = uniform_feature(g, 3, {60, 2});
  const auto ic = synthesize_interchange(f, layout_roads(*g, f.lanes, {}, 1), {}, 1);
  CHECK(ic.ramps.empty());
  CHECK(ic.roads.size() == 1);
}

TEST_CASE("sharp short loops at r30 s5") {
  const auto g = fixtures::j1_ptr();
  const auto f = uniform_feature(g, 3, {30, 5});
  const auto ic = synthesize_interchange(f, layout_roads(*g, f.lanes, {}, 3), {}, 3);
  check_ramps(ic);
}

TEST_CASE("failure lists the ramps") {
  // A 10 km radius cannot fit inside a 600 m template.
  const auto g = fixtures::j1_ptr();
  const auto f = uniform_feature(g, 3, {10000, 2});
  SynthesisConfig cfg;
  cfg.retry_limit = 1;
  cfg.de.max_generations = 20;
  try {
    synthesize_interchange(f, layout_roads(*g, f.lanes, {}, 3), cfg, 3);
    FAIL("expected SynthesisFailed");
  } catch (const SynthesisFailed& e) {
    CHECK(!e.failures().empty());
    for (const auto& fr : e.failures()) CHECK(!fr.reason.empty());
    CHECK(e.partial().roads.size() == 4);
  }
}

TEST_CASE("a median u-turn fails without fitting") {
  // Left exit to the left side of the opposite carriageway: a 150 m half circle
  // needs about 300 m of sideways room and the two edges are a median apart.
  // The other two ramps keep EB and WB on opposite carriageways.
  auto g = std::make_shared<LabeledDigraph>(build_graph(
      {"EB", "WB", "NB"}, {"r1", "r2", "u"},
      {{"NB", "r1", EdgeLabel::OutR}, {"r1", "EB", EdgeLabel::InR}, {"NB", "r2", EdgeLabel::OutL},
       {"r2", "WB", EdgeLabel::InR}, {"EB", "u", EdgeLabel::OutL}, {"u", "WB", EdgeLabel::InL}}));
  const auto f = uniform_feature(g, 3, {150, 3});
  const auto lay = layout_roads(*g, f.lanes, {}, 1);
  REQUIRE(lay.roads.at(*g->find("EB")).slot != lay.roads.at(*g->find("WB")).slot);
  try {
    synthesize_interchange(f, lay, {}, 1);
    FAIL("expected SynthesisFailed");
  } catch (const SynthesisFailed& e) {
    REQUIRE(e.failures().size() == 1);
    CHECK(e.failures()[0].name == "u");
    CHECK(e.failures()[0].reason.find("u-turn") != std::string::npos);
  }
}

TEST_CASE("same seed, same geometry") {
  const auto g = fixtures::j1_ptr();
  const auto f = uniform_feature(g, 4, {100, 3});
  const auto lay = layout_roads(*g, f.lanes, {}, 2);
  const auto a = synthesize_interchange(f, lay, {}, 77);
  const auto b = synthesize_interchange(f, lay, {}, 77);
  for (const auto& [v, r] : a.ramps) {
    const auto& s = b.ramps.at(v).spline;
    REQUIRE(s.size() == r.spline.size());
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s.segments()[k].p == r.spline.segments()[k].p);
  }
}

TEST_CASE("ramp order puts hosts first") {
  const auto g = fixtures::j1();
  const auto o = ramp_order(g);
  CHECK(o.cyclic.empty());
  REQUIRE(o.order.size() == 4);
  auto pos = [&](const char* n) { return std::find(o.order.begin(), o.order.end(), *g.find(n)) - o.order.begin(); };
  CHECK(pos("r1") < pos("r2"));
}

}  // TEST_SUITE
