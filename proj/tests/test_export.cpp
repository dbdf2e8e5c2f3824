#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "ixgen/isomorphism.hpp"
#include "ixgen/manifest.hpp"
#include "ixgen/opendrive.hpp"
#include "ixgen/svg.hpp"
#include "ixgen/synthesis.hpp"

using namespace ixgen;
namespace pt = boost::property_tree;

namespace {

ConcreteInterchange j1_interchange(double radius = 60, double slope = 2, std::uint64_t seed = 5) {
  const auto g = fixtures::j1_ptr();
  InterchangeFeature f{g, {}, {}};
  for (auto v : g->vertices_of(VertexKind::Road)) f.lanes[v] = 4;
  for (auto v : g->vertices_of(VertexKind::Ramp)) f.ramp_geometry[v] = {radius, slope};
  return synthesize_interchange(f, layout_roads(*g, f.lanes, {}, seed), {}, seed, "J1-test", 1);
}

ConcreteInterchange roads_only() {
  auto g = std::make_shared<LabeledDigraph>(build_graph({"R1"}, {}, {}));
  InterchangeFeature f{g, {{0, 3}}, {}};
  return synthesize_interchange(f, layout_roads(*g, f.lanes, {}, 1), {}, 1, "solo");
}

pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

std::size_t count_children(const pt::ptree& node, const std::string& name) {
  std::size_t n = 0;
  for (const auto& [k, v] : node)
    if (k == name) ++n;
  return n;
}

}  // namespace

TEST_SUITE("export") {

TEST_CASE("J1 xodr structure") {
  const auto ic = j1_interchange();
  const auto text = opendrive_string(ic);
  pt::ptree tree;
  REQUIRE_NOTHROW(tree = parse_xml(text));
  const auto& od = tree.get_child("OpenDRIVE");
  CHECK(od.get<int>("header.<xmlattr>.revMajor") == 1);
  CHECK(od.get<int>("header.<xmlattr>.revMinor") == 6);
  CHECK(count_children(od, "road") == 8);
  CHECK(count_children(od, "junction") == 1);

  std::map<std::string, std::string> road_ids;
  for (const auto& [k, road] : od) {
    if (k != "road") continue;
    road_ids[road.get<std::string>("<xmlattr>.id")] = road.get<std::string>("<xmlattr>.name");
    // Contiguous s ranges.
    double s = 0;
    for (const auto& [gk, geom] : road.get_child("planView")) {
      CHECK(geom.get<double>("<xmlattr>.s") == doctest::Approx(s).epsilon(1e-12));
      s += geom.get<double>("<xmlattr>.length");
      CHECK(geom.get<double>("<xmlattr>.length") > 0);
    }
    CHECK(s == doctest::Approx(road.get<double>("<xmlattr>.length")).epsilon(1e-9));
  }
  std::set<std::string> connected;
  for (const auto& [k, c] : od.get_child("junction"))
    if (k == "connection") connected.insert(road_ids.at(c.get<std::string>("<xmlattr>.connectingRoad")));
  for (const char* r : {"r1", "r2", "r3", "r4"}) CHECK(connected.count(r) == 1);
}

TEST_CASE("roads-only xodr") {
  const auto tree = parse_xml(opendrive_string(roads_only()));
  const auto& od = tree.get_child("OpenDRIVE");
  CHECK(count_children(od, "road") == 1);
  CHECK(count_children(od, "junction") == 0);
}

TEST_CASE("round trip within tolerance") {
  const auto ic = j1_interchange(100, 3, 7);
  const auto net = parse_opendrive(opendrive_string(ic));
  CHECK(net.roads.size() == 8);
  CHECK(net.connections.size() == 8);
  CHECK(net.junction_count == 1);
  const auto& g = ic.topology();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& s = ic.centerline(v);
    const auto* r = net.find(g.vertex(v).name);
    REQUIRE(r);
    double h = 0, z = 0;
    for (int i = 0; i < 1000; ++i) {
      const double u = s.size() * i / 999.0;
      const auto a = s.evaluate(u), b = r->evaluate(u);
      h = std::max(h, std::hypot(a.x - b.x, a.y - b.y));
      z = std::max(z, std::abs(a.z - b.z));
    }
    CHECK(h < 1e-6);
    CHECK(z < 0.05);
  }
  const auto back = net.to_interchange();
  CHECK(is_isomorphic(back.topology(), g));
}

TEST_CASE("file round trip and read errors") {
  const auto dir = fixtures::scratch("xodr");
  const auto ic = j1_interchange();
  write_opendrive(ic, dir / "j1.xodr");
  CHECK(read_opendrive(dir / "j1.xodr").roads.size() == 8);
  CHECK_THROWS_AS(read_opendrive(dir / "missing.xodr"), ExportError);
  CHECK_THROWS_AS(write_opendrive(ic, dir / "no" / "such" / "dir.xodr"), ExportError);

  auto kind = [](const std::string& text) {
    try {
      parse_opendrive(text);
    } catch (const ExportError& e) {
      return e.kind();
    }
    FAIL("expected ExportError");
    return ExportError::Kind::Io;
  };
  CHECK(kind("<OpenDRIVE><header") == ExportError::Kind::Parse);
  std::string text = opendrive_string(ic);
  text.insert(text.find("<road "), "<controller id=\"1\"/>\n");
  CHECK(kind(text) == ExportError::Kind::UnsupportedElement);
  std::string arc = opendrive_string(ic);
  const auto at = arc.find("<paramPoly3");
  arc.replace(at, arc.find("/>", at) + 2 - at, "<arc curvature=\"0.01\"/>");
  CHECK(kind(arc) == ExportError::Kind::UnsupportedElement);
}

TEST_CASE("degenerate geometry is rejected") {
  auto ic = roads_only();
  auto& road = ic.roads.begin()->second;
  const Point3 p = road.centerline.start();
  road.centerline = BezierSpline({BezierCurve{{p, p, p, p}}});
  try {
    opendrive_string(ic);
    FAIL("expected GeometryDegenerate");
  } catch (const ExportError& e) {
    CHECK(e.kind() == ExportError::Kind::GeometryDegenerate);
  }
}

TEST_CASE("elevation fit") {
  const BezierSpline s({BezierCurve{{{{0, 0, 0}, {50, 0, 0}, {100, 0, 8}, {150, 0, 8}}}}});
  double err = 1;
  const auto pieces = fit_elevation(s, kElevationTolerance, &err);
  CHECK(!pieces.empty());
  CHECK(err < kElevationTolerance);
  CHECK(pieces.front().s == 0);
  for (std::size_t i = 1; i < pieces.size(); ++i) CHECK(pieces[i].s > pieces[i - 1].s);
}

TEST_CASE("svg") {
  const auto ic = j1_interchange();
  const auto a = svg_string(ic, {true, 0.5});
  const auto tree = parse_xml(a);
  std::size_t paths = 0;
  std::function<void(const pt::ptree&)> walk = [&](const pt::ptree& n) {
    for (const auto& [k, v] : n) {
      if (k == "path") ++paths;
      walk(v);
    }
  };
  walk(tree);
  CHECK(paths == 8);
  CHECK(a == svg_string(ic, {true, 0.5}));
  CHECK(a.find(">r1<") != std::string::npos);
  CHECK(svg_string(ic, {false, 0.5}).find(">r1<") == std::string::npos);

  const auto solo = parse_xml(svg_string(roads_only()));
  paths = 0;
  walk(solo);
  CHECK(paths == 1);

  const auto dir = fixtures::scratch("svg");
  write_svg(ic, dir / "a.svg");
  write_svg(ic, dir / "b.svg");
  std::ifstream fa(dir / "a.svg"), fb(dir / "b.svg");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(radius_color(30) != radius_color(kStraight));
}

TEST_CASE("manifest round trip") {
  ManifestRow a;
  a.id = "class-01-s000";
  a.class_id = 1;
  a.sample = 0;
  a.success = true;
  a.lanes = {{"R1", 3}, {"R2", 5}};
  a.targets = {{"r1", 60, 2, true}, {"r2", kStraight, 3, true}};
  a.achieved = {{"r1", 60.5, 2.01, true}, {"r2", kStraight, 2.95, true}};
  a.generations = 123;
  ManifestRow b = a;
  b.id = "class-01-s001";
  b.sample = 1;
  b.success = false;
  b.achieved[1].fitted = false;
  b.note = "r2: radius 10 over 4 tries";
  ManifestRow c = a;
  c.id = "class-02-s000";
  c.class_id = 2;
  c.success.reset();

  const auto text = serialize_manifest({c, b, a});
  const auto rows = parse_manifest(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].id == a.id);
  CHECK(rows[1].id == b.id);
  CHECK(rows[2].id == c.id);
  CHECK(rows[0].lanes == a.lanes);
  CHECK(std::isinf(rows[0].targets[1].min_radius));
  CHECK(rows[0].achieved[0].min_radius == doctest::Approx(60.5));
  CHECK(rows[1].success == false);
  CHECK(!rows[1].achieved[1].fitted);
  CHECK(rows[1].note == b.note);
  CHECK(!rows[2].success);
  CHECK(serialize_manifest(rows) == text);

  CHECK_THROWS_AS(parse_manifest("id\tclass\n"), ManifestError);
  try {
    parse_manifest(manifest_header() + "\nx\t1\t0\tmaybe\t-\t-\t-\t0\t-\n");
    FAIL("expected ManifestError");
  } catch (const ManifestError& e) {
    CHECK(e.line() == 2);
  }
}

}  // TEST_SUITE
