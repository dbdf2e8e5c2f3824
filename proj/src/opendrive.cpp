#include "ixgen/opendrive.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace ixgen {

namespace {

namespace pt = boost::property_tree;

std::string num(double v) {
  if (v == 0) return "0";
  std::array<char, 40> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), end);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Solves the 4x4 normal equations of a cubic least-squares fit.
std::array<double, 4> cubic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double m[4][5] = {};
  for (std::size_t k = 0; k < x.size(); ++k) {
    double pw[7] = {1};
    for (int i = 1; i < 7; ++i) pw[i] = pw[i - 1] * x[k];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) m[i][j] += pw[i + j];
      m[i][4] += pw[i] * y[k];
    }
  }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    for (int j = 0; j < 5; ++j) std::swap(m[c][j], m[piv][j]);
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int j = c; j < 5; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return {m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2], m[3][4] / m[3][3]};
}

struct Piece {
  ElevationRecord record;
  double error;
};

Piece fit_piece(const BezierCurve& c, double seg_s, double t0, double t1) {
  constexpr int kFit = 33, kCheck = 129;
  const double s0 = seg_s + plan_length(c, 0.0, t0);
  const double len = plan_length(c, t0, t1);
  auto sample = [&](double t) { return std::pair{seg_s + plan_length(c, 0.0, t), bezier_point(c, t).z}; };
  std::vector<double> xs, zs;
  for (int i = 0; i < kFit; ++i) {
    auto [s, z] = sample(t0 + (t1 - t0) * i / (kFit - 1));
    xs.push_back(len > 0 ? (s - s0) / len : 0.0);
    zs.push_back(z);
  }
  const auto k = cubic_fit(xs, zs);
  Piece p;
  const double L = len > 0 ? len : 1.0;
  p.record = {s0, k[0], k[1] / L, k[2] / (L * L), k[3] / (L * L * L)};
  p.error = 0;
  for (int i = 0; i < kCheck; ++i) {
    auto [s, z] = sample(t0 + (t1 - t0) * i / (kCheck - 1));
    p.error = std::max(p.error, std::abs(p.record.z(s) - z));
  }
  return p;
}

void fit_range(const BezierCurve& c, double seg_s, double t0, double t1, double tolerance, int depth,
               std::vector<ElevationRecord>& out, double& worst) {
  Piece p = fit_piece(c, seg_s, t0, t1);
  // Keep a margin below the tolerance for points between check samples.
  if (p.error > 0.8 * tolerance && depth < 16) {
    const double tm = 0.5 * (t0 + t1);
    fit_range(c, seg_s, t0, tm, tolerance, depth + 1, out, worst);
    fit_range(c, seg_s, tm, t1, tolerance, depth + 1, out, worst);
    return;
  }
  worst = std::max(worst, p.error);
  out.push_back(p.record);
}

struct RoadEntry {
  int id;
  VertexId vertex;
  std::string name;
  bool ramp;
  const BezierSpline* spline;
  int lanes;
  double width;
};

double attr_double(const pt::ptree& node, const std::string& key) {
  auto v = node.get_optional<std::string>("<xmlattr>." + key);
  if (!v) throw ExportError(ExportError::Kind::UnsupportedElement, "missing attribute '" + key + "'");
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    throw ExportError(ExportError::Kind::Parse, "bad number '" + *v + "' for attribute '" + key + "'");
  }
}

int attr_int(const pt::ptree& node, const std::string& key) { return static_cast<int>(attr_double(node, key)); }

void only(const pt::ptree& node, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [tag, child] : node) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return tag == a; })) {
      throw ExportError(ExportError::Kind::UnsupportedElement, "unsupported element <" + tag + "> in " + where);
    }
  }
}

}  // namespace

std::vector<ElevationRecord> fit_elevation(const BezierSpline& spline, double tolerance, double* max_error) {
  std::vector<ElevationRecord> out;
  double worst = 0, s = 0;
  for (const auto& c : spline.segments()) {
    fit_range(c, s, 0.0, 1.0, tolerance, 0, out, worst);
    s += plan_length(c);
  }
  if (max_error) *max_error = worst;
  return out;
}

double XodrRoad::elevation_at(double s) const {
  if (elevation.empty()) return 0;
  auto it = std::upper_bound(elevation.begin(), elevation.end(), s,
                             [](double v, const ElevationRecord& r) { return v < r.s; });
  if (it != elevation.begin()) --it;
  return it->z(s);
}

Point3 XodrRoad::evaluate(double u) const {
  Point3 p = plan.evaluate(u);
  const auto i = std::min(static_cast<std::size_t>(u), plan.size() - 1);
  const double s = segment_s[i] + ixgen::plan_length(plan.segments()[i], 0.0, u - static_cast<double>(i));
  p.z = elevation_at(s);
  return p;
}

const XodrRoad* XodrNetwork::find(const std::string& n) const {
  for (const auto& r : roads)
    if (r.name == n) return &r;
  return nullptr;
}

std::string opendrive_string(const ConcreteInterchange& ic) {
  const auto& g = ic.topology();
  std::vector<RoadEntry> entries;
  std::map<VertexId, int> road_id;
  int next = 1;
  for (auto v : g.vertices_of(VertexKind::Road)) {
    const auto& r = ic.roads.at(v);
    entries.push_back({next, v, g.vertex(v).name, false, &r.centerline, r.lane_count, r.lane_width});
    road_id[v] = next++;
  }
  for (auto v : g.vertices_of(VertexKind::Ramp)) {
    auto it = ic.ramps.find(v);
    if (it == ic.ramps.end()) continue;
    entries.push_back({next, v, g.vertex(v).name, true, &it->second.spline, it->second.lane_count, it->second.lane_width});
    road_id[v] = next++;
  }

  double west = 1e300, east = -1e300, south = 1e300, north = -1e300;
  for (const auto& e : entries) {
    for (const auto& c : e.spline->segments()) {
      for (const auto& p : c.p) {
        west = std::min(west, p.x), east = std::max(east, p.x);
        south = std::min(south, p.y), north = std::max(north, p.y);
      }
    }
  }
  if (entries.empty()) west = east = south = north = 0;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<OpenDRIVE>\n";
  os << "  <header revMajor=\"1\" revMinor=\"6\" name=\"" << escape(ic.id) << "\" version=\"1\" north=\"" << num(north)
     << "\" south=\"" << num(south) << "\" east=\"" << num(east) << "\" west=\"" << num(west) << "\" vendor=\"ixgen\"/>\n";

  for (const auto& e : entries) {
    const auto& segs = e.spline->segments();
    if (segs.empty()) throw ExportError(ExportError::Kind::GeometryDegenerate, "road '" + e.name + "' has no geometry");
    std::vector<double> lengths;
    double total = 0;
    for (const auto& c : segs) {
      const double l = plan_length(c);
      if (!(l > 1e-9)) {
        throw ExportError(ExportError::Kind::GeometryDegenerate, "zero-length segment on '" + e.name + "'");
      }
      lengths.push_back(l);
      total += l;
    }
    os << "  <road name=\"" << escape(e.name) << "\" length=\"" << num(total) << "\" id=\"" << e.id << "\" junction=\""
       << (e.ramp ? kJunctionId : -1) << "\">\n";
    os << "    <planView>\n";
    double s = 0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const auto m = segs[k].monomial();
      if (std::hypot(m[1].x, m[1].y) < 1e-12) {
        throw ExportError(ExportError::Kind::GeometryDegenerate, "zero start tangent on '" + e.name + "'");
      }
      const double hdg = std::atan2(m[1].y, m[1].x);
      const double ch = std::cos(hdg), sh = std::sin(hdg);
      auto u = [&](const Point3& q) { return ch * q.x + sh * q.y; };
      auto v = [&](const Point3& q) { return -sh * q.x + ch * q.y; };
      os << "      <geometry s=\"" << num(s) << "\" x=\"" << num(m[0].x) << "\" y=\"" << num(m[0].y) << "\" hdg=\""
         << num(hdg) << "\" length=\"" << num(lengths[k]) << "\">\n";
      os << "        <paramPoly3 aU=\"0\" bU=\"" << num(u(m[1])) << "\" cU=\"" << num(u(m[2])) << "\" dU=\"" << num(u(m[3]))
         << "\" aV=\"0\" bV=\"" << num(v(m[1])) << "\" cV=\"" << num(v(m[2])) << "\" dV=\"" << num(v(m[3]))
         << "\" pRange=\"normalized\"/>\n";
      os << "      </geometry>\n";
      s += lengths[k];
    }
    os << "    </planView>\n";
    double max_error = 0;
    const auto elevation = fit_elevation(*e.spline, kElevationTolerance, &max_error);
    os << "    <elevationProfile>\n";
    os << "      <!-- elevation max fit error: " << num(max_error) << " m -->\n";
    for (const auto& r : elevation) {
      os << "      <elevation s=\"" << num(r.s) << "\" a=\"" << num(r.a) << "\" b=\"" << num(r.b) << "\" c=\"" << num(r.c)
         << "\" d=\"" << num(r.d) << "\"/>\n";
    }
    os << "    </elevationProfile>\n";
    os << "    <lanes>\n";
    os << "      <laneOffset s=\"0\" a=\"" << num(0.5 * e.lanes * e.width) << "\" b=\"0\" c=\"0\" d=\"0\"/>\n";
    os << "      <laneSection s=\"0\">\n";
    os << "        <center>\n          <lane id=\"0\" type=\"none\" level=\"false\"/>\n        </center>\n";
    os << "        <right>\n";
    for (int l = 1; l <= e.lanes; ++l) {
      os << "          <lane id=\"" << -l << "\" type=\"driving\" level=\"false\">\n";
      os << "            <width sOffset=\"0\" a=\"" << num(e.width) << "\" b=\"0\" c=\"0\" d=\"0\"/>\n";
      os << "          </lane>\n";
    }
    os << "        </right>\n";
    os << "      </laneSection>\n";
    os << "    </lanes>\n";
    os << "  </road>\n";
  }

  if (!ic.connections.empty()) {
    os << "  <junction id=\"" << kJunctionId << "\" name=\"" << escape(ic.id) << "\">\n";
    int cid = 0;
    for (const auto& c : ic.connections) {
      os << "    <connection id=\"" << cid++ << "\" incomingRoad=\"" << road_id.at(c.source) << "\" connectingRoad=\""
         << road_id.at(c.target) << "\" contactPoint=\"" << (is_out(c.label) ? "start" : "end") << "\">\n";
      os << "      <userData code=\"label\" value=\"" << to_string(c.label) << "\"/>\n";
      os << "      <userData code=\"hostS\" value=\"" << num(c.host_s) << "\"/>\n";
      os << "    </connection>\n";
    }
    os << "  </junction>\n";
  }
  os << "</OpenDRIVE>\n";
  return os.str();
}

void write_opendrive(const ConcreteInterchange& interchange, const std::filesystem::path& path) {
  const std::string text = opendrive_string(interchange);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExportError(ExportError::Kind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw ExportError(ExportError::Kind::Io, "write failed for '" + path.string() + "'");
}

XodrNetwork parse_opendrive(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ExportError(ExportError::Kind::Parse, std::string("XML parse error: ") + e.what());
  }
  auto root = tree.get_child_optional("OpenDRIVE");
  if (!root || tree.size() != 1) throw ExportError(ExportError::Kind::UnsupportedElement, "missing <OpenDRIVE> root");
  only(*root, {"header", "road", "junction"}, "<OpenDRIVE>");

  XodrNetwork net;
  net.name = root->get("header.<xmlattr>.name", "");
  std::map<int, std::size_t> by_id;
  for (const auto& [tag, node] : *root) {
    if (tag == "junction") {
      ++net.junction_count;
      only(node, {"connection"}, "<junction>");
      for (const auto& [ctag, conn] : node) {
        if (ctag != "connection") continue;
        only(conn, {"userData"}, "<connection>");
        XodrConnection c;
        c.source = attr_int(conn, "incomingRoad");
        c.target = attr_int(conn, "connectingRoad");
        bool have_label = false;
        for (const auto& [utag, ud] : conn) {
          if (utag != "userData") continue;
          const auto code = ud.get("<xmlattr>.code", "");
          if (code == "label") {
            auto l = parse_label(ud.get("<xmlattr>.value", ""));
            if (!l) throw ExportError(ExportError::Kind::Parse, "bad connection label");
            c.label = *l;
            have_label = true;
          } else if (code == "hostS") {
            c.host_s = attr_double(ud, "value");
          }
        }
        if (!have_label) throw ExportError(ExportError::Kind::UnsupportedElement, "connection without label userData");
        net.connections.push_back(c);
      }
      continue;
    }
    if (tag != "road") continue;
    only(node, {"planView", "elevationProfile", "lanes"}, "<road>");
    XodrRoad road;
    road.id = attr_int(node, "id");
    road.name = node.get("<xmlattr>.name", "");
    road.length = attr_double(node, "length");
    road.ramp = node.get("<xmlattr>.junction", "-1") != "-1";

    std::vector<BezierCurve> curves;
    const auto& plan = node.get_child("planView", pt::ptree());
    only(plan, {"geometry"}, "<planView>");
    for (const auto& [gtag, geom] : plan) {
      if (gtag != "geometry") continue;
      only(geom, {"paramPoly3"}, "<geometry>");
      auto poly = geom.get_child_optional("paramPoly3");
      if (!poly) throw ExportError(ExportError::Kind::UnsupportedElement, "geometry without <paramPoly3>");
      if (poly->get("<xmlattr>.pRange", "") != "normalized") {
        throw ExportError(ExportError::Kind::UnsupportedElement, "paramPoly3 pRange must be normalized");
      }
      const double x = attr_double(geom, "x"), y = attr_double(geom, "y"), hdg = attr_double(geom, "hdg");
      const double ch = std::cos(hdg), sh = std::sin(hdg);
      std::array<Point3, 4> mono;
      const char* names[4][2] = {{"aU", "aV"}, {"bU", "bV"}, {"cU", "cV"}, {"dU", "dV"}};
      for (int i = 0; i < 4; ++i) {
        const double u = attr_double(*poly, names[i][0]), v = attr_double(*poly, names[i][1]);
        mono[i] = {ch * u - sh * v, sh * u + ch * v, 0};
      }
      mono[0] = mono[0] + Point3{x, y, 0};
      BezierCurve c;
      c.p[0] = mono[0];
      c.p[1] = mono[0] + (1.0 / 3.0) * mono[1];
      c.p[2] = mono[0] + (2.0 / 3.0) * mono[1] + (1.0 / 3.0) * mono[2];
      c.p[3] = mono[0] + mono[1] + mono[2] + mono[3];
      road.segment_s.push_back(attr_double(geom, "s"));
      road.segment_length.push_back(attr_double(geom, "length"));
      curves.push_back(c);
    }
    if (curves.empty()) throw ExportError(ExportError::Kind::UnsupportedElement, "road without geometry");
    // The next record's origin is exact; snap the reconstructed end onto it.
    for (std::size_t k = 0; k + 1 < curves.size(); ++k) curves[k].p[3] = curves[k + 1].p[0];
    road.plan = BezierSpline(std::move(curves));

    if (auto elev = node.get_child_optional("elevationProfile")) {
      only(*elev, {"elevation"}, "<elevationProfile>");
      for (const auto& [etag, e] : *elev) {
        if (etag != "elevation") continue;
        road.elevation.push_back(
            {attr_double(e, "s"), attr_double(e, "a"), attr_double(e, "b"), attr_double(e, "c"), attr_double(e, "d")});
      }
    }
    if (auto lanes = node.get_child_optional("lanes")) {
      only(*lanes, {"laneOffset", "laneSection"}, "<lanes>");
      const auto& section = lanes->get_child("laneSection", pt::ptree());
      only(section, {"left", "center", "right"}, "<laneSection>");
      if (section.get_child_optional("left")) {
        throw ExportError(ExportError::Kind::UnsupportedElement, "left lanes are outside the supported subset");
      }
      for (const auto& [ltag, lane] : section.get_child("right", pt::ptree())) {
        if (ltag != "lane") continue;
        ++road.lane_count;
        road.lane_width = lane.get<double>("width.<xmlattr>.a", 0.0);
      }
    }
    by_id[road.id] = net.roads.size();
    net.roads.push_back(std::move(road));
  }
  for (const auto& c : net.connections) {
    if (!by_id.count(c.source) || !by_id.count(c.target)) {
      throw ExportError(ExportError::Kind::Parse, "connection references unknown road");
    }
  }
  return net;
}

XodrNetwork read_opendrive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExportError(ExportError::Kind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_opendrive(buf.str());
}

ConcreteInterchange XodrNetwork::to_interchange() const {
  std::vector<std::string> road_names, ramp_names;
  std::map<int, std::string> name_of;
  for (const auto& r : roads) {
    (r.ramp ? ramp_names : road_names).push_back(r.name);
    name_of[r.id] = r.name;
  }
  std::vector<Connection> conns;
  for (const auto& c : connections) conns.push_back({name_of.at(c.source), name_of.at(c.target), c.label});
  auto g = std::make_shared<LabeledDigraph>(build_graph(road_names, ramp_names, conns));

  ConcreteInterchange ic;
  ic.id = name;
  ic.feature.topology = g;
  for (const auto& r : roads) {
    const VertexId v = *g->find(r.name);
    std::vector<BezierCurve> curves = r.plan.segments();
    for (std::size_t k = 0; k < curves.size(); ++k) {
      for (int i = 0; i < 4; ++i) {
        const double s = r.segment_s[k] + ixgen::plan_length(r.plan.segments()[k], 0.0, i / 3.0);
        curves[k].p[static_cast<std::size_t>(i)].z = r.elevation_at(s);
      }
    }
    BezierSpline spline(std::move(curves));
    if (r.ramp) {
      RampGeometry geom;
      geom.spline = spline;
      geom.lane_count = r.lane_count;
      geom.lane_width = r.lane_width;
      try {
        geom.achieved = metrics(geom.spline, kDefaultSamplesPerSegment, false);
      } catch (const GeometryError&) {
      }
      ic.ramps[v] = std::move(geom);
    } else {
      ic.roads[v] = {spline, r.lane_count, r.lane_width};
      ic.feature.lanes[v] = r.lane_count;
    }
  }
  for (const auto& c : connections) {
    const VertexId s = *g->find(name_of.at(c.source));
    const VertexId t = *g->find(name_of.at(c.target));
    ConnectionRecord rec{s, t, c.label, is_out(c.label) ? s : t, is_out(c.label) ? t : s, c.host_s, {}};
    ic.connections.push_back(rec);
  }
  return ic;
}

}  // namespace ixgen
