#include "ixgen/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ixgen/opendrive.hpp"

namespace ixgen {

namespace {

std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  if (std::string(buf) == "-0.00") return "0.00";
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string radius_color(double r) {
  // tight loops red through to straight ramps blue
  if (!(r < 1e6)) return "#2c7bb6";
  if (r < 35) return "#d7191c";
  if (r < 50) return "#e8552e";
  if (r < 80) return "#f4a259";
  if (r < 125) return "#d9c84a";
  if (r < 180) return "#a6d96a";
  if (r < 245) return "#5fbf6a";
  return "#1a9641";
}

std::string svg_string(const ConcreteInterchange& ic, const SvgOptions& options) {
  const auto& g = ic.topology();
  double west = 1e300, east = -1e300, south = 1e300, north = -1e300;
  auto grow = [&](const BezierSpline& s) {
    for (const auto& c : s.segments())
      for (const auto& p : c.p) {
        west = std::min(west, p.x), east = std::max(east, p.x);
        south = std::min(south, p.y), north = std::max(north, p.y);
      }
  };
  for (const auto& [v, r] : ic.roads) grow(r.centerline);
  for (const auto& [v, r] : ic.ramps) grow(r.spline);
  if (west > east) west = east = south = north = 0;

  const double margin = 20.0;
  const double k = options.scale;
  auto X = [&](double x) { return fixed((x - west + margin) * k); };
  auto Y = [&](double y) { return fixed((north - y + margin) * k); };
  auto path_d = [&](const BezierSpline& s) {
    std::string d = "M " + X(s.start().x) + " " + Y(s.start().y);
    for (const auto& c : s.segments()) {
      d += " C";
      for (int i = 1; i < 4; ++i) d += " " + X(c.p[static_cast<std::size_t>(i)].x) + " " + Y(c.p[static_cast<std::size_t>(i)].y);
    }
    return d;
  };

  std::ostringstream os;
  const std::string w = fixed((east - west + 2 * margin) * k), h = fixed((north - south + 2 * margin) * k);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " "
     << h << "\">\n";
  os << "  <title>" << escape(ic.id) << "</title>\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
  os << "  <g fill=\"none\" stroke-linecap=\"butt\">\n";
  for (const auto& [v, r] : ic.roads) {
    os << "    <path id=\"road-" << escape(g.vertex(v).name) << "\" d=\"" << path_d(r.centerline)
       << "\" stroke=\"#6b6b6b\" stroke-width=\"" << fixed(r.lane_count * r.lane_width * k) << "\"/>\n";
  }
  for (const auto& [v, r] : ic.ramps) {
    os << "    <path id=\"ramp-" << escape(g.vertex(v).name) << "\" d=\"" << path_d(r.spline) << "\" stroke=\""
       << radius_color(r.achieved.min_radius) << "\" stroke-width=\"" << fixed(r.lane_count * r.lane_width * k) << "\"/>\n";
  }
  os << "  </g>\n";
  if (options.show_labels) {
    os << "  <g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
    auto label = [&](VertexId v, const BezierSpline& s) {
      const Point3 p = s.evaluate(0.5 * static_cast<double>(s.size()));
      os << "    <text x=\"" << X(p.x) << "\" y=\"" << Y(p.y) << "\">" << escape(g.vertex(v).name) << "</text>\n";
    };
    for (const auto& [v, r] : ic.roads) label(v, r.centerline);
    for (const auto& [v, r] : ic.ramps) label(v, r.spline);
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const ConcreteInterchange& interchange, const std::filesystem::path& path, const SvgOptions& options) {
  const std::string text = svg_string(interchange, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExportError(ExportError::Kind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw ExportError(ExportError::Kind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace ixgen
