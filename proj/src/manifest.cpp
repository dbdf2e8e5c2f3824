#include "ixgen/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ixgen/sampling.hpp"

namespace ixgen {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string achieved_value(double v) {
  if (std::isinf(v)) return "inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string clean_note(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s.empty() ? "-" : s;
}

double number(const std::string& s, std::size_t line, const std::string& what) {
  try {
    return parse_value(s);
  } catch (const std::exception&) {
    throw ManifestError(line, "bad " + what + " value '" + s + "'");
  }
}

std::vector<RampOutcome> parse_ramps(const std::string& field, std::size_t line, const std::string& what) {
  std::vector<RampOutcome> out;
  if (field.empty() || field == "-") return out;
  for (const auto& item : split(field, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ManifestError(line, "bad " + what + " entry '" + item + "'");
    RampOutcome r;
    r.name = item.substr(0, eq);
    const std::string rest = item.substr(eq + 1);
    if (rest == "-") {
      r.fitted = false;
    } else {
      const auto slash = rest.find('/');
      if (slash == std::string::npos) throw ManifestError(line, "bad " + what + " entry '" + item + "'");
      r.min_radius = number(rest.substr(0, slash), line, what);
      r.max_slope = number(rest.substr(slash + 1), line, what);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::string manifest_header() { return "id\tclass\tsample\tsuccess\tlanes\ttargets\tachieved\tgenerations\tnote"; }

std::string format_manifest_row(const ManifestRow& row) {
  std::string lanes, targets, achieved;
  for (const auto& [name, n] : row.lanes) lanes += (lanes.empty() ? "" : ",") + name + "=" + std::to_string(n);
  for (const auto& t : row.targets) {
    targets += (targets.empty() ? "" : ",") + t.name + "=" + format_value(t.min_radius) + "/" + format_value(t.max_slope);
  }
  for (const auto& a : row.achieved) {
    achieved += (achieved.empty() ? "" : ",") + a.name + "=" +
                (a.fitted ? achieved_value(a.min_radius) + "/" + achieved_value(a.max_slope) : "-");
  }
  std::ostringstream os;
  os << row.id << '\t' << row.class_id << '\t' << row.sample << '\t'
     << (row.success ? (*row.success ? "true" : "false") : "-") << '\t' << (lanes.empty() ? "-" : lanes) << '\t'
     << (targets.empty() ? "-" : targets) << '\t' << (achieved.empty() ? "-" : achieved) << '\t' << row.generations
     << '\t' << clean_note(row.note);
  return os.str();
}

std::string serialize_manifest(std::vector<ManifestRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ManifestRow& a, const ManifestRow& b) {
    return std::tie(a.class_id, a.sample, a.id) < std::tie(b.class_id, b.sample, b.id);
  });
  std::string out = manifest_header() + "\n";
  for (const auto& r : rows) out += format_manifest_row(r) + "\n";
  return out;
}

std::vector<ManifestRow> parse_manifest(const std::string& text) {
  std::vector<ManifestRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != manifest_header()) throw ManifestError(n, "unexpected header");
      header = true;
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != 9) throw ManifestError(n, "expected 9 fields, got " + std::to_string(f.size()));
    ManifestRow r;
    r.id = f[0];
    try {
      r.class_id = std::stoi(f[1]);
      r.sample = std::stoul(f[2]);
      r.generations = std::stol(f[7]);
    } catch (const std::exception&) {
      throw ManifestError(n, "bad integer field");
    }
    if (f[3] == "true") r.success = true;
    else if (f[3] == "false") r.success = false;
    else if (f[3] != "-") throw ManifestError(n, "bad success flag '" + f[3] + "'");
    if (f[4] != "-") {
      for (const auto& item : split(f[4], ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ManifestError(n, "bad lanes entry '" + item + "'");
        try {
          r.lanes.emplace_back(item.substr(0, eq), std::stoi(item.substr(eq + 1)));
        } catch (const std::exception&) {
          throw ManifestError(n, "bad lanes entry '" + item + "'");
        }
      }
    }
    r.targets = parse_ramps(f[5], n, "targets");
    r.achieved = parse_ramps(f[6], n, "achieved");
    r.note = f[8] == "-" ? "" : f[8];
    rows.push_back(std::move(r));
  }
  if (!header) throw ManifestError(n, "missing header");
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(0, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace ixgen
