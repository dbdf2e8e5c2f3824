/*
  Corpus text format (see docs/corpus-format.md for the grammar).

    # comment
    id: J1
    meta: region = Hangzhou
    roads: R1 R2
    ramps: r1
    connections:
      R1 -> r1 out-r
      r1 -> R2 in-r
    end
*/
#include "ixgen/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ixgen {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty() || s == "->") return false;
  for (char c : s) {
    if (c == '#' || c == ':' || c == '=') return false;
  }
  return true;
}

struct Draft {
  std::string id;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::optional<std::vector<std::string>> roads, ramps;
  std::optional<std::vector<Connection>> connections;
};

InterchangeRecord finish(Draft& d, std::size_t end_line) {
  using K = CorpusError::Kind;
  const char* missing = !d.roads ? "roads" : !d.ramps ? "ramps" : !d.connections ? "connections" : nullptr;
  if (missing) {
    throw CorpusError(K::Schema, "record '" + d.id + "' is missing field '" + missing + "'", end_line);
  }
  try {
    return {d.id, build_graph(*d.roads, *d.ramps, *d.connections), d.metadata};
  } catch (const TopologyError& e) {
    CorpusError err(K::Validation, "record '" + d.id + "': " + e.what(), d.line);
    err.topology_kind = e.kind();
    throw err;
  }
}

}  // namespace

std::vector<InterchangeRecord> parse_corpus_text(const std::string& text) {
  using K = CorpusError::Kind;
  std::vector<InterchangeRecord> records;
  std::set<std::string> ids;
  std::optional<Draft> draft;
  bool in_connections = false;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line == "end") {
      if (!draft) throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": 'end' outside a record", lineno);
      records.push_back(finish(*draft, lineno));
      draft.reset();
      in_connections = false;
      continue;
    }

    auto colon = line.find(':');
    if (colon == std::string::npos || line.find("->") != std::string::npos) {
      if (!draft || !in_connections) {
        throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": expected 'key: value'", lineno);
      }
      auto t = tokens(line);
      if (t.size() != 4 || t[1] != "->" || !valid_name(t[0]) || !valid_name(t[2])) {
        throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": expected 'SOURCE -> TARGET LABEL'", lineno);
      }
      auto label = parse_label(t[3]);
      if (!label) {
        throw CorpusError(K::Schema, "line " + std::to_string(lineno) + ": bad label '" + t[3] + "'", lineno);
      }
      draft->connections->push_back({t[0], t[2], *label});
      continue;
    }

    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    in_connections = false;

    if (key == "id") {
      if (draft) {
        throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": record '" + draft->id + "' not closed with 'end'",
                          lineno);
      }
      if (value.empty() || !valid_name(value) || tokens(value).size() != 1) {
        throw CorpusError(K::Schema, "line " + std::to_string(lineno) + ": id must be a single nonempty token", lineno);
      }
      if (!ids.insert(value).second) {
        throw CorpusError(K::Schema, "line " + std::to_string(lineno) + ": duplicate id '" + value + "'", lineno);
      }
      draft = Draft{value, lineno, {}, {}, {}, {}};
      continue;
    }
    if (!draft) throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": field outside a record", lineno);

    auto set_once = [&](auto& slot, auto v) {
      if (slot) throw CorpusError(K::Schema, "line " + std::to_string(lineno) + ": repeated field '" + key + "'", lineno);
      slot = std::move(v);
    };
    if (key == "meta") {
      auto eq = value.find('=');
      if (eq == std::string::npos) {
        throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": expected 'meta: key = value'", lineno);
      }
      draft->metadata.emplace_back(trim(value.substr(0, eq)), trim(value.substr(eq + 1)));
    } else if (key == "roads" || key == "ramps") {
      auto names = tokens(value);
      for (const auto& n : names) {
        if (!valid_name(n)) throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": bad name '" + n + "'", lineno);
      }
      set_once(key == "roads" ? draft->roads : draft->ramps, names);
    } else if (key == "connections") {
      if (!value.empty()) {
        throw CorpusError(K::Syntax, "line " + std::to_string(lineno) + ": connections are listed on following lines", lineno);
      }
      set_once(draft->connections, std::vector<Connection>{});
      in_connections = true;
    } else {
      throw CorpusError(K::Schema, "line " + std::to_string(lineno) + ": unknown field '" + key + "'", lineno);
    }
  }
  if (draft) throw CorpusError(K::Syntax, "record '" + draft->id + "' not closed with 'end'", lineno);
  return records;
}

std::vector<InterchangeRecord> parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError(CorpusError::Kind::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_corpus_text(buf.str());
}

std::string serialize_corpus(const std::vector<InterchangeRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    const auto& g = r.graph;
    out << "id: " << r.id << '\n';
    for (const auto& [k, v] : r.metadata) out << "meta: " << k << " = " << v << '\n';
    out << "roads:";
    for (auto v : g.vertices_of(VertexKind::Road)) out << ' ' << g.vertex(v).name;
    out << "\nramps:";
    for (auto v : g.vertices_of(VertexKind::Ramp)) out << ' ' << g.vertex(v).name;
    out << "\nconnections:\n";
    for (const auto& e : g.edges()) {
      out << "  " << g.vertex(e.source).name << " -> " << g.vertex(e.target).name << ' ' << to_string(e.label) << '\n';
    }
    out << "end\n\n";
  }
  return out.str();
}

void write_corpus(const std::filesystem::path& path, const std::vector<InterchangeRecord>& records) {
  std::ofstream out(path);
  if (!out) throw CorpusError(CorpusError::Kind::Io, "cannot write " + path.string());
  out << serialize_corpus(records);
}

}  // namespace ixgen
