#include "ixgen/topology.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

namespace ixgen {

std::string_view to_string(VertexKind kind) { return kind == VertexKind::Road ? "road" : "ramp"; }

std::string_view to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::OutR: return "out-r";
    case EdgeLabel::OutL: return "out-l";
    case EdgeLabel::InR: return "in-r";
    case EdgeLabel::InL: return "in-l";
  }
  return "?";
}

std::optional<EdgeLabel> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "out-r") return EdgeLabel::OutR;
  if (lower == "out-l") return EdgeLabel::OutL;
  if (lower == "in-r") return EdgeLabel::InR;
  if (lower == "in-l") return EdgeLabel::InL;
  return std::nullopt;
}

LabeledDigraph LabeledDigraph::from_parts(std::vector<Vertex> vertices, std::vector<Edge> edges) {
  using K = TopologyError::Kind;
  LabeledDigraph g;
  const std::size_t n = vertices.size();

  std::set<std::string> names;
  for (const auto& v : vertices) {
    if (!names.insert(v.name).second) {
      throw TopologyError(K::DuplicateName, "duplicate vertex name '" + v.name + "'");
    }
  }

  g.out_.assign(n, {});
  g.in_.assign(n, {});
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.source >= n || e.target >= n) {
      throw TopologyError(K::UnknownVertex, "edge references vertex index out of range");
    }
    const auto& src = vertices[e.source];
    const auto& dst = vertices[e.target];
    if (e.source == e.target) {
      throw TopologyError(K::SelfLoop, "self-loop on '" + src.name + "'");
    }
    if (!g.index_.emplace(std::pair{e.source, e.target}, e.label).second) {
      throw TopologyError(K::DuplicateEdge, "duplicate edge (" + src.name + ", " + dst.name + ")");
    }
    if (is_out(e.label) && dst.kind != VertexKind::Ramp) {
      throw TopologyError(K::LabelKindMismatch, "edge (" + src.name + ", " + dst.name + ") has label " +
                                                    std::string(to_string(e.label)) + " but target is a road");
    }
    if (!is_out(e.label) && src.kind != VertexKind::Ramp) {
      throw TopologyError(K::LabelKindMismatch, "edge (" + src.name + ", " + dst.name + ") has label " +
                                                    std::string(to_string(e.label)) + " but source is a road");
    }
    g.out_[e.source].push_back(i);
    g.in_[e.target].push_back(i);
  }

  for (VertexId v = 0; v < n; ++v) {
    if (vertices[v].kind == VertexKind::Ramp && (g.in_[v].empty() || g.out_[v].empty())) {
      throw TopologyError(K::DanglingRamp, "ramp '" + vertices[v].name + "' needs an incoming and an outgoing edge");
    }
  }

  // Weak connectivity via union-find.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& e : edges) {
    auto a = root(e.source), b = root(e.target);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  if (components > 1) {
    throw TopologyError(K::Disconnected, "graph is not weakly connected (" + std::to_string(components) + " components)");
  }

  g.vertices_ = std::move(vertices);
  g.edges_ = std::move(edges);
  return g;
}

std::optional<VertexId> LabeledDigraph::find(std::string_view name) const {
  for (VertexId i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<EdgeLabel> LabeledDigraph::label(VertexId source, VertexId target) const {
  auto it = index_.find({source, target});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<VertexId> LabeledDigraph::vertices_of(VertexKind kind) const {
  std::vector<VertexId> ids;
  for (VertexId i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].kind == kind) ids.push_back(i);
  }
  return ids;
}

LabeledDigraph LabeledDigraph::permuted(const std::vector<VertexId>& perm) const {
  if (perm.size() != vertices_.size()) throw std::invalid_argument("permutation size mismatch");
  std::vector<Vertex> vs(vertices_.size());
  for (VertexId i = 0; i < vertices_.size(); ++i) vs.at(perm[i]) = vertices_[i];
  std::vector<Edge> es;
  es.reserve(edges_.size());
  for (const auto& e : edges_) es.push_back({perm[e.source], perm[e.target], e.label});
  return from_parts(std::move(vs), std::move(es));
}

LabeledDigraph build_graph(const std::vector<std::string>& roads, const std::vector<std::string>& ramps,
                           const std::vector<Connection>& connections) {
  std::vector<Vertex> vertices;
  vertices.reserve(roads.size() + ramps.size());
  for (const auto& r : roads) vertices.push_back({VertexKind::Road, r});
  for (const auto& r : ramps) vertices.push_back({VertexKind::Ramp, r});

  auto lookup = [&](const std::string& name) -> VertexId {
    for (VertexId i = 0; i < vertices.size(); ++i) {
      if (vertices[i].name == name) return i;
    }
    throw TopologyError(TopologyError::Kind::UnknownVertex, "connection names undeclared vertex '" + name + "'");
  };

  std::vector<Edge> edges;
  edges.reserve(connections.size());
  for (const auto& c : connections) edges.push_back({lookup(c.source), lookup(c.target), c.label});
  return LabeledDigraph::from_parts(std::move(vertices), std::move(edges));
}

DegreeSignature degree_signature(const LabeledDigraph& g) {
  DegreeSignature sig;
  sig.reserve(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    VertexSignature s{g.vertex(v).kind, g.in_edges(v).size(), g.out_edges(v).size(), {}, {}};
    for (auto e : g.in_edges(v)) s.in_labels.push_back(g.edges()[e].label);
    for (auto e : g.out_edges(v)) s.out_labels.push_back(g.edges()[e].label);
    std::sort(s.in_labels.begin(), s.in_labels.end());
    std::sort(s.out_labels.begin(), s.out_labels.end());
    sig.push_back(std::move(s));
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace ixgen
