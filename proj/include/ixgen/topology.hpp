#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace ixgen {

enum class VertexKind { Road, Ramp };

// Out-* marks the ramp that departs from its host (edge target).
// In-* marks the ramp that merges into its host (edge source).
enum class EdgeLabel { OutR, OutL, InR, InL };

std::string_view to_string(VertexKind kind);
std::string_view to_string(EdgeLabel label);

/// Case-insensitive parse of "out-r", "out-l", "in-r", "in-l".
std::optional<EdgeLabel> parse_label(std::string_view text);

inline bool is_out(EdgeLabel l) { return l == EdgeLabel::OutR || l == EdgeLabel::OutL; }
inline bool is_right(EdgeLabel l) { return l == EdgeLabel::OutR || l == EdgeLabel::InR; }

using VertexId = std::size_t;

struct Vertex {
  VertexKind kind;
  std::string name;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  VertexId source;
  VertexId target;
  EdgeLabel label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Connection {
  std::string source;
  std::string target;
  EdgeLabel label;
};

class TopologyError : public std::runtime_error {
 public:
  enum class Kind { DuplicateName, UnknownVertex, SelfLoop, DuplicateEdge, LabelKindMismatch, Disconnected, DanglingRamp };

  TopologyError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/*
  LabeledDigraph: immutable interchange topology.

  Vertices keep declaration order (roads first, then ramps). Edges keep the
  order they were declared in. The only way to obtain an instance is through
  build_graph (or from_parts), both of which validate every invariant.
*/
class LabeledDigraph {
 public:
  LabeledDigraph() = default;

  /// Validates and assembles a graph from already-resolved parts.
  static LabeledDigraph from_parts(std::vector<Vertex> vertices, std::vector<Edge> edges);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& vertex(VertexId id) const { return vertices_.at(id); }

  std::optional<VertexId> find(std::string_view name) const;
  std::optional<EdgeLabel> label(VertexId source, VertexId target) const;

  const std::vector<std::size_t>& out_edges(VertexId v) const { return out_.at(v); }
  const std::vector<std::size_t>& in_edges(VertexId v) const { return in_.at(v); }

  /// Vertex ids of the given kind, in declaration order.
  std::vector<VertexId> vertices_of(VertexKind kind) const;
  std::size_t road_count() const { return vertices_of(VertexKind::Road).size(); }
  std::size_t ramp_count() const { return vertices_of(VertexKind::Ramp).size(); }

  /// Applies a vertex permutation: vertex i of *this becomes vertex perm[i].
  LabeledDigraph permuted(const std::vector<VertexId>& perm) const;

  friend bool operator==(const LabeledDigraph& a, const LabeledDigraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::map<std::pair<VertexId, VertexId>, EdgeLabel> index_;
};

LabeledDigraph build_graph(const std::vector<std::string>& roads, const std::vector<std::string>& ramps,
                           const std::vector<Connection>& connections);

struct VertexSignature {
  VertexKind kind;
  std::size_t in_degree;
  std::size_t out_degree;
  std::vector<EdgeLabel> in_labels;
  std::vector<EdgeLabel> out_labels;

  friend auto operator<=>(const VertexSignature&, const VertexSignature&) = default;
};

/// Sorted multiset of per-vertex signatures; invariant under vertex relabeling.
using DegreeSignature = std::vector<VertexSignature>;

DegreeSignature degree_signature(const LabeledDigraph& g);

struct InterchangeRecord {
  std::string id;
  LabeledDigraph graph;
  std::vector<std::pair<std::string, std::string>> metadata;
};

}  // namespace ixgen
