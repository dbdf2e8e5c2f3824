#include "ixgen/isomorphism.hpp"

#include <limits>

namespace ixgen {

namespace {

constexpr VertexId kNull = std::numeric_limits<VertexId>::max();

/*
  VF2 state kept as flat arrays. in_/out_ hold the depth at which a vertex
  entered the respective terminal set (0 = not in the set), which lets a
  backtrack restore the sets by depth instead of copying them.
*/
class Vf2State {
 public:
  Vf2State(const LabeledDigraph& g1, const LabeledDigraph& g2)
      : g1_(g1), g2_(g2), n_(g1.vertex_count()),
        core1_(n_, kNull), core2_(n_, kNull),
        in1_(n_, 0), out1_(n_, 0), in2_(n_, 0), out2_(n_, 0) {}

  bool match() {
    if (depth_ == n_) return true;
    auto [use_out, use_in] = terminal_mode();
    VertexId m = pick_target(use_out, use_in);
    for (VertexId n = 0; n < n_; ++n) {
      if (core1_[n] != kNull) continue;
      if (use_out && out1_[n] == 0) continue;
      if (!use_out && use_in && in1_[n] == 0) continue;
      if (!feasible(n, m)) continue;
      add_pair(n, m);
      if (match()) return true;
      remove_pair(n, m);
    }
    return false;
  }

  IsoMapping mapping() const { return core1_; }

 private:
  std::pair<bool, bool> terminal_mode() const {
    bool out1 = false, out2 = false, in1 = false, in2 = false;
    for (VertexId v = 0; v < n_; ++v) {
      if (core1_[v] == kNull) {
        out1 |= out1_[v] != 0;
        in1 |= in1_[v] != 0;
      }
      if (core2_[v] == kNull) {
        out2 |= out2_[v] != 0;
        in2 |= in2_[v] != 0;
      }
    }
    if (out1 && out2) return {true, false};
    if (in1 && in2) return {false, true};
    return {false, false};
  }

  VertexId pick_target(bool use_out, bool use_in) const {
    for (VertexId m = 0; m < n_; ++m) {
      if (core2_[m] != kNull) continue;
      if (use_out && out2_[m] == 0) continue;
      if (use_in && in2_[m] == 0) continue;
      return m;
    }
    return kNull;
  }

  bool feasible(VertexId n, VertexId m) const {
    if (m == kNull) return false;
    if (g1_.vertex(n).kind != g2_.vertex(m).kind) return false;
    if (g1_.out_edges(n).size() != g2_.out_edges(m).size()) return false;
    if (g1_.in_edges(n).size() != g2_.in_edges(m).size()) return false;

    // Edges to/from already-matched vertices must correspond with equal labels.
    int t1_in = 0, t1_out = 0, t2_in = 0, t2_out = 0, new1 = 0, new2 = 0;
    for (auto ei : g1_.out_edges(n)) {
      const Edge& e = g1_.edges()[ei];
      VertexId v = e.target;
      if (core1_[v] != kNull) {
        auto l2 = g2_.label(m, core1_[v]);
        if (!l2 || *l2 != e.label) return false;
      } else {
        t1_in += in1_[v] != 0;
        t1_out += out1_[v] != 0;
        new1 += (in1_[v] == 0 && out1_[v] == 0);
      }
    }
    for (auto ei : g1_.in_edges(n)) {
      const Edge& e = g1_.edges()[ei];
      VertexId v = e.source;
      if (core1_[v] != kNull) {
        auto l2 = g2_.label(core1_[v], m);
        if (!l2 || *l2 != e.label) return false;
      } else {
        t1_in += in1_[v] != 0;
        t1_out += out1_[v] != 0;
        new1 += (in1_[v] == 0 && out1_[v] == 0);
      }
    }
    for (auto ei : g2_.out_edges(m)) {
      VertexId v = g2_.edges()[ei].target;
      if (core2_[v] != kNull) {
        if (!g1_.label(n, core2_[v])) return false;
      } else {
        t2_in += in2_[v] != 0;
        t2_out += out2_[v] != 0;
        new2 += (in2_[v] == 0 && out2_[v] == 0);
      }
    }
    for (auto ei : g2_.in_edges(m)) {
      VertexId v = g2_.edges()[ei].source;
      if (core2_[v] != kNull) {
        if (!g1_.label(core2_[v], n)) return false;
      } else {
        t2_in += in2_[v] != 0;
        t2_out += out2_[v] != 0;
        new2 += (in2_[v] == 0 && out2_[v] == 0);
      }
    }
    return t1_in == t2_in && t1_out == t2_out && new1 == new2;
  }

  void add_pair(VertexId n, VertexId m) {
    ++depth_;
    core1_[n] = m;
    core2_[m] = n;
    auto mark = [this](std::vector<std::size_t>& set, VertexId v) {
      if (set[v] == 0) set[v] = depth_;
    };
    mark(in1_, n);
    mark(out1_, n);
    mark(in2_, m);
    mark(out2_, m);
    for (auto ei : g1_.out_edges(n)) mark(out1_, g1_.edges()[ei].target);
    for (auto ei : g1_.in_edges(n)) mark(in1_, g1_.edges()[ei].source);
    for (auto ei : g2_.out_edges(m)) mark(out2_, g2_.edges()[ei].target);
    for (auto ei : g2_.in_edges(m)) mark(in2_, g2_.edges()[ei].source);
  }

  void remove_pair(VertexId n, VertexId m) {
    for (auto* set : {&in1_, &out1_, &in2_, &out2_}) {
      for (auto& d : *set) {
        if (d == depth_) d = 0;
      }
    }
    core1_[n] = kNull;
    core2_[m] = kNull;
    --depth_;
  }

  const LabeledDigraph& g1_;
  const LabeledDigraph& g2_;
  std::size_t n_;
  std::size_t depth_ = 0;
  std::vector<VertexId> core1_, core2_;
  std::vector<std::size_t> in1_, out1_, in2_, out2_;
};

}  // namespace

std::optional<IsoMapping> is_isomorphic(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return std::nullopt;
  Vf2State state(g1, g2);
  if (!state.match()) return std::nullopt;
  return state.mapping();
}

bool verify_mapping(const LabeledDigraph& g1, const LabeledDigraph& g2, const IsoMapping& mapping) {
  const std::size_t n = g1.vertex_count();
  if (n != g2.vertex_count() || mapping.size() != n || g1.edge_count() != g2.edge_count()) return false;
  std::vector<bool> hit(n, false);
  for (VertexId v = 0; v < n; ++v) {
    if (mapping[v] >= n || hit[mapping[v]]) return false;
    hit[mapping[v]] = true;
    if (g1.vertex(v).kind != g2.vertex(mapping[v]).kind) return false;
  }
  // Equal edge counts plus injectivity make the edge condition an equivalence.
  for (const auto& e : g1.edges()) {
    auto l = g2.label(mapping[e.source], mapping[e.target]);
    if (!l || *l != e.label) return false;
  }
  return true;
}

std::vector<TopologyClass> classify(const std::vector<InterchangeRecord>& corpus) {
  std::vector<TopologyClass> classes;
  std::vector<DegreeSignature> signatures;
  for (const auto& record : corpus) {
    auto sig = degree_signature(record.graph);
    bool placed = false;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (signatures[c] != sig) continue;
      if (is_isomorphic(record.graph, classes[c].representative.graph)) {
        classes[c].members.push_back(record);
        placed = true;
        break;
      }
    }
    if (!placed) {
      TopologyClass cls;
      cls.class_id = static_cast<int>(classes.size()) + 1;
      cls.representative = record;
      cls.members.push_back(record);
      classes.push_back(std::move(cls));
      signatures.push_back(std::move(sig));
    }
  }
  return classes;
}

}  // namespace ixgen
