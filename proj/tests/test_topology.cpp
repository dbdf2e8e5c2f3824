#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "ixgen/topology.hpp"
#include "oracles.hpp"

using namespace ixgen;

TEST_SUITE("topology") {

TEST_CASE("J1 builds with 8 vertices and 8 edges") {
  const auto g = fixtures::j1();
  CHECK(g.vertex_count() == 8);
  CHECK(g.edge_count() == 8);
  CHECK(g.road_count() == 4);
  CHECK(g.ramp_count() == 4);
  // f1(R1, r1) = f1(R2, r3) = f1(R2, r4) = Out-R
  CHECK(g.label(*g.find("R1"), *g.find("r1")) == EdgeLabel::OutR);
  CHECK(g.label(*g.find("R2"), *g.find("r3")) == EdgeLabel::OutR);
  CHECK(g.label(*g.find("R2"), *g.find("r4")) == EdgeLabel::OutR);
  CHECK(g.label(*g.find("r1"), *g.find("r2")) == EdgeLabel::OutL);
  CHECK(!g.label(*g.find("r1"), *g.find("R1")));
}

TEST_CASE("single road with no ramps is a valid graph") {
  const auto g = build_graph({"R1"}, {}, {});
  CHECK(g.vertex_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("construction errors") {
  auto kind_of = [](auto fn) {
    try {
      fn();
    } catch (const TopologyError& e) {
      return e.kind();
    }
    FAIL("no TopologyError");
    return TopologyError::Kind::DuplicateName;
  };
  using K = TopologyError::Kind;
  CHECK(kind_of([] { build_graph({"R1", "R2"}, {"r1"}, {{"R1", "r1", EdgeLabel::InR}, {"r1", "R2", EdgeLabel::InR}}); }) ==
        K::LabelKindMismatch);
  CHECK(kind_of([] { build_graph({"R1", "R2"}, {"r1"}, {{"R1", "r1", EdgeLabel::OutR}, {"r1", "R2", EdgeLabel::OutR}}); }) ==
        K::LabelKindMismatch);
  CHECK(kind_of([] { build_graph({"R1"}, {"r1"}, {{"R1", "rX", EdgeLabel::OutR}}); }) == K::UnknownVertex);
  CHECK(kind_of([] { build_graph({"R1", "R2"}, {}, {}); }) == K::Disconnected);
  CHECK(kind_of([] { build_graph({"R1"}, {"r1"}, {{"R1", "r1", EdgeLabel::OutR}}); }) == K::DanglingRamp);
  CHECK(kind_of([] { build_graph({"R1"}, {"R1"}, {}); }) == K::DuplicateName);
  CHECK(kind_of([] {
          build_graph({"R1", "R2"}, {"r1"},
                      {{"R1", "r1", EdgeLabel::OutR}, {"R1", "r1", EdgeLabel::OutL}, {"r1", "R2", EdgeLabel::InR}});
        }) == K::DuplicateEdge);
  CHECK(kind_of([] {
          build_graph({"R1"}, {"r1"}, {{"R1", "r1", EdgeLabel::OutR}, {"r1", "r1", EdgeLabel::InR}, {"r1", "R1", EdgeLabel::InR}});
        }) == K::SelfLoop);
}

TEST_CASE("label parsing is case-insensitive") {
  CHECK(parse_label("OUT-R") == EdgeLabel::OutR);
  CHECK(parse_label("in-l") == EdgeLabel::InL);
  CHECK(parse_label("In-R") == EdgeLabel::InR);
  CHECK(!parse_label("out-x"));
  CHECK(!parse_label(""));
  for (auto l : {EdgeLabel::OutR, EdgeLabel::OutL, EdgeLabel::InR, EdgeLabel::InL}) CHECK(parse_label(to_string(l)) == l);
}

TEST_CASE("degree signature") {
  const auto g = fixtures::j1();
  Rng rng(7);
  SUBCASE("invariant under permutation") {
    for (int i = 0; i < 20; ++i) CHECK(degree_signature(g) == degree_signature(g.permuted(oracle::random_permutation(rng, 8))));
  }
  SUBCASE("flipped label changes it") {
    const auto r1 = *g.find("R1"), m1 = *g.find("r1");
    const auto it = std::find_if(g.edges().begin(), g.edges().end(),
                                 [&](const Edge& e) { return e.source == r1 && e.target == m1; });
    CHECK(degree_signature(g) != degree_signature(oracle::flip_label(g, it - g.edges().begin())));
  }
  SUBCASE("empty graph") { CHECK(degree_signature(LabeledDigraph{}).empty()); }
}

TEST_CASE("property: random topologies satisfy every invariant") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto g = oracle::random_topology(rng);
    for (const auto& e : g.edges()) {
      CHECK(e.source != e.target);
      if (is_out(e.label)) CHECK(g.vertex(e.target).kind == VertexKind::Ramp);
      else CHECK(g.vertex(e.source).kind == VertexKind::Ramp);
    }
    for (auto r : g.vertices_of(VertexKind::Ramp)) {
      CHECK(!g.in_edges(r).empty());
      CHECK(!g.out_edges(r).empty());
    }
    // Permuting and relabeling back keeps the edge multiset.
    const auto p = oracle::random_permutation(rng, g.vertex_count());
    const auto h = g.permuted(p);
    CHECK(h.edge_count() == g.edge_count());
    for (const auto& e : g.edges()) CHECK(h.label(p[e.source], p[e.target]) == e.label);
  }
}

}  // TEST_SUITE
