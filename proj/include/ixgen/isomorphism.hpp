#pragma once

#include <optional>
#include <vector>

#include "ixgen/topology.hpp"

namespace ixgen {

/// Bijection from vertex ids of the first graph to vertex ids of the second.
using IsoMapping = std::vector<VertexId>;

/// VF2 matcher extended with vertex-kind and edge-label compatibility.
/// Returns a witness mapping, or nullopt when the graphs are not isomorphic.
std::optional<IsoMapping> is_isomorphic(const LabeledDigraph& g1, const LabeledDigraph& g2);

/// True when `mapping` is a kind-preserving bijection carrying E1 onto E2 with equal labels.
bool verify_mapping(const LabeledDigraph& g1, const LabeledDigraph& g2, const IsoMapping& mapping);

struct TopologyClass {
  int class_id = 0;
  InterchangeRecord representative;
  std::vector<InterchangeRecord> members;
};

/// Partitions a corpus into topology-equivalence classes, ids in order of first appearance.
std::vector<TopologyClass> classify(const std::vector<InterchangeRecord>& corpus);

}  // namespace ixgen
