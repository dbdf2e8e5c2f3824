#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "ixgen/topology.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return IXGEN_DATA_DIR; }

// The two-expressway example with four ramps.
inline ixgen::LabeledDigraph j1() {
  using ixgen::EdgeLabel;
  return ixgen::build_graph({"R1", "R2", "R3", "R4"}, {"r1", "r2", "r3", "r4"},
                            {{"R1", "r1", EdgeLabel::OutR},
                             {"r1", "R3", EdgeLabel::InR},
                             {"r1", "r2", EdgeLabel::OutL},
                             {"r2", "r3", EdgeLabel::InL},
                             {"R2", "r3", EdgeLabel::OutR},
                             {"r3", "R4", EdgeLabel::InR},
                             {"R2", "r4", EdgeLabel::OutR},
                             {"r4", "R3", EdgeLabel::InR}});
}

inline std::shared_ptr<const ixgen::LabeledDigraph> j1_ptr() { return std::make_shared<ixgen::LabeledDigraph>(j1()); }

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::path(IXGEN_SCRATCH_DIR) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
