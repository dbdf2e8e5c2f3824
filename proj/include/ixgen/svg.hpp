#pragma once

#include <filesystem>
#include <string>

#include "ixgen/interchange.hpp"

namespace ixgen {

struct SvgOptions {
  bool show_labels = false;
  double scale = 0.5;  // pixels per meter
};

/// Fill color for a ramp with the given achieved minimum radius.
std::string radius_color(double min_radius);

std::string svg_string(const ConcreteInterchange& interchange, const SvgOptions& options = {});
void write_svg(const ConcreteInterchange& interchange, const std::filesystem::path& path, const SvgOptions& options = {});

}  // namespace ixgen
