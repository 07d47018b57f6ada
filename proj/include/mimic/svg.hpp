#pragma once

#include <string>

#include "mimic/saliency.hpp"
#include "mimic/shapelets.hpp"

namespace mimic {

/// Grayscale V x T cell grid (darker = more important) with dimension and
/// time axis labels. Output carries no timestamps, so reruns are identical.
std::string svg_heatmap(const ImportanceMap& map);

/// Value polyline over time with label/dimension/support in a <title>.
std::string svg_polyline(const MimicShape& shape);

}  // namespace mimic
