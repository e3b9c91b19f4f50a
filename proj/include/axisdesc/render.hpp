#pragma once

#include <string>

#include "axisdesc/pipeline.hpp"

namespace axisdesc {

// SVG overlay: silhouette (gray), positive branches red, negative yellow,
// center green, reference axes of the first alternative dark red, position
// vectors blue. Missing stages (no branches, no frames) are simply omitted.
void render_svg(const ExtractResult& result, const std::string& path);

}  // namespace axisdesc
