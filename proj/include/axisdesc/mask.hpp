#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace axisdesc {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

// Errors raised anywhere in the extraction pipeline. The CLI maps these to
// exit code 2 (3 for TopologyError).
class PipelineError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class TopologyError : public PipelineError {
  public:
    using PipelineError::PipelineError;
};

// Binary shape raster. Invariants established by normalize_mask():
//  - interior nonempty and 8-connected (one shape per mask),
//  - boundary cells are interior cells with an exterior 4-neighbour,
//  - >= kMaskMargin exterior cells on every side.
struct ShapeMask {
    int width = 0;
    int height = 0;
    int offset_x = 0;  // source-image coordinate of raster (0,0)
    int offset_y = 0;
    std::vector<std::uint8_t> inside;    // 1 = interior
    std::vector<std::uint8_t> boundary;  // 1 = boundary (subset of inside)
    std::size_t interior_count = 0;
    std::size_t boundary_count = 0;

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool is_inside(int x, int y) const { return in_bounds(x, y) && inside[idx(x, y)] != 0; }
    bool is_boundary(int x, int y) const { return in_bounds(x, y) && boundary[idx(x, y)] != 0; }
};

inline constexpr int kMaskMargin = 4;

// Keeps the largest 8-connected foreground component, crops to its bounding
// box and pads with kMaskMargin exterior cells. Throws PipelineError when the
// foreground is empty.
ShapeMask normalize_mask(const std::vector<std::uint8_t>& foreground, int width, int height);

// Foreground = pixel < threshold for PGM (dark shape on light ground); PBM ink
// bits arrive as value 0 and are always foreground.
ShapeMask load_mask(const std::string& path, int threshold = 128);

// Writes the padded raster as a PGM (foreground 0, background 255). Reloading
// the file yields an identical interior set.
void save_mask_pgm(const ShapeMask& mask, const std::string& path);

// All boundary cells exactly once, in row-major order.
std::vector<Cell> boundary_of(const ShapeMask& mask);

}  // namespace axisdesc
