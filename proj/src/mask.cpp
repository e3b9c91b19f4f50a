#include "axisdesc/mask.hpp"

#include <algorithm>
#include <limits>

#include "axisdesc/pnm.hpp"

namespace axisdesc {

namespace {

// Label 8-connected foreground components; returns the cell list of the
// largest one. Ties go to the component discovered first in row-major order.
std::vector<Cell> largest_component(const std::vector<std::uint8_t>& fg, int w, int h) {
    std::vector<std::int32_t> label(fg.size(), -1);
    std::vector<Cell> best;
    std::vector<Cell> stack;
    std::int32_t next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!fg[i] || label[i] >= 0) continue;
            std::vector<Cell> comp;
            stack.push_back({x, y});
            label[i] = next_label;
            while (!stack.empty()) {
                Cell c = stack.back();
                stack.pop_back();
                comp.push_back(c);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = c.x + dx, ny = c.y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                        if (fg[j] && label[j] < 0) {
                            label[j] = next_label;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            if (comp.size() > best.size()) best.swap(comp);
            ++next_label;
        }
    }
    return best;
}

}  // namespace

ShapeMask normalize_mask(const std::vector<std::uint8_t>& foreground, int width, int height) {
    if (width <= 0 || height <= 0 ||
        foreground.size() != static_cast<std::size_t>(width) * height) {
        throw PipelineError("normalize_mask: raster size mismatch");
    }
    const std::vector<Cell> comp = largest_component(foreground, width, height);
    if (comp.empty()) {
        throw PipelineError("normalize_mask: empty foreground");
    }

    int min_x = std::numeric_limits<int>::max(), min_y = min_x;
    int max_x = std::numeric_limits<int>::min(), max_y = max_x;
    for (const Cell& c : comp) {
        min_x = std::min(min_x, c.x);
        max_x = std::max(max_x, c.x);
        min_y = std::min(min_y, c.y);
        max_y = std::max(max_y, c.y);
    }

    ShapeMask m;
    m.width = (max_x - min_x + 1) + 2 * kMaskMargin;
    m.height = (max_y - min_y + 1) + 2 * kMaskMargin;
    m.offset_x = min_x - kMaskMargin;
    m.offset_y = min_y - kMaskMargin;
    m.inside.assign(static_cast<std::size_t>(m.width) * m.height, 0);
    m.boundary.assign(m.inside.size(), 0);
    for (const Cell& c : comp) {
        m.inside[m.idx(c.x - m.offset_x, c.y - m.offset_y)] = 1;
    }
    m.interior_count = comp.size();

    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.inside[m.idx(x, y)]) continue;
            const bool exposed = !m.is_inside(x - 1, y) || !m.is_inside(x + 1, y) ||
                                 !m.is_inside(x, y - 1) || !m.is_inside(x, y + 1);
            if (exposed) {
                m.boundary[m.idx(x, y)] = 1;
                ++m.boundary_count;
            }
        }
    }
    return m;
}

ShapeMask load_mask(const std::string& path, int threshold) {
    if (threshold < 0 || threshold > 255) {
        throw PipelineError("load_mask: threshold must be in [0,255]");
    }
    RasterImage img;
    try {
        img = read_pnm(path);
    } catch (const std::exception& e) {
        throw PipelineError(e.what());
    }
    std::vector<std::uint8_t> fg(img.pixels.size(), 0);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        fg[i] = img.pixels[i] < threshold ? 1 : 0;
    }
    try {
        return normalize_mask(fg, img.width, img.height);
    } catch (const PipelineError& e) {
        throw PipelineError(path + ": " + e.what());
    }
}

void save_mask_pgm(const ShapeMask& mask, const std::string& path) {
    RasterImage img;
    img.width = mask.width;
    img.height = mask.height;
    img.pixels.assign(mask.inside.size(), 255);
    for (std::size_t i = 0; i < mask.inside.size(); ++i) {
        if (mask.inside[i]) img.pixels[i] = 0;
    }
    write_pgm(path, img);
}

std::vector<Cell> boundary_of(const ShapeMask& mask) {
    std::vector<Cell> cells;
    cells.reserve(mask.boundary_count);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.boundary[mask.idx(x, y)]) cells.push_back({x, y});
        }
    }
    return cells;
}

}  // namespace axisdesc
