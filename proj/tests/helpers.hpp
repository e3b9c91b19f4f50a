#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "axisdesc/corpus.hpp"
#include "axisdesc/mask.hpp"
#include "axisdesc/pnm.hpp"

namespace testutil {

using namespace axisdesc;

inline ShapeMask rect_mask(int w, int h) {
    std::vector<std::uint8_t> fg(static_cast<std::size_t>(w) * h, 1);
    return normalize_mask(fg, w, h);
}

// Interior height 2a+1 rows (Dirichlet rows at +-a from the midline), given
// interior length.
inline ShapeMask strip_mask(int length, int half_a) {
    return rect_mask(length, 2 * half_a + 1);
}

inline ShapeMask disk_mask(int radius) {
    const int n = 2 * radius + 3;
    std::vector<std::uint8_t> fg(static_cast<std::size_t>(n) * n, 0);
    const double c = (n - 1) / 2.0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double dx = x - c, dy = y - c;
            if (dx * dx + dy * dy <= radius * static_cast<double>(radius)) {
                fg[static_cast<std::size_t>(y) * n + x] = 1;
            }
        }
    }
    return normalize_mask(fg, n, n);
}

inline ShapeMask mask_of(const RasterImage& img, int threshold = 128) {
    std::vector<std::uint8_t> fg(img.pixels.size(), 0);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) fg[i] = img.pixels[i] < threshold;
    return normalize_mask(fg, img.width, img.height);
}

inline ShapeMask family_mask(const std::string& family, const ShapePose& pose = {}) {
    return mask_of(make_shape_image(family, pose));
}

// Quarter-turn counter-clockwise in raster terms: (x, y) -> (y, w-1-x).
inline ShapeMask rot90_mask(const ShapeMask& m) {
    std::vector<std::uint8_t> fg(m.inside.size(), 0);
    const int w = m.width, h = m.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (m.inside[m.idx(x, y)]) {
                fg[static_cast<std::size_t>(w - 1 - x) * h + y] = 1;
            }
        }
    }
    return normalize_mask(fg, h, w);
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("axisdesc_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Deterministic PRNG for test data (independent of std distributions).
struct TestRng {
    std::uint64_t s;
    explicit TestRng(std::uint64_t seed) : s(seed * 2654435761u + 1) {}
    double uniform() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    }
    int below(int n) { return static_cast<int>(uniform() * n) % n; }
};

}  // namespace testutil
