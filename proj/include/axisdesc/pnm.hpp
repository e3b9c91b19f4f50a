#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace axisdesc {

// 8-bit grayscale raster. PBM input is widened to 0/255 (1-bit = ink = 0).
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, size width*height

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Reads PGM (P2/P5) and PBM (P1/P4). Throws std::runtime_error on malformed
// input or unsupported magic/maxval.
RasterImage read_pnm(const std::string& path);

void write_pgm(const std::string& path, const RasterImage& img);

}  // namespace axisdesc
