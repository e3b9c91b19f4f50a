#include "axisdesc/pnm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace axisdesc {

namespace {

// Skips whitespace and '#' comments between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    int ch = in.peek();
    while (ch != EOF) {
        if (std::isspace(ch)) {
            in.get();
        } else if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            break;
        }
        ch = in.peek();
    }
    int value = -1;
    if (!(in >> value) || value < 0) {
        throw std::runtime_error(path + ": malformed PNM header");
    }
    return value;
}

}  // namespace

RasterImage read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path + ": cannot open file");
    }
    char p = 0, kind = 0;
    in.get(p);
    in.get(kind);
    if (p != 'P' || (kind != '1' && kind != '2' && kind != '4' && kind != '5')) {
        throw std::runtime_error(path + ": unsupported format (need P1/P2/P4/P5)");
    }

    RasterImage img;
    img.width = next_header_int(in, path);
    img.height = next_header_int(in, path);
    if (img.width <= 0 || img.height <= 0 || img.width > 1 << 15 || img.height > 1 << 15) {
        throw std::runtime_error(path + ": bad raster dimensions");
    }
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);

    if (kind == '2' || kind == '5') {
        int maxval = next_header_int(in, path);
        if (maxval <= 0 || maxval > 255) {
            throw std::runtime_error(path + ": only 8-bit PGM supported");
        }
        if (kind == '2') {
            for (std::size_t i = 0; i < n; ++i) {
                img.pixels[i] = static_cast<std::uint8_t>(next_header_int(in, path));
            }
        } else {
            in.get();  // single whitespace after maxval
            in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(n));
            if (in.gcount() != static_cast<std::streamsize>(n)) {
                throw std::runtime_error(path + ": truncated P5 payload");
            }
        }
    } else if (kind == '1') {
        // P1 bits may be packed without separators.
        std::size_t i = 0;
        int ch;
        while (i < n && (ch = in.get()) != EOF) {
            if (ch == '#') {
                std::string line;
                std::getline(in, line);
            } else if (ch == '0' || ch == '1') {
                img.pixels[i++] = ch == '1' ? 0 : 255;  // 1-bit = ink = dark
            } else if (!std::isspace(ch)) {
                throw std::runtime_error(path + ": P1 pixel out of range");
            }
        }
        if (i != n) throw std::runtime_error(path + ": truncated P1 payload");
    } else {  // P4
        in.get();
        const int row_bytes = (img.width + 7) / 8;
        std::vector<std::uint8_t> row(static_cast<std::size_t>(row_bytes));
        for (int y = 0; y < img.height; ++y) {
            in.read(reinterpret_cast<char*>(row.data()), row_bytes);
            if (in.gcount() != row_bytes) {
                throw std::runtime_error(path + ": truncated P4 payload");
            }
            for (int x = 0; x < img.width; ++x) {
                const int bit = (row[x >> 3] >> (7 - (x & 7))) & 1;
                img.pixels[static_cast<std::size_t>(y) * img.width + x] = bit ? 0 : 255;
            }
        }
    }
    return img;
}

void write_pgm(const std::string& path, const RasterImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(path + ": cannot open for writing");
    }
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) {
        throw std::runtime_error(path + ": write failed");
    }
}

}  // namespace axisdesc
