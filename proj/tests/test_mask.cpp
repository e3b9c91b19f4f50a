#include <doctest.h>

#include <fstream>

#include "axisdesc/mask.hpp"
#include "axisdesc/pnm.hpp"
#include "helpers.hpp"

using namespace axisdesc;
using namespace testutil;

TEST_CASE("single center pixel is the smallest valid mask") {
    std::vector<std::uint8_t> fg(9, 0);
    fg[4] = 1;  // center of a 3x3 raster
    const ShapeMask m = normalize_mask(fg, 3, 3);
    CHECK(m.interior_count == 1);
    CHECK(m.boundary_count == 1);
    CHECK(m.width == 1 + 2 * kMaskMargin);
    CHECK(m.height == 1 + 2 * kMaskMargin);
    const auto b = boundary_of(m);
    REQUIRE(b.size() == 1);
    CHECK(b[0] == Cell{kMaskMargin, kMaskMargin});
}

TEST_CASE("solid 64x64 square: interior and boundary counts") {
    // Oracle: direct enumeration of a discrete square. 64*64 interior cells;
    // boundary = cells on the outer ring = 4*64 - 4.
    const ShapeMask m = rect_mask(64, 64);
    CHECK(m.interior_count == 4096);
    CHECK(m.boundary_count == 252);
    CHECK(boundary_of(m).size() == 252);
}

TEST_CASE("largest component wins") {
    // Blob of 100 (10x10) and blob of 7 (7x1), disjoint.
    std::vector<std::uint8_t> fg(40 * 40, 0);
    for (int y = 2; y < 12; ++y) {
        for (int x = 2; x < 12; ++x) fg[y * 40 + x] = 1;
    }
    for (int x = 20; x < 27; ++x) fg[30 * 40 + x] = 1;
    const ShapeMask m = normalize_mask(fg, 40, 40);
    CHECK(m.interior_count == 100);
    CHECK(m.width == 10 + 2 * kMaskMargin);
}

TEST_CASE("3x3 solid square boundary is all but the center") {
    const ShapeMask m = rect_mask(3, 3);
    const auto b = boundary_of(m);
    CHECK(b.size() == 8);
    for (const Cell& c : b) {
        CHECK_FALSE((c.x == kMaskMargin + 1 && c.y == kMaskMargin + 1));
    }
}

TEST_CASE("boundary predicate matches a brute-force scan and is row-major") {
    const ShapeMask m = family_mask("hand", {.scale = 0.5});
    std::vector<Cell> expected;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.is_inside(x, y)) continue;
            if (!m.is_inside(x - 1, y) || !m.is_inside(x + 1, y) || !m.is_inside(x, y - 1) ||
                !m.is_inside(x, y + 1)) {
                expected.push_back({x, y});
            }
        }
    }
    const auto got = boundary_of(m);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i]);
}

TEST_CASE("mask invariants: margin, boundary subset, 8-connectivity") {
    const ShapeMask m = family_mask("star5", {.scale = 0.6});
    REQUIRE(m.interior_count > 0);
    for (int x = 0; x < m.width; ++x) {
        for (int k = 0; k < kMaskMargin; ++k) {
            CHECK_FALSE(m.is_inside(x, k));
            CHECK_FALSE(m.is_inside(x, m.height - 1 - k));
        }
    }
    std::size_t nb = 0;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (m.boundary[m.idx(x, y)]) {
                ++nb;
                CHECK(m.inside[m.idx(x, y)]);
            }
        }
    }
    CHECK(nb == m.boundary_count);

    // 8-connectivity: flood from the first interior cell reaches all.
    std::vector<std::uint8_t> seen(m.inside.size(), 0);
    std::vector<Cell> stack;
    for (int y = 0; y < m.height && stack.empty(); ++y) {
        for (int x = 0; x < m.width && stack.empty(); ++x) {
            if (m.inside[m.idx(x, y)]) {
                stack.push_back({x, y});
                seen[m.idx(x, y)] = 1;
            }
        }
    }
    std::size_t reached = 0;
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        ++reached;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = c.x + dx, ny = c.y + dy;
                if ((dx || dy) && m.is_inside(nx, ny) && !seen[m.idx(nx, ny)]) {
                    seen[m.idx(nx, ny)] = 1;
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    CHECK(reached == m.interior_count);
}

TEST_CASE("load_mask is idempotent over save/reload") {
    TempDir tmp("mask_idem");
    const ShapeMask m = family_mask("fish", {.scale = 0.6, .rot_deg = 33.0});
    save_mask_pgm(m, tmp.file("fish.pgm"));
    const ShapeMask m2 = load_mask(tmp.file("fish.pgm"));
    REQUIRE(m2.width == m.width);
    REQUIRE(m2.height == m.height);
    CHECK(m2.inside == m.inside);
    CHECK(m2.boundary == m.boundary);
}

TEST_CASE("pnm formats round-trip as foreground") {
    TempDir tmp("pnm");
    SUBCASE("P2 ascii") {
        std::ofstream f(tmp.file("a.pgm"));
        f << "P2\n# comment\n4 3\n255\n";
        f << "255 255 255 255\n255 0 0 255\n255 255 255 255\n";
        f.close();
        const ShapeMask m = load_mask(tmp.file("a.pgm"));
        CHECK(m.interior_count == 2);
    }
    SUBCASE("P1 ascii bits") {
        std::ofstream f(tmp.file("a.pbm"));
        f << "P1\n4 3\n0000\n0110\n0000\n";
        f.close();
        const ShapeMask m = load_mask(tmp.file("a.pbm"));
        CHECK(m.interior_count == 2);
    }
    SUBCASE("P4 packed bits") {
        std::ofstream f(tmp.file("a.pbm"), std::ios::binary);
        f << "P4\n10 2\n";
        const unsigned char rows[4] = {0x7f, 0x80, 0x00, 0x00};  // row0: bits 1..9
        f.write(reinterpret_cast<const char*>(rows), 4);
        f.close();
        const ShapeMask m = load_mask(tmp.file("a.pbm"));
        CHECK(m.interior_count == 8);
    }
}

TEST_CASE("load errors") {
    TempDir tmp("mask_err");
    CHECK_THROWS_AS(load_mask(tmp.file("missing.pgm")), PipelineError);
    {
        std::ofstream f(tmp.file("blank.pgm"));
        f << "P2\n2 2\n255\n255 255 255 255\n";
    }
    CHECK_THROWS_AS(load_mask(tmp.file("blank.pgm")), PipelineError);  // empty foreground
    {
        std::ofstream f(tmp.file("bad.pgm"));
        f << "P7\n2 2\n";
    }
    CHECK_THROWS_AS(load_mask(tmp.file("bad.pgm")), PipelineError);
    CHECK_THROWS_AS(load_mask(tmp.file("blank.pgm"), 999), PipelineError);
}
