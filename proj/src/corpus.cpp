#include "axisdesc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "axisdesc/mask.hpp"

namespace axisdesc {

namespace {

struct P2 {
    double x = 0, y = 0;
};

struct Prim {
    enum class Type { capsule, cone, disk, ellipse, polygon } type = Type::disk;
    P2 a, b;          // capsule/cone ends; disk/ellipse center in a
    double r = 0;     // radius at a; ellipse rotation (radians)
    double rx = 0, ry = 0;  // cone radius at b; ellipse semi-axes
    std::vector<P2> pts;    // polygon
};

struct Scene {
    std::vector<Prim> prims;

    void capsule(double x0, double y0, double x1, double y1, double r) {
        Prim p;
        p.type = Prim::Type::capsule;
        p.a = {x0, y0};
        p.b = {x1, y1};
        p.r = r;
        prims.push_back(p);
    }
    // Limb with a linear taper (convex hull of the two end circles). Constant
    // width limbs make the field 1D-degenerate along the axis; every natural
    // limb tapers.
    void cone(double x0, double y0, double r0, double x1, double y1, double r1) {
        Prim p;
        p.type = Prim::Type::cone;
        p.a = {x0, y0};
        p.b = {x1, y1};
        p.r = r0;
        p.rx = r1;
        prims.push_back(p);
    }
    void disk(double x, double y, double r) {
        Prim p;
        p.type = Prim::Type::disk;
        p.a = {x, y};
        p.r = r;
        prims.push_back(p);
    }
    void ellipse(double x, double y, double rx, double ry, double angle = 0) {
        Prim p;
        p.type = Prim::Type::ellipse;
        p.a = {x, y};
        p.rx = rx;
        p.ry = ry;
        p.r = angle;
        prims.push_back(p);
    }
    void polygon(std::vector<P2> pts) {
        Prim p;
        p.type = Prim::Type::polygon;
        p.pts = std::move(pts);
        prims.push_back(p);
    }
};

double seg_dist2(P2 p, P2 a, P2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double wx = p.x - a.x, wy = p.y - a.y;
    const double vv = vx * vx + vy * vy;
    double t = vv > 0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = wx - t * vx, dy = wy - t * vy;
    return dx * dx + dy * dy;
}

bool prim_contains(const Prim& p, double x, double y) {
    switch (p.type) {
        case Prim::Type::capsule:
            return seg_dist2({x, y}, p.a, p.b) <= p.r * p.r;
        case Prim::Type::cone: {
            // Inside the hull of circles (a, r) and (b, rx) iff
            // min_t |p - c(t)|^2 - r(t)^2 <= 0 over t in [0,1].
            const double dx = p.b.x - p.a.x, dy = p.b.y - p.a.y;
            const double wx = x - p.a.x, wy = y - p.a.y;
            const double dr = p.rx - p.r;
            const double denom = dx * dx + dy * dy - dr * dr;
            double t = denom > 1e-12 ? (wx * dx + wy * dy + p.r * dr) / denom : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double ex = wx - t * dx, ey = wy - t * dy;
            const double rt = p.r + t * dr;
            return ex * ex + ey * ey <= rt * rt;
        }
        case Prim::Type::disk: {
            const double dx = x - p.a.x, dy = y - p.a.y;
            return dx * dx + dy * dy <= p.r * p.r;
        }
        case Prim::Type::ellipse: {
            const double c = std::cos(-p.r), s = std::sin(-p.r);
            const double dx = x - p.a.x, dy = y - p.a.y;
            const double u = (dx * c - dy * s) / p.rx, v = (dx * s + dy * c) / p.ry;
            return u * u + v * v <= 1.0;
        }
        case Prim::Type::polygon: {
            bool in = false;  // even-odd crossing test
            const std::size_t n = p.pts.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const P2& pi = p.pts[i];
                const P2& pj = p.pts[j];
                if ((pi.y > y) != (pj.y > y) &&
                    x < (pj.x - pi.x) * (y - pi.y) / (pj.y - pi.y) + pi.x) {
                    in = !in;
                }
            }
            return in;
        }
    }
    return false;
}

void prim_bbox(const Prim& p, double& min_x, double& min_y, double& max_x, double& max_y) {
    const auto grow = [&](double x, double y, double r) {
        min_x = std::min(min_x, x - r);
        max_x = std::max(max_x, x + r);
        min_y = std::min(min_y, y - r);
        max_y = std::max(max_y, y + r);
    };
    switch (p.type) {
        case Prim::Type::capsule:
            grow(p.a.x, p.a.y, p.r);
            grow(p.b.x, p.b.y, p.r);
            break;
        case Prim::Type::cone:
            grow(p.a.x, p.a.y, p.r);
            grow(p.b.x, p.b.y, p.rx);
            break;
        case Prim::Type::disk:
            grow(p.a.x, p.a.y, p.r);
            break;
        case Prim::Type::ellipse:
            grow(p.a.x, p.a.y, std::max(p.rx, p.ry));
            break;
        case Prim::Type::polygon:
            for (const P2& q : p.pts) grow(q.x, q.y, 0.0);
            break;
    }
}

// Deterministic, platform-independent generator for rim-noise placement.
struct SplitMix {
    std::uint64_t s;
    explicit SplitMix(std::uint64_t seed) : s(seed + 0x9e3779b97f4a7c15ull) {}
    double uniform() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

constexpr double kDeg = M_PI / 180.0;

// Families are authored in raster orientation (y grows downward) in a roughly
// 200-unit box. articulation art is in [-1, 1].
Scene build_family(const std::string& family, double art) {
    Scene s;
    if (family == "hand" || family == "hand4") {
        s.ellipse(0, 2, 38, 43);
        s.cone(0, 24, 21, 0, 98, 15);  // forearm
        const double dirs[5] = {160, 118, 90, 63, 36};  // y-up degrees
        const double lens[5] = {40, 54, 62, 55, 42};
        for (int k = 0; k < 5; ++k) {
            if (family == "hand4" && k == 3) continue;  // ring finger missing
            double d = dirs[k];
            if (k == 1) d += 18.0 * art;  // index finger articulates
            const double c = std::cos(d * kDeg), v = -std::sin(d * kDeg);
            const double bx = 30 * c, by = 30 * v;
            s.cone(bx, by, 10.0, bx + lens[k] * c, by + lens[k] * v, 6.5);
        }
    } else if (family == "quadruped") {
        s.capsule(-60, 0, 60, 0, 27);
        const double lean = 6.0 * art;
        s.cone(-46, 16, 11, -50 - lean, 76, 6.5);
        s.cone(-20, 16, 11, -20 + lean, 76, 6.5);
        s.cone(20, 16, 11, 20 - lean, 76, 6.5);
        s.cone(46, 16, 11, 50 + lean, 76, 6.5);
        s.cone(50, -10, 16, 80, -44 - 6 * art, 10);
        s.ellipse(85, -51 - 6 * art, 15, 12, -0.5);
        s.cone(-56, -8, 8, -86, -38 + 8 * art, 3.5);
    } else if (family == "human") {
        s.disk(0, -76, 20);
        s.capsule(0, -52, 0, 16, 23);
        const double arm = 18.0 * art;
        s.cone(-14, -40, 11, -58, -4 + arm, 6);
        s.cone(14, -40, 11, 58, -4 - arm, 6);
        s.cone(-11, 24, 13, -30, 95, 7.5);
        s.cone(11, 24, 13, 30, 95, 7.5);
    } else if (family == "vase") {
        s.ellipse(0, 34, 45, 44);
        s.cone(0, -16, 22.0 + 2.0 * art, 0, -66, 11.0 + 1.5 * art);
        s.ellipse(0, -70, 17, 7);
    } else if (family == "dogbone") {
        s.disk(-56, 0, 32);
        s.disk(56, 0, 32);
        s.capsule(-34, 0, 34, 0, 10.0 + 2.0 * art);
    } else if (family.rfind("star", 0) == 0) {
        const int n = std::stoi(family.substr(4));
        if (n < 3 || n > 12) throw PipelineError("corpus: bad star family " + family);
        s.disk(0, 0, 28);
        for (int k = 0; k < n; ++k) {
            const double th = k * 2.0 * M_PI / n - M_PI / 2.0;
            const double len = 86.0 * (1.0 + 0.08 * art);
            const double cx = std::cos(th), sy = std::sin(th);
            const double px = -sy, py = cx;
            // Blunt trapezoid spikes: sub-pixel apexes rasterize into sealed
            // pockets that the solver cannot reach.
            const double w = 15.0, tip = 2.6;
            s.polygon({{14 * cx + w * px, 14 * sy + w * py},
                       {len * cx + tip * px, len * sy + tip * py},
                       {len * cx - tip * px, len * sy - tip * py},
                       {14 * cx - w * px, 14 * sy - w * py}});
        }
    } else if (family == "ellipse") {
        s.ellipse(0, 0, 86, 38.0 + 4.0 * art);
    } else if (family == "tee") {
        s.cone(8.0 * art, -12, 19, 0, 86, 12);
        s.cone(0, -26, 19, -66, -26, 12);
        s.cone(0, -26, 19, 66, -26, 12);
    } else if (family == "ell") {
        s.cone(0, 50, 18, 0, -72, 12);
        s.cone(0, 58, 18, 74 + 10 * art, 58, 12);
    } else if (family == "ubend") {
        s.cone(-34, 30, 18, -34, -66, 11);
        s.cone(34, 30, 18, 34, -66 - 10 * art, 11);
        s.ellipse(0, 38, 52, 21);
    } else if (family == "comb") {
        s.cone(0, 52, 15, -72, 52, 10);
        s.cone(0, 52, 15, 72, 52, 10);
        for (int k = -1; k <= 1; ++k) {
            s.cone(46 * k, 52, 12.5, 46 * k + 8 * art * k, -46, 8);
        }
    } else if (family == "plane") {
        s.cone(-56, 0, 9, 86, 0, 13);
        const double sweep = 8.0 * art;
        s.cone(6, 0, 11, -30 + sweep, -62, 6);
        s.cone(6, 0, 11, -30 + sweep, 62, 6);
        s.cone(-50, 0, 7, -70, -28, 4);
        s.cone(-50, 0, 7, -70, 28, 4);
    } else if (family == "fish") {
        s.ellipse(8, 0, 62, 32);
        s.polygon({{-46, 0}, {-94, -30 - 6 * art}, {-94, 30 + 6 * art}});
        s.cone(10, -28, 8.5, -12, -56, 5);
        s.cone(10, 28, 7.5, -6, 50, 4.5);
    } else if (family == "square") {
        s.polygon({{-70, -70}, {70, -70}, {70, 70}, {-70, 70}});
    } else if (family == "disk") {
        s.disk(0, 0, 70);
    } else {
        throw PipelineError("corpus: unknown family " + family);
    }
    return s;
}

}  // namespace

RasterImage make_shape_image(const std::string& family, const ShapePose& pose) {
    Scene scene = build_family(family, pose.articulation);

    // Similarity transform applied to the primitive parameters.
    const double c = std::cos(pose.rot_deg * kDeg), sn = std::sin(pose.rot_deg * kDeg);
    const auto xf = [&](P2 p) -> P2 {
        return {pose.scale * (c * p.x - sn * p.y) + pose.tx,
                pose.scale * (sn * p.x + c * p.y) + pose.ty};
    };
    for (Prim& p : scene.prims) {
        switch (p.type) {
            case Prim::Type::capsule:
                p.a = xf(p.a);
                p.b = xf(p.b);
                p.r *= pose.scale;
                break;
            case Prim::Type::cone:
                p.a = xf(p.a);
                p.b = xf(p.b);
                p.r *= pose.scale;
                p.rx *= pose.scale;
                break;
            case Prim::Type::disk:
                p.a = xf(p.a);
                p.r *= pose.scale;
                break;
            case Prim::Type::ellipse:
                p.a = xf(p.a);
                p.rx *= pose.scale;
                p.ry *= pose.scale;
                p.r += pose.rot_deg * kDeg;
                break;
            case Prim::Type::polygon:
                for (P2& q : p.pts) q = xf(q);
                break;
        }
    }

    // Small rim bumps: disks centred on a primitive boundary point.
    if (pose.noise_bumps > 0) {
        SplitMix rng(pose.noise_seed);
        std::vector<Prim> bumps;
        for (int k = 0; k < pose.noise_bumps; ++k) {
            const Prim& host = scene.prims[static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(scene.prims.size()))];
            const double th = rng.uniform() * 2.0 * M_PI;
            const double br = (1.2 + 1.8 * rng.uniform()) * pose.scale;
            P2 at;
            if (host.type == Prim::Type::capsule || host.type == Prim::Type::cone) {
                const double t = rng.uniform();
                const double rr = host.type == Prim::Type::cone
                                      ? host.r + t * (host.rx - host.r)
                                      : host.r;
                at = {host.a.x + t * (host.b.x - host.a.x) + rr * std::cos(th),
                      host.a.y + t * (host.b.y - host.a.y) + rr * std::sin(th)};
            } else if (host.type == Prim::Type::ellipse) {
                const double ec = std::cos(host.r), es = std::sin(host.r);
                const double ux = host.rx * std::cos(th), uy = host.ry * std::sin(th);
                at = {host.a.x + ux * ec - uy * es, host.a.y + ux * es + uy * ec};
            } else if (host.type == Prim::Type::disk) {
                at = {host.a.x + host.r * std::cos(th), host.a.y + host.r * std::sin(th)};
            } else {
                const P2& q = host.pts[static_cast<std::size_t>(
                    rng.uniform() * static_cast<double>(host.pts.size()))];
                at = q;
            }
            Prim bump;
            bump.type = Prim::Type::disk;
            bump.a = at;
            bump.r = br;
            bumps.push_back(bump);
        }
        scene.prims.insert(scene.prims.end(), bumps.begin(), bumps.end());
    }

    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (const Prim& p : scene.prims) prim_bbox(p, min_x, min_y, max_x, max_y);
    const int margin = 3;
    const int w = static_cast<int>(std::ceil(max_x - min_x)) + 2 * margin + 1;
    const int h = static_cast<int>(std::ceil(max_y - min_y)) + 2 * margin + 1;

    RasterImage img;
    img.width = w;
    img.height = h;
    img.pixels.assign(static_cast<std::size_t>(w) * h, 255);
    for (int y = 0; y < h; ++y) {
        const double py = min_y - margin + y + 0.5;
        for (int x = 0; x < w; ++x) {
            const double px = min_x - margin + x + 0.5;
            for (const Prim& p : scene.prims) {
                if (prim_contains(p, px, py)) {
                    img.pixels[static_cast<std::size_t>(y) * w + x] = 0;
                    break;
                }
            }
        }
    }
    return img;
}

const std::vector<std::string>& corpus_families() {
    static const std::vector<std::string> kFamilies = {
        "hand", "star3", "star4", "star5", "ellipse", "quadruped", "human",
        "vase", "tee",   "ell",   "ubend", "comb",    "plane",     "fish"};
    return kFamilies;
}

std::vector<CorpusEntry> corpus_entries() {
    std::vector<CorpusEntry> out;
    unsigned seed = 7;
    for (const std::string& family : corpus_families()) {
        const ShapePose poses[4] = {
            {1.0, 0.0, 0, 0, 0.0, 0, 0},
            {0.75, 28.0, 0, 0, 1.0, 0, 0},
            {1.15, 96.0, 0, 0, -1.0, 6, seed},
            {0.9, 203.0, 0, 0, 0.5, 10, seed + 1},
        };
        for (int v = 0; v < 4; ++v) {
            CorpusEntry e;
            e.category = family;
            e.id = family + "_" + std::to_string(v);
            e.pose = poses[v];
            out.push_back(e);
        }
        seed += 2;
    }
    return out;
}

std::vector<CorpusEntry> write_corpus(const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<CorpusEntry> entries = corpus_entries();
    std::ofstream listing(dir + "/corpus.txt");
    if (!listing) throw PipelineError(dir + "/corpus.txt: cannot open for writing");
    for (const CorpusEntry& e : entries) {
        const std::string file = e.id + ".pgm";
        write_pgm(dir + "/" + file, make_shape_image(e.category, e.pose));
        listing << e.id << " " << e.category << " " << file << "\n";
    }
    return entries;
}

}  // namespace axisdesc
