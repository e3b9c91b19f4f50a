#include "axisdesc/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "axisdesc/kernels.hpp"

namespace axisdesc {

namespace {

constexpr double kGradientFloorFrac = 1e-6;
// Mirror-symmetric masks tie values across the axis to solver precision
// (red-black parity noise, relative ~1e-9); the weakest genuine along-curve
// contrast sits orders of magnitude above that.
constexpr double kTieRelTol = 3e-8;
constexpr double kTangentStep = 1.0;
constexpr double kCenterVFrac = 0.10;
constexpr double kCenterRadiusFrac = 0.15;

constexpr int kRing[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                             {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

// Order-insensitive 4-term sum: identical results for any operand
// permutation, which keeps detection bit-for-bit covariant under grid
// rotations of the mask.
double sum4_sorted(double a, double b, double c, double d) {
    std::array<double, 4> t{a, b, c, d};
    std::sort(t.begin(), t.end());
    return ((t[3] + t[2]) + t[1]) + t[0];
}

struct CellKey {
    std::size_t operator()(const Cell& c) const {
        return (static_cast<std::size_t>(c.y) << 20) ^ static_cast<std::size_t>(c.x);
    }
};

// Tangent offsets snapped to a 2^-20 grid so that cell + offset is exact in
// IEEE arithmetic regardless of the cell coordinate magnitude.
double snap(double x) { return std::nearbyint(x * 1048576.0) / 1048576.0; }

double bilinear(const std::vector<double>& g, int w, int h, double px, double py) {
    // Clamp so the 2x2 support stays on the raster even for rim cells with a
    // large tangent step.
    px = std::clamp(px, 1.0, static_cast<double>(w - 2));
    py = std::clamp(py, 1.0, static_cast<double>(h - 2));
    const double fx0 = std::floor(px), fy0 = std::floor(py);
    const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
    const double fx = px - fx0, fy = py - fy0;
    const std::size_t i = static_cast<std::size_t>(y0) * w + x0;
    return sum4_sorted(((1.0 - fx) * (1.0 - fy)) * g[i], (fx * (1.0 - fy)) * g[i + 1],
                       ((1.0 - fx) * fy) * g[i + w], (fx * fy) * g[i + w + 1]);
}

}  // namespace

GradientField compute_gradient(const Field& field) {
    const ShapeMask& m = field.mask;
    GradientField g;
    g.width = m.width;
    g.height = m.height;
    g.gx.assign(field.values.size(), 0.0);
    g.gy.assign(field.values.size(), 0.0);
    g.gm.assign(field.values.size(), 0.0);
    kernels::active().gradient(field.values.data(), m.width, m.height, g.gx.data(),
                               g.gy.data(), g.gm.data());
    for (std::size_t i = 0; i < g.gm.size(); ++i) {
        if (m.inside[i] && g.gm[i] > g.max_gm) g.max_gm = g.gm[i];
    }
    return g;
}

namespace {

// When a symmetry axis runs between two lattice rows or columns, both mirror
// cells mark as extrema and the two-thick band would be shredded by the fork
// splitter. A 4-adjacent same-kind pair lying across the (smoothed) gradient
// is such a rung: the stronger extremum keeps the mark (ties row-major).
// Pairs along the gradient are consecutive chain links and stay.
std::vector<SymmetryPoint> suppress_double_marks(std::vector<SymmetryPoint> pts,
                                                 const GradientField& g, int width) {
    std::unordered_map<Cell, std::size_t, CellKey> index;
    for (std::size_t i = 0; i < pts.size(); ++i) index.emplace(pts[i].cell, i);
    std::vector<std::uint8_t> drop(pts.size(), 0);
    constexpr int kForward[2][2] = {{1, 0}, {0, 1}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const SymmetryPoint& p = pts[i];
        const std::size_t gi = static_cast<std::size_t>(p.cell.y) * width + p.cell.x;
        for (const auto& o : kForward) {
            auto it = index.find({p.cell.x + o[0], p.cell.y + o[1]});
            if (it == index.end()) continue;
            const SymmetryPoint& q = pts[it->second];
            if (q.kind != p.kind) continue;
            const std::size_t qi = static_cast<std::size_t>(q.cell.y) * width + q.cell.x;
            // The pair is a ladder rung when the gradient component along the
            // pair direction flips sign between the cells: the axis valley
            // runs between them. Consecutive chain cells never flip.
            const double dp = o[0] * g.gx[gi] + o[1] * g.gy[gi];
            const double dq = o[0] * g.gx[qi] + o[1] * g.gy[qi];
            if (!(dp < 0.0 && dq > 0.0) && !(dp > 0.0 && dq < 0.0)) continue;
            const bool p_better = p.kind == AxisKind::positive ? p.strength <= q.strength
                                                               : p.strength >= q.strength;
            drop[p_better ? it->second : i] = 1;
        }
    }
    std::vector<SymmetryPoint> kept;
    kept.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!drop[i]) kept.push_back(pts[i]);
    }
    return kept;
}

}  // namespace

std::vector<SymmetryPoint> detect_symmetry_points(const Field& field) {
    const ShapeMask& m = field.mask;
    const GradientField g = compute_gradient(field);
    const double floor_gm = kGradientFloorFrac * g.max_gm;
    const double tie_abs = 4.0 * field.noise_scale;

    std::vector<SymmetryPoint> out;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const std::size_t i = m.idx(x, y);
            if (!m.inside[i] || m.boundary[i]) continue;
            const double gm = g.gm[i];
            if (gm < floor_gm) continue;  // degenerate: near a critical point

            // Tangent from the 5-point averaged gradient: half a pixel off an
            // inter-row axis the raw gradient tilts toward the axis direction
            // and the extremum test would compare along the chain instead of
            // across it; averaging cancels the antisymmetric component.
            const double gxs = sum4_sorted(g.gx[i - 1], g.gx[i + 1], g.gx[i - m.width],
                                           g.gx[i + m.width]) + g.gx[i];
            const double gys = sum4_sorted(g.gy[i - 1], g.gy[i + 1], g.gy[i - m.width],
                                           g.gy[i + m.width]) + g.gy[i];
            const double gs = std::sqrt(gxs * gxs + gys * gys);
            if (gs < 5.0 * floor_gm) continue;
            const double tx = snap(-gys / gs) * kTangentStep;
            const double ty = snap(gxs / gs) * kTangentStep;
            const double s_fwd = bilinear(g.gm, m.width, m.height, x + tx, y + ty);
            const double s_bwd = bilinear(g.gm, m.width, m.height, x - tx, y - ty);
            // An axis lying between two lattice rows/columns ties its mirror
            // sample to solver precision; the row-major-first cell of the
            // tied pair owns the extremum so chains stay one cell thin.
            const bool tie_f = std::fabs(gm - s_fwd) <=
                               std::max(kTieRelTol * std::max(gm, s_fwd), tie_abs);
            const bool tie_b = std::fabs(gm - s_bwd) <=
                               std::max(kTieRelTol * std::max(gm, s_bwd), tie_abs);
            const auto owns_tie = [&](bool fwd) {
                const double ox = fwd ? x + tx : x - tx;
                const double oy = fwd ? y + ty : y - ty;
                return y < oy || (y == oy && x < ox);
            };
            if (!tie_f && !tie_b && gm < s_fwd && gm < s_bwd) {
                out.push_back({{x, y}, AxisKind::positive, gm});
            } else if (!tie_f && !tie_b && gm > s_fwd && gm > s_bwd) {
                out.push_back({{x, y}, AxisKind::negative, gm});
            } else if (tie_f != tie_b) {
                const bool tied_fwd = tie_f;
                const double other = tied_fwd ? s_bwd : s_fwd;
                if (gm < other && owns_tie(tied_fwd)) {
                    out.push_back({{x, y}, AxisKind::positive, gm});
                } else if (gm > other && owns_tie(tied_fwd)) {
                    out.push_back({{x, y}, AxisKind::negative, gm});
                }
            }
        }
    }
    return suppress_double_marks(std::move(out), g, m.width);
}

namespace {

double step_length(const Cell& a, const Cell& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

SymmetryBranch make_branch(std::vector<Cell> chain, AxisKind kind, const Field& field) {
    // Deep end (lower v) last; ties resolved row-major.
    if (chain.size() > 1) {
        const double v_first = field.at(chain.front());
        const double v_last = field.at(chain.back());
        const bool reverse = v_first < v_last ||
                             (v_first == v_last &&
                              (chain.front().y < chain.back().y ||
                               (chain.front().y == chain.back().y &&
                                chain.front().x < chain.back().x)));
        if (reverse) std::reverse(chain.begin(), chain.end());
    }
    SymmetryBranch b;
    b.kind = kind;
    b.termination = chain.back();
    double len = 0.0;
    for (std::size_t i = 1; i < chain.size(); ++i) len += step_length(chain[i - 1], chain[i]);
    b.length = len;
    b.points = std::move(chain);
    return b;
}

}  // namespace

std::vector<SymmetryBranch> group_branches(const std::vector<SymmetryPoint>& points,
                                           const Field& field,
                                           const std::vector<CriticalPoint>& criticals) {
    // Exclusion zone around centres and saddles: chains terminate there
    // instead of running through, and the zone scales with the shape so the
    // converging-axes tangle near the centre cannot shred into confetti.
    const double excl =
        std::max(1.5, 0.04 * std::sqrt(static_cast<double>(field.mask.interior_count)));
    std::vector<SymmetryBranch> branches;
    for (AxisKind kind : {AxisKind::positive, AxisKind::negative}) {
        std::vector<Cell> cells;
        std::unordered_map<Cell, int, CellKey> index;
        for (const SymmetryPoint& p : points) {
            if (p.kind != kind) continue;
            bool near_critical = false;
            for (const CriticalPoint& c : criticals) {
                const double dx = p.cell.x - c.cell.x, dy = p.cell.y - c.cell.y;
                if (dx * dx + dy * dy <= excl * excl) {
                    near_critical = true;
                    break;
                }
            }
            if (!near_critical) {
                index.emplace(p.cell, static_cast<int>(cells.size()));
                cells.push_back(p.cell);
            }
        }
        const auto member = [&](int x, int y) { return index.count({x, y}) != 0; };

        // Chain adjacency, "roughly based on the connectedness": direct
        // 4-neighbours; diagonal links only when neither side cell is present
        // (staircase-thick chains stay simple paths); and distance-2 bridges
        // over single-cell detection dropouts, shadowed whenever a one-step
        // intermediate exists.
        std::vector<std::vector<int>> adj(cells.size());
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            const Cell c = cells[ci];
            for (int dy = -2; dy <= 2; ++dy) {
                for (int dx = -2; dx <= 2; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    auto it = index.find({c.x + dx, c.y + dy});
                    if (it == index.end()) continue;
                    const int cheb = std::max(std::abs(dx), std::abs(dy));
                    if (cheb == 1) {
                        if (dx != 0 && dy != 0 &&
                            (member(c.x + dx, c.y) || member(c.x, c.y + dy))) {
                            continue;  // thick staircase: keep the 4-link path
                        }
                    } else {
                        bool shadowed = false;
                        const Cell w = cells[it->second];
                        for (int my = -1; my <= 1 && !shadowed; ++my) {
                            for (int mx = -1; mx <= 1 && !shadowed; ++mx) {
                                if (mx == 0 && my == 0) continue;
                                const int px = c.x + mx, py = c.y + my;
                                if (std::abs(px - w.x) <= 1 && std::abs(py - w.y) <= 1 &&
                                    member(px, py)) {
                                    shadowed = true;
                                }
                            }
                        }
                        if (shadowed) continue;
                    }
                    adj[ci].push_back(it->second);
                }
            }
            std::sort(adj[ci].begin(), adj[ci].end(), [&](int a, int b) {
                return cells[a].y != cells[b].y ? cells[a].y < cells[b].y
                                                : cells[a].x < cells[b].x;
            });
        }

        // Fork cells (>2 chain neighbours) split a component into simple
        // chains; what remains has max degree 2, i.e. paths and cycles.
        std::vector<std::uint8_t> alive(cells.size(), 0), visited(cells.size(), 0);
        for (std::size_t ci = 0; ci < cells.size(); ++ci) alive[ci] = adj[ci].size() <= 2;
        const auto arm_degree = [&](int ci) {
            int d = 0;
            for (int n : adj[ci]) d += alive[n];
            return d;
        };

        for (std::size_t seed = 0; seed < cells.size(); ++seed) {
            if (!alive[seed] || visited[seed]) continue;
            std::vector<int> comp, stack{static_cast<int>(seed)};
            visited[seed] = 1;
            while (!stack.empty()) {
                const int c = stack.back();
                stack.pop_back();
                comp.push_back(c);
                for (int n : adj[c]) {
                    if (alive[n] && !visited[n]) {
                        visited[n] = 1;
                        stack.push_back(n);
                    }
                }
            }
            // Walk from an endpoint if the component is a path, else (cycle)
            // from its highest-v cell.
            int start = comp.front();
            bool found_end = false;
            for (int c : comp) {
                if (arm_degree(c) <= 1) {
                    start = c;
                    found_end = true;
                    break;
                }
            }
            if (!found_end) {
                double best_v = -1.0;
                for (int c : comp) {
                    const double vv = field.at(cells[c]);
                    if (vv > best_v) {
                        best_v = vv;
                        start = c;
                    }
                }
            }
            std::vector<std::uint8_t> on_chain(cells.size(), 0);
            std::vector<int> chain{start};
            on_chain[start] = 1;
            int cur = start;
            while (true) {
                int next = -1;
                for (int n : adj[cur]) {
                    if (alive[n] && !on_chain[n]) {
                        next = n;
                        break;
                    }
                }
                if (next < 0) break;
                on_chain[next] = 1;
                chain.push_back(next);
                cur = next;
            }
            std::vector<Cell> chain_cells;
            chain_cells.reserve(chain.size());
            for (int c : chain) chain_cells.push_back(cells[c]);
            branches.push_back(make_branch(std::move(chain_cells), kind, field));
        }
    }
    return branches;
}

bool CenterRegion::contains(Cell c, double v_at_c) const {
    for (const Zone& z : zones) {
        const double dx = c.x - z.cell.x, dy = c.y - z.cell.y;
        if (std::fabs(v_at_c - z.v) <= z.eps_v && dx * dx + dy * dy <= z.radius * z.radius) {
            return true;
        }
    }
    return false;
}

bool CenterRegion::within_distance(Cell c) const {
    for (const Zone& z : zones) {
        const double dx = c.x - z.cell.x, dy = c.y - z.cell.y;
        if (dx * dx + dy * dy <= z.radius * z.radius) return true;
    }
    return false;
}

CenterRegion CenterRegion::around(const Field& field, const std::vector<CriticalPoint>& criticals) {
    CenterRegion r;
    const double radius = kCenterRadiusFrac * std::sqrt(static_cast<double>(field.mask.interior_count));
    for (const CriticalPoint& c : criticals) {
        r.zones.push_back({c.cell, field.at(c.cell), kCenterVFrac * c.depth, radius});
    }
    return r;
}

CenterRegion CenterRegion::around_one(const Field& field, const CriticalPoint& critical) {
    return around(field, {critical});
}

bool reaches_center(const SymmetryBranch& branch, const Field& field, const CenterRegion& region) {
    return region.contains(branch.termination, field.at(branch.termination));
}

std::vector<SymmetryBranch> prune(std::vector<SymmetryBranch> branches, double min_length,
                                  const Field& field,
                                  const std::vector<CriticalPoint>& criticals) {
    if (min_length < 0.0) throw PipelineError("prune: min_length must be >= 0");
    const CenterRegion region = CenterRegion::around(field, criticals);
    std::vector<SymmetryBranch> kept;
    kept.reserve(branches.size());
    for (SymmetryBranch& b : branches) {
        if (b.length >= min_length || reaches_center(b, field, region)) {
            kept.push_back(std::move(b));
        }
    }
    return kept;
}

double default_min_length(const ShapeMask& mask) {
    return 0.03 * std::sqrt(static_cast<double>(mask.interior_count));
}

std::vector<SymmetryBranch> drop_minor_branches(std::vector<SymmetryBranch> branches,
                                                double weight_frac, const Field& field,
                                                const std::vector<CriticalPoint>& criticals) {
    const CenterRegion region = CenterRegion::around(field, criticals);
    while (true) {
        double total = 0.0;
        for (const SymmetryBranch& b : branches) total += b.length;
        if (!(total > 0.0)) return branches;
        const double cut = weight_frac * total;
        std::vector<SymmetryBranch> kept;
        kept.reserve(branches.size());
        for (SymmetryBranch& b : branches) {
            if (b.length >= cut || reaches_center(b, field, region)) {
                kept.push_back(std::move(b));
            }
        }
        if (kept.size() == branches.size()) return kept;
        branches = std::move(kept);
    }
}

std::vector<int> interior_depth_map(const ShapeMask& mask) {
    const int big = mask.width + mask.height;
    std::vector<int> d(mask.inside.size(), 0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = mask.inside[i] ? big : 0;
    for (int y = 1; y < mask.height; ++y) {
        for (int x = 1; x < mask.width; ++x) {
            const std::size_t i = mask.idx(x, y);
            if (!d[i]) continue;
            d[i] = std::min(d[i], 1 + std::min(d[i - 1], d[i - mask.width]));
        }
    }
    for (int y = mask.height - 2; y >= 0; --y) {
        for (int x = mask.width - 2; x >= 0; --x) {
            const std::size_t i = mask.idx(x, y);
            if (!d[i]) continue;
            d[i] = std::min(d[i], 1 + std::min(d[i + 1], d[i + mask.width]));
        }
    }
    return d;
}

std::vector<SymmetryBranch> drop_rim_noise(std::vector<SymmetryBranch> branches,
                                           const Field& field,
                                           const std::vector<CriticalPoint>& criticals) {
    const ShapeMask& m = field.mask;
    const double band = 0.10 * std::sqrt(static_cast<double>(m.interior_count));
    const std::vector<int> depth = interior_depth_map(m);
    const CenterRegion region = CenterRegion::around(field, criticals);

    double field_depth = 0.0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (m.inside[i]) field_depth = std::max(field_depth, 1.0 - field.values[i]);
    }
    const double min_descent = 0.03 * field_depth;

    std::vector<SymmetryBranch> kept;
    kept.reserve(branches.size());
    for (SymmetryBranch& b : branches) {
        bool inward = false;
        for (const Cell& c : b.points) {
            if (depth[m.idx(c.x, c.y)] > band) {
                inward = true;
                break;
            }
        }
        // Real axes run down the v slope; pixelation scallops hug the rim or
        // crawl along a single level band.
        const bool descends =
            field.at(b.points.front()) - field.at(b.points.back()) >= min_descent;
        if ((inward && descends) || reaches_center(b, field, region)) {
            kept.push_back(std::move(b));
        }
    }
    return kept;
}

}  // namespace axisdesc
