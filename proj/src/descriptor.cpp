#include "axisdesc/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace axisdesc {

namespace {

constexpr double kAnchorDistanceFrac = 0.15;
constexpr double kTwoPi = 2.0 * M_PI;
// Below this origin-to-termination distance the termination direction is
// numerically meaningless; the anchor direction stands in for the angle.
constexpr double kDegenerateTermDist = 2.0;
// Angular tolerance within which same-kind records are fragments of one axis.
constexpr double kCollinearTol = 0.12;

double norm_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

}  // namespace

double angle_ccw(double dx_raster, double dy_raster) {
    return norm_2pi(std::atan2(-dy_raster, dx_raster));
}

const BranchRecord& ShapeDescriptor::record(int order_index) const {
    for (const auto& half : halves) {
        for (const BranchRecord& r : half) {
            if (r.order_index == order_index) return r;
        }
    }
    throw PipelineError("descriptor: order index out of range");
}

namespace {

// Exactly symmetric shapes (squares, n-fold stars) have circular level curves
// near the center, so the gradient extrema degenerate and detected chains
// stop short of the center region. A branch still counts as flowing into the
// center when steepest descent from its deep end enters the region within a
// bounded walk.
bool descends_into(Cell from, const Field& field, const CenterRegion& zone, double budget) {
    const ShapeMask& m = field.mask;
    Cell cur = from;
    double walked = 0.0;
    while (true) {
        if (zone.within_distance(cur)) return true;
        if (walked > budget) return false;
        Cell best = cur;
        double best_v = field.at(cur);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (!dx && !dy) continue;
                const int nx = cur.x + dx, ny = cur.y + dy;
                if (!m.is_inside(nx, ny)) continue;
                const double v = field.at(nx, ny);
                if (v < best_v) {
                    best_v = v;
                    best = {nx, ny};
                }
            }
        }
        if (best == cur) return false;  // local pit outside the region
        walked += (best.x != cur.x && best.y != cur.y) ? M_SQRT2 : 1.0;
        cur = best;
    }
}

}  // namespace

MajorAxes find_major_axes(const std::vector<SymmetryBranch>& branches,
                          const CriticalPoint& center, const Field& field) {
    const CenterRegion region = CenterRegion::around_one(field, center);
    const double gate = anchor_distance(field.mask);  // anchors must fit on the branch
    const double budget = region.zones.empty() ? 0.0 : 1.25 * region.zones.front().radius;
    MajorAxes m;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const SymmetryBranch& b = branches[i];
        if (b.length < gate) continue;
        if (!reaches_center(b, field, region) &&
            !descends_into(b.termination, field, region, budget)) {
            continue;
        }
        (b.kind == AxisKind::positive ? m.positive : m.negative).push_back(static_cast<int>(i));
    }
    return m;
}

double anchor_distance(const ShapeMask& mask) {
    return kAnchorDistanceFrac * std::sqrt(static_cast<double>(mask.interior_count));
}

Cell anchor_point(const SymmetryBranch& branch, Cell origin, const Field& field) {
    if (branch.points.empty()) throw PipelineError("anchor_point: empty branch");
    const auto d2 = [&](const Cell& c) {
        const double dx = c.x - origin.x, dy = c.y - origin.y;
        return dx * dx + dy * dy;
    };
    const bool from_back = d2(branch.points.back()) <= d2(branch.points.front());
    const double want = anchor_distance(field.mask);

    double walked = 0.0;
    const std::size_t n = branch.points.size();
    Cell at = from_back ? branch.points.back() : branch.points.front();
    for (std::size_t k = 1; k < n; ++k) {
        const Cell& a = from_back ? branch.points[n - k] : branch.points[k - 1];
        const Cell& b = from_back ? branch.points[n - 1 - k] : branch.points[k];
        {
            const double sx = a.x - b.x, sy = a.y - b.y;
            walked += std::sqrt(sx * sx + sy * sy);
        }
        at = b;
        if (walked >= want) break;
    }
    return at;  // far end when the branch is shorter than d_anchor
}

namespace {

struct AnchoredAxis {
    int branch = -1;
    Cell anchor;
    double angle = 0.0;
};

std::vector<FramePair> frames_from_axes(std::vector<AnchoredAxis> axes, Cell origin) {
    std::sort(axes.begin(), axes.end(), [](const AnchoredAxis& a, const AnchoredAxis& b) {
        if (a.angle != b.angle) return a.angle < b.angle;
        return a.anchor.y != b.anchor.y ? a.anchor.y < b.anchor.y : a.anchor.x < b.anchor.x;
    });

    const auto make_pair = [&](const AnchoredAxis& a, const AnchoredAxis& b) {
        FramePair fp;
        fp.half0 = {static_cast<double>(origin.x), static_cast<double>(origin.y),
                    std::cos(a.angle), std::sin(a.angle), 0};
        fp.half1 = {static_cast<double>(origin.x), static_cast<double>(origin.y),
                    std::cos(b.angle), std::sin(b.angle), 1};
        fp.anchor0 = a.branch;
        fp.anchor1 = b.branch;
        return fp;
    };

    std::vector<FramePair> out;
    if (axes.size() == 2) {
        out.push_back(make_pair(axes[0], axes[1]));
        return out;
    }
    for (std::size_t i = 0; i < axes.size(); ++i) {
        for (std::size_t j = 0; j < axes.size(); ++j) {
            if (i != j) out.push_back(make_pair(axes[i], axes[j]));
        }
    }
    return out;
}

AnchoredAxis make_axis(int branch_index, const SymmetryBranch& branch, Cell origin,
                       const Field& field) {
    AnchoredAxis ax;
    ax.branch = branch_index;
    ax.anchor = anchor_point(branch, origin, field);
    ax.angle = angle_ccw(ax.anchor.x - origin.x, ax.anchor.y - origin.y);
    return ax;
}

}  // namespace

std::vector<FramePair> build_frames(const std::vector<SymmetryBranch>& branches,
                                    const std::vector<int>& major_positive, Cell origin,
                                    const Field& field) {
    if (major_positive.size() < 2) {
        throw PipelineError("insufficient major axes: need 2 positive branches at the center, have " +
                            std::to_string(major_positive.size()));
    }
    std::vector<AnchoredAxis> axes;
    axes.reserve(major_positive.size());
    for (int bi : major_positive) {
        axes.push_back(make_axis(bi, branches[bi], origin, field));
    }
    return frames_from_axes(std::move(axes), origin);
}

std::vector<FramePair> dumbbell_frames(const std::vector<CriticalPoint>& criticals,
                                       const std::vector<SymmetryBranch>& branches,
                                       const Field& field) {
    const CriticalPoint* saddle = nullptr;
    for (const CriticalPoint& c : criticals) {
        if (c.kind == CriticalKind::hyperbolic) {
            if (saddle) throw PipelineError("dumbbell_frames: more than one saddle");
            saddle = &c;
        }
    }
    if (!saddle) throw PipelineError("dumbbell_frames: no hyperbolic point");

    const CenterRegion zone = CenterRegion::around_one(field, *saddle);
    const double gate = anchor_distance(field.mask);
    std::vector<AnchoredAxis> axes;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const SymmetryBranch& b = branches[i];
        if (b.kind != AxisKind::positive || b.points.empty() || b.length < gate) continue;
        const bool at_saddle = zone.contains(b.points.front(), field.at(b.points.front())) ||
                               zone.contains(b.points.back(), field.at(b.points.back()));
        if (at_saddle) {
            axes.push_back(make_axis(static_cast<int>(i), b, saddle->cell, field));
        }
    }
    if (axes.size() < 2) {
        throw PipelineError("insufficient major axes: saddle carries " +
                            std::to_string(axes.size()) + " positive axes, need 2");
    }
    return frames_from_axes(std::move(axes), saddle->cell);
}

ShapeDescriptor build_descriptor(const std::vector<SymmetryBranch>& branches,
                                 const FramePair& frames, Cell origin, const Field& field,
                                 Topology topology) {
    ShapeDescriptor d;
    d.topology = topology;
    d.frames = {frames.half0, frames.half1};

    double total = 0.0;
    for (const SymmetryBranch& b : branches) total += b.length;
    if (!(total > 0.0)) throw PipelineError("build_descriptor: zero total axes length");
    d.total_axes_length = total;

    const double a0 = angle_ccw(frames.half0.axis_x, -frames.half0.axis_y);
    const double a1 = angle_ccw(frames.half1.axis_x, -frames.half1.axis_y);
    const double span0 = norm_2pi(a1 - a0);

    struct Pending {
        BranchRecord rec;
        double theta = 0.0;
        int half = 0;
    };
    std::vector<Pending> pending;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const SymmetryBranch& b = branches[i];
        if (!(b.length > 0.0)) continue;  // single-cell chains carry no axis
        Pending p;
        p.rec.kind = b.kind;
        p.rec.norm_length = b.length / total;

        const double dx = b.termination.x - origin.x;
        const double dy = b.termination.y - origin.y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        p.rec.r = dist / total;

        if (static_cast<int>(i) == frames.anchor0) {
            p.rec.is_reference = true;
            p.half = 0;
            p.theta = 0.0;
        } else if (static_cast<int>(i) == frames.anchor1) {
            p.rec.is_reference = true;
            p.half = 1;
            p.theta = 0.0;
        } else {
            double phi;
            if (dist < kDegenerateTermDist) {
                const Cell a = anchor_point(b, origin, field);
                phi = angle_ccw(a.x - origin.x, a.y - origin.y);
            } else {
                phi = angle_ccw(dx, dy);
            }
            // A fragment collinear with a reference axis belongs to that
            // axis, whichever side of it the angle noise falls on.
            const auto circ = [](double u, double w) {
                double d = std::fabs(norm_2pi(u) - norm_2pi(w));
                return d > M_PI ? 2.0 * M_PI - d : d;
            };
            const double d0 = circ(phi, a0), d1 = circ(phi, a1);
            if (std::min(d0, d1) <= kCollinearTol && b.kind == AxisKind::positive) {
                p.half = d0 <= d1 ? 0 : 1;
                p.theta = 0.0;
            } else {
                const double t = norm_2pi(phi - a0);
                if (t < span0) {
                    p.half = 0;
                    p.theta = t;
                } else {
                    p.half = 1;
                    p.theta = norm_2pi(phi - a1);
                }
            }
        }
        pending.push_back(p);
    }

    std::array<std::vector<Pending>, 2> split;
    for (const Pending& p : pending) split[p.half].push_back(p);
    for (auto& half : split) {
        std::stable_sort(half.begin(), half.end(),
                         [](const Pending& x, const Pending& y) { return x.theta < y.theta; });
    }

    // Fragments of one axis (detection dropouts split chains) point the same
    // way from the origin; fold same-kind records within kCollinearTol into
    // the nearest piece so the arrow and weight describe the whole axis.
    for (auto& half : split) {
        std::vector<Pending> merged;
        for (Pending& p : half) {
            Pending* into = nullptr;
            if (!merged.empty()) {
                Pending& last = merged.back();
                if (last.rec.kind == p.rec.kind &&
                    (p.theta - last.theta <= kCollinearTol ||
                     (last.rec.is_reference && p.theta <= kCollinearTol))) {
                    into = &last;
                }
            }
            if (into) {
                if (p.rec.r < into->rec.r) {
                    into->rec.r = p.rec.r;
                    if (!into->rec.is_reference) into->theta = p.theta;
                }
                into->rec.norm_length += p.rec.norm_length;
                into->rec.is_reference = into->rec.is_reference || p.rec.is_reference;
            } else {
                merged.push_back(p);
            }
        }
        half = std::move(merged);
    }

    int order = 0;
    for (int h = 0; h < 2; ++h) {
        for (Pending& p : split[h]) {
            p.rec.theta = p.theta;
            p.rec.order_index = order++;
            d.halves[h].push_back(p.rec);
        }
    }
    const int n = order;
    for (auto& half : d.halves) {
        for (BranchRecord& r : half) {
            r.prev = (r.order_index + n - 1) % n;
            r.next = (r.order_index + 1) % n;
        }
    }

    d.extrinsic.x0 = origin.x + field.mask.offset_x;
    d.extrinsic.y0 = origin.y + field.mask.offset_y;
    d.extrinsic.total_length = total;
    d.extrinsic.m0 = frames.half0.axis_x;
    d.extrinsic.m1 = frames.half0.axis_y;
    return d;
}

namespace {

std::string fmt6(double x) {
    if (x == 0.0) x = 0.0;  // never print -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace

std::string write_descriptor_text(const ShapeDescriptor& d) {
    std::ostringstream os;
    os << "AXISDESC 1\n";
    os << "topology " << (d.topology == Topology::single_center ? "single-center" : "dumbbell")
       << "\n";
    os << "extrinsic " << fmt6(d.extrinsic.x0) << " " << fmt6(d.extrinsic.y0) << " "
       << fmt6(d.extrinsic.total_length) << " " << fmt6(d.extrinsic.m0) << " "
       << fmt6(d.extrinsic.m1) << "\n";
    for (int h = 0; h < 2; ++h) {
        os << "half " << h << " " << d.halves[h].size() << "\n";
        for (const BranchRecord& r : d.halves[h]) {
            os << (r.kind == AxisKind::positive ? "positive" : "negative") << " " << fmt6(r.r)
               << " " << fmt6(r.theta) << " " << fmt6(r.norm_length) << " "
               << (r.is_reference ? 1 : 0) << " " << r.order_index << "\n";
        }
    }
    return os.str();
}

void save_descriptor(const ShapeDescriptor& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError(path + ": cannot open for writing");
    out << write_descriptor_text(d);
    if (!out) throw PipelineError(path + ": write failed");
}

ShapeDescriptor parse_descriptor_text(const std::string& text, const std::string& origin_hint) {
    std::istringstream in(text);
    const auto fail = [&](const std::string& why) -> ShapeDescriptor {
        throw PipelineError(origin_hint + ": bad descriptor (" + why + ")");
    };
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "AXISDESC" || version != 1) {
        return fail("missing AXISDESC 1 header");
    }
    ShapeDescriptor d;
    if (!(in >> word) || word != "topology" || !(in >> word)) return fail("missing topology");
    if (word == "single-center") {
        d.topology = Topology::single_center;
    } else if (word == "dumbbell") {
        d.topology = Topology::dumbbell;
    } else {
        return fail("unknown topology " + word);
    }
    if (!(in >> word) || word != "extrinsic" ||
        !(in >> d.extrinsic.x0 >> d.extrinsic.y0 >> d.extrinsic.total_length >> d.extrinsic.m0 >>
          d.extrinsic.m1)) {
        return fail("missing extrinsic line");
    }
    d.total_axes_length = d.extrinsic.total_length;
    d.frames[0] = {d.extrinsic.x0, d.extrinsic.y0, d.extrinsic.m0, d.extrinsic.m1, 0};
    d.frames[1] = d.frames[0];
    d.frames[1].half_id = 1;
    for (int h = 0; h < 2; ++h) {
        int id = 0;
        std::size_t count = 0;
        if (!(in >> word >> id >> count) || word != "half" || id != h) {
            return fail("missing half " + std::to_string(h));
        }
        for (std::size_t k = 0; k < count; ++k) {
            BranchRecord r;
            int is_ref = 0;
            if (!(in >> word >> r.r >> r.theta >> r.norm_length >> is_ref >> r.order_index)) {
                return fail("truncated record list");
            }
            if (word == "positive") {
                r.kind = AxisKind::positive;
            } else if (word == "negative") {
                r.kind = AxisKind::negative;
            } else {
                return fail("unknown record kind " + word);
            }
            r.is_reference = is_ref != 0;
            d.halves[h].push_back(r);
        }
    }
    const int n = static_cast<int>(d.record_count());
    for (auto& half : d.halves) {
        for (BranchRecord& r : half) {
            if (r.order_index < 0 || r.order_index >= n) return fail("order index out of range");
            r.prev = (r.order_index + n - 1) % n;
            r.next = (r.order_index + 1) % n;
        }
    }
    return d;
}

ShapeDescriptor load_descriptor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError(path + ": cannot open descriptor");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_descriptor_text(ss.str(), path);
}

}  // namespace axisdesc
