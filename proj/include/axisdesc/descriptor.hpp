#pragma once

#include <array>
#include <string>
#include <vector>

#include "axisdesc/symmetry.hpp"

namespace axisdesc {

// Polar frame anchored at the shape origin; the axis points from the origin
// toward the anchor point of a major branch. Directions use y-up components.
struct ReferenceFrame {
    double origin_x = 0.0, origin_y = 0.0;  // raster coordinates
    double axis_x = 1.0, axis_y = 0.0;      // unit vector, y-up
    int half_id = 0;
};

struct BranchRecord {
    AxisKind kind = AxisKind::positive;
    double r = 0.0;            // |origin -> termination| / total axes length
    double theta = 0.0;        // CCW from the half's reference axis, [0, 2pi)
    double norm_length = 0.0;  // branch length / total axes length
    bool is_reference = false;
    int order_index = 0;       // position in the global CCW sweep
    int prev = 0, next = 0;    // cyclic neighbours in the sweep
};

struct ShapeDescriptor {
    Topology topology = Topology::single_center;
    std::array<ReferenceFrame, 2> frames;
    std::array<std::vector<BranchRecord>, 2> halves;
    double total_axes_length = 0.0;
    struct Extrinsic {
        double x0 = 0.0, y0 = 0.0;  // origin in source-image coordinates
        double total_length = 0.0;
        double m0 = 1.0, m1 = 0.0;  // half-0 reference axis direction, y-up
    } extrinsic;

    std::size_t record_count() const { return halves[0].size() + halves[1].size(); }
    const BranchRecord& record(int order_index) const;
};

// Indices into the pruned branch list whose deep end reaches the center
// region around the given critical point.
struct MajorAxes {
    std::vector<int> positive;
    std::vector<int> negative;
};

MajorAxes find_major_axes(const std::vector<SymmetryBranch>& branches,
                          const CriticalPoint& center, const Field& field);

// d_anchor = 0.15 * sqrt(interior area), clamped to the branch length.
double anchor_distance(const ShapeMask& mask);

// Point on the branch at arc distance d_anchor from the origin, walking from
// the origin-near end outward; the far end when the branch is shorter.
Cell anchor_point(const SymmetryBranch& branch, Cell origin, const Field& field);

struct FramePair {
    ReferenceFrame half0, half1;
    int anchor0 = -1, anchor1 = -1;  // indices into the branch list
};

// One pair for exactly two positive major axes; all n(n-1) ordered pairs when
// n > 2 axes reach the center. Throws PipelineError("insufficient major
// axes...") when fewer than two are available.
std::vector<FramePair> build_frames(const std::vector<SymmetryBranch>& branches,
                                    const std::vector<int>& major_positive, Cell origin,
                                    const Field& field);

// Frames for the dumbbell topology: origin at the saddle, anchored on the two
// positive axes running into it. Throws PipelineError when the saddle lacks
// two positive axes (callers fall back to per-lobe single-center frames).
std::vector<FramePair> dumbbell_frames(const std::vector<CriticalPoint>& criticals,
                                       const std::vector<SymmetryBranch>& branches,
                                       const Field& field);

ShapeDescriptor build_descriptor(const std::vector<SymmetryBranch>& branches,
                                 const FramePair& frames, Cell origin, const Field& field,
                                 Topology topology);

// Text form (byte-stable):
//   AXISDESC 1
//   topology single-center|dumbbell
//   extrinsic x0 y0 total_length m0 m1
//   half <id> <n>
//   <kind> <r> <theta> <norm_length> <is_ref> <order_index>
std::string write_descriptor_text(const ShapeDescriptor& d);
void save_descriptor(const ShapeDescriptor& d, const std::string& path);
ShapeDescriptor parse_descriptor_text(const std::string& text, const std::string& origin_hint);
ShapeDescriptor load_descriptor(const std::string& path);

// Angle of a raster-coordinate vector measured CCW with the y axis up,
// normalized to [0, 2pi).
double angle_ccw(double dx_raster, double dy_raster);

}  // namespace axisdesc
