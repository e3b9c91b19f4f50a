#pragma once

#include <vector>

#include "axisdesc/field.hpp"

namespace axisdesc {

enum class AxisKind { positive, negative };

// Positive points track protrusions (local minima of |grad v| along the level
// curve), negative points track indentations (local maxima).
struct SymmetryPoint {
    Cell cell;
    AxisKind kind = AxisKind::positive;
    double strength = 0.0;  // |grad v| at the cell
};

// 8-connected chain of same-kind symmetry points, boundary end first, deep
// end (lowest v, nearest a critical point) last.
struct SymmetryBranch {
    std::vector<Cell> points;
    AxisKind kind = AxisKind::positive;
    Cell termination;   // deep end
    double length = 0;  // arc length in pixels
};

struct GradientField {
    int width = 0, height = 0;
    std::vector<double> gx, gy, gm;  // raster row order; gy grows downward
    double max_gm = 0.0;             // over interior cells
};

GradientField compute_gradient(const Field& field);

std::vector<SymmetryPoint> detect_symmetry_points(const Field& field);

// Connectedness grouping: per-kind 8-connected components, split at cells
// with more than two chain neighbours, chains broken at cells adjacent to a
// critical point so branches terminate at centres/saddles.
std::vector<SymmetryBranch> group_branches(const std::vector<SymmetryPoint>& points,
                                           const Field& field,
                                           const std::vector<CriticalPoint>& criticals);

// Neighbourhood of the critical points: v within a fraction of the point's
// depth and geometric distance within a fraction of sqrt(interior area).
struct CenterRegion {
    struct Zone {
        Cell cell;
        double v = 0.0;
        double eps_v = 0.0;
        double radius = 0.0;
    };
    std::vector<Zone> zones;

    bool contains(Cell c, double v_at_c) const;
    bool within_distance(Cell c) const;  // geometric arrival, no v gate
    static CenterRegion around(const Field& field, const std::vector<CriticalPoint>& criticals);
    static CenterRegion around_one(const Field& field, const CriticalPoint& critical);
};

bool reaches_center(const SymmetryBranch& branch, const Field& field, const CenterRegion& region);

// Drops branches shorter than min_length unless their deep end reaches the
// center region. Branch order is preserved.
std::vector<SymmetryBranch> prune(std::vector<SymmetryBranch> branches, double min_length,
                                  const Field& field,
                                  const std::vector<CriticalPoint>& criticals);

// 3% of sqrt(interior area): scale-proportional noise floor.
double default_min_length(const ShapeMask& mask);

// Drops branches whose share of the total axes length is below weight_frac
// unless they reach the center region. Runs to a fixed point; a branch that
// cannot carry matching weight is descriptor noise.
std::vector<SymmetryBranch> drop_minor_branches(std::vector<SymmetryBranch> branches,
                                                double weight_frac, const Field& field,
                                                const std::vector<CriticalPoint>& criticals);

// Boundary pixelation leaves scallop chains hugging the rim. Branches that
// never leave the rim band (10% of sqrt(interior area) from the nearest
// exterior cell) and do not reach the center region are discretization
// artifacts; real part axes extend inward. Runs between grouping and pruning.
std::vector<SymmetryBranch> drop_rim_noise(std::vector<SymmetryBranch> branches,
                                           const Field& field,
                                           const std::vector<CriticalPoint>& criticals);

// City-block distance to the nearest exterior cell (0 outside the interior).
std::vector<int> interior_depth_map(const ShapeMask& mask);

}  // namespace axisdesc
