#pragma once

#include <string>
#include <vector>

#include "axisdesc/mask.hpp"

namespace axisdesc {

enum class FieldMode { screened, diffusion };

struct SolverOptions {
    double tolerance = 1e-10;  // residual max-norm on free cells
    long max_sweeps = 400000; // full red+black sweeps before giving up
    int substeps = 8;         // implicit Euler steps per diffusion leg
};

// Scalar surface v over the padded raster. v = 1 on boundary cells and on the
// exterior (the Dirichlet data extended outward); free interior cells carry
// the solution.
struct Field {
    ShapeMask mask;
    FieldMode mode = FieldMode::diffusion;
    double rho = 0.0;  // screened mode only
    double tau = 0.0;  // diffusion mode only
    // Bound on the absolute value noise left by the solver (tolerance times
    // the worst conditioning of the solved systems); consumers use it to
    // separate exact-symmetry ties from real contrast.
    double noise_scale = 0.0;
    std::vector<double> values;

    double at(int x, int y) const { return values[mask.idx(x, y)]; }
    double at(Cell c) const { return values[mask.idx(c.x, c.y)]; }
};

enum class CriticalKind { elliptic, hyperbolic };

struct CriticalPoint {
    Cell cell;
    CriticalKind kind = CriticalKind::elliptic;
    double depth = 0.0;  // 1 - v at the cell
};

enum class AnnealTarget { single_center, retain_dumbbell };

struct DiffusionSchedule {
    double tau_start = 0.0;
    double growth_factor = 2.0;
    double tau_max = 0.0;
    AnnealTarget target = AnnealTarget::single_center;
    // A lone minimum only counts as the shape center once the surface has
    // evolved this far at the center ("sufficiently evolved"): below it the
    // field is rim-dominated and the deep interior is numerical noise.
    double evolution_floor = 0.35;

    // tau_start = max(width,height)/4, growth 2, tau_max = 64*tau_start.
    static DiffusionSchedule defaults_for(const ShapeMask& mask,
                                          AnnealTarget target = AnnealTarget::single_center);
};

// Solves laplacian(v) - v/rho^2 = 0 with v = 1 on the boundary cells
// (5-point stencil, unit spacing, red-black SOR). Throws PipelineError on
// non-convergence.
Field solve_screened(const ShapeMask& mask, double rho, const SolverOptions& opt = {});

// Linear diffusion dv/dtau = laplacian(v), v|boundary = 1, from v = 0 inside,
// integrated to time tau with opt.substeps implicit Euler steps.
Field diffuse(const ShapeMask& mask, double tau, const SolverOptions& opt = {});

// Continues an existing diffusion trajectory from field.tau to tau with
// opt.substeps implicit Euler steps. Per-cell values never decrease.
Field continue_diffusion(Field field, double tau, const SolverOptions& opt = {});

// Critical points whose depth is negligible next to the deepest one (sealed
// rasterization pockets, late-stage noise); topology decisions use the
// significant subset.
std::vector<CriticalPoint> significant_criticals(std::vector<CriticalPoint> cps);

// Merges critical points within the given radius into their deepest
// representative: a flat valley floor carries several rounding-level strict
// minima that are one center. Input order is the row-major find order;
// representatives keep it.
std::vector<CriticalPoint> cluster_criticals(std::vector<CriticalPoint> cps, double radius);

// Elliptic points are strict 8-neighbourhood minima of v (a connected plateau
// that is a local minimum counts once, at its centroid-nearest cell, ties
// row-major). Hyperbolic points show >= 2 sign alternation pairs of
// v(neighbour) - v(cell) around the 8-ring. Output sorted row-major.
std::vector<CriticalPoint> find_critical_points(const Field& field);

enum class Topology { single_center, dumbbell };

struct AnnealResult {
    Field field;
    CriticalPoint center;  // the elliptic point, or the saddle for dumbbells
    std::vector<CriticalPoint> criticals;
    Topology topology = Topology::single_center;
};

// Runs diffuse() along tau_start * growth_factor^k until the target topology
// appears: exactly one elliptic point (single_center), or a 2-elliptic +
// 1-hyperbolic state persisting for 3 consecutive schedule steps
// (retain_dumbbell; the first field of the persistent run is returned).
// A dumbbell anneal that collapses to a single centre before the dumbbell
// criterion fires returns that single-center state. Throws TopologyError
// when tau_max is exhausted, naming the surviving critical points.
AnnealResult anneal_to_center(const ShapeMask& mask, const DiffusionSchedule& schedule,
                              const SolverOptions& opt = {});

// Text dump: "FIELD w h" then row-major values.
void write_field(const Field& field, const std::string& path);

}  // namespace axisdesc
