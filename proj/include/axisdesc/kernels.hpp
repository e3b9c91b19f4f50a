#pragma once

#include <string>

namespace axisdesc::kernels {

// Grid kernels for the field solver. All kernels operate on full w*h rasters
// and visit cells with x in [1,w-2], y in [1,h-2]; the caller guarantees the
// outermost ring is never a solvable cell (mask margin).
//
// Fixed cells (Dirichlet boundary, exterior) are handled branch-free through
// multiplicative 0/1 masks. Every backend must produce bit-identical output:
// the scalar kernels define the reference operation order
//   sum  = ((L + R) + (U + D)) + b[i]
//   r    = sum - diag * v[i]
//   v[i] = v[i] + (mask[i] * (omega / diag)) * r
// and no backend may fuse multiply-add. That ordering also makes one solve
// bit-for-bit covariant under 90-degree grid rotations (pairwise sums only
// commute operands, and IEEE addition is commutative).
struct Ops {
    const char* name;

    // One half sweep of red-black SOR for  sum4(v) + b - diag*v = 0.
    // color_mask is 1.0 on free cells of the colour being swept, else 0.0.
    void (*sor_sweep)(double* v, const double* color_mask, const double* b, int w, int h,
                      double diag, double omega);

    // max |sum4(v) + b - diag*v| over cells with free_mask == 1.0.
    double (*residual_max)(const double* v, const double* free_mask, const double* b, int w,
                           int h, double diag);

    // Central differences: gx = (R-L)/2, gy = (D-U)/2 in raster row order,
    // gm = sqrt(gx^2 + gy^2). Outermost ring is left untouched.
    void (*gradient)(const double* v, int w, int h, double* gx, double* gy, double* gm);
};

const Ops& scalar_ops();
bool avx2_available();       // compiled in and supported by this CPU
const Ops& avx2_ops();       // only valid when avx2_available()
const Ops& active();         // runtime-selected backend

// Overrides auto-selection ("scalar", "avx2", "" = auto). Throws
// std::runtime_error for an unknown or unavailable backend. The
// AXISDESC_KERNELS environment variable applies the same override.
void force_backend(const std::string& name);

}  // namespace axisdesc::kernels
