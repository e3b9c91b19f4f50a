#include "axisdesc/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace axisdesc::kernels {

namespace {

void sor_sweep_scalar(double* v, const double* color_mask, const double* b, int w, int h,
                      double diag, double omega) {
    const double od = omega / diag;
    for (int y = 1; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = row + x;
            const double sum = ((v[i - 1] + v[i + 1]) + (v[i - w] + v[i + w])) + b[i];
            const double r = sum - diag * v[i];
            v[i] = v[i] + (color_mask[i] * od) * r;
        }
    }
}

double residual_max_scalar(const double* v, const double* free_mask, const double* b, int w,
                           int h, double diag) {
    double worst = 0.0;
    for (int y = 1; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = row + x;
            const double sum = ((v[i - 1] + v[i + 1]) + (v[i - w] + v[i + w])) + b[i];
            const double r = (sum - diag * v[i]) * free_mask[i];
            const double a = std::fabs(r);
            if (a > worst) worst = a;
        }
    }
    return worst;
}

void gradient_scalar(const double* v, int w, int h, double* gx, double* gy, double* gm) {
    for (int y = 1; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = row + x;
            const double dx = (v[i + 1] - v[i - 1]) * 0.5;
            const double dy = (v[i + w] - v[i - w]) * 0.5;
            gx[i] = dx;
            gy[i] = dy;
            gm[i] = std::sqrt(dx * dx + dy * dy);
        }
    }
}

const Ops kScalarOps = {"scalar", sor_sweep_scalar, residual_max_scalar, gradient_scalar};

const Ops* g_forced = nullptr;

const Ops* auto_select() {
    if (const char* env = std::getenv("AXISDESC_KERNELS")) {
        const std::string name(env);
        if (name == "scalar") return &kScalarOps;
        if (name == "avx2" && avx2_available()) return &avx2_ops();
        // Unknown value falls through to auto selection.
    }
    if (avx2_available()) return &avx2_ops();
    return &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

bool avx2_available() {
#if defined(AXISDESC_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

#if !defined(AXISDESC_BUILD_AVX2)
const Ops& avx2_ops() { throw std::runtime_error("avx2 kernels not built"); }
#endif

const Ops& active() {
    if (g_forced) return *g_forced;
    static const Ops* selected = auto_select();
    return *selected;
}

void force_backend(const std::string& name) {
    if (name.empty()) {
        g_forced = nullptr;
    } else if (name == "scalar") {
        g_forced = &kScalarOps;
    } else if (name == "avx2") {
        if (!avx2_available()) throw std::runtime_error("avx2 kernels unavailable on this host");
        g_forced = &avx2_ops();
    } else {
        throw std::runtime_error("unknown kernel backend: " + name);
    }
}

}  // namespace axisdesc::kernels
