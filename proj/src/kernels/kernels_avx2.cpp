// AVX2 variants of the grid kernels. Same operation tree as the scalar
// reference (pairwise sums, separate mul/add, no FMA) so results are
// bit-identical; the equivalence suite asserts that.

#include <immintrin.h>

#include <cmath>

#include "axisdesc/kernels.hpp"

namespace axisdesc::kernels {

namespace {

inline __m256d abs_pd(__m256d x) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, x);
}

void sor_sweep_avx2(double* v, const double* color_mask, const double* b, int w, int h,
                    double diag, double omega) {
    const double od = omega / diag;
    const __m256d vdiag = _mm256_set1_pd(diag);
    const __m256d vod = _mm256_set1_pd(od);
    for (int y = 1; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        int x = 1;
        for (; x + 3 <= w - 2; x += 4) {
            const std::size_t i = row + x;
            const __m256d left = _mm256_loadu_pd(v + i - 1);
            const __m256d right = _mm256_loadu_pd(v + i + 1);
            const __m256d up = _mm256_loadu_pd(v + i - w);
            const __m256d down = _mm256_loadu_pd(v + i + w);
            const __m256d sum = _mm256_add_pd(
                _mm256_add_pd(_mm256_add_pd(left, right), _mm256_add_pd(up, down)),
                _mm256_loadu_pd(b + i));
            const __m256d vi = _mm256_loadu_pd(v + i);
            const __m256d r = _mm256_sub_pd(sum, _mm256_mul_pd(vdiag, vi));
            const __m256d gain = _mm256_mul_pd(_mm256_loadu_pd(color_mask + i), vod);
            _mm256_storeu_pd(v + i, _mm256_add_pd(vi, _mm256_mul_pd(gain, r)));
        }
        for (; x < w - 1; ++x) {
            const std::size_t i = row + x;
            const double sum = ((v[i - 1] + v[i + 1]) + (v[i - w] + v[i + w])) + b[i];
            const double r = sum - diag * v[i];
            v[i] = v[i] + (color_mask[i] * od) * r;
        }
    }
}

double residual_max_avx2(const double* v, const double* free_mask, const double* b, int w,
                         int h, double diag) {
    const __m256d vdiag = _mm256_set1_pd(diag);
    __m256d vworst = _mm256_setzero_pd();
    double worst = 0.0;
    for (int y = 1; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        int x = 1;
        for (; x + 3 <= w - 2; x += 4) {
            const std::size_t i = row + x;
            const __m256d left = _mm256_loadu_pd(v + i - 1);
            const __m256d right = _mm256_loadu_pd(v + i + 1);
            const __m256d up = _mm256_loadu_pd(v + i - w);
            const __m256d down = _mm256_loadu_pd(v + i + w);
            const __m256d sum = _mm256_add_pd(
                _mm256_add_pd(_mm256_add_pd(left, right), _mm256_add_pd(up, down)),
                _mm256_loadu_pd(b + i));
            const __m256d r = _mm256_mul_pd(
                _mm256_sub_pd(sum, _mm256_mul_pd(vdiag, _mm256_loadu_pd(v + i))),
                _mm256_loadu_pd(free_mask + i));
            vworst = _mm256_max_pd(vworst, abs_pd(r));
        }
        for (; x < w - 1; ++x) {
            const std::size_t i = row + x;
            const double sum = ((v[i - 1] + v[i + 1]) + (v[i - w] + v[i + w])) + b[i];
            const double r = (sum - diag * v[i]) * free_mask[i];
            const double a = std::fabs(r);
            if (a > worst) worst = a;
        }
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vworst);
    for (double lane : lanes) {
        if (lane > worst) worst = lane;
    }
    return worst;
}

void gradient_avx2(const double* v, int w, int h, double* gx, double* gy, double* gm) {
    const __m256d half = _mm256_set1_pd(0.5);
    for (int y = 1; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        int x = 1;
        for (; x + 3 <= w - 2; x += 4) {
            const std::size_t i = row + x;
            const __m256d dx = _mm256_mul_pd(
                _mm256_sub_pd(_mm256_loadu_pd(v + i + 1), _mm256_loadu_pd(v + i - 1)), half);
            const __m256d dy = _mm256_mul_pd(
                _mm256_sub_pd(_mm256_loadu_pd(v + i + w), _mm256_loadu_pd(v + i - w)), half);
            _mm256_storeu_pd(gx + i, dx);
            _mm256_storeu_pd(gy + i, dy);
            _mm256_storeu_pd(gm + i, _mm256_sqrt_pd(
                _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy))));
        }
        for (; x < w - 1; ++x) {
            const std::size_t i = row + x;
            const double dx = (v[i + 1] - v[i - 1]) * 0.5;
            const double dy = (v[i + w] - v[i - w]) * 0.5;
            gx[i] = dx;
            gy[i] = dy;
            gm[i] = std::sqrt(dx * dx + dy * dy);
        }
    }
}

const Ops kAvx2Ops = {"avx2", sor_sweep_avx2, residual_max_avx2, gradient_avx2};

}  // namespace

const Ops& avx2_ops() { return kAvx2Ops; }

}  // namespace axisdesc::kernels
