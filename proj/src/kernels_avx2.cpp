// AVX2/FMA variants of the vector kernels. This translation unit is compiled
// with -mavx2 -mfma on x86-64; the dispatcher in kernels.cpp only installs
// these after a runtime cpuid check.

#include "kernels_impl.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace saidr::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void scale_avx2(double a, const double* x, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) out[i] = a * x[i];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void add_avx2(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) y[i] += x[i];
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void mul_add_avx2(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vo = _mm256_loadu_pd(out + i);
        _mm256_storeu_pd(out + i,
                         _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), vo));
    }
    for (; i < n; ++i) out[i] += x[i] * y[i];
}

void mul_sub_avx2(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vo = _mm256_loadu_pd(out + i);
        _mm256_storeu_pd(out + i,
                         _mm256_fnmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), vo));
    }
    for (; i < n; ++i) out[i] -= x[i] * y[i];
}

void chain_avx2(double rate, const double* prev, const double* cur, double* out, std::size_t n) {
    const __m256d vr = _mm256_set1_pd(rate);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prev + i), _mm256_loadu_pd(cur + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vr, d));
    }
    for (; i < n; ++i) out[i] = rate * (prev[i] - cur[i]);
}

void chain_drain_avx2(double rate, const double* prev, const double* cur, const double* drain,
                      double* out, std::size_t n) {
    const __m256d vr = _mm256_set1_pd(rate);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vc = _mm256_loadu_pd(cur + i);
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prev + i), vc);
        __m256d base = _mm256_mul_pd(vr, d);
        _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(_mm256_loadu_pd(drain + i), vc, base));
    }
    for (; i < n; ++i) out[i] = rate * (prev[i] - cur[i]) - drain[i] * cur[i];
}

void xpay_avx2(const double* x, double a, const double* y, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), vx));
    }
    for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine_avx2(const double* y0, const double* k1, const double* k2, const double* k3,
                      const double* k4, double dt, double* out, std::size_t n) {
    const double w = dt / 6.0;
    const __m256d vw = _mm256_set1_pd(w);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mid = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
        acc = _mm256_fmadd_pd(two, mid, acc);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vw, acc, _mm256_loadu_pd(y0 + i)));
    }
    for (; i < n; ++i) {
        out[i] = y0[i] + w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
}

double clip_negative_avx2(double* x, double floor, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d vfloor = _mm256_set1_pd(floor);
    __m256d vmin = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        vmin = _mm256_min_pd(vmin, v);
        __m256d neg = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
        __m256d above = _mm256_cmp_pd(v, vfloor, _CMP_GE_OQ);
        __m256d mask = _mm256_and_pd(neg, above);
        _mm256_storeu_pd(x + i, _mm256_blendv_pd(v, zero, mask));
    }
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, vmin);
    double lowest = tmp[0];
    for (int k = 1; k < 4; ++k) {
        if (tmp[k] < lowest) lowest = tmp[k];
    }
    for (; i < n; ++i) {
        const double v = x[i];
        if (v < lowest) lowest = v;
        if (v < 0.0 && v >= floor) x[i] = 0.0;
    }
    return lowest;
}

constexpr Vtable kAvx2Table = {
    sum_avx2,    dot_avx2,     scale_avx2, axpy_avx2,        add_avx2,
    mul_avx2,    mul_add_avx2, mul_sub_avx2, chain_avx2,     chain_drain_avx2,
    xpay_avx2,   rk4_combine_avx2, clip_negative_avx2,
};

} // namespace

const Vtable* avx2_table() { return &kAvx2Table; }

} // namespace saidr::kernels::detail

#else

namespace saidr::kernels::detail {

const Vtable* avx2_table() { return nullptr; }

} // namespace saidr::kernels::detail

#endif
