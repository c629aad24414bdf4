// AVX2 variants (4-wide double).  Built with -mavx2 -ffp-contract=off; the
// elementwise loops use explicit mul/add so results match the scalar backend
// bit for bit.  Reductions keep four running lanes and fold at the end, so
// they may differ from scalar by rounding of the summation order only.

#include "memodiff/kernels_impl.hpp"

#ifdef __AVX2__
#include <immintrin.h>

namespace memodiff::kern::avx2 {

bool compiled_in() { return true; }

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    __m128d swap = _mm_shuffle_pd(s, s, 0x1);
    return _mm_cvtsd_f64(_mm_add_sd(s, swap));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return hsum(acc) + tail;
}

double sumsq(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * x[i];
    return hsum(acc) + tail;
}

double wsumsq(const double* w, const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d vw = _mm256_loadu_pd(w + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_mul_pd(vx, vx)));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += w[i] * (x[i] * x[i]);
    return hsum(acc) + tail;
}

double wdot3(const double* w, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d vw = _mm256_loadu_pd(w + i);
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_mul_pd(va, vb)));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += w[i] * (a[i] * b[i]);
    return hsum(acc) + tail;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d va = _mm256_set1_pd(a);
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void shift_axpy(double* out, const double* src, double d, const double* u, std::size_t n) {
    std::size_t i = 0;
    __m256d vd = _mm256_set1_pd(d);
    for (; i + 4 <= n; i += 4) {
        __m256d vs = _mm256_loadu_pd(src + i);
        __m256d vu = _mm256_loadu_pd(u + i);
        _mm256_storeu_pd(out + i, _mm256_add_pd(vs, _mm256_mul_pd(vd, vu)));
    }
    for (; i < n; ++i) out[i] = src[i] + d * u[i];
}

void blend2_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double d, const double* u, std::size_t n) {
    std::size_t i = 0;
    __m256d vc0 = _mm256_set1_pd(c0), vc1 = _mm256_set1_pd(c1), vd = _mm256_set1_pd(d);
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_mul_pd(vc0, _mm256_loadu_pd(r0 + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vc1, _mm256_loadu_pd(r1 + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vd, _mm256_loadu_pd(u + i)));
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) out[i] = c0 * r0[i] + c1 * r1[i] + d * u[i];
}

void blend4_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double c2, const double* r2, double c3, const double* r3,
                 double d, const double* u, std::size_t n) {
    std::size_t i = 0;
    __m256d vc0 = _mm256_set1_pd(c0), vc1 = _mm256_set1_pd(c1);
    __m256d vc2 = _mm256_set1_pd(c2), vc3 = _mm256_set1_pd(c3);
    __m256d vd = _mm256_set1_pd(d);
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_mul_pd(vc0, _mm256_loadu_pd(r0 + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vc1, _mm256_loadu_pd(r1 + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vc2, _mm256_loadu_pd(r2 + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vc3, _mm256_loadu_pd(r3 + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vd, _mm256_loadu_pd(u + i)));
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i)
        out[i] = c0 * r0[i] + c1 * r1[i] + c2 * r2[i] + c3 * r3[i] + d * u[i];
}

void diag_solve(double* out, const double* rhs, double a, double b, const double* lam,
                std::size_t n) {
    std::size_t i = 0;
    __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
    for (; i + 4 <= n; i += 4) {
        __m256d den = _mm256_add_pd(va, _mm256_mul_pd(vb, _mm256_loadu_pd(lam + i)));
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(rhs + i), den));
    }
    for (; i < n; ++i) out[i] = rhs[i] / (a + b * lam[i]);
}

}  // namespace memodiff::kern::avx2

#else  // !__AVX2__

// Translation unit built without AVX2 support: provide stubs so the dispatch
// layer links; they are never selected at runtime.

namespace memodiff::kern::avx2 {
bool compiled_in() { return false; }
double dot(const double*, const double*, std::size_t) { return 0.0; }
double sumsq(const double*, std::size_t) { return 0.0; }
double wsumsq(const double*, const double*, std::size_t) { return 0.0; }
double wdot3(const double*, const double*, const double*, std::size_t) { return 0.0; }
void axpy(double*, double, const double*, std::size_t) {}
void shift_axpy(double*, const double*, double, const double*, std::size_t) {}
void blend2_axpy(double*, double, const double*, double, const double*, double,
                 const double*, std::size_t) {}
void blend4_axpy(double*, double, const double*, double, const double*, double,
                 const double*, double, const double*, double, const double*,
                 std::size_t) {}
void diag_solve(double*, const double*, double, double, const double*, std::size_t) {}
}  // namespace memodiff::kern::avx2

#endif
