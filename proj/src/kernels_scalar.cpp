// Scalar reference implementations.  These define the semantics the AVX2
// variants are tested against.

#include "memodiff/kernels_impl.hpp"

namespace memodiff::kern::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sumsq(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double wsumsq(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * (x[i] * x[i]);
    return acc;
}

double wdot3(const double* w, const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * (a[i] * b[i]);
    return acc;
}

void axpy(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void shift_axpy(double* out, const double* src, double d, const double* u, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = src[i] + d * u[i];
}

void blend2_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double d, const double* u, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c0 * r0[i] + c1 * r1[i] + d * u[i];
}

void blend4_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double c2, const double* r2, double c3, const double* r3,
                 double d, const double* u, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = c0 * r0[i] + c1 * r1[i] + c2 * r2[i] + c3 * r3[i] + d * u[i];
}

void diag_solve(double* out, const double* rhs, double a, double b, const double* lam,
                std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / (a + b * lam[i]);
}

}  // namespace memodiff::kern::scalar
