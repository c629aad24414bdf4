#pragma once

#include <cstddef>
#include <string>

// Low-level array kernels used by the spectral and history modules.
//
// Every operation has a scalar reference implementation and an AVX2 variant.
// The active backend is picked once at startup (CPUID probe, overridable via
// the MEMODIFF_SIMD environment variable or kern::force()).  Elementwise
// kernels use plain mul/add in both variants, so their results are bitwise
// identical across backends; reductions differ only by summation order.

namespace memodiff::kern {

enum class Backend { Scalar, Avx2 };

// Backend selected for this process (env override applied on first call).
Backend active();

// Test hook: pin the backend.  Throws ConfigError if unsupported on this CPU.
void force(Backend b);

bool avx2_supported();
const char* backend_name(Backend b);

// ---- reductions -----------------------------------------------------------

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i x[i]^2
double sumsq(const double* x, std::size_t n);

// sum_i w[i] * x[i]^2
double wsumsq(const double* w, const double* x, std::size_t n);

// sum_i w[i] * a[i] * b[i]
double wdot3(const double* w, const double* a, const double* b, std::size_t n);

// ---- elementwise ----------------------------------------------------------

// y[i] += a * x[i]
void axpy(double* y, double a, const double* x, std::size_t n);

// out[i] = src[i] + d * u[i]
void shift_axpy(double* out, const double* src, double d, const double* u, std::size_t n);

// out[i] = c0*r0[i] + c1*r1[i] + d*u[i]
void blend2_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double d, const double* u, std::size_t n);

// out[i] = c0*r0[i] + c1*r1[i] + c2*r2[i] + c3*r3[i] + d*u[i]
void blend4_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double c2, const double* r2, double c3, const double* r3,
                 double d, const double* u, std::size_t n);

// out[j] = rhs[j] / (a + b * lam[j]); caller guarantees nonzero denominators
void diag_solve(double* out, const double* rhs, double a, double b, const double* lam,
                std::size_t n);

}  // namespace memodiff::kern
