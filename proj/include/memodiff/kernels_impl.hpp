#pragma once

// Internal header: per-backend entry points behind the dispatch layer.
// Not part of the public API.

#include <cstddef>

namespace memodiff::kern {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* x, std::size_t n);
double wsumsq(const double* w, const double* x, std::size_t n);
double wdot3(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
void shift_axpy(double* out, const double* src, double d, const double* u, std::size_t n);
void blend2_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double d, const double* u, std::size_t n);
void blend4_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double c2, const double* r2, double c3, const double* r3,
                 double d, const double* u, std::size_t n);
void diag_solve(double* out, const double* rhs, double a, double b, const double* lam,
                std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled_in();
double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* x, std::size_t n);
double wsumsq(const double* w, const double* x, std::size_t n);
double wdot3(const double* w, const double* a, const double* b, std::size_t n);
void axpy(double* y, double a, const double* x, std::size_t n);
void shift_axpy(double* out, const double* src, double d, const double* u, std::size_t n);
void blend2_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double d, const double* u, std::size_t n);
void blend4_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double c2, const double* r2, double c3, const double* r3,
                 double d, const double* u, std::size_t n);
void diag_solve(double* out, const double* rhs, double a, double b, const double* lam,
                std::size_t n);
}  // namespace avx2

}  // namespace memodiff::kern
