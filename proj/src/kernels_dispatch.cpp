#include "memodiff/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "memodiff/errors.hpp"
#include "memodiff/kernels_impl.hpp"

namespace memodiff::kern {

namespace {

Backend g_backend = Backend::Scalar;
bool g_resolved = false;

Backend resolve() {
    Backend b = (avx2_supported() && avx2::compiled_in()) ? Backend::Avx2 : Backend::Scalar;
    if (const char* env = std::getenv("MEMODIFF_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) b = Backend::Scalar;
        else if (std::strcmp(env, "avx2") == 0 && avx2_supported() && avx2::compiled_in())
            b = Backend::Avx2;
    }
    return b;
}

}  // namespace

bool avx2_supported() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend active() {
    if (!g_resolved) {
        g_backend = resolve();
        g_resolved = true;
    }
    return g_backend;
}

void force(Backend b) {
    if (b == Backend::Avx2 && !(avx2_supported() && avx2::compiled_in()))
        throw ConfigError("AVX2 backend requested but unavailable on this CPU/build");
    g_backend = b;
    g_resolved = true;
}

const char* backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
    return active() == Backend::Avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

double sumsq(const double* x, std::size_t n) {
    return active() == Backend::Avx2 ? avx2::sumsq(x, n) : scalar::sumsq(x, n);
}

double wsumsq(const double* w, const double* x, std::size_t n) {
    return active() == Backend::Avx2 ? avx2::wsumsq(w, x, n) : scalar::wsumsq(w, x, n);
}

double wdot3(const double* w, const double* a, const double* b, std::size_t n) {
    return active() == Backend::Avx2 ? avx2::wdot3(w, a, b, n) : scalar::wdot3(w, a, b, n);
}

void axpy(double* y, double a, const double* x, std::size_t n) {
    active() == Backend::Avx2 ? avx2::axpy(y, a, x, n) : scalar::axpy(y, a, x, n);
}

void shift_axpy(double* out, const double* src, double d, const double* u, std::size_t n) {
    active() == Backend::Avx2 ? avx2::shift_axpy(out, src, d, u, n)
                              : scalar::shift_axpy(out, src, d, u, n);
}

void blend2_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double d, const double* u, std::size_t n) {
    active() == Backend::Avx2 ? avx2::blend2_axpy(out, c0, r0, c1, r1, d, u, n)
                              : scalar::blend2_axpy(out, c0, r0, c1, r1, d, u, n);
}

void blend4_axpy(double* out, double c0, const double* r0, double c1, const double* r1,
                 double c2, const double* r2, double c3, const double* r3,
                 double d, const double* u, std::size_t n) {
    active() == Backend::Avx2
        ? avx2::blend4_axpy(out, c0, r0, c1, r1, c2, r2, c3, r3, d, u, n)
        : scalar::blend4_axpy(out, c0, r0, c1, r1, c2, r2, c3, r3, d, u, n);
}

void diag_solve(double* out, const double* rhs, double a, double b, const double* lam,
                std::size_t n) {
    active() == Backend::Avx2 ? avx2::diag_solve(out, rhs, a, b, lam, n)
                              : scalar::diag_solve(out, rhs, a, b, lam, n);
}

}  // namespace memodiff::kern
