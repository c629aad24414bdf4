#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "memodiff/errors.hpp"
#include "memodiff/kernels.hpp"

using namespace memodiff;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

// Sizes straddling the 4-lane vector width, including remainders.
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 128, 1001};

}  // namespace

TEST_CASE("backend names and probe") {
    CHECK(std::string(kern::backend_name(kern::Backend::Scalar)) == "scalar");
    CHECK(std::string(kern::backend_name(kern::Backend::Avx2)) == "avx2");
    kern::Backend b = kern::active();
    CHECK((b == kern::Backend::Scalar || b == kern::Backend::Avx2));
    if (!kern::avx2_supported())
        CHECK_THROWS_AS(kern::force(kern::Backend::Avx2), ConfigError);
}

TEST_CASE("scalar reference values") {
    kern::force(kern::Backend::Scalar);
    std::vector<double> a = {1, 2, 3}, b = {4, 5, 6}, w = {2, 2, 2};
    CHECK(kern::dot(a.data(), b.data(), 3) == doctest::Approx(32.0));
    CHECK(kern::sumsq(a.data(), 3) == doctest::Approx(14.0));
    CHECK(kern::wsumsq(w.data(), a.data(), 3) == doctest::Approx(28.0));
    CHECK(kern::wdot3(w.data(), a.data(), b.data(), 3) == doctest::Approx(64.0));

    std::vector<double> y = {1, 1, 1};
    kern::axpy(y.data(), 2.0, a.data(), 3);
    CHECK(y == std::vector<double>{3, 5, 7});

    std::vector<double> out(3);
    kern::shift_axpy(out.data(), a.data(), 0.5, b.data(), 3);
    CHECK(out == std::vector<double>{3, 4.5, 6});

    kern::blend2_axpy(out.data(), 2.0, a.data(), -1.0, b.data(), 0.0, a.data(), 3);
    CHECK(out == std::vector<double>{-2, -1, 0});

    kern::blend4_axpy(out.data(), 1.0, a.data(), 1.0, b.data(), -1.0, a.data(),
                      0.0, b.data(), 3.0, w.data(), 3);
    CHECK(out == std::vector<double>{10, 11, 12});

    std::vector<double> lam = {1, 2, 3}, rhs = {2, 6, 12};
    kern::diag_solve(out.data(), rhs.data(), 1.0, 1.0, lam.data(), 3);
    CHECK(out == std::vector<double>{1, 2, 3});
}

TEST_CASE("avx2 matches scalar") {
    if (!kern::avx2_supported()) {
        MESSAGE("AVX2 not available; equivalence covered by the scalar path");
        return;
    }
    std::mt19937 rng(20240819);
    for (std::size_t n : kSizes) {
        CAPTURE(n);
        auto a = random_vec(rng, n), b = random_vec(rng, n), w = random_vec(rng, n);
        auto c = random_vec(rng, n), d = random_vec(rng, n);
        std::vector<double> lam(n);
        for (std::size_t i = 0; i < n; ++i) lam[i] = 1.0 + static_cast<double>(i);

        // Reductions: same value up to summation order.
        kern::force(kern::Backend::Scalar);
        double dot_s = kern::dot(a.data(), b.data(), n);
        double ss_s = kern::sumsq(a.data(), n);
        double ws_s = kern::wsumsq(w.data(), a.data(), n);
        double wd_s = kern::wdot3(w.data(), a.data(), b.data(), n);
        kern::force(kern::Backend::Avx2);
        CHECK(kern::dot(a.data(), b.data(), n) ==
              doctest::Approx(dot_s).epsilon(1e-13));
        CHECK(kern::sumsq(a.data(), n) == doctest::Approx(ss_s).epsilon(1e-13));
        CHECK(kern::wsumsq(w.data(), a.data(), n) ==
              doctest::Approx(ws_s).epsilon(1e-13));
        CHECK(kern::wdot3(w.data(), a.data(), b.data(), n) ==
              doctest::Approx(wd_s).epsilon(1e-13));

        // Elementwise: bitwise identical.
        std::vector<double> ys = a, ya = a;
        kern::force(kern::Backend::Scalar);
        kern::axpy(ys.data(), 1.7, b.data(), n);
        kern::force(kern::Backend::Avx2);
        kern::axpy(ya.data(), 1.7, b.data(), n);
        CHECK(ys == ya);

        std::vector<double> os(n), oa(n);
        kern::force(kern::Backend::Scalar);
        kern::shift_axpy(os.data(), a.data(), 0.37, b.data(), n);
        kern::force(kern::Backend::Avx2);
        kern::shift_axpy(oa.data(), a.data(), 0.37, b.data(), n);
        CHECK(os == oa);

        kern::force(kern::Backend::Scalar);
        kern::blend2_axpy(os.data(), 0.3, a.data(), -1.2, b.data(), 0.9, c.data(), n);
        kern::force(kern::Backend::Avx2);
        kern::blend2_axpy(oa.data(), 0.3, a.data(), -1.2, b.data(), 0.9, c.data(), n);
        CHECK(os == oa);

        kern::force(kern::Backend::Scalar);
        kern::blend4_axpy(os.data(), 0.3, a.data(), -1.2, b.data(), 2.1, c.data(),
                          -0.4, d.data(), 0.9, w.data(), n);
        kern::force(kern::Backend::Avx2);
        kern::blend4_axpy(oa.data(), 0.3, a.data(), -1.2, b.data(), 2.1, c.data(),
                          -0.4, d.data(), 0.9, w.data(), n);
        CHECK(os == oa);

        kern::force(kern::Backend::Scalar);
        kern::diag_solve(os.data(), a.data(), 1.0, 0.25, lam.data(), n);
        kern::force(kern::Backend::Avx2);
        kern::diag_solve(oa.data(), a.data(), 1.0, 0.25, lam.data(), n);
        CHECK(os == oa);
    }
    kern::force(kern::Backend::Scalar);
}
