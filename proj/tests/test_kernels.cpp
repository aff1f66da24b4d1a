#include <doctest.h>

#include <cmath>
#include <vector>

#include "saidr/kernels.hpp"
#include "saidr/rng.hpp"

using namespace saidr;
namespace k = saidr::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

struct BackendGuard {
    k::Backend saved;
    BackendGuard() : saved(k::active_backend()) {}
    ~BackendGuard() { k::set_backend(saved); }
};

constexpr std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 31, 64, 257, 1000};

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("scalar kernels compute the stated formulas") {
    BackendGuard guard;
    k::set_backend(k::Backend::scalar);
    Rng rng(11);
    for (std::size_t n : kSizes) {
        auto x = random_vec(n, rng);
        auto y = random_vec(n, rng);
        const double a = rng.uniform(-2.0, 2.0);

        double s = 0.0, d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += x[i];
            d += x[i] * y[i];
        }
        CHECK(close(k::sum(x), s, 1e-12));
        CHECK(close(k::dot(x, y), d, 1e-12));

        std::vector<double> out(n, 0.0);
        k::scale(a, x, out);
        for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == a * x[i]);

        auto y2 = y;
        k::axpy(a, x, y2);
        for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == y[i] + a * x[i]);

        k::xpay(x, a, y, out);
        for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == x[i] + a * y[i]);

        k::chain(a, x, y, out);
        for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == a * (x[i] - y[i]));
    }
}

TEST_CASE("rk4 combine matches the direct stencil") {
    BackendGuard guard;
    k::set_backend(k::Backend::scalar);
    Rng rng(12);
    const std::size_t n = 100;
    auto y0 = random_vec(n, rng);
    auto k1 = random_vec(n, rng);
    auto k2 = random_vec(n, rng);
    auto k3 = random_vec(n, rng);
    auto k4 = random_vec(n, rng);
    const double dt = 0.05;
    std::vector<double> out(n);
    k::rk4_combine(y0, k1, k2, k3, k4, dt, out);
    for (std::size_t i = 0; i < n; ++i) {
        const double want = y0[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        CHECK(close(out[i], want, 1e-15));
    }
}

TEST_CASE("clip_negative zeroes the guard band only and reports the minimum") {
    BackendGuard guard;
    for (auto backend : {k::Backend::scalar, k::Backend::avx2}) {
        if (!k::supported(backend)) continue;
        k::set_backend(backend);
        std::vector<double> v = {0.5, -1e-10, -2e-9, 0.0, -5e-10, 1.0, -1e-12, 0.25};
        const double lowest = k::clip_negative(v, -1e-9);
        CHECK(lowest == doctest::Approx(-2e-9));
        CHECK(v[0] == 0.5);
        CHECK(v[1] == 0.0);      // inside (floor, 0): clipped
        CHECK(v[2] == -2e-9);    // below floor: untouched, caller must abort
        CHECK(v[4] == 0.0);
        CHECK(v[6] == 0.0);
        std::vector<double> empty;
        CHECK(k::clip_negative(empty, -1e-9) == 0.0);
    }
}

TEST_CASE("avx2 backend matches the scalar reference") {
    if (!k::supported(k::Backend::avx2)) {
        MESSAGE("AVX2 not available; equivalence test skipped");
        return;
    }
    BackendGuard guard;
    Rng rng(13);
    for (std::size_t n : kSizes) {
        auto x = random_vec(n, rng);
        auto y = random_vec(n, rng);
        auto z = random_vec(n, rng);
        auto drain = random_vec(n, rng, 0.0, 1.0);
        const double a = rng.uniform(-2.0, 2.0);

        k::set_backend(k::Backend::scalar);
        const double s_sum = k::sum(x);
        const double s_dot = k::dot(x, y);
        std::vector<double> s1(n), s2(n), s3(n), s4(n), s5(n), s6(n);
        auto sy = y;
        k::scale(a, x, s1);
        k::axpy(a, x, sy);
        k::xpay(x, a, y, s2);
        k::chain(a, x, y, s3);
        k::chain_drain(a, x, y, drain, s4);
        k::rk4_combine(x, y, z, drain, x, 0.05, s5);
        k::mul(x, y, s6);
        auto sadd = z;
        k::add(x, sadd);
        auto smul = z;
        k::mul_add(x, y, smul);
        auto ssub = z;
        k::mul_sub(x, y, ssub);
        auto sclip = x;
        const double smin = k::clip_negative(sclip, -0.5);

        k::set_backend(k::Backend::avx2);
        const double v_sum = k::sum(x);
        const double v_dot = k::dot(x, y);
        std::vector<double> v1(n), v2(n), v3(n), v4(n), v5(n), v6(n);
        auto vy = y;
        k::scale(a, x, v1);
        k::axpy(a, x, vy);
        k::xpay(x, a, y, v2);
        k::chain(a, x, y, v3);
        k::chain_drain(a, x, y, drain, v4);
        k::rk4_combine(x, y, z, drain, x, 0.05, v5);
        k::mul(x, y, v6);
        auto vadd = z;
        k::add(x, vadd);
        auto vmul = z;
        k::mul_add(x, y, vmul);
        auto vsub = z;
        k::mul_sub(x, y, vsub);
        auto vclip = x;
        const double vmin = k::clip_negative(vclip, -0.5);

        CHECK(close(s_sum, v_sum, 1e-12));
        CHECK(close(s_dot, v_dot, 1e-12));
        CHECK(smin == vmin);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(s1[i], v1[i], 1e-14));
            CHECK(close(sy[i], vy[i], 1e-14));
            CHECK(close(s2[i], v2[i], 1e-14));
            CHECK(close(s3[i], v3[i], 1e-14));
            CHECK(close(s4[i], v4[i], 1e-14));
            CHECK(close(s5[i], v5[i], 1e-14));
            CHECK(s6[i] == v6[i]);
            CHECK(sadd[i] == vadd[i]);
            CHECK(close(smul[i], vmul[i], 1e-14));
            CHECK(close(ssub[i], vsub[i], 1e-14));
            CHECK(sclip[i] == vclip[i]);
        }
    }
}

TEST_CASE("backend selection is sticky and reports its name") {
    BackendGuard guard;
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(std::string(k::backend_name()) == "scalar");
    if (k::supported(k::Backend::avx2)) {
        k::set_backend(k::Backend::avx2);
        CHECK(std::string(k::backend_name()) == "avx2");
    }
}
