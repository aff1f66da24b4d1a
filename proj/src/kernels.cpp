#include "saidr/kernels.hpp"

#include <cstdlib>
#include <string>

#include "saidr/errors.hpp"
#include "kernels_impl.hpp"

namespace saidr::kernels {
namespace detail {
namespace {

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void scale_scalar(double a, const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void mul_add_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += x[i] * y[i];
}

void mul_sub_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] -= x[i] * y[i];
}

void chain_scalar(double rate, const double* prev, const double* cur, double* out,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rate * (prev[i] - cur[i]);
}

void chain_drain_scalar(double rate, const double* prev, const double* cur,
                        const double* drain, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rate * (prev[i] - cur[i]) - drain[i] * cur[i];
}

void xpay_scalar(const double* x, double a, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void rk4_combine_scalar(const double* y0, const double* k1, const double* k2, const double* k3,
                        const double* k4, double dt, double* out, std::size_t n) {
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = y0[i] + w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
}

double clip_negative_scalar(double* x, double floor, std::size_t n) {
    double lowest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        if (v < lowest) lowest = v;
        if (v < 0.0 && v >= floor) x[i] = 0.0;
    }
    return lowest;
}

constexpr Vtable kScalarTable = {
    sum_scalar,    dot_scalar,     scale_scalar, axpy_scalar,        add_scalar,
    mul_scalar,    mul_add_scalar, mul_sub_scalar, chain_scalar,     chain_drain_scalar,
    xpay_scalar,   rk4_combine_scalar, clip_negative_scalar,
};

} // namespace

const Vtable& scalar_table() { return kScalarTable; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace detail

namespace {

struct Dispatch {
    const detail::Vtable* table;
    Backend backend;
};

Dispatch make_default_dispatch() {
    const char* env = std::getenv("SAIDR_KERNELS");
    const std::string want = env ? env : "";
    const detail::Vtable* avx2 = detail::cpu_has_avx2() ? detail::avx2_table() : nullptr;
    if (want == "scalar") return {&detail::scalar_table(), Backend::scalar};
    if (want == "avx2" && avx2) return {avx2, Backend::avx2};
    if (avx2) return {avx2, Backend::avx2};
    return {&detail::scalar_table(), Backend::scalar};
}

Dispatch& dispatch() {
    static Dispatch d = make_default_dispatch();
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

bool supported(Backend b) {
    if (b == Backend::scalar) return true;
    return detail::cpu_has_avx2() && detail::avx2_table() != nullptr;
}

void set_backend(Backend b) {
    if (!supported(b)) throw input_error("kernel backend not supported on this CPU");
    dispatch() = {b == Backend::avx2 ? detail::avx2_table() : &detail::scalar_table(), b};
}

const char* backend_name() {
    return dispatch().backend == Backend::avx2 ? "avx2" : "scalar";
}

double sum(std::span<const double> x) { return dispatch().table->sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
    return dispatch().table->dot(x.data(), y.data(), x.size());
}

void scale(double a, std::span<const double> x, std::span<double> out) {
    dispatch().table->scale(a, x.data(), out.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    dispatch().table->axpy(a, x.data(), y.data(), x.size());
}

void add(std::span<const double> x, std::span<double> y) {
    dispatch().table->add(x.data(), y.data(), x.size());
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
    dispatch().table->mul(x.data(), y.data(), out.data(), x.size());
}

void mul_add(std::span<const double> x, std::span<const double> y, std::span<double> out) {
    dispatch().table->mul_add(x.data(), y.data(), out.data(), x.size());
}

void mul_sub(std::span<const double> x, std::span<const double> y, std::span<double> out) {
    dispatch().table->mul_sub(x.data(), y.data(), out.data(), x.size());
}

void chain(double rate, std::span<const double> prev, std::span<const double> cur,
           std::span<double> out) {
    dispatch().table->chain(rate, prev.data(), cur.data(), out.data(), out.size());
}

void chain_drain(double rate, std::span<const double> prev, std::span<const double> cur,
                 std::span<const double> drain, std::span<double> out) {
    dispatch().table->chain_drain(rate, prev.data(), cur.data(), drain.data(), out.data(),
                                  out.size());
}

void xpay(std::span<const double> x, double a, std::span<const double> y, std::span<double> out) {
    dispatch().table->xpay(x.data(), a, y.data(), out.data(), out.size());
}

void rk4_combine(std::span<const double> y0, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double dt, std::span<double> out) {
    dispatch().table->rk4_combine(y0.data(), k1.data(), k2.data(), k3.data(), k4.data(), dt,
                                  out.data(), out.size());
}

double clip_negative(std::span<double> x, double floor) {
    return dispatch().table->clip_negative(x.data(), floor, x.size());
}

} // namespace saidr::kernels
