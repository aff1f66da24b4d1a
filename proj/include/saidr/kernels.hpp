#pragma once

#include <cstddef>
#include <span>

namespace saidr::kernels {

// Vector primitives used by the inner loops of the mean-field dynamics.
// Scalar reference implementations always exist; on x86-64 an AVX2/FMA
// variant is selected at runtime when the CPU supports it. The environment
// variable SAIDR_KERNELS=scalar|avx2 overrides the automatic choice.

enum class Backend { scalar, avx2 };

Backend active_backend();
bool supported(Backend b);
void set_backend(Backend b); // input_error when unsupported on this CPU
const char* backend_name();

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

// out = a * x
void scale(double a, std::span<const double> x, std::span<double> out);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y += x
void add(std::span<const double> x, std::span<double> y);
// out = x .* y
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);
// out += x .* y
void mul_add(std::span<const double> x, std::span<const double> y, std::span<double> out);
// out -= x .* y
void mul_sub(std::span<const double> x, std::span<const double> y, std::span<double> out);
// out = rate * (prev - cur)
void chain(double rate, std::span<const double> prev, std::span<const double> cur,
           std::span<double> out);
// out = rate * (prev - cur) - drain .* cur
void chain_drain(double rate, std::span<const double> prev, std::span<const double> cur,
                 std::span<const double> drain, std::span<double> out);
// out = x + a * y
void xpay(std::span<const double> x, double a, std::span<const double> y, std::span<double> out);
// out = y0 + (dt/6) * (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine(std::span<const double> y0, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double dt, std::span<double> out);
// Zeroes entries in [floor, 0); entries below floor are left untouched.
// Returns the smallest entry seen before clipping (0 for empty input).
double clip_negative(std::span<double> x, double floor);

} // namespace saidr::kernels
