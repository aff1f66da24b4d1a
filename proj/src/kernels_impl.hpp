#pragma once

#include <cstddef>

// Internal dispatch table shared by the scalar and AVX2 translation units.

namespace saidr::kernels::detail {

struct Vtable {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*scale)(double, const double*, double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*add)(const double*, double*, std::size_t);
    void (*mul)(const double*, const double*, double*, std::size_t);
    void (*mul_add)(const double*, const double*, double*, std::size_t);
    void (*mul_sub)(const double*, const double*, double*, std::size_t);
    void (*chain)(double, const double*, const double*, double*, std::size_t);
    void (*chain_drain)(double, const double*, const double*, const double*, double*,
                        std::size_t);
    void (*xpay)(const double*, double, const double*, double*, std::size_t);
    void (*rk4_combine)(const double*, const double*, const double*, const double*,
                        const double*, double, double*, std::size_t);
    double (*clip_negative)(double*, double, std::size_t);
};

const Vtable& scalar_table();
const Vtable* avx2_table(); // nullptr when not compiled for this target
bool cpu_has_avx2();

} // namespace saidr::kernels::detail
