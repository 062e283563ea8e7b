#include "mfeval/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace mfeval::kernels {
namespace {

double sum_neon(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vaddq_f64(a0, vld1q_f64(x + i));
        a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
        a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double centered_cross_neon(const double* x, double mx, const double* y,
                           double my, std::size_t n) {
    const float64x2_t vmx = vdupq_n_f64(mx);
    const float64x2_t vmy = vdupq_n_f64(my);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t dx = vsubq_f64(vld1q_f64(x + i), vmx);
        float64x2_t dy = vsubq_f64(vld1q_f64(y + i), vmy);
        acc = vfmaq_f64(acc, dx, dy);
    }
    double out = vaddvq_f64(acc);
    for (; i < n; ++i) out += (x[i] - mx) * (y[i] - my);
    return out;
}

void scale_neon(double* x, double factor, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), factor));
    for (; i < n; ++i) x[i] *= factor;
}

constexpr KernelTable kNeon{Isa::Neon, sum_neon, dot_neon, centered_cross_neon,
                            scale_neon};

}  // namespace

// NEON is mandatory on aarch64.
const KernelTable* neon_table() noexcept { return &kNeon; }

}  // namespace mfeval::kernels

#else

namespace mfeval::kernels {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace mfeval::kernels

#endif
