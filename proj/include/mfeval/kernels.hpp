#pragma once

// Data-parallel reductions shared by the statistics and embedding code.
//
// Every kernel exists as a scalar reference and, where the target allows,
// an AVX2 (x86-64) or NEON (aarch64) variant. The free functions in
// mfeval::kernels dispatch once, at first use, to the widest variant the
// running CPU supports. Set MFEVAL_KERNELS=scalar to force the reference
// path.

#include <cstddef>
#include <span>
#include <string_view>

namespace mfeval::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

// Table of kernel entry points for one instruction set.
struct KernelTable {
    Isa isa;
    double (*sum)(const double* x, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i (x_i - mx) * (y_i - my)
    double (*centered_cross)(const double* x, double mx, const double* y,
                             double my, std::size_t n);
    void (*scale)(double* x, double factor, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

const KernelTable& active() noexcept;

double sum(std::span<const double> x) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;
double centered_cross(std::span<const double> x, double mx,
                      std::span<const double> y, double my) noexcept;
void scale(std::span<double> x, double factor) noexcept;

inline double mean(std::span<const double> x) noexcept {
    return x.empty() ? 0.0 : sum(x) / static_cast<double>(x.size());
}

// sum_i (x_i - mx)^2
inline double centered_squares(std::span<const double> x, double mx) noexcept {
    return centered_cross(x, mx, x, mx);
}

}  // namespace mfeval::kernels
