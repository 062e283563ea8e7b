#include <cstdlib>
#include <string_view>

#include "mfeval/kernels.hpp"

namespace mfeval::kernels {
namespace {

const KernelTable& select() noexcept {
    if (const char* env = std::getenv("MFEVAL_KERNELS")) {
        if (std::string_view(env) == "scalar") return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    if (const KernelTable* t = neon_table()) return *t;
    return scalar_table();
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

double sum(std::span<const double> x) noexcept {
    return active().sum(x.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
    return active().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

double centered_cross(std::span<const double> x, double mx,
                      std::span<const double> y, double my) noexcept {
    return active().centered_cross(x.data(), mx, y.data(), my,
                                   x.size() < y.size() ? x.size() : y.size());
}

void scale(std::span<double> x, double factor) noexcept {
    active().scale(x.data(), factor, x.size());
}

}  // namespace mfeval::kernels
