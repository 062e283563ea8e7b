#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mfeval/kernels.hpp"

namespace k = mfeval::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Reorders sums, so equivalence is relative to the magnitude summed.
void check_equivalent(const k::KernelTable& simd) {
    const auto& ref = k::scalar_table();
    std::mt19937_64 rng(42);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 100u, 4096u}) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);
        double mag = 1.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i]) * (1.0 + std::abs(y[i]));
        const double tol = 1e-13 * mag;

        CHECK(std::abs(simd.sum(x.data(), n) - ref.sum(x.data(), n)) <= tol);
        CHECK(std::abs(simd.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= tol);
        CHECK(std::abs(simd.centered_cross(x.data(), 0.25, y.data(), -1.5, n) -
                       ref.centered_cross(x.data(), 0.25, y.data(), -1.5, n)) <= 10 * tol);

        auto a = x;
        auto b = x;
        simd.scale(a.data(), 0.37, n);
        ref.scale(b.data(), 0.37, n);
        CHECK(a == b);  // elementwise multiply is exact in both paths
    }
}

}  // namespace

TEST_CASE("scalar reference kernels on small exact inputs") {
    const auto& t = k::scalar_table();
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y{2, 0, 1, 0, 1};
    CHECK(t.sum(x.data(), x.size()) == 15.0);
    CHECK(t.dot(x.data(), y.data(), x.size()) == 10.0);
    // sum (x - 3)^2 = 10
    CHECK(t.centered_cross(x.data(), 3.0, x.data(), 3.0, x.size()) == 10.0);
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const k::KernelTable* t = k::avx2_table();
    if (t == nullptr) {
        MESSAGE("AVX2 not available on this CPU/build; skipped");
        return;
    }
    CHECK(t->isa == k::Isa::Avx2);
    check_equivalent(*t);
}

TEST_CASE("neon kernels match the scalar reference") {
    const k::KernelTable* t = k::neon_table();
    if (t == nullptr) {
        MESSAGE("NEON not available on this target; skipped");
        return;
    }
    check_equivalent(*t);
}

TEST_CASE("dispatch selects a compiled variant and the span wrappers agree") {
    const auto& a = k::active();
    const bool known = a.isa == k::Isa::Scalar || a.isa == k::Isa::Avx2 || a.isa == k::Isa::Neon;
    CHECK(known);
    MESSAGE("active kernels: " << k::isa_name(a.isa));

    std::vector<double> x{1.5, 2.5, -1.0, 4.0, 0.5, 7.0};
    CHECK(k::mean(x) == doctest::Approx(14.5 / 6.0).epsilon(1e-15));
    CHECK(k::centered_squares(x, k::mean(x)) ==
          doctest::Approx(k::scalar_table().centered_cross(x.data(), k::mean(x), x.data(),
                                                          k::mean(x), x.size())));
    CHECK(k::mean(std::vector<double>{}) == 0.0);
}
