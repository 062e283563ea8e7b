#pragma once

// Definitional reference implementations used only by tests. Deliberately
// naive: plain loops, no shared code with src/, different algebraic routes
// where one exists (SSW via SST - SSB, alpha via the full covariance
// matrix, ranks by counting instead of sorting).

#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;  // rows = raters

inline double icc1(const Grid& g) {
    const std::size_t m = g.size();
    const std::size_t n = g[0].size();
    double grand = 0.0;
    for (const auto& r : g)
        for (double x : r) grand += x;
    grand /= static_cast<double>(m * n);
    double sst = 0.0;
    for (const auto& r : g)
        for (double x : r) sst += (x - grand) * (x - grand);
    double ssb = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += g[i][j];
        mean /= static_cast<double>(m);
        ssb += static_cast<double>(m) * (mean - grand) * (mean - grand);
    }
    const double ssw = sst - ssb;
    const double msb = ssb / static_cast<double>(n - 1);
    const double msw = ssw / static_cast<double>(n * (m - 1));
    return (msb - msw) / (msb + static_cast<double>(m - 1) * msw);
}

inline double alpha(const Grid& g) {
    const std::size_t m = g.size();
    const std::size_t p = g[0].size();
    std::vector<double> mean(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < m; ++i) mean[j] += g[i][j];
        mean[j] /= static_cast<double>(m);
    }
    std::vector<std::vector<double>> cov(p, std::vector<double>(p, 0.0));
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
            for (std::size_t i = 0; i < m; ++i)
                cov[a][b] += (g[i][a] - mean[a]) * (g[i][b] - mean[b]);
            cov[a][b] /= static_cast<double>(m - 1);
        }
    double trace = 0.0;
    double total = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
        trace += cov[a][a];
        for (std::size_t b = 0; b < p; ++b) total += cov[a][b];
    }
    const double pd = static_cast<double>(p);
    return pd / (pd - 1.0) * (1.0 - trace / total);
}

// rank = (#smaller) + (#equal + 1) / 2
inline std::vector<double> ranks(const std::vector<double>& row) {
    std::vector<double> out;
    for (double x : row) {
        double less = 0.0;
        double eq = 0.0;
        for (double y : row) {
            if (y < x) less += 1.0;
            if (y == x) eq += 1.0;
        }
        out.push_back(less + (eq + 1.0) / 2.0);
    }
    return out;
}

inline double kendall_w(const Grid& g, bool ties = true) {
    const std::size_t m = g.size();
    const std::size_t n = g[0].size();
    std::vector<double> rsum(n, 0.0);
    double T = 0.0;
    for (const auto& row : g) {
        auto r = ranks(row);
        for (std::size_t j = 0; j < n; ++j) rsum[j] += r[j];
        std::map<double, int> groups;
        for (double x : row) ++groups[x];
        for (auto [v, t] : groups) T += double(t) * t * t - t;
    }
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    double S = 0.0;
    for (double R : rsum) S += (R - md * (nd + 1) / 2) * (R - md * (nd + 1) / 2);
    double den = md * md * (nd * nd * nd - nd);
    if (ties) den -= md * T;
    return 12.0 * S / den;
}

inline bool all_cells_equal(const Grid& g) {
    for (const auto& r : g)
        for (double x : r)
            if (x != g[0][0]) return false;
    return true;
}

// Integer Likert grid, m x n, cells uniform in [lo, hi].
inline Grid random_grid(std::mt19937_64& rng, std::size_t m, std::size_t n, int lo = 1,
                        int hi = 5) {
    std::uniform_int_distribution<int> d(lo, hi);
    Grid g(m, std::vector<double>(n));
    for (auto& r : g)
        for (auto& x : r) x = d(rng);
    return g;
}

}  // namespace oracle
