#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mfeval/stats.hpp"
#include "oracles.hpp"

using namespace mfeval::stats;

namespace {

constexpr double kTol = 1e-9;

// Q3 grid of fixtures/oracle/responses.csv (raters x MFs). Exact values
// from tests/scripts/frozen_values.py.
const oracle::Grid kGrid5x6 = {
    {4, 5, 2, 3, 5, 4}, {5, 4, 2, 1, 4, 5}, {3, 5, 3, 2, 5, 2},
    {5, 4, 2, 4, 4, 3}, {3, 4, 2, 2, 4, 3},
};

RatingMatrix M(const oracle::Grid& g) { return RatingMatrix::from_rows(g); }

oracle::Grid permute(const oracle::Grid& g, std::mt19937_64& rng) {
    std::vector<std::size_t> rows(g.size());
    std::vector<std::size_t> cols(g[0].size());
    std::iota(rows.begin(), rows.end(), 0u);
    std::iota(cols.begin(), cols.end(), 0u);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    oracle::Grid out(g.size(), std::vector<double>(g[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out[i][j] = g[rows[i]][cols[j]];
    return out;
}

}  // namespace

TEST_SUITE("descriptive") {
    TEST_CASE("constant vector") {
        std::vector<double> v{4, 4, 4, 4, 4};
        auto d = descriptive(v);
        CHECK(d.mean == 4.0);
        CHECK(d.sd == 0.0);
        CHECK(d.count == 5);
    }
    TEST_CASE("sample standard deviation") {
        std::vector<double> a{5, 5, 5, 4, 3};
        auto d = descriptive(a);
        CHECK(d.mean == doctest::Approx(4.4).epsilon(1e-12));
        CHECK(d.sd == doctest::Approx(0.8944271909999159).epsilon(1e-12));
        std::vector<double> b{1, 2, 3, 4, 5};
        auto e = descriptive(b);
        CHECK(e.mean == 3.0);
        CHECK(e.sd == doctest::Approx(1.5811388300841898).epsilon(1e-12));
    }
    TEST_CASE("single value has zero sd") {
        std::vector<double> v{2.5};
        CHECK(descriptive(v).sd == 0.0);
    }
    TEST_CASE("empty and non-finite inputs are errors") {
        std::vector<double> none;
        CHECK_THROWS_AS(descriptive(none), StatsError);
        std::vector<double> bad{1.0, NAN};
        CHECK_THROWS_AS(descriptive(bad), StatsError);
    }
    TEST_CASE("sd is zero exactly when values are equal") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> len(1, 12);
        std::uniform_real_distribution<double> val(-3, 3);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> v(static_cast<std::size_t>(len(rng)));
            const bool constant = trial % 3 == 0;
            for (auto& x : v) x = constant ? 0.1 : val(rng);
            const bool equal = std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
            auto d = descriptive(v);
            CHECK(d.sd >= 0.0);
            CHECK((d.sd == 0.0) == equal);
        }
    }
}

TEST_SUITE("icc_one_way") {
    TEST_CASE("raters agree within each item") {
        auto m = M({{2, 5}, {2, 5}, {2, 5}});
        auto icc = icc_one_way(m);
        REQUIRE(icc.has_value());
        CHECK(icc.value() == 1.0);
    }
    TEST_CASE("all cells equal is undefined") {
        auto icc = icc_one_way(M({{3, 3, 3}, {3, 3, 3}}));
        CHECK_FALSE(icc.has_value());
        CHECK(icc.reason().find("zero variance") != std::string::npos);
    }
    TEST_CASE("frozen 5x6 fixture") {
        auto icc = icc_one_way(M(kGrid5x6));
        CHECK(std::abs(icc.value() - 303.0 / 578.0) < kTol);
        CHECK(std::abs(icc.value() - oracle::icc1(kGrid5x6)) < kTol);
    }
    TEST_CASE("negative regime when within-item spread dominates") {
        oracle::Grid g{{1, 2, 1}, {3, 3, 3}, {5, 5, 4}};
        auto a = one_way_anova(M(g));
        CHECK(a.ms_within > a.ms_between);
        CHECK(std::abs(icc_one_way(M(g)).value() - (-23.0 / 55.0)) < kTol);
    }
    TEST_CASE("lower bound -1/(m-1) is attained when item means coincide") {
        auto icc = icc_one_way(M({{1, 2}, {2, 1}}));
        CHECK(icc.value() == doctest::Approx(-1.0));
    }
    TEST_CASE("dimension and completeness errors") {
        CHECK_THROWS_AS(icc_one_way(M({{1, 2, 3}})), StatsError);
        CHECK_THROWS_AS(icc_one_way(M({{1}, {2}})), StatsError);
        RatingMatrix partial({"a", "b"}, {"x", "y"});
        partial.set(0, 0, 1.0);
        CHECK_THROWS_AS(icc_one_way(partial), StatsError);
    }
    TEST_CASE("oracle equivalence, range, affine and permutation invariance") {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<std::size_t> dim(2, 8);
        for (int trial = 0; trial < 300; ++trial) {
            auto g = oracle::random_grid(rng, dim(rng), dim(rng));
            auto icc = icc_one_way(M(g));
            if (oracle::all_cells_equal(g)) {
                CHECK_FALSE(icc.has_value());
                continue;
            }
            REQUIRE(icc.has_value());
            const double m = static_cast<double>(g.size());
            CHECK(std::abs(icc.value() - oracle::icc1(g)) < kTol);
            CHECK(icc.value() <= 1.0);
            CHECK(icc.value() >= -1.0 / (m - 1.0));

            auto affine = g;
            for (auto& r : affine)
                for (auto& x : r) x = 2.5 * x - 7.0;
            CHECK(std::abs(icc_one_way(M(affine)).value() - icc.value()) < kTol);
            CHECK(std::abs(icc_one_way(M(permute(g, rng))).value() - icc.value()) < kTol);
        }
    }
}

TEST_SUITE("cronbach_alpha") {
    TEST_CASE("duplicated items give exactly 1") {
        auto a = cronbach_alpha(M({{1, 1}, {3, 3}, {4, 4}, {2, 2}}));
        CHECK(a.value() == 1.0);
    }
    TEST_CASE("uncorrelated items give exactly 0") {
        auto a = cronbach_alpha(M({{1, 1}, {1, 2}, {2, 1}, {2, 2}}));
        CHECK(a.value() == 0.0);
    }
    TEST_CASE("frozen 3 items x 5 respondents") {
        oracle::Grid g{{4, 5, 4}, {3, 3, 2}, {5, 4, 5}, {2, 2, 3}, {4, 4, 4}};
        auto a = cronbach_alpha(M(g));
        CHECK(std::abs(a.value() - 87.0 / 97.0) < kTol);
        CHECK(std::abs(a.value() - oracle::alpha(g)) < kTol);
    }
    TEST_CASE("constant respondent totals are undefined") {
        CHECK_FALSE(cronbach_alpha(M({{1, 3}, {2, 2}, {3, 1}})).has_value());
        CHECK_FALSE(cronbach_alpha(M({{2, 2}, {2, 2}})).has_value());
    }
    TEST_CASE("a per-respondent shift is not an invariance") {
        // Adding c_r to every item of respondent r adds var(c) to each
        // covariance, so alpha moves. Counterexample pinned here.
        oracle::Grid g{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
        oracle::Grid h{{1, 1}, {1, 2}, {2, 1}, {5, 5}};  // respondent 4 shifted by +3
        CHECK(cronbach_alpha(M(g)).value() == 0.0);
        CHECK(cronbach_alpha(M(h)).value() > 0.5);
    }
    TEST_CASE("too few items or respondents") {
        CHECK_THROWS_AS(cronbach_alpha(M({{1}, {2}, {3}})), StatsError);
        CHECK_THROWS_AS(cronbach_alpha(M({{1, 2, 3}})), StatsError);
    }
    TEST_CASE("oracle equivalence and invariances") {
        std::mt19937_64 rng(77);
        std::uniform_int_distribution<std::size_t> dim(2, 8);
        std::uniform_int_distribution<int> shift(-3, 3);
        int checked = 0;
        for (int trial = 0; trial < 300; ++trial) {
            auto g = oracle::random_grid(rng, dim(rng), dim(rng));
            auto a = cronbach_alpha(M(g));
            if (!a.has_value()) continue;
            ++checked;
            CHECK(std::abs(a.value() - oracle::alpha(g)) < kTol);

            auto shifted = g;  // per-item constant
            for (std::size_t j = 0; j < g[0].size(); ++j) {
                const int s = shift(rng);
                for (auto& r : shifted) r[j] += s;
            }
            CHECK(std::abs(cronbach_alpha(M(shifted)).value() - a.value()) < kTol);
            auto scaled = g;
            for (auto& r : scaled)
                for (auto& x : r) x *= 3.0;
            CHECK(std::abs(cronbach_alpha(M(scaled)).value() - a.value()) < kTol);
            CHECK(std::abs(cronbach_alpha(M(permute(g, rng))).value() - a.value()) < kTol);
        }
        CHECK(checked > 250);
    }
}

TEST_SUITE("kendall_w") {
    TEST_CASE("identical untied rankings give 1") {
        auto w = kendall_w(M({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 3, 4}}));
        CHECK(w.value() == doctest::Approx(1.0).epsilon(1e-15));
    }
    TEST_CASE("hand example") {
        auto w = kendall_w(M({{1, 2, 3}, {1, 2, 3}, {2, 1, 3}}));
        CHECK(std::abs(w.value() - 168.0 / 216.0) < kTol);
        CHECK(std::abs(w.value() - 0.7778) < 1e-4);
    }
    TEST_CASE("frozen 5x6 fixture with and without tie correction") {
        CHECK(std::abs(kendall_w(M(kGrid5x6)).value() - 471.0 / 805.0) < kTol);
        CHECK(std::abs(kendall_w(M(kGrid5x6), {.tie_correction = false}).value() -
                       471.0 / 875.0) < kTol);
    }
    TEST_CASE("midranks") {
        std::vector<double> v{3, 1, 3, 2};
        CHECK(midranks(v) == std::vector<double>{3.5, 1, 3.5, 2});
    }
    TEST_CASE("all judges fully tied is undefined under correction") {
        auto w = kendall_w(M({{2, 2, 2}, {4, 4, 4}}));
        CHECK_FALSE(w.has_value());
        // Without correction the denominator stays positive: S = 0.
        CHECK(kendall_w(M({{2, 2, 2}, {4, 4, 4}}), {.tie_correction = false}).value() == 0.0);
    }
    TEST_CASE("oracle equivalence, range, monotone and permutation invariance") {
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<std::size_t> dim(2, 8);
        for (int trial = 0; trial < 300; ++trial) {
            auto g = oracle::random_grid(rng, dim(rng), dim(rng));
            auto w = kendall_w(M(g));
            if (!w.has_value()) continue;
            CHECK(std::abs(w.value() - oracle::kendall_w(g)) < kTol);
            CHECK(w.value() >= 0.0);
            CHECK(w.value() <= 1.0);

            auto mono = g;  // strictly increasing per judge
            for (std::size_t r = 0; r < mono.size(); ++r)
                for (auto& x : mono[r]) x = std::exp(x) * double(r + 1) + double(r);
            CHECK(std::abs(kendall_w(M(mono)).value() - w.value()) < kTol);
            CHECK(std::abs(kendall_w(M(permute(g, rng))).value() - w.value()) < kTol);
            CHECK(std::abs(kendall_w(M(g), {.tie_correction = false}).value() -
                           oracle::kendall_w(g, false)) < kTol);
        }
    }
    TEST_CASE("no ties: correction on and off agree exactly") {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t m = 2 + trial % 7;
            const std::size_t n = 2 + trial % 5;
            oracle::Grid g(m);
            for (auto& r : g) {
                r.resize(n);
                std::iota(r.begin(), r.end(), 1.0);
                std::shuffle(r.begin(), r.end(), rng);
            }
            CHECK(kendall_w(M(g)).value() == kendall_w(M(g), {.tie_correction = false}).value());
        }
    }
}

TEST_SUITE("labels") {
    TEST_CASE("thresholds and printed pairs") {
        CHECK(label_consistency(0.80) == ConsistencyLabel::Good);
        CHECK(label_consistency(0.67) == ConsistencyLabel::Questionable);
        CHECK(label_consistency(0.34) == ConsistencyLabel::Unacceptable);
        CHECK(label_consistency(0.90) == ConsistencyLabel::Excellent);
        CHECK(label_consistency(0.89) == ConsistencyLabel::Good);
        CHECK(label_consistency(0.79) == ConsistencyLabel::Acceptable);
        CHECK(label_consistency(0.55) == ConsistencyLabel::Poor);
        CHECK(label_consistency(1.7) == ConsistencyLabel::Excellent);
        CHECK(label_consistency(-2.0) == ConsistencyLabel::Unacceptable);
    }
    TEST_CASE("ordering") {
        CHECK(ConsistencyLabel::Excellent > ConsistencyLabel::Good);
        CHECK(ConsistencyLabel::Good > ConsistencyLabel::Acceptable);
        CHECK(ConsistencyLabel::Acceptable > ConsistencyLabel::Questionable);
        CHECK(ConsistencyLabel::Questionable > ConsistencyLabel::Poor);
        CHECK(ConsistencyLabel::Poor > ConsistencyLabel::Unacceptable);
        CHECK(parse_label("Good") == ConsistencyLabel::Good);
        CHECK_FALSE(parse_label("good").has_value());
    }
    TEST_CASE("monotone in alpha") {
        ConsistencyLabel prev = ConsistencyLabel::Unacceptable;
        for (int i = -100; i <= 150; ++i) {
            auto l = label_consistency(i / 100.0);
            CHECK(l >= prev);
            prev = l;
        }
    }
}

TEST_SUITE("missing policy") {
    TEST_CASE("complete matrix is unchanged") {
        auto m = M(kGrid5x6);
        auto out = apply_missing_policy(m, MissingPolicy::ListwiseByItem);
        CHECK(out.matrix == m);
        CHECK(out.deletions.empty());
    }
    TEST_CASE("one missing cell drops one item") {
        auto m = M(kGrid5x6);
        m.set(2, 3, std::nullopt);
        auto out = apply_missing_policy(m, MissingPolicy::ListwiseByItem);
        CHECK(out.matrix.rater_count() == 5);
        CHECK(out.matrix.item_count() == 5);
        CHECK(out.deletions.dropped_items == std::vector<std::string>{"i4"});
        CHECK(out.matrix.complete());

        auto by_rater = apply_missing_policy(m, MissingPolicy::ListwiseByRater);
        CHECK(by_rater.matrix.rater_count() == 4);
        CHECK(by_rater.deletions.dropped_raters == std::vector<std::string>{"r3"});
    }
    TEST_CASE("falling below 2 raters names the statistic") {
        auto m = M({{1, 2}, {3, 4}});
        m.set(1, 0, std::nullopt);
        try {
            apply_missing_policy(m, MissingPolicy::ListwiseByRater, Statistic::Icc);
            FAIL("expected StatsError");
        } catch (const StatsError& e) {
            CHECK(std::string(e.what()).find("icc_one_way") != std::string::npos);
        }
        CHECK_THROWS_AS(apply_missing_policy(m, MissingPolicy::ListwiseByRater), StatsError);
    }
    TEST_CASE("policy names round-trip") {
        for (auto p : {MissingPolicy::ListwiseByItem, MissingPolicy::ListwiseByRater})
            CHECK(parse_policy(policy_name(p)) == p);
        CHECK(parse_policy("item") == MissingPolicy::ListwiseByItem);
        CHECK_FALSE(parse_policy("pairwise").has_value());
    }
}
