#include "mfeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfeval/kernels.hpp"

namespace mfeval::stats {

namespace k = mfeval::kernels;

RatingMatrix::RatingMatrix(std::vector<std::string> raters, std::vector<std::string> items)
    : raters_(std::move(raters)),
      items_(std::move(items)),
      cells_(raters_.size() * items_.size()) {}

RatingMatrix::RatingMatrix(std::vector<std::string> raters, std::vector<std::string> items,
                           std::vector<std::optional<double>> cells)
    : raters_(std::move(raters)), items_(std::move(items)), cells_(std::move(cells)) {
    if (cells_.size() != raters_.size() * items_.size())
        throw StatsError("rating matrix has " + std::to_string(cells_.size()) +
                         " cells, expected " +
                         std::to_string(raters_.size() * items_.size()));
}

RatingMatrix RatingMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<std::string> raters;
    std::vector<std::string> items;
    for (std::size_t r = 0; r < rows.size(); ++r) raters.push_back("r" + std::to_string(r + 1));
    const std::size_t n = rows.empty() ? 0 : rows.front().size();
    for (std::size_t i = 0; i < n; ++i) items.push_back("i" + std::to_string(i + 1));
    return from_rows(std::move(raters), std::move(items), rows);
}

RatingMatrix RatingMatrix::from_rows(std::vector<std::string> raters,
                                     std::vector<std::string> items,
                                     const std::vector<std::vector<double>>& rows) {
    if (rows.size() != raters.size()) throw StatsError("row count does not match rater ids");
    std::vector<std::optional<double>> cells;
    cells.reserve(raters.size() * items.size());
    for (const auto& row : rows) {
        if (row.size() != items.size()) throw StatsError("ragged rating rows");
        for (double v : row) cells.emplace_back(v);
    }
    return RatingMatrix(std::move(raters), std::move(items), std::move(cells));
}

bool RatingMatrix::complete() const noexcept {
    return std::all_of(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); });
}

std::size_t RatingMatrix::missing_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return !c.has_value(); }));
}

std::vector<double> RatingMatrix::row(std::size_t rater) const {
    std::vector<double> out(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const auto& c = at(rater, i);
        if (!c) throw StatsError("missing cell at rater " + raters_[rater]);
        out[i] = *c;
    }
    return out;
}

std::vector<double> RatingMatrix::column(std::size_t item) const {
    std::vector<double> out(raters_.size());
    for (std::size_t r = 0; r < raters_.size(); ++r) {
        const auto& c = at(r, item);
        if (!c) throw StatsError("missing cell at item " + items_[item]);
        out[r] = *c;
    }
    return out;
}

std::string_view label_name(ConsistencyLabel label) noexcept {
    switch (label) {
        case ConsistencyLabel::Excellent: return "Excellent";
        case ConsistencyLabel::Good: return "Good";
        case ConsistencyLabel::Acceptable: return "Acceptable";
        case ConsistencyLabel::Questionable: return "Questionable";
        case ConsistencyLabel::Poor: return "Poor";
        case ConsistencyLabel::Unacceptable: return "Unacceptable";
    }
    return "Unacceptable";
}

std::optional<ConsistencyLabel> parse_label(std::string_view name) noexcept {
    for (auto l : {ConsistencyLabel::Excellent, ConsistencyLabel::Good,
                   ConsistencyLabel::Acceptable, ConsistencyLabel::Questionable,
                   ConsistencyLabel::Poor, ConsistencyLabel::Unacceptable}) {
        if (label_name(l) == name) return l;
    }
    return std::nullopt;
}

ConsistencyLabel label_consistency(double alpha) noexcept {
    if (alpha >= 0.9) return ConsistencyLabel::Excellent;
    if (alpha >= 0.8) return ConsistencyLabel::Good;
    if (alpha >= 0.7) return ConsistencyLabel::Acceptable;
    if (alpha >= 0.6) return ConsistencyLabel::Questionable;
    if (alpha >= 0.5) return ConsistencyLabel::Poor;
    return ConsistencyLabel::Unacceptable;  // also NaN
}

std::string_view policy_name(MissingPolicy policy) noexcept {
    return policy == MissingPolicy::ListwiseByItem ? "listwise-by-item" : "listwise-by-rater";
}

std::optional<MissingPolicy> parse_policy(std::string_view name) noexcept {
    if (name == "item" || name == "listwise-by-item" || name == "ListwiseByItem")
        return MissingPolicy::ListwiseByItem;
    if (name == "rater" || name == "listwise-by-rater" || name == "ListwiseByRater")
        return MissingPolicy::ListwiseByRater;
    return std::nullopt;
}

std::string_view statistic_name(Statistic s) noexcept {
    switch (s) {
        case Statistic::Icc: return "icc_one_way";
        case Statistic::Alpha: return "cronbach_alpha";
        case Statistic::KendallW: return "kendall_w";
    }
    return "statistic";
}

namespace {

void require_dims(const RatingMatrix& m, std::string_view what) {
    if (m.rater_count() < 2 || m.item_count() < 2)
        throw StatsError(std::string(what) + " needs at least 2 raters and 2 items, got " +
                         std::to_string(m.rater_count()) + " x " +
                         std::to_string(m.item_count()));
    if (!m.complete())
        throw StatsError(std::string(what) + " needs a complete matrix (" +
                         std::to_string(m.missing_count()) +
                         " missing cells); apply a missing-data policy first");
}

bool all_equal(std::span<const double> xs) {
    return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end();
}

// Column-major dense copy of a complete matrix.
std::vector<std::vector<double>> columns(const RatingMatrix& m) {
    std::vector<std::vector<double>> cols;
    cols.reserve(m.item_count());
    for (std::size_t i = 0; i < m.item_count(); ++i) cols.push_back(m.column(i));
    return cols;
}

}  // namespace

CompleteMatrix apply_missing_policy(const RatingMatrix& matrix, MissingPolicy policy,
                                    std::optional<Statistic> target) {
    DeletionReport report{policy, {}, {}};
    std::vector<std::size_t> keep_r;
    std::vector<std::size_t> keep_i;
    for (std::size_t r = 0; r < matrix.rater_count(); ++r) keep_r.push_back(r);
    for (std::size_t i = 0; i < matrix.item_count(); ++i) keep_i.push_back(i);

    if (policy == MissingPolicy::ListwiseByItem) {
        keep_i.clear();
        for (std::size_t i = 0; i < matrix.item_count(); ++i) {
            bool full = true;
            for (std::size_t r = 0; r < matrix.rater_count(); ++r)
                full = full && matrix.at(r, i).has_value();
            if (full)
                keep_i.push_back(i);
            else
                report.dropped_items.push_back(matrix.items()[i]);
        }
    } else {
        keep_r.clear();
        for (std::size_t r = 0; r < matrix.rater_count(); ++r) {
            bool full = true;
            for (std::size_t i = 0; i < matrix.item_count(); ++i)
                full = full && matrix.at(r, i).has_value();
            if (full)
                keep_r.push_back(r);
            else
                report.dropped_raters.push_back(matrix.raters()[r]);
        }
    }

    if (keep_r.size() < 2 || keep_i.size() < 2) {
        std::string who = target ? std::string(statistic_name(*target))
                                 : "icc_one_way, cronbach_alpha and kendall_w";
        throw StatsError(std::string(policy_name(policy)) + " deletion leaves " +
                         std::to_string(keep_r.size()) + " rater(s) x " +
                         std::to_string(keep_i.size()) + " item(s); " + who +
                         " cannot be computed (needs at least 2 x 2)");
    }

    std::vector<std::string> raters;
    std::vector<std::string> items;
    std::vector<std::optional<double>> cells;
    for (auto r : keep_r) raters.push_back(matrix.raters()[r]);
    for (auto i : keep_i) items.push_back(matrix.items()[i]);
    for (auto r : keep_r)
        for (auto i : keep_i) cells.push_back(matrix.at(r, i));
    return {RatingMatrix(std::move(raters), std::move(items), std::move(cells)),
            std::move(report)};
}

DescriptiveStat descriptive(std::span<const double> values) {
    if (values.empty()) throw StatsError("descriptive statistics need at least one value");
    for (double v : values)
        if (!std::isfinite(v)) throw StatsError("descriptive statistics need finite values");
    DescriptiveStat out;
    out.count = values.size();
    if (all_equal(values)) {
        out.mean = values.front();
        out.sd = 0.0;
        return out;
    }
    out.mean = k::mean(values);
    const double ss = k::centered_squares(values, out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return out;
}

OneWayAnova one_way_anova(const RatingMatrix& matrix) {
    require_dims(matrix, "icc_one_way");
    const auto cols = columns(matrix);
    const std::size_t n = matrix.item_count();
    const std::size_t m = matrix.rater_count();

    std::vector<double> group_means(n);
    double ss_within = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        group_means[j] = k::mean(cols[j]);
        ss_within += k::centered_squares(cols[j], group_means[j]);
    }
    // Balanced design: the grand mean is the mean of group means.
    const double grand = k::mean(group_means);
    const double ss_between = static_cast<double>(m) * k::centered_squares(group_means, grand);

    OneWayAnova out;
    out.groups = n;
    out.replicates = m;
    out.ms_between = ss_between / static_cast<double>(n - 1);
    out.ms_within = ss_within / static_cast<double>(n * (m - 1));
    return out;
}

Estimate icc_one_way(const RatingMatrix& matrix) {
    const OneWayAnova a = one_way_anova(matrix);
    std::vector<double> all;
    all.reserve(matrix.rater_count() * matrix.item_count());
    for (std::size_t r = 0; r < matrix.rater_count(); ++r)
        for (std::size_t i = 0; i < matrix.item_count(); ++i) all.push_back(*matrix.at(r, i));
    if (all_equal(all))
        return Estimate::undefined("zero variance: every cell is equal (MSB = MSW = 0)");

    const double m = static_cast<double>(a.replicates);
    const double denom = a.ms_between + (m - 1.0) * a.ms_within;
    const double lower = -1.0 / (m - 1.0);
    double icc = (a.ms_between - a.ms_within) / denom;
    // Guard the closed range against last-bit rounding.
    icc = std::clamp(icc, lower, 1.0);
    return Estimate::of(icc);
}

Estimate cronbach_alpha(const RatingMatrix& matrix) {
    require_dims(matrix, "cronbach_alpha");
    const auto cols = columns(matrix);
    const std::size_t p = matrix.item_count();
    const double dof = static_cast<double>(matrix.rater_count() - 1);

    std::vector<double> totals(matrix.rater_count(), 0.0);
    for (const auto& col : cols)
        for (std::size_t r = 0; r < col.size(); ++r) totals[r] += col[r];
    if (all_equal(totals))
        return Estimate::undefined("zero variance: respondent totals do not vary");

    std::vector<double> means(p);
    for (std::size_t i = 0; i < p; ++i) means[i] = k::mean(cols[i]);

    double sum_var = 0.0;
    double sum_cov = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        sum_var += k::centered_cross(cols[i], means[i], cols[i], means[i]) / dof;
        for (std::size_t j = i + 1; j < p; ++j)
            sum_cov += k::centered_cross(cols[i], means[i], cols[j], means[j]) / dof;
    }
    const double pd = static_cast<double>(p);
    return Estimate::of(pd / (pd - 1.0) * (1.0 - sum_var / (sum_var + 2.0 * sum_cov)));
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j hold ranks i+1..j+1
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

Estimate kendall_w(const RatingMatrix& matrix, KendallOptions options) {
    require_dims(matrix, "kendall_w");
    const std::size_t m = matrix.rater_count();
    const std::size_t n = matrix.item_count();

    std::vector<double> rank_sums(n, 0.0);
    double tie_total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = matrix.row(r);
        const auto ranks = midranks(row);
        for (std::size_t i = 0; i < n; ++i) rank_sums[i] += ranks[i];

        auto sorted = row;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_total += t * t * t - t;
            i = j;
        }
    }

    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double expected = md * (nd + 1.0) / 2.0;
    const double s = k::centered_squares(rank_sums, expected);
    double denom = md * md * (nd * nd * nd - nd);
    if (options.tie_correction) denom -= md * tie_total;
    if (denom <= 0.0)
        return Estimate::undefined("every judge gave all objects the same score");
    return Estimate::of(std::clamp(12.0 * s / denom, 0.0, 1.0));
}

}  // namespace mfeval::stats
