#pragma once

// Reliability and descriptive statistics over rater x item grids.
//
// Orientation is fixed for every statistic: rows are raters (judges,
// respondents) and columns are items (rated objects, scale items).
//
//   icc_one_way     items are the grouping factor, raters are replicates
//   cronbach_alpha  columns are scale items, rows are respondents
//   kendall_w       rows are judges ranking the column objects
//
// All functions are pure. Zero-variance inputs produce an undefined
// Estimate carrying a reason instead of a number.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfeval/error.hpp"

namespace mfeval::stats {

class StatsError : public Error {
public:
    explicit StatsError(const std::string& message) : Error("stats_error", message) {}
};

// A value, or the reason it could not be computed.
template <class T>
class Outcome {
public:
    static Outcome of(T value) { return Outcome(std::move(value), {}); }
    static Outcome undefined(std::string reason) {
        return Outcome(std::nullopt, std::move(reason));
    }

    bool has_value() const noexcept { return value_.has_value(); }
    explicit operator bool() const noexcept { return has_value(); }

    const T& value() const {
        if (!value_) throw StatsError("undefined: " + reason_);
        return *value_;
    }
    const T* operator->() const { return &value(); }
    const std::optional<T>& optional() const noexcept { return value_; }
    const std::string& reason() const noexcept { return reason_; }

    friend bool operator==(const Outcome&, const Outcome&) = default;

private:
    Outcome(std::optional<T> v, std::string reason)
        : value_(std::move(v)), reason_(std::move(reason)) {}

    std::optional<T> value_;
    std::string reason_;
};

using Estimate = Outcome<double>;

struct DescriptiveStat {
    double mean = 0.0;  // AV
    double sd = 0.0;    // sample standard deviation, divisor count - 1
    std::size_t count = 0;

    friend bool operator==(const DescriptiveStat&, const DescriptiveStat&) = default;
};

class RatingMatrix {
public:
    RatingMatrix() = default;
    // All cells start missing.
    RatingMatrix(std::vector<std::string> raters, std::vector<std::string> items);
    // `cells` is row-major, raters.size() x items.size().
    RatingMatrix(std::vector<std::string> raters, std::vector<std::string> items,
                 std::vector<std::optional<double>> cells);

    static RatingMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static RatingMatrix from_rows(std::vector<std::string> raters,
                                  std::vector<std::string> items,
                                  const std::vector<std::vector<double>>& rows);

    std::size_t rater_count() const noexcept { return raters_.size(); }
    std::size_t item_count() const noexcept { return items_.size(); }
    const std::vector<std::string>& raters() const noexcept { return raters_; }
    const std::vector<std::string>& items() const noexcept { return items_; }

    const std::optional<double>& at(std::size_t rater, std::size_t item) const {
        return cells_.at(rater * items_.size() + item);
    }
    void set(std::size_t rater, std::size_t item, std::optional<double> value) {
        cells_.at(rater * items_.size() + item) = value;
    }

    bool complete() const noexcept;
    std::size_t missing_count() const noexcept;

    // Dense copies; throw StatsError when the slice has missing cells.
    std::vector<double> row(std::size_t rater) const;
    std::vector<double> column(std::size_t item) const;

    friend bool operator==(const RatingMatrix&, const RatingMatrix&) = default;

private:
    std::vector<std::string> raters_;
    std::vector<std::string> items_;
    std::vector<std::optional<double>> cells_;
};

// Ascending order, so Unacceptable < ... < Excellent.
enum class ConsistencyLabel { Unacceptable, Poor, Questionable, Acceptable, Good, Excellent };

std::string_view label_name(ConsistencyLabel label) noexcept;
std::optional<ConsistencyLabel> parse_label(std::string_view name) noexcept;

// >= 0.9 Excellent, >= 0.8 Good, >= 0.7 Acceptable, >= 0.6 Questionable,
// >= 0.5 Poor, otherwise Unacceptable.
ConsistencyLabel label_consistency(double alpha) noexcept;

enum class MissingPolicy { ListwiseByItem, ListwiseByRater };

std::string_view policy_name(MissingPolicy policy) noexcept;
std::optional<MissingPolicy> parse_policy(std::string_view name) noexcept;

enum class Statistic { Icc, Alpha, KendallW };

std::string_view statistic_name(Statistic s) noexcept;

struct DeletionReport {
    MissingPolicy policy = MissingPolicy::ListwiseByItem;
    std::vector<std::string> dropped_raters;
    std::vector<std::string> dropped_items;

    bool empty() const noexcept { return dropped_raters.empty() && dropped_items.empty(); }
    friend bool operator==(const DeletionReport&, const DeletionReport&) = default;
};

struct CompleteMatrix {
    RatingMatrix matrix;
    DeletionReport deletions;
};

// Listwise deletion. Throws StatsError naming `target` (or every
// reliability statistic when unset) if fewer than 2 raters or 2 items
// survive.
CompleteMatrix apply_missing_policy(const RatingMatrix& matrix, MissingPolicy policy,
                                    std::optional<Statistic> target = std::nullopt);

// Throws StatsError on an empty or non-finite input.
DescriptiveStat descriptive(std::span<const double> values);

// One-way random-effects ICC(1) from the ANOVA mean squares:
//   (MSB - MSW) / (MSB + (m - 1) MSW)
// with items as groups and the m raters as replicates. Lies in
// [-1/(m-1), 1]; undefined when every cell is equal.
Estimate icc_one_way(const RatingMatrix& matrix);

// Mean squares behind icc_one_way, exposed for reporting and tests.
struct OneWayAnova {
    double ms_between = 0.0;
    double ms_within = 0.0;
    std::size_t groups = 0;
    std::size_t replicates = 0;
};
OneWayAnova one_way_anova(const RatingMatrix& matrix);

// alpha = p/(p-1) * (1 - sum var_i / (sum var_i + 2 sum_{i<j} cov_ij))
// over sample (co)variances; undefined when the respondent totals do not vary.
Estimate cronbach_alpha(const RatingMatrix& matrix);

struct KendallOptions {
    bool tie_correction = true;
};

// Kendall's coefficient of concordance with midranks for ties.
Estimate kendall_w(const RatingMatrix& matrix, KendallOptions options = {});

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> midranks(std::span<const double> values);

}  // namespace mfeval::stats
