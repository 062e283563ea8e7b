#pragma once

// Tables and chart series rendered from an analytics report.
//
// Numbers are rounded half away from zero, one decimal for AV/SD and two
// for ICC, alpha and W, with trailing zeros dropped ("4", "0.8").

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mfeval/analytics.hpp"
#include "mfeval/error.hpp"

namespace mfeval::report {

enum class TableKind { PerQuestionAvSd, SdOrdered, IccTable, AlphaTable, SectionSummary, KendallBySection };
enum class Format { Csv, Markdown };
enum class ChartKind { IccLine, AlphaLine, SectionAvSdLine };

// "av-sd", "sd-ordered", "icc", "alpha", "sections", "kendall".
std::string_view table_name(TableKind k) noexcept;
std::optional<TableKind> parse_table_kind(std::string_view s) noexcept;
std::string_view format_name(Format f) noexcept;
std::optional<Format> parse_format(std::string_view s) noexcept;
// "icc", "alpha", "sections".
std::string_view chart_name(ChartKind k) noexcept;
std::optional<ChartKind> parse_chart_kind(std::string_view s) noexcept;

inline constexpr int kAvSdDecimals = 1;
inline constexpr int kCoefficientDecimals = 2;

// A statistic the table needs is undefined.
class ReportError : public Error {
public:
    explicit ReportError(const std::string& message) : Error("report_error", message) {}
};

// Half away from zero; values within 1e-9 (relative) of a tie count as the
// tie, so 0.85 rounds to 0.9 despite its binary representation.
double round_half_away(double x, int decimals) noexcept;
// Rounded, trailing zeros trimmed, never "-0".
std::string format_number(double x, int decimals);

struct Table {
    TableKind kind{};
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table build_table(const analytics::Report& r, TableKind kind);
std::string render(const Table& t, Format f);
std::string render_table(const analytics::Report& r, TableKind kind, Format f);

struct Series {
    std::string name;
    std::vector<std::string> labels;
    std::vector<double> values;
    std::vector<double> sd;  // SectionAvSdLine only
};

std::vector<Series> chart_series(const analytics::Report& r, ChartKind kind);
nlohmann::json to_json(const std::vector<Series>& series);

}  // namespace mfeval::report
