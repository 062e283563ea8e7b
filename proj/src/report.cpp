#include "mfeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mfeval/csv.hpp"

namespace mfeval::report {

using analytics::Estimate;

namespace {

double need(const Estimate& e, TableKind kind, const std::string& what) {
    if (!e.has_value())
        throw ReportError(std::string(table_name(kind)) + " table: " + what + " is undefined (" + e.reason() + ")");
    return e.value();
}

std::string qlabel(int q) { return "Q" + std::to_string(q); }

std::string av(double x) { return format_number(x, kAvSdDecimals); }
std::string coef(double x) { return format_number(x, kCoefficientDecimals); }

std::vector<std::string> av_sd_header(const analytics::Report& r, std::vector<std::string> lead) {
    for (const auto& mf : r.mfs) {
        lead.push_back(mf.blind_label + " AV");
        lead.push_back(mf.blind_label + " SD");
    }
    lead.push_back("Average AV");
    lead.push_back("Average SD");
    return lead;
}

void push_cells(std::vector<std::string>& row, const analytics::Report& r, const std::vector<analytics::Cell>& cells,
                TableKind kind, const std::string& subject) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const std::string where = subject + " " + r.mfs[k].blind_label;
        row.push_back(av(need(cells[k].av, kind, "AV of " + where)));
        row.push_back(av(need(cells[k].sd, kind, "SD of " + where)));
    }
}

Table per_question(const analytics::Report& r) {
    const auto kind = TableKind::PerQuestionAvSd;
    Table t{kind, av_sd_header(r, {"Section", "Question"}), {}};
    for (const auto& q : r.questions) {
        std::vector<std::string> row = {q.section, qlabel(q.question)};
        push_cells(row, r, q.cells, kind, qlabel(q.question));
        row.push_back(av(need(q.average_av, kind, "average AV of " + qlabel(q.question))));
        row.push_back(av(need(q.average_sd, kind, "average SD of " + qlabel(q.question))));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table sd_ordered(const analytics::Report& r) {
    const auto kind = TableKind::SdOrdered;
    struct Row {
        int question;
        std::string section;
        double av, sd;
    };
    std::vector<Row> rows;
    for (const auto& q : r.questions)
        rows.push_back({q.question, q.section, need(q.average_av, kind, "average AV of " + qlabel(q.question)),
                        need(q.average_sd, kind, "average SD of " + qlabel(q.question))});
    // Sorted by the printed SD so equal-looking rows keep question order.
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        const double x = round_half_away(a.sd, kAvSdDecimals), y = round_half_away(b.sd, kAvSdDecimals);
        return x != y ? x < y : a.question < b.question;
    });
    Table t{kind, {"Question", "Section", "Average AV", "Average SD"}, {}};
    for (const auto& x : rows) t.rows.push_back({qlabel(x.question), x.section, av(x.av), av(x.sd)});
    return t;
}

struct Ranked {
    std::size_t index;
    double value;
};

// Descending by value, ties in original order.
std::vector<Ranked> descending(std::vector<Ranked> v) {
    std::stable_sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) { return a.value > b.value; });
    return v;
}

std::vector<Ranked> icc_order(const analytics::Report& r, TableKind kind) {
    std::vector<Ranked> v;
    for (std::size_t i = 0; i < r.questions.size(); ++i)
        v.push_back({i, need(r.questions[i].icc, kind, "ICC of " + qlabel(r.questions[i].question))});
    return descending(std::move(v));
}

std::vector<Ranked> alpha_order(const analytics::Report& r, TableKind kind) {
    std::vector<Ranked> v;
    for (std::size_t i = 0; i < r.mf_stats.size(); ++i)
        v.push_back({i, need(r.mf_stats[i].alpha, kind, "alpha of " + r.mfs[i].blind_label)});
    return descending(std::move(v));
}

Table icc_table(const analytics::Report& r) {
    const auto kind = TableKind::IccTable;
    Table t{kind, {"Question", "ICC", "Average AV"}, {}};
    for (const auto& x : icc_order(r, kind)) {
        const auto& q = r.questions[x.index];
        t.rows.push_back({qlabel(q.question), coef(x.value),
                          av(need(q.average_av, kind, "average AV of " + qlabel(q.question)))});
    }
    return t;
}

Table alpha_table(const analytics::Report& r) {
    const auto kind = TableKind::AlphaTable;
    Table t{kind, {"Microfiction", "Alpha", "Consistency"}, {}};
    for (const auto& x : alpha_order(r, kind)) {
        // Label from the printed value, so "0.8" always reads "Good".
        const double shown = round_half_away(x.value, kCoefficientDecimals);
        t.rows.push_back(
            {r.mfs[x.index].blind_label, coef(x.value), std::string(stats::label_name(stats::label_consistency(shown)))});
    }
    return t;
}

Table section_summary(const analytics::Report& r) {
    const auto kind = TableKind::SectionSummary;
    Table t{kind, av_sd_header(r, {"Section"}), {}};
    for (const auto& s : r.sections) {
        std::vector<std::string> row = {s.name};
        push_cells(row, r, s.cells, kind, s.name);
        row.push_back(av(need(s.average_av, kind, "average AV of " + s.name)));
        row.push_back(av(need(s.average_sd, kind, "average SD of " + s.name)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table kendall_table(const analytics::Report& r) {
    const auto kind = TableKind::KendallBySection;
    Table t{kind, {"Section", "W"}, {}};
    for (const auto& s : r.sections) t.rows.push_back({s.name, coef(need(s.kendall_w, kind, "W of " + s.name))});
    t.rows.push_back({"overall", coef(need(r.kendall_overall, kind, "overall W"))});
    return t;
}

std::string md_cell(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|')
            out += "\\|";
        else if (c == '\n' || c == '\r')
            out += ' ';
        else
            out += c;
    }
    return out;
}

std::string md_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + md_cell(c) + " |";
    return out + "\n";
}

}  // namespace

std::string_view table_name(TableKind k) noexcept {
    switch (k) {
        case TableKind::PerQuestionAvSd: return "av-sd";
        case TableKind::SdOrdered: return "sd-ordered";
        case TableKind::IccTable: return "icc";
        case TableKind::AlphaTable: return "alpha";
        case TableKind::SectionSummary: return "sections";
        case TableKind::KendallBySection: return "kendall";
    }
    return "";
}

std::optional<TableKind> parse_table_kind(std::string_view s) noexcept {
    for (auto k : {TableKind::PerQuestionAvSd, TableKind::SdOrdered, TableKind::IccTable, TableKind::AlphaTable,
                   TableKind::SectionSummary, TableKind::KendallBySection})
        if (table_name(k) == s) return k;
    return std::nullopt;
}

std::string_view format_name(Format f) noexcept { return f == Format::Csv ? "csv" : "markdown"; }

std::optional<Format> parse_format(std::string_view s) noexcept {
    if (s == "csv") return Format::Csv;
    if (s == "markdown" || s == "md") return Format::Markdown;
    return std::nullopt;
}

std::string_view chart_name(ChartKind k) noexcept {
    switch (k) {
        case ChartKind::IccLine: return "icc";
        case ChartKind::AlphaLine: return "alpha";
        case ChartKind::SectionAvSdLine: return "sections";
    }
    return "";
}

std::optional<ChartKind> parse_chart_kind(std::string_view s) noexcept {
    for (auto k : {ChartKind::IccLine, ChartKind::AlphaLine, ChartKind::SectionAvSdLine})
        if (chart_name(k) == s) return k;
    return std::nullopt;
}

double round_half_away(double x, int decimals) noexcept {
    if (!std::isfinite(x)) return x;
    const double p = std::pow(10.0, decimals);
    const double scaled = x * p;
    const double nudged = scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled);
    return std::round(nudged) / p;
}

std::string format_number(double x, int decimals) {
    const double r = round_half_away(x, decimals);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

Table build_table(const analytics::Report& r, TableKind kind) {
    switch (kind) {
        case TableKind::PerQuestionAvSd: return per_question(r);
        case TableKind::SdOrdered: return sd_ordered(r);
        case TableKind::IccTable: return icc_table(r);
        case TableKind::AlphaTable: return alpha_table(r);
        case TableKind::SectionSummary: return section_summary(r);
        case TableKind::KendallBySection: return kendall_table(r);
    }
    throw ReportError("unknown table kind");
}

std::string render(const Table& t, Format f) {
    if (f == Format::Csv) {
        std::vector<csv::Row> rows = {t.header};
        rows.insert(rows.end(), t.rows.begin(), t.rows.end());
        return csv::format(rows);
    }
    std::string out = md_row(t.header);
    out += "|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out += " --- |";
    out += "\n";
    for (const auto& row : t.rows) out += md_row(row);
    return out;
}

std::string render_table(const analytics::Report& r, TableKind kind, Format f) {
    return render(build_table(r, kind), f);
}

std::vector<Series> chart_series(const analytics::Report& r, ChartKind kind) {
    std::vector<Series> out;
    switch (kind) {
        case ChartKind::IccLine: {
            Series s{"ICC", {}, {}, {}};
            for (const auto& x : icc_order(r, TableKind::IccTable)) {
                s.labels.push_back(qlabel(r.questions[x.index].question));
                s.values.push_back(x.value);
            }
            out.push_back(std::move(s));
            break;
        }
        case ChartKind::AlphaLine: {
            Series s{"alpha", {}, {}, {}};
            for (const auto& x : alpha_order(r, TableKind::AlphaTable)) {
                s.labels.push_back(r.mfs[x.index].blind_label);
                s.values.push_back(x.value);
            }
            out.push_back(std::move(s));
            break;
        }
        case ChartKind::SectionAvSdLine: {
            const auto table = TableKind::SectionSummary;
            for (const auto& sec : r.sections) {
                Series s{sec.name, {}, {}, {}};
                for (std::size_t k = 0; k < sec.cells.size(); ++k) {
                    const std::string where = sec.name + " " + r.mfs[k].blind_label;
                    s.labels.push_back(r.mfs[k].blind_label);
                    s.values.push_back(need(sec.cells[k].av, table, "AV of " + where));
                    s.sd.push_back(need(sec.cells[k].sd, table, "SD of " + where));
                }
                out.push_back(std::move(s));
            }
            break;
        }
    }
    return out;
}

nlohmann::json to_json(const std::vector<Series>& series) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : series) {
        nlohmann::json j = {{"name", s.name}, {"labels", s.labels}, {"values", s.values}};
        if (!s.sd.empty()) j["sd"] = s.sd;
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace mfeval::report
