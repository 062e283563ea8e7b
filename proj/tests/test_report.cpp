#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixture_util.hpp"
#include "mfeval/analytics.hpp"
#include "mfeval/csv.hpp"
#include "mfeval/report.hpp"

using namespace mfeval;
using namespace mfeval::report;

namespace {

const analytics::Report& oracle_report() {
    static const analytics::Report r = analytics::compute(fixture::oracle_study());
    return r;
}

std::vector<std::vector<std::string>> parse_markdown(const std::string& md) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(md);
    std::string line;
    while (std::getline(in, line)) {
        REQUIRE(line.size() >= 2);
        std::vector<std::string> cells;
        std::string body = line.substr(2, line.size() - 4);  // strip "| " and " |"
        std::size_t start = 0;
        while (true) {
            const auto bar = body.find(" | ", start);
            cells.push_back(body.substr(start, bar - start));
            if (bar == std::string::npos) break;
            start = bar + 3;
        }
        rows.push_back(cells);
    }
    rows.erase(rows.begin() + 1);  // separator
    return rows;
}

// Sample SD, written out independently of the stats module.
double sample_sd(const std::vector<double>& x) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

TEST_CASE("rounding is half away from zero") {
    CHECK(format_number(0.85, 1) == "0.9");
    CHECK(format_number(0.25, 1) == "0.3");
    CHECK(format_number(-0.25, 1) == "-0.3");
    CHECK(format_number(2.675, 2) == "2.68");
    CHECK(format_number(0.125, 2) == "0.13");
    CHECK(format_number(0.8944, 1) == "0.9");
    CHECK(format_number(0.80, 2) == "0.8");
    CHECK(format_number(4.0, 1) == "4");
    CHECK(format_number(-0.04, 1) == "0");
    CHECK(format_number(-0.72, 2) == "-0.72");
    CHECK(format_number(0.6666666, 2) == "0.67");
    CHECK(round_half_away(0.05, 1) == doctest::Approx(0.1));
}

TEST_CASE("per-question AV/SD grid shape") {
    const auto t = build_table(oracle_report(), TableKind::PerQuestionAvSd);
    CHECK(t.header.size() == 2 + 2 * 6 + 2);
    CHECK(t.header[2] == "MF 1 AV");
    CHECK(t.header.back() == "Average SD");
    REQUIRE(t.rows.size() == 10);
    CHECK(t.rows[0][1] == "Q3");
    CHECK(t.rows[0][2] == "4");  // Q3 on MF 1
    CHECK(t.rows[0][3] == "1");
    CHECK(t.rows[0][14] == "3.5");  // 52/15
    // Grouped by section in protocol order.
    CHECK(t.rows[1][0] == t.rows[5][0]);
    CHECK(t.rows[6][0] == t.rows[9][0]);
    CHECK(t.rows[5][0] != t.rows[6][0]);
}

TEST_CASE("SD-ordered table matches a brute-force sort") {
    const auto s = fixture::oracle_study();
    std::vector<std::pair<double, int>> oracle;
    for (const auto* q : s.protocol.likert_questions()) {
        double total = 0;
        for (const auto& mf : s.corpus) {
            std::vector<double> x;
            for (const auto& e : s.roster) x.push_back(std::get<int>(s.sheets.at({e.id, mf.id}).answers.at(q->number)));
            total += sample_sd(x);
        }
        oracle.emplace_back(std::round(total / 6 * 10) / 10, q->number);
    }
    std::sort(oracle.begin(), oracle.end());

    const auto t = build_table(oracle_report(), TableKind::SdOrdered);
    REQUIRE(t.rows.size() == oracle.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i][0] == "Q" + std::to_string(oracle[i].second));
        CHECK(std::stod(t.rows[i][3]) == doctest::Approx(oracle[i].first));
    }
    CHECK(t.rows.front()[0] == "Q3");
}

TEST_CASE("ICC and alpha tables sort descending") {
    const auto icc = build_table(oracle_report(), TableKind::IccTable);
    // Exact values from tests/scripts/oracle_fixture.py, sorted by hand.
    const std::vector<std::string> order = {"Q7", "Q3", "Q5", "Q8", "Q6", "Q13", "Q10", "Q12", "Q9", "Q11"};
    REQUIRE(icc.rows.size() == order.size());
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(icc.rows[i][0] == order[i]);
    CHECK(icc.rows[0][1] == "0.58");  // 2407/4132

    const auto alpha = build_table(oracle_report(), TableKind::AlphaTable);
    REQUIRE(alpha.rows.size() == 6);
    CHECK(alpha.rows[0] == std::vector<std::string>{"MF 4", "0.93", "Excellent"});
    CHECK(alpha.rows[5] == std::vector<std::string>{"MF 3", "0.48", "Unacceptable"});
}

TEST_CASE("alpha row formatting") {
    analytics::Report r;
    r.mfs = {{"a", "MF 1", 5, std::nullopt}, {"b", "MF 2", 5, std::nullopt}};
    r.mf_stats.resize(2);
    r.mf_stats[0].alpha = stats::Estimate::of(0.8);
    r.mf_stats[1].alpha = stats::Estimate::of(0.67);
    const auto t = build_table(r, TableKind::AlphaTable);
    CHECK(t.rows[0] == std::vector<std::string>{"MF 1", "0.8", "Good"});
    CHECK(t.rows[1] == std::vector<std::string>{"MF 2", "0.67", "Questionable"});
    CHECK(render(t, Format::Markdown).find("| MF 1 | 0.8 | Good |") != std::string::npos);
}

TEST_CASE("missing statistics name the table and value") {
    analytics::Report r = oracle_report();
    r.questions[9].icc = stats::Estimate::undefined("zero variance");
    try {
        build_table(r, TableKind::IccTable);
        FAIL("expected ReportError");
    } catch (const ReportError& e) {
        CHECK(std::string(e.what()) == "icc table: ICC of Q13 is undefined (zero variance)");
    }
    CHECK_THROWS_AS(chart_series(r, ChartKind::IccLine), ReportError);
    CHECK_NOTHROW(build_table(r, TableKind::AlphaTable));
    r.kendall_overall = stats::Estimate::undefined("no raters");
    CHECK_THROWS_WITH(build_table(r, TableKind::KendallBySection), "kendall table: overall W is undefined (no raters)");
}

TEST_CASE("CSV and Markdown carry identical cells") {
    for (auto kind : {TableKind::PerQuestionAvSd, TableKind::SdOrdered, TableKind::IccTable, TableKind::AlphaTable,
                      TableKind::SectionSummary, TableKind::KendallBySection}) {
        CAPTURE(table_name(kind));
        const auto csv_text = render_table(oracle_report(), kind, Format::Csv);
        const auto md_text = render_table(oracle_report(), kind, Format::Markdown);
        CHECK(csv::parse(csv_text) == parse_markdown(md_text));
        CHECK(csv_text == render_table(oracle_report(), kind, Format::Csv));
        CHECK(parse_table_kind(table_name(kind)) == kind);
    }
}

TEST_CASE("rendered CSV recovers numbers to printed precision") {
    const auto& r = oracle_report();
    const auto rows = csv::parse(render_table(r, TableKind::PerQuestionAvSd, Format::Csv));
    for (std::size_t i = 0; i < r.questions.size(); ++i) {
        const auto& row = rows[i + 1];
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(std::stod(row[2 + 2 * k]) == round_half_away(r.questions[i].cells[k].av.value(), 1));
            CHECK(std::stod(row[3 + 2 * k]) == round_half_away(r.questions[i].cells[k].sd.value(), 1));
        }
    }
    const auto w = csv::parse(render_table(r, TableKind::KendallBySection, Format::Csv));
    CHECK(std::stod(w.back()[1]) == round_half_away(293.0 / 435, 2));
}

TEST_CASE("chart series") {
    const auto& r = oracle_report();
    const auto icc = chart_series(r, ChartKind::IccLine);
    REQUIRE(icc.size() == 1);
    CHECK(std::is_sorted(icc[0].values.rbegin(), icc[0].values.rend()));
    const auto table = build_table(r, TableKind::IccTable);
    for (std::size_t i = 0; i < table.rows.size(); ++i) CHECK(icc[0].labels[i] == table.rows[i][0]);

    const auto alpha = chart_series(r, ChartKind::AlphaLine);
    CHECK(alpha[0].values.size() == 6);
    CHECK(alpha[0].labels.front() == "MF 4");

    const auto sections = chart_series(r, ChartKind::SectionAvSdLine);
    REQUIRE(sections.size() == 3);
    for (const auto& s : sections) {
        CHECK(s.labels.size() == 6);
        CHECK(s.sd.size() == 6);
    }
    const auto j = to_json(sections);
    CHECK(j[0]["sd"].size() == 6);
    CHECK_FALSE(to_json(icc)[0].contains("sd"));
}
