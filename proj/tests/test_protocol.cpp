#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mfeval/protocol.hpp"

using namespace mfeval;
using namespace mfeval::protocol;

namespace {

bool has_code(const std::vector<Violation>& vs, const std::string& code) {
    for (const auto& v : vs)
        if (v.code == code) return true;
    return false;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Random protocol that passes validation.
Protocol random_protocol(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nsec(1, 4);
    std::uniform_int_distribution<int> nq(1, 5);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> lo(0, 3);
    Protocol p;
    p.id = "p" + std::to_string(rng() % 1000);
    p.title = "Title \"quoted\" \xC3\xA9";
    p.language = coin(rng) ? "es" : "en";
    int number = static_cast<int>(rng() % 3) + 1;
    const Question* last_likert = nullptr;
    const int sections = nsec(rng);
    p.sections.reserve(static_cast<std::size_t>(sections));
    for (int s = 0; s < sections; ++s) {
        Section sec{"Section " + std::to_string(s), {}};
        const int qs = nq(rng);
        for (int k = 0; k < qs; ++k) {
            Question q;
            q.number = number;
            number += 1 + static_cast<int>(rng() % 2);
            q.prompt = "Prompt " + std::to_string(q.number);
            q.description = coin(rng) ? "" : "desc";
            if (coin(rng)) {
                const int min = lo(rng);
                q.kind = Likert{min, min + 1 + static_cast<int>(rng() % 6)};
            } else {
                q.kind = OpenAnswer{};
            }
            if (last_likert && coin(rng)) {
                q.depends_on = Dependency{last_likert->number, last_likert->likert()->max};
                q.required = coin(rng) == 1;
            } else {
                q.required = coin(rng) == 1;
            }
            if (coin(rng)) q.translations["es"] = {"P", "D"};
            sec.questions.push_back(q);
        }
        p.sections.push_back(std::move(sec));
        for (const auto& q : p.sections.back().questions)
            if (q.is_likert()) last_likert = &q;
    }
    if (coin(rng)) {
        Question m;
        m.number = number;
        m.prompt = "Meta?";
        m.kind = OpenAnswer{};
        p.meta_questions.push_back(m);
    }
    return p;
}

}  // namespace

TEST_CASE("canonical protocol shape") {
    const Protocol p = build_graimes_protocol();
    CHECK(p.sections.size() == 3);
    CHECK(p.sections[0].name == "Story Overview and text complexity");
    CHECK(p.sections[1].name == "Technical Assessment");
    CHECK(p.sections[2].name == "Editorial / Commercial Quality");
    CHECK(p.meta_questions.size() == 2);
    CHECK(p.questions().size() == 15);
    CHECK(p.likert_questions().size() == 10);

    std::vector<int> open;
    std::vector<int> likert;
    for (const auto* q : p.questions()) {
        if (q->is_likert()) {
            likert.push_back(q->number);
            CHECK(*q->likert() == Likert{1, 5});
        } else {
            open.push_back(q->number);
        }
    }
    CHECK(open == std::vector<int>{1, 2, 4, 14, 15});
    CHECK(likert == std::vector<int>{3, 5, 6, 7, 8, 9, 10, 11, 12, 13});

    CHECK(p.find(5)->prompt == "Is the story credible?");
    CHECK(std::holds_alternative<OpenAnswer>(p.find(1)->kind));
    CHECK(p.find(4)->depends_on == Dependency{3, 3});
    CHECK(p.find(14)->depends_on == Dependency{13, 3});
    CHECK_FALSE(p.find(15)->required);
    CHECK(p.find(1)->required);
    CHECK(p.section_of(9)->name == "Technical Assessment");
    CHECK(p.find(16) == nullptr);
    CHECK(p.find_meta(16) != nullptr);
    CHECK(p.find(3)->translations.count("es") == 1);
}

TEST_CASE("canonical protocol is deterministic and valid") {
    CHECK(build_graimes_protocol() == build_graimes_protocol());
    CHECK(validate_protocol(build_graimes_protocol()).empty());
}

TEST_CASE("validation violations") {
    SUBCASE("duplicate question number") {
        Protocol p = build_graimes_protocol();
        p.sections[1].questions[0].number = 3;
        auto v = validate_protocol(p);
        REQUIRE(has_code(v, "duplicate_question_number"));
        bool found = false;
        for (const auto& x : v) found = found || x.message == "duplicate question number: 3";
        CHECK(found);
    }
    SUBCASE("dangling dependency") {
        Protocol p = build_graimes_protocol();
        p.sections[0].questions[3].depends_on = Dependency{16, 3};
        auto v = validate_protocol(p);
        REQUIRE(has_code(v, "dangling_dependency"));
        CHECK(v.front().message.find("dangling dependency") != std::string::npos);
        CHECK(v.front().subject == "Q4");
    }
    SUBCASE("forward dependency and non-Likert target") {
        Protocol p = build_graimes_protocol();
        p.sections[0].questions[2].depends_on = Dependency{5, 3};  // Q3 -> Q5
        p.sections[0].questions[3].depends_on = Dependency{2, 1};  // Q4 -> open Q2
        auto v = validate_protocol(p);
        CHECK(has_code(v, "forward_dependency"));
        CHECK(has_code(v, "dependency_not_likert"));
    }
    SUBCASE("threshold outside target bounds") {
        Protocol p = build_graimes_protocol();
        p.sections[0].questions[3].depends_on = Dependency{3, 6};
        CHECK(has_code(validate_protocol(p), "dependency_threshold_out_of_bounds"));
    }
    SUBCASE("bad Likert bounds, empty section, duplicate section name") {
        Protocol p = build_graimes_protocol();
        p.sections[1].questions[0].kind = Likert{5, 1};
        p.sections.push_back({"Technical Assessment", {}});
        auto v = validate_protocol(p);
        CHECK(has_code(v, "invalid_likert_bounds"));
        CHECK(has_code(v, "empty_section"));
        CHECK(has_code(v, "duplicate_section_name"));
    }
    SUBCASE("meta questions share the numbering space") {
        Protocol p = build_graimes_protocol();
        p.meta_questions[0].number = 15;
        CHECK(has_code(validate_protocol(p), "duplicate_question_number"));
    }
}

TEST_CASE("bundled canonical file parses to the built protocol") {
    const std::string text = read_file(std::string(MFEVAL_SOURCE_DIR) + "/fixtures/graimes.json");
    REQUIRE_FALSE(text.empty());
    CHECK(parse_protocol(text) == build_graimes_protocol());
    CHECK(serialize_protocol(build_graimes_protocol()) == text);
}

TEST_CASE("parse errors carry a locus") {
    auto doc = to_json(build_graimes_protocol());

    SUBCASE("missing sections") {
        doc.erase("sections");
        try {
            protocol_from_json(doc);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.locus() == "sections");
        }
    }
    SUBCASE("unknown field") {
        doc["sections"][1]["questions"][0]["weight"] = 2;
        try {
            protocol_from_json(doc);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.locus() == "sections[1].questions[0].weight");
        }
    }
    SUBCASE("bad kind type") {
        doc["sections"][0]["questions"][0]["kind"]["type"] = "yesno";
        CHECK_THROWS_AS(protocol_from_json(doc), ParseError);
    }
    SUBCASE("malformed JSON reports line") {
        try {
            parse_protocol("{\n  \"id\": \"x\",\n  \"title\": oops\n}");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.locus().rfind("line 3", 0) == 0);
        }
    }
    SUBCASE("Likert max below min is a validation error") {
        doc["sections"][1]["questions"][0]["kind"]["min"] = 5;
        doc["sections"][1]["questions"][0]["kind"]["max"] = 1;
        try {
            protocol_from_json(doc);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            REQUIRE(e.violations().size() >= 1);
            CHECK(e.violations().front().code == "invalid_likert_bounds");
        }
    }
}

TEST_CASE("parse and serialize are inverse on generated valid protocols") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const Protocol p = random_protocol(rng);
        REQUIRE(validate_protocol(p).empty());
        const std::string text = serialize_protocol(p);
        const Protocol back = parse_protocol(text);
        CHECK(back == p);
        CHECK(serialize_protocol(back) == text);
    }
}
