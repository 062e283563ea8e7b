#pragma once

// Questionnaire instruments: typed questions grouped into sections, with
// single-question threshold dependencies.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mfeval/error.hpp"

namespace mfeval::protocol {

struct OpenAnswer {
    friend bool operator==(const OpenAnswer&, const OpenAnswer&) = default;
};

struct Likert {
    int min = 1;
    int max = 5;
    friend bool operator==(const Likert&, const Likert&) = default;
};

using AnswerKind = std::variant<OpenAnswer, Likert>;

// The dependent question is active iff the answer to `question` is >= min_value.
struct Dependency {
    int question = 0;
    int min_value = 0;
    friend bool operator==(const Dependency&, const Dependency&) = default;
};

struct Translation {
    std::string prompt;
    std::string description;
    friend bool operator==(const Translation&, const Translation&) = default;
};

struct Question {
    int number = 0;
    std::string prompt;
    AnswerKind kind;
    std::string description;
    std::optional<Dependency> depends_on;
    // Defaults to true for independent questions and false for dependent ones.
    bool required = true;
    std::map<std::string, Translation> translations;  // keyed by language tag

    const Likert* likert() const noexcept { return std::get_if<Likert>(&kind); }
    bool is_likert() const noexcept { return likert() != nullptr; }

    friend bool operator==(const Question&, const Question&) = default;
};

struct Section {
    std::string name;
    std::vector<Question> questions;
    friend bool operator==(const Section&, const Section&) = default;
};

struct Protocol {
    std::string id;
    std::string title;
    std::string language;
    std::vector<Section> sections;
    std::vector<Question> meta_questions;  // answered once per evaluator per study

    // Section questions only; meta questions are looked up separately.
    const Question* find(int number) const noexcept;
    const Question* find_meta(int number) const noexcept;
    const Section* section_of(int number) const noexcept;
    std::vector<const Question*> questions() const;
    std::vector<const Question*> likert_questions() const;

    friend bool operator==(const Protocol&, const Protocol&) = default;
};

// Activation threshold for "if the above question was affirmative" on a
// 1-5 scale.
inline constexpr int kAffirmativeThreshold = 3;

Protocol build_graimes_protocol();

// Empty iff every structural rule holds.
std::vector<Violation> validate_protocol(const Protocol& p);

// Throws ParseError (malformed JSON or schema mismatch, with line or field
// locus) or ValidationError (well-formed but violates protocol rules).
Protocol parse_protocol(std::string_view document);
Protocol protocol_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Protocol& p);
nlohmann::json to_json(const Question& q);
std::string serialize_protocol(const Protocol& p);

}  // namespace mfeval::protocol
