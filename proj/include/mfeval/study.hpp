#pragma once

// Study domain model: roster, assignments, response sheets and the rules a
// sheet must satisfy. Everything here is single-threaded and in-memory;
// StudyService adds persistence and locking.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mfeval/corpus.hpp"
#include "mfeval/error.hpp"
#include "mfeval/protocol.hpp"

namespace mfeval::study {

enum class Cohort { Expert, Enthusiast, Other };

std::string_view cohort_name(Cohort c) noexcept;
std::optional<Cohort> parse_cohort(std::string_view s) noexcept;

struct Evaluator {
    std::string id;
    Cohort cohort = Cohort::Other;
    std::string display_alias;  // "J1", unique within a study

    friend bool operator==(const Evaluator&, const Evaluator&) = default;
};

enum class Status { Draft, Open, Closed };

std::string_view status_name(Status s) noexcept;
std::optional<Status> parse_status(std::string_view s) noexcept;

// Integer for Likert questions, text for open ones.
using Answer = std::variant<int, std::string>;

struct ResponseSheet {
    std::string evaluator_id;
    std::string mf_id;
    std::map<int, Answer> answers;
    std::string submitted_at;  // ISO 8601 UTC, informational only

    friend bool operator==(const ResponseSheet&, const ResponseSheet&) = default;
};

// Answers to the protocol's meta questions, once per evaluator.
struct MetaResponse {
    std::string evaluator_id;
    std::map<int, std::string> answers;
    std::string submitted_at;

    friend bool operator==(const MetaResponse&, const MetaResponse&) = default;
};

struct Study {
    std::string id;
    std::string token;
    protocol::Protocol protocol;
    std::vector<corpus::Microfiction> corpus;
    std::vector<Evaluator> roster;
    std::map<std::string, std::vector<std::string>> assignments;  // evaluator id -> mf ids
    Status status = Status::Draft;
    std::map<std::pair<std::string, std::string>, ResponseSheet> sheets;  // (evaluator, mf)
    std::map<std::string, MetaResponse> meta;

    const Evaluator* find_evaluator(std::string_view id_or_alias) const noexcept;
    const corpus::Microfiction* find_mf(std::string_view id_or_label) const noexcept;
    bool is_assigned(const std::string& evaluator_id, const std::string& mf_id) const;
    std::size_t mf_index(const std::string& mf_id) const;

    friend bool operator==(const Study&, const Study&) = default;
};

// 1-64 characters of [A-Za-z0-9._-], excluding "." and "..".
bool valid_study_id(std::string_view id) noexcept;

// Empty protocol violations, empty corpus, duplicate ids or aliases.
// Throws ValidationError("invalid_study").
Study make_study(std::string id, std::string token, protocol::Protocol protocol,
                 std::vector<corpus::Microfiction> corpus, std::vector<Evaluator> roster);

// Throws ValidationError("invalid_roster") on duplicates against the
// existing roster or within `added`.
void add_evaluators(Study& s, const std::vector<Evaluator>& added);

// Replaces the assignment list of every evaluator named in `a`. References
// may be ids/aliases and ids/blind labels; the result holds canonical ids.
// Throws ValidationError("invalid_assignment").
std::map<std::string, std::vector<std::string>> resolve_assignments(
    const Study& s, const std::map<std::string, std::vector<std::string>>& a);
void set_assignments(Study& s, const std::map<std::string, std::vector<std::string>>& a);

// Every evaluator gets every microfiction, in corpus order.
std::map<std::string, std::vector<std::string>> full_assignment(const Study& s);

// Draft -> Open -> Closed. Throws ConflictError otherwise.
void set_status(Study& s, Status next);

// Content rules only (bounds, types, dependencies, presence).
std::vector<Violation> check_answers(const protocol::Protocol& p,
                                     const std::map<int, Answer>& answers);

// Content rules plus study status and assignment. `sheet` must already
// carry canonical ids when they resolve; unresolvable references are
// reported as not_assigned.
std::vector<Violation> check_sheet(const Study& s, const ResponseSheet& sheet);
std::vector<Violation> check_meta(const Study& s, const MetaResponse& meta);

// Returns true when an earlier sheet was replaced.
bool accept_sheet(Study& s, ResponseSheet sheet);
void accept_meta(Study& s, MetaResponse meta);

nlohmann::json to_json(const Evaluator& e);
Evaluator evaluator_from_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json to_json(const Answer& a);
nlohmann::json to_json(const ResponseSheet& sheet);
ResponseSheet sheet_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const MetaResponse& m);
MetaResponse meta_from_json(const nlohmann::json& doc);
// Full persisted form, including provenance and the token.
nlohmann::json to_json(const Study& s);
Study study_from_json(const nlohmann::json& doc);

// Views. Neither contains provenance.
nlohmann::json progress_view(const Study& s);
nlohmann::json tasks_view(const Study& s, const Evaluator& e);

// Row-per-answer export: study_id, evaluator_id, mf_id, question, answer.
// Meta answers have an empty mf_id.
std::string export_csv(const Study& s);

struct ImportedResponses {
    std::string study_id;
    std::vector<ResponseSheet> sheets;
    std::vector<MetaResponse> meta;
};

// Parses the export format, grouping rows into sheets per study in
// first-appearance order. Every answer is text; see type_answers. Throws
// ParseError with a "row N" locus.
std::vector<ImportedResponses> parse_responses_csv(std::string_view text);

// Integer text becomes a Likert answer for the protocol's Likert questions.
void type_answers(const protocol::Protocol& p, ResponseSheet& sheet);

}  // namespace mfeval::study
