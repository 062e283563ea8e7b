#pragma once

// Loads the bundled fixtures/oracle dataset into an in-memory study.

#include <fstream>
#include <sstream>
#include <string>

#include "mfeval/corpus.hpp"
#include "mfeval/protocol.hpp"
#include "mfeval/study.hpp"

namespace fixture {

inline std::string path(const std::string& rel) { return std::string(MFEVAL_SOURCE_DIR) + "/" + rel; }

inline std::string read(const std::string& rel) {
    std::ifstream in(path(rel), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<mfeval::study::Evaluator> roster() {
    const auto doc = nlohmann::json::parse(read("fixtures/oracle/roster.json"));
    std::vector<mfeval::study::Evaluator> out;
    for (const auto& e : doc) out.push_back(mfeval::study::evaluator_from_json(e, "roster"));
    return out;
}

inline std::vector<mfeval::corpus::Microfiction> corpus() {
    return mfeval::corpus::parse_corpus(read("fixtures/oracle/corpus.json")).items();
}

// Open study with every sheet of responses.csv accepted.
inline mfeval::study::Study oracle_study() {
    using namespace mfeval;
    auto s = study::make_study("oracle", "t0k3n", protocol::build_graimes_protocol(), corpus(), roster());
    s.assignments = study::full_assignment(s);
    study::set_status(s, study::Status::Open);
    for (auto& group : study::parse_responses_csv(read("fixtures/oracle/responses.csv"))) {
        for (auto& sheet : group.sheets) {
            study::type_answers(s.protocol, sheet);
            if (!study::check_sheet(s, sheet).empty()) throw std::runtime_error("fixture sheet rejected");
            study::accept_sheet(s, sheet);
        }
        for (auto& m : group.meta) study::accept_meta(s, m);
    }
    return s;
}

}  // namespace fixture
