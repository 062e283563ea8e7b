#pragma once

// Study-level analytics: descriptive grids, ICC per question, alpha per
// microfiction, Kendall's W per section, open-answer agreement matrices.
//
// A statistic that cannot be computed is reported as undefined with a
// reason; the report itself only fails on provider transport errors.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfeval/corpus.hpp"
#include "mfeval/semantic.hpp"
#include "mfeval/stats.hpp"
#include "mfeval/study.hpp"

namespace mfeval::analytics {

using stats::Estimate;

struct Options {
    stats::MissingPolicy policy = stats::MissingPolicy::ListwiseByItem;
    bool tie_correction = true;
    // Built-in provider when null.
    const semantic::Provider* provider = nullptr;
};

struct MfInfo {
    std::string id;
    std::string blind_label;
    std::size_t raters = 0;  // sheets received
    std::optional<corpus::Provenance> provenance;  // only once the study is closed
};

// One (question, microfiction) cell.
struct Cell {
    std::size_t count = 0;
    Estimate av = Estimate::undefined("no answers");
    Estimate sd = Estimate::undefined("no answers");
};

struct QuestionStats {
    int question = 0;
    std::string section;
    std::vector<Cell> cells;  // corpus order
    Estimate average_av = Estimate::undefined("no answers");  // mean of per-MF AVs
    Estimate average_sd = Estimate::undefined("no answers");  // mean of per-MF SDs
    Estimate icc = Estimate::undefined("not computed");
    stats::DeletionReport icc_deletions;
};

struct MfStats {
    std::string mf_id;
    Estimate alpha = Estimate::undefined("not computed");
    std::optional<stats::ConsistencyLabel> label;
    Estimate av = Estimate::undefined("no answers");  // pooled over raters and Likert questions
    Estimate sd = Estimate::undefined("no answers");
    stats::DeletionReport deletions;
};

struct SectionStats {
    std::string name;
    std::vector<int> questions;  // Likert questions only
    std::vector<Cell> cells;     // per MF, pooled over the section's questions
    Estimate average_av = Estimate::undefined("no answers");
    Estimate average_sd = Estimate::undefined("no answers");
    Estimate kendall_w = Estimate::undefined("not computed");
    stats::DeletionReport kendall_deletions;
};

struct Agreement {
    int question = 0;
    std::string mf_id;
    std::optional<semantic::AgreementMatrix> matrix;
    std::string reason;  // set when matrix is absent
};

struct MetaAnswers {
    int question = 0;
    std::vector<std::pair<std::string, std::string>> answers;  // alias, text
};

struct Report {
    std::string study_id;
    study::Status status = study::Status::Draft;
    stats::MissingPolicy policy = stats::MissingPolicy::ListwiseByItem;
    bool tie_correction = true;
    std::string provider_id;
    std::vector<std::string> raters;  // aliases of evaluators with at least one sheet
    std::vector<MfInfo> mfs;
    std::vector<QuestionStats> questions;  // Likert questions in protocol order
    std::vector<MfStats> mf_stats;         // corpus order
    std::vector<SectionStats> sections;    // protocol order
    Estimate kendall_overall = Estimate::undefined("not computed");
    stats::DeletionReport kendall_overall_deletions;
    std::vector<Agreement> agreements;  // open questions x MFs
    std::vector<MetaAnswers> meta;
};

// Throws StatsError when fewer than two evaluators have submitted a sheet.
// Provider transport errors propagate.
Report compute(const study::Study& s, const Options& options = {});

nlohmann::json to_json(const Report& r);

nlohmann::json to_json(const Estimate& e);

}  // namespace mfeval::analytics
