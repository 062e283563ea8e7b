#include "mfeval/analytics.hpp"

#include <functional>

namespace mfeval::analytics {

using nlohmann::json;
using stats::RatingMatrix;

namespace {

using study::Study;

std::optional<int> likert_answer(const Study& s, const std::string& evaluator,
                                 const std::string& mf, int question) {
    auto it = s.sheets.find({evaluator, mf});
    if (it == s.sheets.end()) return std::nullopt;
    auto a = it->second.answers.find(question);
    if (a == it->second.answers.end()) return std::nullopt;
    if (const int* v = std::get_if<int>(&a->second)) return *v;
    return std::nullopt;
}

Cell describe(const std::vector<double>& values) {
    Cell c;
    c.count = values.size();
    if (values.empty()) return c;
    const auto d = stats::descriptive(values);
    c.av = Estimate::of(d.mean);
    c.sd = values.size() < 2 ? Estimate::undefined("a single answer has no sample SD")
                             : Estimate::of(d.sd);
    return c;
}

// Unweighted mean of the defined estimates.
Estimate mean_of(const std::vector<Cell>& cells, Estimate Cell::*field) {
    std::vector<double> v;
    for (const auto& c : cells)
        if ((c.*field).has_value()) v.push_back((c.*field).value());
    if (v.empty()) return Estimate::undefined("no microfiction has this value");
    return Estimate::of(stats::descriptive(v).mean);
}

// Runs `stat` on the policy-completed matrix; failures become reasons.
Estimate guarded(const RatingMatrix& m, const Options& o, stats::Statistic which,
                 stats::DeletionReport& deletions,
                 const std::function<Estimate(const RatingMatrix&)>& stat) {
    deletions = {o.policy, {}, {}};
    try {
        auto complete = stats::apply_missing_policy(m, o.policy, which);
        deletions = complete.deletions;
        return stat(complete.matrix);
    } catch (const stats::StatsError& e) {
        return Estimate::undefined(e.what());
    }
}

}  // namespace

Report compute(const Study& s, const Options& options) {
    static const semantic::BuiltinProvider builtin;
    const semantic::Provider& provider = options.provider ? *options.provider : builtin;

    Report r;
    r.study_id = s.id;
    r.status = s.status;
    r.policy = options.policy;
    r.tie_correction = options.tie_correction;
    r.provider_id = provider.id();

    std::vector<const study::Evaluator*> raters;
    for (const auto& e : s.roster) {
        bool any = false;
        for (const auto& mf : s.corpus) any = any || s.sheets.contains({e.id, mf.id});
        if (any) {
            raters.push_back(&e);
            r.raters.push_back(e.display_alias);
        }
    }
    if (raters.size() < 2)
        throw stats::StatsError("analytics need at least 2 evaluators with a submitted sheet, have " +
                                std::to_string(raters.size()));

    std::vector<std::string> labels;
    for (const auto& mf : s.corpus) {
        MfInfo info{mf.id, mf.blind_label, 0, std::nullopt};
        for (const auto* e : raters) info.raters += s.sheets.contains({e->id, mf.id});
        if (s.status == study::Status::Closed) info.provenance = mf.provenance;
        r.mfs.push_back(std::move(info));
        labels.push_back(mf.blind_label);
    }

    const auto likert = s.protocol.likert_questions();

    // (question, MF) descriptive grid and ICC over raters x MFs.
    for (const auto* q : likert) {
        QuestionStats qs;
        qs.question = q->number;
        qs.section = s.protocol.section_of(q->number)->name;
        RatingMatrix m(r.raters, labels);
        for (std::size_t j = 0; j < s.corpus.size(); ++j) {
            std::vector<double> values;
            for (std::size_t i = 0; i < raters.size(); ++i) {
                if (auto v = likert_answer(s, raters[i]->id, s.corpus[j].id, q->number)) {
                    values.push_back(*v);
                    m.set(i, j, *v);
                }
            }
            qs.cells.push_back(describe(values));
        }
        qs.average_av = mean_of(qs.cells, &Cell::av);
        qs.average_sd = mean_of(qs.cells, &Cell::sd);
        qs.icc = guarded(m, options, stats::Statistic::Icc, qs.icc_deletions, stats::icc_one_way);
        r.questions.push_back(std::move(qs));
    }

    // Alpha per MF over raters x Likert questions.
    std::vector<std::string> qnames;
    for (const auto* q : likert) qnames.push_back("Q" + std::to_string(q->number));
    for (const auto& mf : s.corpus) {
        MfStats ms;
        ms.mf_id = mf.id;
        std::vector<std::string> who;
        std::vector<const study::Evaluator*> rows;
        for (const auto* e : raters)
            if (s.sheets.contains({e->id, mf.id})) {
                rows.push_back(e);
                who.push_back(e->display_alias);
            }
        RatingMatrix m(who, qnames);
        std::vector<double> pooled;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t k = 0; k < likert.size(); ++k)
                if (auto v = likert_answer(s, rows[i]->id, mf.id, likert[k]->number)) {
                    m.set(i, k, *v);
                    pooled.push_back(*v);
                }
        const Cell c = describe(pooled);
        ms.av = c.av;
        ms.sd = c.sd;
        ms.alpha = guarded(m, options, stats::Statistic::Alpha, ms.deletions, stats::cronbach_alpha);
        if (ms.alpha) ms.label = stats::label_consistency(ms.alpha.value());
        r.mf_stats.push_back(std::move(ms));
    }

    // Kendall's W over raters x MFs using mean scores on a question subset.
    const stats::KendallOptions kopt{options.tie_correction};
    auto kendall = [&](const std::vector<int>& questions, stats::DeletionReport& deletions) {
        RatingMatrix m(r.raters, labels);
        for (std::size_t i = 0; i < raters.size(); ++i)
            for (std::size_t j = 0; j < s.corpus.size(); ++j) {
                std::vector<double> v;
                for (int q : questions)
                    if (auto a = likert_answer(s, raters[i]->id, s.corpus[j].id, q)) v.push_back(*a);
                if (!v.empty()) m.set(i, j, stats::descriptive(v).mean);
            }
        return guarded(m, options, stats::Statistic::KendallW, deletions,
                       [&](const RatingMatrix& cm) { return stats::kendall_w(cm, kopt); });
    };

    std::vector<int> all_likert;
    for (const auto* q : likert) all_likert.push_back(q->number);
    for (const auto& sec : s.protocol.sections) {
        SectionStats ss;
        ss.name = sec.name;
        for (const auto& q : sec.questions)
            if (q.is_likert()) ss.questions.push_back(q.number);
        for (const auto& mf : s.corpus) {
            std::vector<double> pooled;
            for (const auto* e : raters)
                for (int q : ss.questions)
                    if (auto v = likert_answer(s, e->id, mf.id, q)) pooled.push_back(*v);
            ss.cells.push_back(describe(pooled));
        }
        ss.average_av = mean_of(ss.cells, &Cell::av);
        ss.average_sd = mean_of(ss.cells, &Cell::sd);
        if (ss.questions.empty())
            ss.kendall_w = Estimate::undefined("section has no Likert questions");
        else
            ss.kendall_w = kendall(ss.questions, ss.kendall_deletions);
        r.sections.push_back(std::move(ss));
    }
    r.kendall_overall = kendall(all_likert, r.kendall_overall_deletions);

    for (const auto* q : s.protocol.questions()) {
        if (q->is_likert()) continue;
        for (const auto& mf : s.corpus) {
            Agreement a;
            a.question = q->number;
            a.mf_id = mf.id;
            std::vector<semantic::JudgeAnswer> answers;
            for (const auto* e : raters) {
                auto it = s.sheets.find({e->id, mf.id});
                if (it == s.sheets.end()) continue;
                std::string text;
                if (auto ans = it->second.answers.find(q->number); ans != it->second.answers.end())
                    if (const auto* t = std::get_if<std::string>(&ans->second)) text = *t;
                answers.push_back({e->display_alias, text});
            }
            try {
                a.matrix = semantic::agreement_matrix(answers, q->number, mf.id, provider);
            } catch (const semantic::SemanticError& e) {
                a.reason = e.what();
            }
            r.agreements.push_back(std::move(a));
        }
    }

    for (const auto& q : s.protocol.meta_questions) {
        MetaAnswers ma{q.number, {}};
        for (const auto& e : s.roster)
            if (auto it = s.meta.find(e.id); it != s.meta.end())
                if (auto a = it->second.answers.find(q.number); a != it->second.answers.end())
                    ma.answers.emplace_back(e.display_alias, a->second);
        r.meta.push_back(std::move(ma));
    }
    return r;
}

json to_json(const Estimate& e) {
    if (e) return {{"value", e.value()}};
    return {{"value", nullptr}, {"reason", e.reason()}};
}

namespace {

json cell_json(const Cell& c) { return {{"count", c.count}, {"av", to_json(c.av)}, {"sd", to_json(c.sd)}}; }

json deletions_json(const stats::DeletionReport& d) {
    return {{"policy", stats::policy_name(d.policy)},
            {"dropped_raters", d.dropped_raters},
            {"dropped_items", d.dropped_items}};
}

json cells_json(const std::vector<Cell>& cells) {
    json out = json::array();
    for (const auto& c : cells) out.push_back(cell_json(c));
    return out;
}

}  // namespace

json to_json(const Report& r) {
    json mfs = json::array();
    for (const auto& m : r.mfs) {
        json j = {{"id", m.id}, {"blind_label", m.blind_label}, {"raters", m.raters}};
        if (m.provenance) j["provenance"] = corpus::to_json(*m.provenance);
        mfs.push_back(std::move(j));
    }
    json questions = json::array();
    for (const auto& q : r.questions)
        questions.push_back({{"question", q.question},
                             {"section", q.section},
                             {"cells", cells_json(q.cells)},
                             {"average", {{"av", to_json(q.average_av)}, {"sd", to_json(q.average_sd)}}},
                             {"icc", to_json(q.icc)},
                             {"icc_deletions", deletions_json(q.icc_deletions)}});
    json alpha = json::array();
    for (const auto& m : r.mf_stats)
        alpha.push_back({{"microfiction", m.mf_id},
                         {"alpha", to_json(m.alpha)},
                         {"label", m.label ? json(stats::label_name(*m.label)) : json(nullptr)},
                         {"av", to_json(m.av)},
                         {"sd", to_json(m.sd)},
                         {"deletions", deletions_json(m.deletions)}});
    json sections = json::array();
    for (const auto& s : r.sections)
        sections.push_back({{"name", s.name},
                            {"questions", s.questions},
                            {"cells", cells_json(s.cells)},
                            {"average", {{"av", to_json(s.average_av)}, {"sd", to_json(s.average_sd)}}},
                            {"kendall_w", to_json(s.kendall_w)},
                            {"kendall_deletions", deletions_json(s.kendall_deletions)}});
    json agreement = json::array();
    for (const auto& a : r.agreements) {
        json j = {{"question", a.question}, {"microfiction", a.mf_id}};
        j["matrix"] = a.matrix ? semantic::to_json(*a.matrix) : json(nullptr);
        if (!a.matrix) j["reason"] = a.reason;
        agreement.push_back(std::move(j));
    }
    json meta = json::array();
    for (const auto& m : r.meta) {
        json answers = json::array();
        for (const auto& [alias, text] : m.answers) answers.push_back({{"alias", alias}, {"answer", text}});
        meta.push_back({{"question", m.question}, {"answers", answers}});
    }
    return {{"study", r.study_id},
            {"status", study::status_name(r.status)},
            {"options",
             {{"policy", stats::policy_name(r.policy)},
              {"tie_correction", r.tie_correction},
              {"provider", r.provider_id}}},
            {"raters", r.raters},
            {"microfictions", mfs},
            {"questions", questions},
            {"alpha", alpha},
            {"sections", sections},
            {"kendall_overall", {{"w", to_json(r.kendall_overall)}, {"deletions", deletions_json(r.kendall_overall_deletions)}}},
            {"agreement", agreement},
            {"meta", meta}};
}

}  // namespace mfeval::analytics
