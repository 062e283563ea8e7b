#include "mfeval/study.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

#include "json_fields.hpp"
#include "mfeval/csv.hpp"
#include "mfeval/text.hpp"

namespace mfeval::study {

using nlohmann::json;

namespace {

std::string qname(int n) { return "Q" + std::to_string(n); }

bool blank(const Answer& a) {
    const auto* s = std::get_if<std::string>(&a);
    return s && text::trim(*s).empty();
}

void check_roster(const std::vector<Evaluator>& roster, std::vector<Violation>& out) {
    std::set<std::string> ids, aliases;
    for (const auto& e : roster) {
        if (e.id.empty())
            out.push_back({"empty_evaluator_id", "roster", "evaluator id must not be empty"});
        else if (!ids.insert(e.id).second)
            out.push_back({"duplicate_evaluator_id", e.id, "duplicate evaluator id: " + e.id});
        if (!aliases.insert(e.display_alias).second)
            out.push_back({"duplicate_alias", e.display_alias,
                           "duplicate display alias: " + e.display_alias});
    }
}

void fill_aliases(std::vector<Evaluator>& roster, std::size_t offset) {
    for (std::size_t i = 0; i < roster.size(); ++i)
        if (roster[i].display_alias.empty())
            roster[i].display_alias = "J" + std::to_string(offset + i + 1);
}

}  // namespace

bool valid_study_id(std::string_view id) noexcept {
    if (id.empty() || id.size() > 64 || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '-' || c == '_' || c == '.';
    });
}

std::string_view cohort_name(Cohort c) noexcept {
    switch (c) {
        case Cohort::Expert: return "expert";
        case Cohort::Enthusiast: return "enthusiast";
        case Cohort::Other: return "other";
    }
    return "other";
}

std::optional<Cohort> parse_cohort(std::string_view s) noexcept {
    const std::string l = text::to_lower(s);
    if (l == "expert") return Cohort::Expert;
    if (l == "enthusiast") return Cohort::Enthusiast;
    if (l == "other") return Cohort::Other;
    return std::nullopt;
}

std::string_view status_name(Status s) noexcept {
    switch (s) {
        case Status::Draft: return "draft";
        case Status::Open: return "open";
        case Status::Closed: return "closed";
    }
    return "draft";
}

std::optional<Status> parse_status(std::string_view s) noexcept {
    const std::string l = text::to_lower(s);
    if (l == "draft") return Status::Draft;
    if (l == "open") return Status::Open;
    if (l == "closed") return Status::Closed;
    return std::nullopt;
}

const Evaluator* Study::find_evaluator(std::string_view ref) const noexcept {
    for (const auto& e : roster)
        if (e.id == ref) return &e;
    for (const auto& e : roster)
        if (e.display_alias == ref) return &e;
    return nullptr;
}

const corpus::Microfiction* Study::find_mf(std::string_view ref) const noexcept {
    for (const auto& mf : corpus)
        if (mf.id == ref) return &mf;
    for (const auto& mf : corpus)
        if (mf.blind_label == ref) return &mf;
    return nullptr;
}

bool Study::is_assigned(const std::string& evaluator_id, const std::string& mf_id) const {
    auto it = assignments.find(evaluator_id);
    return it != assignments.end() &&
           std::find(it->second.begin(), it->second.end(), mf_id) != it->second.end();
}

std::size_t Study::mf_index(const std::string& mf_id) const {
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (corpus[i].id == mf_id) return i;
    throw NotFoundError("unknown microfiction: " + mf_id);
}

Study make_study(std::string id, std::string token, protocol::Protocol protocol,
                 std::vector<corpus::Microfiction> items, std::vector<Evaluator> roster) {
    std::vector<Violation> v = protocol::validate_protocol(protocol);
    if (!valid_study_id(id))
        v.push_back({"invalid_study_id", "id",
                     "study id must be 1-64 characters of [A-Za-z0-9._-]: " + id});
    if (items.empty()) v.push_back({"empty_corpus", "corpus", "a study needs at least one microfiction"});
    std::set<std::string> mf_ids;
    for (const auto& mf : items)
        if (!mf_ids.insert(mf.id).second)
            v.push_back({"duplicate_microfiction_id", mf.id, "duplicate microfiction id: " + mf.id});
    fill_aliases(roster, 0);
    check_roster(roster, v);
    if (!v.empty()) {
        std::string first = v.front().message;
        throw ValidationError("invalid_study", first, std::move(v));
    }

    for (std::size_t i = 0; i < items.size(); ++i) items[i].blind_label = "MF " + std::to_string(i + 1);
    Study s;
    s.id = std::move(id);
    s.token = std::move(token);
    s.protocol = std::move(protocol);
    s.corpus = std::move(items);
    s.roster = std::move(roster);
    return s;
}

void add_evaluators(Study& s, const std::vector<Evaluator>& added) {
    if (s.status == Status::Closed) throw ConflictError("study " + s.id + " is closed");
    std::vector<Evaluator> merged = s.roster;
    std::vector<Evaluator> extra = added;
    fill_aliases(extra, s.roster.size());
    merged.insert(merged.end(), extra.begin(), extra.end());
    std::vector<Violation> v;
    check_roster(merged, v);
    if (!v.empty()) {
        std::string first = v.front().message;
        throw ValidationError("invalid_roster", first, std::move(v));
    }
    s.roster = std::move(merged);
}

std::map<std::string, std::vector<std::string>> resolve_assignments(
    const Study& s, const std::map<std::string, std::vector<std::string>>& a) {
    std::vector<Violation> v;
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [eref, mfs] : a) {
        const Evaluator* e = s.find_evaluator(eref);
        if (!e) {
            v.push_back({"unknown_evaluator", eref, "unknown evaluator: " + eref});
            continue;
        }
        auto& list = out[e->id];
        for (const auto& mref : mfs) {
            const corpus::Microfiction* mf = s.find_mf(mref);
            if (!mf) {
                v.push_back({"unknown_microfiction", mref, "unknown microfiction: " + mref});
                continue;
            }
            if (std::find(list.begin(), list.end(), mf->id) != list.end())
                v.push_back({"duplicate_assignment", e->display_alias,
                             e->display_alias + " is assigned " + mf->blind_label + " twice"});
            else
                list.push_back(mf->id);
        }
    }
    if (!v.empty()) {
        std::string first = v.front().message;
        throw ValidationError("invalid_assignment", first, std::move(v));
    }
    return out;
}

void set_assignments(Study& s, const std::map<std::string, std::vector<std::string>>& a) {
    if (s.status == Status::Closed) throw ConflictError("study " + s.id + " is closed");
    for (auto& [e, mfs] : resolve_assignments(s, a)) s.assignments[e] = std::move(mfs);
}

std::map<std::string, std::vector<std::string>> full_assignment(const Study& s) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& e : s.roster)
        for (const auto& mf : s.corpus) out[e.id].push_back(mf.id);
    return out;
}

void set_status(Study& s, Status next) {
    const bool ok = (s.status == Status::Draft && next == Status::Open) ||
                    (s.status == Status::Open && next == Status::Closed);
    if (!ok)
        throw ConflictError("cannot move study " + s.id + " from " +
                            std::string(status_name(s.status)) + " to " +
                            std::string(status_name(next)));
    s.status = next;
}

std::vector<Violation> check_answers(const protocol::Protocol& p,
                                     const std::map<int, Answer>& answers) {
    std::set<int> numbers;
    for (const auto* q : p.questions()) numbers.insert(q->number);
    for (const auto& [n, a] : answers) numbers.insert(n);

    std::vector<Violation> out;
    for (int n : numbers) {
        const protocol::Question* q = p.find(n);
        auto it = answers.find(n);
        const bool present = it != answers.end() && !blank(it->second);
        if (!q) {
            out.push_back({"unknown_question", qname(n),
                           p.find_meta(n) ? qname(n) + " is a meta question, submit it separately"
                                          : qname(n) + " is not part of the protocol"});
            continue;
        }
        if (!present) {
            if (q->required) out.push_back({"missing_required", qname(n), qname(n) + " is required"});
            continue;
        }
        const Answer& a = it->second;
        if (const protocol::Likert* l = q->likert()) {
            const int* v = std::get_if<int>(&a);
            if (!v) {
                out.push_back({"wrong_answer_type", qname(n), qname(n) + " expects a Likert integer"});
                continue;
            }
            if (*v < l->min || *v > l->max)
                out.push_back({"likert_out_of_bounds", qname(n),
                               qname(n) + " out of Likert bounds " + std::to_string(l->min) +
                                   "–" + std::to_string(l->max)});
        } else if (std::holds_alternative<int>(a)) {
            out.push_back({"wrong_answer_type", qname(n), qname(n) + " expects an open answer"});
            continue;
        }
        if (q->depends_on) {
            const auto dep = *q->depends_on;
            auto t = answers.find(dep.question);
            const int* tv = t == answers.end() ? nullptr : std::get_if<int>(&t->second);
            if (!tv || *tv < dep.min_value)
                out.push_back({"dependency_not_activated", qname(n),
                               qname(n) + " requires " + qname(dep.question) + " ≥ " +
                                   std::to_string(dep.min_value)});
        }
    }
    return out;
}

std::vector<Violation> check_sheet(const Study& s, const ResponseSheet& sheet) {
    std::vector<Violation> out;
    if (s.status != Status::Open)
        out.push_back({"study_not_open", "study",
                       "study " + s.id + " is " + std::string(status_name(s.status)) +
                           ", responses are accepted only while open"});
    const Evaluator* e = s.find_evaluator(sheet.evaluator_id);
    const corpus::Microfiction* mf = s.find_mf(sheet.mf_id);
    if (!e)
        out.push_back({"not_assigned", "evaluator", "unknown evaluator: " + sheet.evaluator_id});
    if (!mf)
        out.push_back({"not_assigned", "microfiction", "unknown microfiction: " + sheet.mf_id});
    if (e && mf && !s.is_assigned(e->id, mf->id))
        out.push_back({"not_assigned", e->display_alias,
                       e->display_alias + " is not assigned to " + mf->blind_label});
    auto content = check_answers(s.protocol, sheet.answers);
    out.insert(out.end(), content.begin(), content.end());
    return out;
}

std::vector<Violation> check_meta(const Study& s, const MetaResponse& meta) {
    std::vector<Violation> out;
    if (s.status != Status::Open)
        out.push_back({"study_not_open", "study",
                       "study " + s.id + " is " + std::string(status_name(s.status)) +
                           ", responses are accepted only while open"});
    if (!s.find_evaluator(meta.evaluator_id))
        out.push_back({"not_assigned", "evaluator", "unknown evaluator: " + meta.evaluator_id});
    for (const auto& [n, a] : meta.answers)
        if (!s.protocol.find_meta(n))
            out.push_back({"unknown_question", qname(n), qname(n) + " is not a meta question"});
    return out;
}

bool accept_sheet(Study& s, ResponseSheet sheet) {
    // Optional answers left blank are not stored.
    std::erase_if(sheet.answers, [](const auto& kv) { return blank(kv.second); });
    auto key = std::make_pair(sheet.evaluator_id, sheet.mf_id);
    const bool replaced = s.sheets.contains(key);
    s.sheets[key] = std::move(sheet);
    return replaced;
}

void accept_meta(Study& s, MetaResponse meta) {
    std::string id = meta.evaluator_id;
    s.meta[id] = std::move(meta);
}

json to_json(const Evaluator& e) {
    return {{"id", e.id}, {"cohort", cohort_name(e.cohort)}, {"alias", e.display_alias}};
}

Evaluator evaluator_from_json(const json& doc, const std::string& path) {
    detail::Fields f(doc, path);
    Evaluator e;
    e.id = f.string("id");
    e.display_alias = f.string_or("alias", "");
    const std::string cohort = f.string_or("cohort", "other");
    auto c = parse_cohort(cohort);
    if (!c) throw ParseError(f.path("cohort"), "expected expert, enthusiast or other");
    e.cohort = *c;
    f.finish();
    return e;
}

json to_json(const Answer& a) {
    if (const int* v = std::get_if<int>(&a)) return *v;
    return std::get<std::string>(a);
}

namespace {

int question_key(const std::string& key, const std::string& path) {
    try {
        std::size_t pos = 0;
        const int n = std::stoi(key, &pos);
        if (pos == key.size()) return n;
    } catch (const std::exception&) {
    }
    throw ParseError(path, "question keys must be integers");
}

std::map<int, Answer> answers_from_json(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ParseError(path, "expected an object of answers");
    std::map<int, Answer> out;
    for (const auto& [k, v] : doc.items()) {
        const std::string p = detail::join_path(path, k);
        const int n = question_key(k, p);
        if (v.is_number_integer()) {
            const auto x = v.get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ParseError(p, "integer out of range");
            out[n] = static_cast<int>(x);
        } else if (v.is_string()) {
            out[n] = v.get<std::string>();
        } else {
            throw ParseError(p, "expected an integer or a string");
        }
    }
    return out;
}

json answers_to_json(const std::map<int, Answer>& answers) {
    json out = json::object();
    for (const auto& [n, a] : answers) out[std::to_string(n)] = to_json(a);
    return out;
}

}  // namespace

json to_json(const ResponseSheet& sheet) {
    return {{"evaluator", sheet.evaluator_id},
            {"microfiction", sheet.mf_id},
            {"answers", answers_to_json(sheet.answers)},
            {"submitted_at", sheet.submitted_at}};
}

ResponseSheet sheet_from_json(const json& doc) {
    detail::Fields f(doc, "");
    ResponseSheet s;
    s.evaluator_id = f.string("evaluator");
    s.mf_id = f.string("microfiction");
    s.answers = answers_from_json(f.required("answers"), f.path("answers"));
    s.submitted_at = f.string_or("submitted_at", "");
    f.finish();
    return s;
}

json to_json(const MetaResponse& m) {
    json answers = json::object();
    for (const auto& [n, a] : m.answers) answers[std::to_string(n)] = a;
    return {{"evaluator", m.evaluator_id}, {"meta_answers", answers}, {"submitted_at", m.submitted_at}};
}

MetaResponse meta_from_json(const json& doc) {
    detail::Fields f(doc, "");
    MetaResponse m;
    m.evaluator_id = f.string("evaluator");
    const json& answers = f.required("meta_answers");
    if (!answers.is_object()) throw ParseError(f.path("meta_answers"), "expected an object");
    for (const auto& [k, v] : answers.items()) {
        const std::string p = detail::join_path(f.path("meta_answers"), k);
        if (!v.is_string()) throw ParseError(p, "meta answers are text");
        m.answers[question_key(k, p)] = v.get<std::string>();
    }
    m.submitted_at = f.string_or("submitted_at", "");
    f.finish();
    return m;
}

json to_json(const Study& s) {
    json corpus = json::array();
    for (const auto& mf : s.corpus) corpus.push_back(corpus::to_json(mf));
    json roster = json::array();
    for (const auto& e : s.roster) roster.push_back(to_json(e));
    json sheets = json::array();
    for (const auto& [key, sheet] : s.sheets) sheets.push_back(to_json(sheet));
    json meta = json::array();
    for (const auto& [key, m] : s.meta) meta.push_back(to_json(m));
    return {{"id", s.id},
            {"token", s.token},
            {"protocol", protocol::to_json(s.protocol)},
            {"corpus", corpus},
            {"roster", roster},
            {"assignments", s.assignments},
            {"status", status_name(s.status)},
            {"sheets", sheets},
            {"meta", meta}};
}

Study study_from_json(const json& doc) {
    Study s;
    s.id = doc.at("id").get<std::string>();
    s.token = doc.at("token").get<std::string>();
    s.protocol = protocol::protocol_from_json(doc.at("protocol"));
    for (const auto& mf : doc.at("corpus")) s.corpus.push_back(corpus::microfiction_from_json(mf));
    for (std::size_t i = 0; i < doc.at("roster").size(); ++i)
        s.roster.push_back(evaluator_from_json(doc["roster"][i], detail::index_path("roster", i)));
    s.assignments = doc.at("assignments").get<std::map<std::string, std::vector<std::string>>>();
    s.status = parse_status(doc.at("status").get<std::string>()).value();
    for (const auto& j : doc.at("sheets")) {
        ResponseSheet sheet = sheet_from_json(j);
        s.sheets[{sheet.evaluator_id, sheet.mf_id}] = std::move(sheet);
    }
    for (const auto& j : doc.at("meta")) {
        MetaResponse m = meta_from_json(j);
        s.meta[m.evaluator_id] = std::move(m);
    }
    return s;
}

json progress_view(const Study& s) {
    json evaluators = json::array();
    std::size_t expected = 0;
    for (const auto& e : s.roster) {
        std::size_t assigned = 0, submitted = 0;
        if (auto it = s.assignments.find(e.id); it != s.assignments.end()) {
            assigned = it->second.size();
            for (const auto& mf : it->second) submitted += s.sheets.contains({e.id, mf});
        }
        expected += assigned;
        evaluators.push_back({{"id", e.id},
                              {"alias", e.display_alias},
                              {"cohort", cohort_name(e.cohort)},
                              {"assigned", assigned},
                              {"submitted", submitted},
                              {"meta_submitted", s.meta.contains(e.id)}});
    }
    json mfs = json::array();
    for (const auto& mf : s.corpus) {
        std::size_t assigned = 0, sheets = 0;
        for (const auto& e : s.roster) {
            assigned += s.is_assigned(e.id, mf.id);
            sheets += s.sheets.contains({e.id, mf.id});
        }
        mfs.push_back({{"blind_label", mf.blind_label}, {"assigned", assigned}, {"sheets", sheets}});
    }
    return {{"study", s.id},
            {"status", status_name(s.status)},
            {"evaluators", evaluators},
            {"microfictions", mfs},
            {"sheets", s.sheets.size()},
            {"expected", expected}};
}

json tasks_view(const Study& s, const Evaluator& e) {
    json tasks = json::array();
    if (auto it = s.assignments.find(e.id); it != s.assignments.end()) {
        for (const auto& mf_id : it->second) {
            const auto& mf = s.corpus[s.mf_index(mf_id)];
            json t = corpus::to_json(corpus::blind_view(mf));
            auto sheet = s.sheets.find({e.id, mf_id});
            t["submitted"] = sheet != s.sheets.end();
            if (sheet != s.sheets.end()) t["answers"] = answers_to_json(sheet->second.answers);
            tasks.push_back(std::move(t));
        }
    }
    json out = {{"study", s.id},
                {"status", status_name(s.status)},
                {"evaluator", {{"id", e.id}, {"alias", e.display_alias}}},
                {"protocol", protocol::to_json(s.protocol)},
                {"tasks", tasks},
                {"meta_submitted", s.meta.contains(e.id)}};
    return out;
}

std::string export_csv(const Study& s) {
    std::vector<csv::Row> rows = {{"study_id", "evaluator_id", "mf_id", "question", "answer"}};
    for (const auto& e : s.roster) {
        for (const auto& mf : s.corpus) {
            auto it = s.sheets.find({e.id, mf.id});
            if (it == s.sheets.end()) continue;
            for (const auto& [n, a] : it->second.answers) {
                const std::string value =
                    std::holds_alternative<int>(a) ? std::to_string(std::get<int>(a)) : std::get<std::string>(a);
                rows.push_back({s.id, e.id, mf.id, std::to_string(n), value});
            }
        }
        if (auto m = s.meta.find(e.id); m != s.meta.end())
            for (const auto& [n, a] : m->second.answers) rows.push_back({s.id, e.id, "", std::to_string(n), a});
    }
    return csv::format(rows);
}

std::vector<ImportedResponses> parse_responses_csv(std::string_view text) {
    const auto rows = csv::parse(text);
    const std::vector<std::string> header = {"study_id", "evaluator_id", "mf_id", "question", "answer"};
    if (rows.empty() || rows[0] != header)
        throw ParseError("row 1", "header must be study_id,evaluator_id,mf_id,question,answer");

    std::vector<ImportedResponses> out;
    std::map<std::string, std::size_t> study_index;
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> sheet_index;
    std::set<std::tuple<std::string, std::string, std::string, int>> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string locus = "row " + std::to_string(r + 1);
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != header.size())
            throw ParseError(locus, "expected 5 fields, got " + std::to_string(row.size()));
        const std::string& sid = row[0];
        const std::string& eid = row[1];
        const std::string& mf = row[2];
        if (sid.empty() || eid.empty()) throw ParseError(locus, "study_id and evaluator_id are required");
        const int q = question_key(row[3], locus);
        if (!seen.insert({sid, eid, mf, q}).second)
            throw ParseError(locus, "duplicate answer for " + eid + "/" + (mf.empty() ? "meta" : mf) + "/" + qname(q));

        auto [sit, fresh] = study_index.try_emplace(sid, out.size());
        if (fresh) out.push_back({sid, {}, {}});
        ImportedResponses& group = out[sit->second];
        if (mf.empty()) {
            auto it = std::find_if(group.meta.begin(), group.meta.end(),
                                   [&](const MetaResponse& m) { return m.evaluator_id == eid; });
            if (it == group.meta.end()) {
                group.meta.push_back({eid, {}, ""});
                it = group.meta.end() - 1;
            }
            it->answers[q] = row[4];
        } else {
            auto [it, added] = sheet_index.try_emplace({sid, eid, mf}, group.sheets.size());
            if (added) group.sheets.push_back({eid, mf, {}, ""});
            group.sheets[it->second].answers[q] = row[4];
        }
    }
    return out;
}

void type_answers(const protocol::Protocol& p, ResponseSheet& sheet) {
    for (auto& [n, a] : sheet.answers) {
        const protocol::Question* q = p.find(n);
        const auto* s = std::get_if<std::string>(&a);
        if (!q || !q->is_likert() || !s) continue;
        const std::string t(text::trim(*s));
        try {
            std::size_t pos = 0;
            const int v = std::stoi(t, &pos);
            if (pos == t.size()) a = v;
        } catch (const std::exception&) {
        }
    }
}

}  // namespace mfeval::study
