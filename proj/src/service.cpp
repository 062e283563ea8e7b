#include "mfeval/service.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace mfeval::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string random_token() {
    std::random_device rd;
    std::string out;
    static constexpr char hex[] = "0123456789abcdef";
    for (int i = 0; i < 32; ++i) out += hex[rd() % 16];
    return out;
}

bool equal_constant_time(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    unsigned char diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
    return diff == 0;
}

json assignments_json(const std::map<std::string, std::vector<std::string>>& a) { return a; }

}  // namespace

void apply_event(std::optional<study::Study>& s, const journal::Record& r) {
    if (r.type == "study_created") {
        s = study::study_from_json(r.payload);
        return;
    }
    if (!s) throw journal::JournalError("event " + r.type + " before study_created");
    if (r.type == "evaluators_added") {
        std::vector<study::Evaluator> added;
        for (const auto& e : r.payload.at("evaluators"))
            added.push_back(study::evaluator_from_json(e, "evaluators"));
        study::add_evaluators(*s, added);
    } else if (r.type == "assignments_set") {
        study::set_assignments(
            *s, r.payload.at("assignments").get<std::map<std::string, std::vector<std::string>>>());
    } else if (r.type == "status_changed") {
        study::set_status(*s, study::parse_status(r.payload.at("status").get<std::string>()).value());
    } else if (r.type == "sheets_accepted") {
        for (const auto& j : r.payload.at("sheets")) study::accept_sheet(*s, study::sheet_from_json(j));
    } else if (r.type == "meta_accepted") {
        study::accept_meta(*s, study::meta_from_json(r.payload));
    } else {
        throw journal::JournalError("unknown event type: " + r.type);
    }
}

StudyService::StudyService(fs::path data_dir, std::size_t snapshot_every)
    : data_dir_(std::move(data_dir)), snapshot_every_(snapshot_every) {
    fs::create_directories(data_dir_ / "studies");
}

StudyService::~StudyService() = default;

fs::path StudyService::dir_of(const std::string& id) const { return data_dir_ / "studies" / id; }

bool StudyService::exists(const std::string& id) const {
    if (!study::valid_study_id(id)) return false;
    std::error_code ec;
    return fs::exists(dir_of(id) / "journal.jsonl", ec);
}

std::vector<std::string> StudyService::list() const {
    std::set<std::string> ids;
    for (const auto& entry : fs::directory_iterator(data_dir_ / "studies"))
        if (fs::exists(entry.path() / "journal.jsonl")) ids.insert(entry.path().filename().string());
    return {ids.begin(), ids.end()};
}

std::shared_ptr<StudyService::Handle> StudyService::load(const std::string& id) const {
    const fs::path dir = dir_of(id);
    auto h = std::make_shared<Handle>();
    h->journal = std::make_unique<journal::Journal>(dir / "journal.jsonl");

    std::optional<study::Study> s;
    std::uint64_t from = 0;
    if (fs::exists(dir / "snapshot.json")) {
        std::ifstream in(dir / "snapshot.json", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        const json snap = json::parse(ss.str());
        from = snap.at("seq").get<std::uint64_t>();
        if (from > h->journal->last_seq())
            throw journal::JournalError(id + ": snapshot is ahead of the journal");
        s = study::study_from_json(snap.at("study"));
        h->snapshot_seq = from;
    }
    for (const auto& r : h->journal->recovery().records)
        if (r.seq > from) apply_event(s, r);
    if (!s) throw NotFoundError("study " + id + " has an empty journal");
    h->study = std::move(*s);
    return h;
}

std::shared_ptr<StudyService::Handle> StudyService::handle(const std::string& id) const {
    std::lock_guard lock(registry_);
    if (auto it = open_.find(id); it != open_.end()) return it->second;
    if (!exists(id)) throw NotFoundError("no such study: " + id);
    auto h = load(id);
    open_[id] = h;
    return h;
}

void StudyService::commit(Handle& h, const std::string& type, const json& payload, study::Study next) {
    std::uint64_t seq = 0;
    try {
        seq = h.journal->append(type, payload);
    } catch (const journal::JournalError&) {
        const fs::path path = h.journal->path();
        h.journal.reset();
        h.journal = std::make_unique<journal::Journal>(path);
        throw;
    }
    {
        std::unique_lock lock(h.state);
        h.study = std::move(next);
    }
    if (snapshot_every_ > 0 && seq - h.snapshot_seq >= snapshot_every_) {
        // The event is already durable; a failed snapshot is retried on the next commit.
        try {
            const json snap = {{"seq", seq}, {"study", study::to_json(h.study)}};
            journal::write_atomic(h.journal->path().parent_path() / "snapshot.json", snap.dump());
            h.snapshot_seq = seq;
        } catch (const journal::JournalError&) {
        }
    }
}

Created StudyService::create(CreateRequest req) {
    std::lock_guard lock(registry_);
    std::string id;
    if (req.id) {
        id = *req.id;
    } else {
        auto n = static_cast<std::size_t>(std::distance(fs::directory_iterator(data_dir_ / "studies"),
                                                        fs::directory_iterator{})) + 1;
        while (exists("study-" + std::to_string(n))) ++n;
        id = "study-" + std::to_string(n);
    }
    const std::string token = req.token.value_or(random_token());
    study::Study s = study::make_study(id, token, std::move(req.protocol), std::move(req.corpus),
                                       std::move(req.roster));
    if (exists(id) || open_.contains(id)) throw ConflictError("study already exists: " + id);
    if (req.assign_all) s.assignments = study::full_assignment(s);

    auto h = std::make_shared<Handle>();
    h->journal = std::make_unique<journal::Journal>(dir_of(id) / "journal.jsonl");
    h->journal->append("study_created", study::to_json(s));
    h->study = std::move(s);
    open_[id] = h;
    return {id, token};
}

void StudyService::add_evaluators(const std::string& id, const std::vector<study::Evaluator>& evaluators) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    study::Study next = h->study;
    study::add_evaluators(next, evaluators);
    json added = json::array();
    for (std::size_t i = h->study.roster.size(); i < next.roster.size(); ++i)
        added.push_back(study::to_json(next.roster[i]));
    commit(*h, "evaluators_added", {{"evaluators", added}}, std::move(next));
}

void StudyService::set_assignments(const std::string& id,
                                   const std::map<std::string, std::vector<std::string>>& assignments) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    study::Study next = h->study;
    const auto resolved = study::resolve_assignments(next, assignments);
    study::set_assignments(next, resolved);
    commit(*h, "assignments_set", {{"assignments", assignments_json(resolved)}}, std::move(next));
}

void StudyService::assign_all(const std::string& id) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    study::Study next = h->study;
    const auto all = study::full_assignment(next);
    study::set_assignments(next, all);
    commit(*h, "assignments_set", {{"assignments", assignments_json(all)}}, std::move(next));
}

void StudyService::set_status(const std::string& id, study::Status status) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    study::Study next = h->study;
    study::set_status(next, status);
    commit(*h, "status_changed", {{"status", study::status_name(status)}}, std::move(next));
}

SubmitResult StudyService::submit(const std::string& id, std::vector<study::ResponseSheet> sheets) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    const study::Study& cur = h->study;

    if (sheets.empty())
        throw ValidationError("invalid_response", "no response sheets submitted",
                              {{"empty_batch", "sheets", "no response sheets submitted"}});
    std::vector<Violation> all;
    std::set<std::pair<std::string, std::string>> seen;
    const bool batch = sheets.size() > 1;
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        auto& sheet = sheets[i];
        if (const auto* e = cur.find_evaluator(sheet.evaluator_id)) sheet.evaluator_id = e->id;
        if (const auto* mf = cur.find_mf(sheet.mf_id)) sheet.mf_id = mf->id;
        auto v = study::check_sheet(cur, sheet);
        if (!seen.insert({sheet.evaluator_id, sheet.mf_id}).second)
            v.push_back({"duplicate_sheet", "sheet", "the batch holds two sheets for the same evaluator and microfiction"});
        for (auto& x : v) {
            if (batch) {
                const std::string prefix = "sheets[" + std::to_string(i) + "]";
                x.subject = prefix + "." + x.subject;
                x.message = prefix + ": " + x.message;
            }
            all.push_back(std::move(x));
        }
    }
    if (!all.empty()) {
        const std::string msg = std::to_string(all.size()) + " violation(s); first: " + all.front().message;
        throw ValidationError("invalid_response", msg, std::move(all));
    }

    study::Study next = cur;
    SubmitResult result;
    json payload = json::array();
    const std::string now = journal::utc_now();
    for (auto& sheet : sheets) {
        if (sheet.submitted_at.empty()) sheet.submitted_at = now;
        payload.push_back(study::to_json(sheet));
        result.blind_labels.push_back(next.find_mf(sheet.mf_id)->blind_label);
        result.replaced += study::accept_sheet(next, sheet);
        ++result.accepted;
    }
    commit(*h, "sheets_accepted", {{"sheets", payload}}, std::move(next));
    return result;
}

void StudyService::submit_meta(const std::string& id, study::MetaResponse meta) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    if (const auto* e = h->study.find_evaluator(meta.evaluator_id)) meta.evaluator_id = e->id;
    auto v = study::check_meta(h->study, meta);
    if (!v.empty()) {
        const std::string msg = v.front().message;
        throw ValidationError("invalid_response", msg, std::move(v));
    }
    if (meta.submitted_at.empty()) meta.submitted_at = journal::utc_now();
    study::Study next = h->study;
    const json payload = study::to_json(meta);
    study::accept_meta(next, std::move(meta));
    commit(*h, "meta_accepted", payload, std::move(next));
}

study::Study StudyService::snapshot(const std::string& id) const {
    auto h = handle(id);
    std::shared_lock lock(h->state);
    return h->study;
}

bool StudyService::check_token(const std::string& id, std::string_view token) const {
    if (!exists(id)) return false;
    auto h = handle(id);
    std::shared_lock lock(h->state);
    return equal_constant_time(h->study.token, token);
}

json StudyService::progress(const std::string& id) const {
    auto h = handle(id);
    std::shared_lock lock(h->state);
    return study::progress_view(h->study);
}

json StudyService::tasks(const std::string& id, const std::string& evaluator_ref) const {
    auto h = handle(id);
    std::shared_lock lock(h->state);
    const auto* e = h->study.find_evaluator(evaluator_ref);
    if (!e) throw NotFoundError("no such evaluator: " + evaluator_ref);
    return study::tasks_view(h->study, *e);
}

std::string StudyService::export_csv(const std::string& id) const {
    auto h = handle(id);
    std::shared_lock lock(h->state);
    return study::export_csv(h->study);
}

analytics::Report StudyService::analytics(const std::string& id, const analytics::Options& options) const {
    return analytics::compute(snapshot(id), options);
}

void StudyService::inject_torn_write(const std::string& id, std::size_t bytes) {
    auto h = handle(id);
    std::lock_guard w(h->write);
    h->journal->inject_torn_write(bytes);
}

}  // namespace mfeval::service
