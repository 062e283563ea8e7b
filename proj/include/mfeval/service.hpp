#pragma once

// File-backed study store.
//
// Layout: <data_dir>/studies/<id>/journal.jsonl plus an optional
// snapshot.json. Every mutation is validated against a copy of the study,
// appended to the journal and only then published. Writes to one study are
// serialized; readers work on a consistent copy and never wait for a
// journal fsync.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mfeval/analytics.hpp"
#include "mfeval/journal.hpp"
#include "mfeval/study.hpp"

namespace mfeval::service {

struct CreateRequest {
    std::optional<std::string> id;  // "study-<n>" when unset
    protocol::Protocol protocol;
    std::vector<corpus::Microfiction> corpus;
    std::vector<study::Evaluator> roster;
    bool assign_all = false;
    std::optional<std::string> token;  // random when unset
};

struct Created {
    std::string id;
    std::string token;
};

struct SubmitResult {
    std::size_t accepted = 0;
    std::size_t replaced = 0;
    std::vector<std::string> blind_labels;
};

class StudyService {
public:
    explicit StudyService(std::filesystem::path data_dir, std::size_t snapshot_every = 64);
    ~StudyService();
    StudyService(const StudyService&) = delete;
    StudyService& operator=(const StudyService&) = delete;

    const std::filesystem::path& data_dir() const noexcept { return data_dir_; }

    Created create(CreateRequest request);
    std::vector<std::string> list() const;
    bool exists(const std::string& id) const;

    void add_evaluators(const std::string& id, const std::vector<study::Evaluator>& evaluators);
    // References may be ids, aliases or blind labels.
    void set_assignments(const std::string& id,
                         const std::map<std::string, std::vector<std::string>>& assignments);
    void assign_all(const std::string& id);
    void set_status(const std::string& id, study::Status status);

    // All-or-nothing: any violation rejects the whole batch with
    // ValidationError("invalid_response") and nothing is persisted.
    SubmitResult submit(const std::string& id, std::vector<study::ResponseSheet> sheets);
    void submit_meta(const std::string& id, study::MetaResponse meta);

    // Consistent copy of the current state.
    study::Study snapshot(const std::string& id) const;
    // False for unknown studies too, so callers cannot probe for ids.
    bool check_token(const std::string& id, std::string_view token) const;

    nlohmann::json progress(const std::string& id) const;
    nlohmann::json tasks(const std::string& id, const std::string& evaluator_ref) const;
    std::string export_csv(const std::string& id) const;
    analytics::Report analytics(const std::string& id, const analytics::Options& options) const;

    // Test hook, see Journal::inject_torn_write.
    void inject_torn_write(const std::string& id, std::size_t bytes);

private:
    struct Handle {
        std::mutex write;
        mutable std::shared_mutex state;
        study::Study study;
        std::unique_ptr<journal::Journal> journal;
        std::uint64_t snapshot_seq = 0;
    };

    std::shared_ptr<Handle> handle(const std::string& id) const;
    std::shared_ptr<Handle> load(const std::string& id) const;
    std::filesystem::path dir_of(const std::string& id) const;
    // Appends `type`/`payload` and publishes `next`; reopens the journal on failure.
    void commit(Handle& h, const std::string& type, const nlohmann::json& payload, study::Study next);

    std::filesystem::path data_dir_;
    std::size_t snapshot_every_;
    mutable std::mutex registry_;
    mutable std::map<std::string, std::shared_ptr<Handle>> open_;
};

// Rebuilds a study from journal records, optionally on top of a snapshot.
void apply_event(std::optional<study::Study>& s, const journal::Record& r);

}  // namespace mfeval::service
