#pragma once

// Append-only event journal with CRC-framed JSON lines, plus atomic
// snapshot files.
//
// Line format:  <crc32 as 8 lowercase hex> <space> <json>\n
// where json = {"seq": n, "type": "...", "at": "...", "payload": {...}}
// and the CRC covers the json text. Sequence numbers start at 1 and
// increase by one.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mfeval/error.hpp"

namespace mfeval::journal {

class JournalError : public Error {
public:
    explicit JournalError(const std::string& message) : Error("journal_error", message) {}
};

struct Record {
    std::uint64_t seq = 0;
    std::string type;
    std::string at;
    nlohmann::json payload;
};

std::uint32_t crc32(std::string_view data) noexcept;
std::string encode(const Record& r);

struct Recovery {
    std::vector<Record> records;
    std::size_t truncated_bytes = 0;  // torn tail removed on open
};

class Journal {
public:
    // Opens or creates the file, takes an exclusive flock and recovers it: an
    // unreadable final line is cut off, an unreadable line followed by valid
    // ones is a JournalError.
    explicit Journal(std::filesystem::path file);
    ~Journal();
    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    const Recovery& recovery() const noexcept { return recovery_; }
    std::uint64_t last_seq() const noexcept { return last_seq_; }
    const std::filesystem::path& path() const noexcept { return path_; }

    // Durable once this returns (write + fdatasync). On failure the file is
    // rolled back to its previous length and JournalError is thrown.
    std::uint64_t append(const std::string& type, const nlohmann::json& payload);

    // Test hook: the next append writes only the first `bytes` bytes of its
    // line and then throws, leaving the file as a crash would.
    void inject_torn_write(std::size_t bytes) noexcept { torn_after_ = bytes; }

private:
    std::filesystem::path path_;
    int fd_ = -1;
    std::uint64_t last_seq_ = 0;
    std::uint64_t size_ = 0;
    Recovery recovery_;
    std::optional<std::size_t> torn_after_;
};

// Writes <file>.tmp, syncs it and renames it over <file>.
void write_atomic(const std::filesystem::path& file, std::string_view content);

std::string utc_now();

}  // namespace mfeval::journal
