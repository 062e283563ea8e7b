#include "mfeval/journal.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace mfeval::journal {

using nlohmann::json;

namespace {

std::string sys_error(const std::string& what, const std::filesystem::path& p) {
    return what + " " + p.string() + ": " + std::strerror(errno);
}

bool write_all(int fd, const char* data, std::size_t n) {
    while (n > 0) {
        const ssize_t w = ::write(fd, data, n);
        if (w < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data += w;
        n -= static_cast<std::size_t>(w);
    }
    return true;
}

void sync_dir(const std::filesystem::path& dir) {
    const int d = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (d >= 0) {
        ::fsync(d);
        ::close(d);
    }
}

std::optional<Record> decode(std::string_view line) {
    if (line.size() < 10 || line[8] != ' ') return std::nullopt;
    std::uint32_t want = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        const char c = line[i];
        std::uint32_t d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else
            return std::nullopt;
        want = (want << 4) | d;
    }
    const std::string_view body = line.substr(9);
    if (crc32(body) != want) return std::nullopt;
    try {
        const json j = json::parse(body);
        Record r;
        r.seq = j.at("seq").get<std::uint64_t>();
        r.type = j.at("type").get<std::string>();
        r.at = j.value("at", "");
        r.payload = j.at("payload");
        return r;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::uint32_t crc32(std::string_view data) noexcept {
    uLong c = ::crc32(0L, Z_NULL, 0);
    c = ::crc32(c, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    return static_cast<std::uint32_t>(c);
}

std::string encode(const Record& r) {
    const std::string body =
        json{{"seq", r.seq}, {"type", r.type}, {"at", r.at}, {"payload", r.payload}}.dump();
    char crc[9];
    std::snprintf(crc, sizeof crc, "%08x", crc32(body));
    return std::string(crc) + " " + body + "\n";
}

Journal::Journal(std::filesystem::path file) : path_(std::move(file)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw JournalError(sys_error("cannot open journal", path_));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw JournalError(path_.string() + " is in use by another process");
    }

    std::string content;
    {
        std::ifstream in(path_, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        content = ss.str();
    }

    std::size_t pos = 0;
    std::size_t good_end = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        ++line_no;
        const std::size_t nl = content.find('\n', pos);
        const bool complete = nl != std::string::npos;
        const std::string_view line(content.data() + pos, (complete ? nl : content.size()) - pos);
        auto rec = complete ? decode(line) : std::nullopt;
        if (rec && rec->seq != last_seq_ + 1)
            throw JournalError(path_.string() + ": line " + std::to_string(line_no) +
                               " has sequence " + std::to_string(rec->seq) + ", expected " +
                               std::to_string(last_seq_ + 1));
        if (!rec) {
            const std::size_t next = complete ? nl + 1 : content.size();
            if (next < content.size())
                throw JournalError(path_.string() + ": corrupt record at line " +
                                   std::to_string(line_no) + " followed by further records");
            break;
        }
        last_seq_ = rec->seq;
        recovery_.records.push_back(std::move(*rec));
        pos = nl + 1;
        good_end = pos;
    }
    if (good_end < content.size()) {
        recovery_.truncated_bytes = content.size() - good_end;
        if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0 || ::fsync(fd_) != 0)
            throw JournalError(sys_error("cannot truncate torn tail of", path_));
    }
    size_ = good_end;
    if (recovery_.records.empty() && content.empty()) sync_dir(path_.parent_path());
}

Journal::~Journal() {
    if (fd_ >= 0) ::close(fd_);
}

std::uint64_t Journal::append(const std::string& type, const json& payload) {
    const Record r{last_seq_ + 1, type, utc_now(), payload};
    const std::string line = encode(r);

    if (torn_after_) {
        const std::size_t n = std::min(*torn_after_, line.size());
        torn_after_.reset();
        write_all(fd_, line.data(), n);
        ::fdatasync(fd_);
        throw JournalError("simulated crash after " + std::to_string(n) + " bytes");
    }

    if (!write_all(fd_, line.data(), line.size()) || ::fdatasync(fd_) != 0) {
        const std::string msg = sys_error("cannot append to journal", path_);
        // A failed rollback leaves a torn tail, which the next open removes.
        [[maybe_unused]] const int rc = ::ftruncate(fd_, static_cast<off_t>(size_));
        throw JournalError(msg);
    }
    size_ += line.size();
    last_seq_ = r.seq;
    return r.seq;
}

void write_atomic(const std::filesystem::path& file, std::string_view content) {
    const std::filesystem::path tmp = file.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw JournalError(sys_error("cannot create", tmp));
    const bool ok = write_all(fd, content.data(), content.size()) && ::fsync(fd) == 0;
    ::close(fd);
    if (!ok) throw JournalError(sys_error("cannot write", tmp));
    if (::rename(tmp.c_str(), file.c_str()) != 0) throw JournalError(sys_error("cannot rename", tmp));
    sync_dir(file.parent_path());
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

}  // namespace mfeval::journal
