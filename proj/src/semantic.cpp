#include "mfeval/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "httplib.h"
#include "mfeval/kernels.hpp"
#include "mfeval/text.hpp"

namespace mfeval::semantic {

using nlohmann::json;

namespace {

void normalize(EmbeddingVector& v) {
    const double norm = std::sqrt(kernels::dot(v.values, v.values));
    if (norm == 0.0 || !std::isfinite(norm))
        throw SemanticError("cannot normalize a zero or non-finite vector from " + v.provider_id);
    kernels::scale(v.values, 1.0 / norm);
    v.normalized = true;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> tokenize(std::string_view text) {
    const std::string cleaned = text::strip_punctuation(text::to_lower(text));
    std::vector<std::string> out;
    for (auto tok : text::split_whitespace(cleaned)) out.emplace_back(tok);
    return out;
}

BuiltinProvider::BuiltinProvider(BuiltinOptions options) : options_(options) {
    if (options_.buckets == 0) throw SemanticError("bucket count must be positive");
}

std::string BuiltinProvider::id() const {
    return "builtin-fnv1a-" + std::to_string(options_.buckets) +
           (options_.sublinear ? "-log" : "-tf");
}

std::size_t BuiltinProvider::bucket_of(std::string_view token) const noexcept {
    return static_cast<std::size_t>(fnv1a64(token) % options_.buckets);
}

std::vector<EmbeddingVector> BuiltinProvider::embed_batch(
    const std::vector<std::string>& texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        const auto tokens = tokenize(t);
        if (tokens.empty()) throw SemanticError("text has no tokens after normalization");
        // Ordered map keeps the summation order independent of token order.
        std::map<std::size_t, double> counts;
        for (const auto& tok : tokens) counts[bucket_of(tok)] += 1.0;
        EmbeddingVector v{std::vector<double>(options_.buckets, 0.0), id(), false};
        for (auto [b, c] : counts) v.values[b] = options_.sublinear ? 1.0 + std::log(c) : c;
        normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

HttpProvider::HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
    const auto scheme = options_.url.find("://");
    if (scheme == std::string::npos) throw SemanticError("provider URL needs a scheme: " + options_.url);
    const auto slash = options_.url.find('/', scheme + 3);
    origin_ = options_.url.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : options_.url.substr(slash);
}

std::vector<EmbeddingVector> HttpProvider::embed_batch(const std::vector<std::string>& texts) const {
    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const std::string body = json{{"texts", texts}}.dump();
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError(id(), "HTTP " + std::to_string(res->status));

        json doc;
        try {
            doc = json::parse(res->body);
        } catch (const json::parse_error&) {
            throw TransportError(id(), "response is not JSON");
        }
        if (!doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array())
            throw TransportError(id(), "response lacks a vectors array");
        const std::string pid = doc.value("provider_id", id());
        const auto& arr = doc["vectors"];
        if (arr.size() != texts.size())
            throw TransportError(pid, "expected " + std::to_string(texts.size()) +
                                          " vectors, got " + std::to_string(arr.size()));
        std::vector<EmbeddingVector> out;
        for (const auto& row : arr) {
            EmbeddingVector v{{}, pid, false};
            try {
                v.values = row.get<std::vector<double>>();
            } catch (const json::exception&) {
                throw TransportError(pid, "vector is not an array of numbers");
            }
            if (!out.empty() && v.values.size() != out.front().values.size())
                throw TransportError(pid, "vector length changed within one response");
            normalize(v);
            out.push_back(std::move(v));
        }
        return out;
    }
    throw TransportError(id(), "unreachable after " + std::to_string(options_.retries + 1) +
                                   " attempts: " + last_error);
}

std::unique_ptr<Provider> make_provider(std::string_view spec) {
    if (spec.empty() || spec == "builtin") return std::make_unique<BuiltinProvider>();
    if (spec.starts_with("http://") || spec.starts_with("https://"))
        return std::make_unique<HttpProvider>(HttpProviderOptions{std::string(spec)});
    throw SemanticError("unknown embedding provider: " + std::string(spec));
}

EmbeddingVector embed(std::string_view text, const Provider& provider) {
    if (text::trim(text).empty()) throw SemanticError("cannot embed empty text");
    auto batch = provider.embed_batch({std::string(text)});
    return std::move(batch.front());
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.provider_id != v.provider_id)
        throw SemanticError("provider mismatch: " + u.provider_id + " vs " + v.provider_id);
    if (u.values.size() != v.values.size())
        throw SemanticError("length mismatch: " + std::to_string(u.values.size()) + " vs " +
                            std::to_string(v.values.size()));
    const double uu = kernels::dot(u.values, u.values);
    const double vv = kernels::dot(v.values, v.values);
    if (uu == 0.0 || vv == 0.0) throw SemanticError("cosine of a zero vector");
    if (u.values == v.values) return 1.0;
    const double c = kernels::dot(u.values, v.values) / (std::sqrt(uu) * std::sqrt(vv));
    return std::clamp(c, -1.0, 1.0);
}

AgreementMatrix agreement_matrix(const std::vector<JudgeAnswer>& answers, int question,
                                 std::string item, const Provider& provider) {
    AgreementMatrix m;
    m.question = question;
    m.item = std::move(item);
    std::vector<std::string> texts;
    for (const auto& a : answers) {
        if (text::trim(a.text).empty() || tokenize(a.text).empty()) {
            m.excluded.push_back(a.judge);
        } else {
            m.judges.push_back(a.judge);
            texts.push_back(a.text);
        }
    }
    if (texts.size() < 2)
        throw SemanticError("Q" + std::to_string(question) + " on " + m.item + ": " +
                            std::to_string(texts.size()) + " usable answers, need at least 2");

    const auto vecs = provider.embed_batch(texts);
    m.provider_id = vecs.front().provider_id;
    const std::size_t k = vecs.size();
    m.cells.assign(k, std::vector<double>(k, 1.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) m.cells[i][j] = m.cells[j][i] = cosine(vecs[i], vecs[j]);
    return m;
}

json to_json(const AgreementMatrix& m) {
    return {{"question", m.question}, {"item", m.item},         {"judges", m.judges},
            {"cells", m.cells},       {"excluded", m.excluded}, {"provider_id", m.provider_id}};
}

}  // namespace mfeval::semantic
