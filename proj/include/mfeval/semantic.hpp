#pragma once

// Open-answer agreement: text embeddings and judge-pair cosine matrices.
//
// Two providers ship with the library. BuiltinProvider is a deterministic
// feature-hashing embedder (FNV-1a 64 over lowercased, punctuation-free
// tokens, 4096 buckets, 1 + ln(count) weights). HttpProvider posts
// {texts:[...]} to an external service and expects {vectors, provider_id}.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mfeval/error.hpp"

namespace mfeval::semantic {

inline constexpr std::size_t kBuckets = 4096;

class SemanticError : public Error {
public:
    explicit SemanticError(const std::string& message) : Error("semantic_error", message) {}
};

// The external provider could not be reached or answered garbage.
class TransportError : public Error {
public:
    TransportError(std::string provider_id, const std::string& message)
        : Error("transport_error", provider_id + ": " + message),
          provider_id_(std::move(provider_id)) {}

    const std::string& provider_id() const noexcept { return provider_id_; }

private:
    std::string provider_id_;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_id;
    bool normalized = false;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    // One L2-normalized vector per text, same order. Texts are non-blank.
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const = 0;
};

std::uint64_t fnv1a64(std::string_view s) noexcept;

// Lowercase, strip punctuation, split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

struct BuiltinOptions {
    std::size_t buckets = kBuckets;
    bool sublinear = true;  // 1 + ln(count); false uses raw counts
};

class BuiltinProvider : public Provider {
public:
    explicit BuiltinProvider(BuiltinOptions options = {});

    std::string id() const override;
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

    std::size_t bucket_of(std::string_view token) const noexcept;

private:
    BuiltinOptions options_;
};

struct HttpProviderOptions {
    std::string url;  // http://host[:port][/path]
    std::chrono::milliseconds timeout{10000};
    int retries = 2;
};

class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderOptions options);

    // Until the first response arrives this is the configured URL.
    std::string id() const override { return options_.url; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

private:
    HttpProviderOptions options_;
    std::string origin_;
    std::string path_;
};

// "builtin" or an http(s) URL.
std::unique_ptr<Provider> make_provider(std::string_view spec);

EmbeddingVector embed(std::string_view text, const Provider& provider);

// Throws SemanticError on provider/length mismatch or a zero vector.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

struct JudgeAnswer {
    std::string judge;
    std::string text;  // blank means skipped
};

struct AgreementMatrix {
    std::vector<std::string> judges;
    int question = 0;
    std::string item;
    std::vector<std::vector<double>> cells;
    std::vector<std::string> excluded;  // judges with blank answers
    std::string provider_id;

    friend bool operator==(const AgreementMatrix&, const AgreementMatrix&) = default;
};

// Judges keep their input order. Throws SemanticError with fewer than two
// usable answers.
AgreementMatrix agreement_matrix(const std::vector<JudgeAnswer>& answers, int question,
                                 std::string item, const Provider& provider);

nlohmann::json to_json(const AgreementMatrix& m);

}  // namespace mfeval::semantic
