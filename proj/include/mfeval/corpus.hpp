#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mfeval/error.hpp"

namespace mfeval::corpus {

inline constexpr std::size_t kWordLimit = 300;

enum class AuthorTier { Expert, Medium, Emerging };

std::string_view tier_name(AuthorTier tier) noexcept;

struct HumanAuthor {
    AuthorTier tier = AuthorTier::Expert;
    friend bool operator==(const HumanAuthor&, const HumanAuthor&) = default;
};

struct Generated {
    std::string system_name;
    std::string model_id;
    std::string prompt;
    friend bool operator==(const Generated&, const Generated&) = default;
};

using Provenance = std::variant<HumanAuthor, Generated>;

// Every string a provenance record could leak into an evaluator view.
std::vector<std::string> provenance_strings(const Provenance& p);

struct Microfiction {
    std::string id;
    std::string title;
    std::string body;
    std::string language;
    std::size_t word_count = 0;
    bool conforming = true;  // word_count <= kWordLimit
    Provenance provenance;
    std::string blind_label;  // "MF <k>"

    friend bool operator==(const Microfiction&, const Microfiction&) = default;
};

// What an evaluator is allowed to see.
struct BlindView {
    std::string blind_label;
    std::string title;
    std::string body;
};

class RejectedError : public Error {
public:
    explicit RejectedError(const std::string& message) : Error("rejected", message) {}
};

// Throws RejectedError when the body is blank or the provenance is
// incomplete. Over-limit bodies are kept with conforming = false.
Microfiction ingest_microfiction(std::string title, std::string body, std::string language,
                                 Provenance provenance, std::size_t ordinal,
                                 std::string id = {});

BlindView blind_view(const Microfiction& mf);

// Ordered collection that hands out "MF 1..n" labels in ingestion order.
class Corpus {
public:
    const Microfiction& ingest(std::string title, std::string body, std::string language,
                               Provenance provenance, std::string id = {});

    const std::vector<Microfiction>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

private:
    std::vector<Microfiction> items_;
};

// Corpus file: JSON array of {id?, title, body, language, provenance}.
// Missing ids become "mf-<k>". Throws ParseError or RejectedError.
Corpus parse_corpus(std::string_view document);
Corpus corpus_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& doc, const std::string& path);
// Corpus-file form of one item (no derived fields).
nlohmann::json to_corpus_json(const Microfiction& mf);
// Full record including derived fields, used for persistence.
nlohmann::json to_json(const Microfiction& mf);
Microfiction microfiction_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const BlindView& v);

}  // namespace mfeval::corpus
