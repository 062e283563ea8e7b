#include "mfeval/corpus.hpp"

#include "json_fields.hpp"
#include "mfeval/text.hpp"

namespace mfeval::corpus {

using nlohmann::json;

std::string_view tier_name(AuthorTier tier) noexcept {
    switch (tier) {
        case AuthorTier::Expert: return "expert";
        case AuthorTier::Medium: return "medium";
        case AuthorTier::Emerging: return "emerging";
    }
    return "expert";
}

std::vector<std::string> provenance_strings(const Provenance& p) {
    if (const auto* g = std::get_if<Generated>(&p)) {
        std::vector<std::string> out;
        for (const auto* s : {&g->system_name, &g->model_id, &g->prompt})
            if (!s->empty()) out.push_back(*s);
        return out;
    }
    return {std::string(tier_name(std::get<HumanAuthor>(p).tier))};
}

Microfiction ingest_microfiction(std::string title, std::string body, std::string language,
                                 Provenance provenance, std::size_t ordinal, std::string id) {
    if (text::trim(body).empty()) throw RejectedError("microfiction body is empty");
    if (const auto* g = std::get_if<Generated>(&provenance); g && g->system_name.empty())
        throw RejectedError("generated provenance needs a system name");

    Microfiction mf;
    mf.id = id.empty() ? "mf-" + std::to_string(ordinal) : std::move(id);
    mf.title = std::move(title);
    mf.word_count = text::count_words(body);
    mf.conforming = mf.word_count <= kWordLimit;
    mf.body = std::move(body);
    mf.language = std::move(language);
    mf.provenance = std::move(provenance);
    mf.blind_label = "MF " + std::to_string(ordinal);
    return mf;
}

BlindView blind_view(const Microfiction& mf) { return {mf.blind_label, mf.title, mf.body}; }

const Microfiction& Corpus::ingest(std::string title, std::string body, std::string language,
                                   Provenance provenance, std::string id) {
    Microfiction mf = ingest_microfiction(std::move(title), std::move(body), std::move(language),
                                          std::move(provenance), items_.size() + 1,
                                          std::move(id));
    for (const auto& existing : items_)
        if (existing.id == mf.id) throw RejectedError("duplicate microfiction id: " + mf.id);
    items_.push_back(std::move(mf));
    return items_.back();
}

json to_json(const Provenance& p) {
    if (const auto* g = std::get_if<Generated>(&p))
        return {{"type", "generated"},
                {"system", g->system_name},
                {"model", g->model_id},
                {"prompt", g->prompt}};
    return {{"type", "human"}, {"tier", tier_name(std::get<HumanAuthor>(p).tier)}};
}

Provenance provenance_from_json(const json& doc, const std::string& path) {
    detail::Fields f(doc, path);
    const std::string type = f.string("type");
    Provenance out;
    if (type == "human") {
        std::string tier = text::to_lower(f.string("tier"));
        if (tier == "expert")
            out = HumanAuthor{AuthorTier::Expert};
        else if (tier == "medium")
            out = HumanAuthor{AuthorTier::Medium};
        else if (tier == "emerging")
            out = HumanAuthor{AuthorTier::Emerging};
        else
            throw ParseError(f.path("tier"), "expected expert, medium or emerging");
    } else if (type == "generated") {
        Generated g{f.string("system"), f.string_or("model", ""), f.string_or("prompt", "")};
        if (g.system_name.empty()) throw ParseError(f.path("system"), "must not be empty");
        out = std::move(g);
    } else {
        throw ParseError(f.path("type"), "expected \"human\" or \"generated\"");
    }
    f.finish();
    return out;
}

json to_corpus_json(const Microfiction& mf) {
    return {{"id", mf.id},
            {"title", mf.title},
            {"body", mf.body},
            {"language", mf.language},
            {"provenance", to_json(mf.provenance)}};
}

json to_json(const Microfiction& mf) {
    json j = to_corpus_json(mf);
    j["blind_label"] = mf.blind_label;
    j["word_count"] = mf.word_count;
    j["conforming"] = mf.conforming;
    return j;
}

Microfiction microfiction_from_json(const json& doc) {
    Microfiction mf;
    mf.id = doc.at("id").get<std::string>();
    mf.title = doc.at("title").get<std::string>();
    mf.body = doc.at("body").get<std::string>();
    mf.language = doc.at("language").get<std::string>();
    mf.provenance = provenance_from_json(doc.at("provenance"), "provenance");
    mf.blind_label = doc.at("blind_label").get<std::string>();
    mf.word_count = doc.at("word_count").get<std::size_t>();
    mf.conforming = doc.at("conforming").get<bool>();
    return mf;
}

json to_json(const BlindView& v) {
    return {{"blind_label", v.blind_label}, {"title", v.title}, {"body", v.body}};
}

Corpus corpus_from_json(const json& doc) {
    if (!doc.is_array()) throw ParseError("<root>", "corpus file must be a JSON array");
    Corpus corpus;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        detail::Fields f(doc[i], detail::index_path("", i));
        std::string id = f.string_or("id", "");
        std::string title = f.string_or("title", "");
        std::string body = f.string("body");
        std::string language = f.string("language");
        Provenance prov = provenance_from_json(f.required("provenance"), f.path("provenance"));
        f.finish();
        try {
            corpus.ingest(std::move(title), std::move(body), std::move(language), std::move(prov),
                          std::move(id));
        } catch (const RejectedError& e) {
            throw RejectedError(f.path() + ": " + e.what());
        }
    }
    return corpus;
}

Corpus parse_corpus(std::string_view document) {
    return corpus_from_json(detail::parse_document(document));
}

}  // namespace mfeval::corpus
