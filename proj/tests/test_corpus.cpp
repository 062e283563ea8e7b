#include <random>

#include "doctest.h"
#include "mfeval/corpus.hpp"
#include "mfeval/text.hpp"

using namespace mfeval;
using namespace mfeval::corpus;

namespace {

std::string words(std::size_t n, const std::string& w = "palabra") {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += (i % 7 == 0) ? "\n" : " ";
        out += w;
    }
    return out;
}

const std::vector<std::string> kVocab = {"luna", "mar", "casa", "niño", "perro",
                                         "sombra", "río",  "reloj", "puerta", "árbol"};

std::string random_text(std::mt19937_64& rng, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += kVocab[rng() % kVocab.size()];
    }
    return out;
}

}  // namespace

TEST_SUITE("text") {
    TEST_CASE("word counting rule") {
        CHECK(text::count_words("") == 0);
        CHECK(text::count_words("  uno   dos\ttres\n") == 3);
        CHECK(text::count_words("bien-hecho es una palabra") == 4);
        CHECK(text::count_words("Hola , mundo — ¿qué ... tal?") == 4);
        CHECK(text::count_words("a\xC2\xA0" "b\xE2\x80\x83" "c") == 3);  // NBSP, em space
        CHECK(text::count_words("¡¿...?!") == 0);
    }
    TEST_CASE("lowercase and punctuation") {
        CHECK(text::to_lower("ÁRBOL Niño ÉL") == "árbol niño él");
        CHECK(text::strip_punctuation("¿Qué, dijo?") == "Qué dijo");
        CHECK(text::trim("  \n hola mundo \t") == "hola mundo");
        CHECK(text::to_lower("\xFF" "A") == "\xFF" "a");  // malformed byte kept
    }
}

TEST_SUITE("corpus") {
    TEST_CASE("300-word boundary") {
        auto at = ingest_microfiction("t", words(300), "es", HumanAuthor{}, 1);
        CHECK(at.word_count == 300);
        CHECK(at.conforming);
        auto over = ingest_microfiction("t", words(301), "es", HumanAuthor{}, 2);
        CHECK(over.word_count == 301);
        CHECK_FALSE(over.conforming);
        CHECK(over.body == words(301));
    }
    TEST_CASE("empty body rejected") {
        CHECK_THROWS_AS(ingest_microfiction("t", "", "es", HumanAuthor{}, 1), RejectedError);
        CHECK_THROWS_AS(ingest_microfiction("t", " \n\t", "es", HumanAuthor{}, 1), RejectedError);
        CHECK_THROWS_AS(ingest_microfiction("t", "x", "es", Generated{"", "m", "p"}, 1),
                        RejectedError);
    }
    TEST_CASE("blind labels follow ingestion order") {
        Corpus c;
        c.ingest("a", "uno", "es", HumanAuthor{AuthorTier::Expert});
        c.ingest("b", "dos", "es", Generated{"Monterroso", "gpt2-es", "dragón"});
        CHECK(c.items()[0].blind_label == "MF 1");
        CHECK(c.items()[1].blind_label == "MF 2");
        CHECK(c.items()[1].id == "mf-2");
        CHECK_THROWS_AS(c.ingest("c", "tres", "es", HumanAuthor{}, "mf-1"), RejectedError);
    }
    TEST_CASE("blind view drops provenance") {
        auto gen = ingest_microfiction("El faro", "La luz se apagó.", "es",
                                       Generated{"Monterroso", "gpt2-spanish", "faro"}, 2);
        auto v = blind_view(gen);
        const std::string s = to_json(v).dump();
        CHECK(s.find("Monterroso") == std::string::npos);
        CHECK(s.find("gpt2-spanish") == std::string::npos);
        CHECK(v.blind_label == "MF 2");

        auto human = ingest_microfiction("x", "y z", "es", HumanAuthor{AuthorTier::Expert}, 1);
        auto hv = to_json(blind_view(human));
        CHECK_FALSE(hv.contains("tier"));
        CHECK_FALSE(hv.contains("provenance"));
        CHECK(hv.size() == 3);
    }
    TEST_CASE("blind views never contain provenance strings") {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 200; ++trial) {
            Provenance p;
            if (trial % 2)
                p = Generated{"Sys" + std::to_string(rng() % 1000), "model-" + std::to_string(trial),
                              "prompt_" + std::to_string(rng())};
            else
                p = HumanAuthor{static_cast<AuthorTier>(trial % 3)};
            auto mf = ingest_microfiction(random_text(rng, 3), random_text(rng, 1 + rng() % 40),
                                          "es", p, 1 + trial % 6);
            const std::string s = to_json(blind_view(mf)).dump();
            for (const auto& leak : provenance_strings(p)) CHECK(s.find(leak) == std::string::npos);
        }
    }
    TEST_CASE("serialize then re-ingest preserves word count") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 100; ++trial) {
            std::string body = random_text(rng, rng() % 350 + 1);
            if (trial % 3 == 0) body += " — ¡fin! ";
            auto mf = ingest_microfiction("t", body, "es", HumanAuthor{}, 1);
            nlohmann::json doc = nlohmann::json::array({to_corpus_json(mf)});
            auto again = parse_corpus(doc.dump());
            CHECK(again.items()[0].word_count == mf.word_count);
            CHECK(microfiction_from_json(to_json(mf)) == mf);
        }
    }
    TEST_CASE("corpus file parsing") {
        const char* doc = R"([
          {"title": "A", "body": "uno dos", "language": "es",
           "provenance": {"type": "human", "tier": "Emerging"}},
          {"id": "x7", "title": "B", "body": "tres", "language": "es",
           "provenance": {"type": "generated", "system": "ChatGPT-3.5", "model": "gpt-3.5", "prompt": "p"}}
        ])";
        auto c = parse_corpus(doc);
        REQUIRE(c.size() == 2);
        CHECK(c.items()[0].id == "mf-1");
        CHECK(c.items()[1].id == "x7");
        CHECK(std::get<HumanAuthor>(c.items()[0].provenance).tier == AuthorTier::Emerging);

        CHECK_THROWS_AS(parse_corpus(R"([{"body": "x", "language": "es",
            "provenance": {"type": "alien"}}])"), ParseError);
        CHECK_THROWS_AS(parse_corpus(R"([{"body": "x", "language": "es", "colour": 1,
            "provenance": {"type": "human", "tier": "expert"}}])"), ParseError);
        CHECK_THROWS_AS(parse_corpus(R"({"body": "x"})"), ParseError);
        CHECK_THROWS_AS(parse_corpus(R"([{"body": " ", "language": "es",
            "provenance": {"type": "human", "tier": "expert"}}])"), RejectedError);
    }
}
