#include "mfeval/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfeval::simulate {

namespace {

const std::vector<std::vector<std::string>> kVocabulary = {
    {"faro", "barco", "noche", "mar", "luz", "espera"},
    {"reloj", "tiempo", "abuela", "herencia", "hora", "memoria"},
    {"sueño", "oveja", "insomnio", "cama", "cuenta", "noche"},
    {"carta", "despedida", "mañana", "adiós", "papel", "viaje"},
    {"casa", "mudanza", "habitación", "caja", "olvido", "puerta"},
    {"pozo", "eco", "nombre", "voz", "grito", "pasado"},
};
const std::vector<std::string> kFiller = {"quizá", "historia", "personaje", "final", "giro", "lector"};

std::string phrase(std::mt19937_64& rng, std::size_t mf_index, std::size_t words) {
    const auto& pool = kVocabulary[mf_index % kVocabulary.size()];
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        const bool filler = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
        const auto& source = filler ? kFiller : pool;
        const std::string& w = source[std::uniform_int_distribution<std::size_t>(0, source.size() - 1)(rng)];
        out += (out.empty() ? "" : " ") + w;
    }
    return out;
}

}  // namespace

Simulated generate(const study::Study& s, const Options& o) {
    std::vector<Violation> v;
    if (o.raters == 0) v.push_back({"no_raters", "raters", "at least one simulated rater is required"});
    if (!o.quality.empty() && o.quality.size() != s.corpus.size())
        v.push_back({"quality_length", "quality",
                     "expected " + std::to_string(s.corpus.size()) + " quality values, got " +
                         std::to_string(o.quality.size())});
    for (std::size_t i = 1; i <= o.raters; ++i)
        if (s.find_evaluator(o.id_prefix + std::to_string(i)))
            v.push_back({"duplicate_evaluator_id", o.id_prefix + std::to_string(i),
                         "evaluator already enrolled: " + o.id_prefix + std::to_string(i)});
    if (!v.empty()) {
        std::string first = v.front().message;
        throw ValidationError("invalid_simulation", first, std::move(v));
    }

    std::mt19937_64 rng(o.seed);
    std::vector<double> quality = o.quality;
    if (quality.empty()) {
        std::uniform_real_distribution<double> q(2.0, 4.5);
        for (std::size_t k = 0; k < s.corpus.size(); ++k) quality.push_back(q(rng));
    }
    std::normal_distribution<double> bias(0.0, o.bias_sd), offset(0.0, o.question_sd), noise(0.0, o.noise_sd);
    std::bernoulli_distribution coin(0.5);

    const auto questions = s.protocol.questions();
    std::vector<double> offsets;
    for (std::size_t i = 0; i < questions.size(); ++i) offsets.push_back(offset(rng));

    Simulated out;
    for (std::size_t r = 0; r < o.raters; ++r) {
        study::Evaluator e{o.id_prefix + std::to_string(r + 1), study::Cohort::Other, ""};
        const double b = bias(rng);
        for (std::size_t k = 0; k < s.corpus.size(); ++k) {
            study::ResponseSheet sheet{e.id, s.corpus[k].id, {}, ""};
            for (std::size_t i = 0; i < questions.size(); ++i) {
                const auto& q = *questions[i];
                if (const auto* l = q.likert()) {
                    const double x = std::round(quality[k] + b + offsets[i] + noise(rng));
                    sheet.answers[q.number] = std::clamp(static_cast<int>(x), l->min, l->max);
                    continue;
                }
                bool answer = q.required;
                if (q.depends_on) {
                    const auto it = sheet.answers.find(q.depends_on->question);
                    const int* parent = it == sheet.answers.end() ? nullptr : std::get_if<int>(&it->second);
                    answer = parent && *parent >= q.depends_on->min_value && coin(rng);
                } else if (!q.required) {
                    answer = coin(rng);
                }
                if (answer) sheet.answers[q.number] = phrase(rng, k, 4);
            }
            out.sheets.push_back(std::move(sheet));
        }
        out.evaluators.push_back(std::move(e));
    }
    return out;
}

}  // namespace mfeval::simulate
