#pragma once

// Synthetic raters for sensitivity experiments and end-to-end tests.
//
// Likert answer = clamp(round(quality[mf] + bias[rater] + offset[question] + noise), bounds)
// with bias ~ N(0, bias_sd), offset ~ N(0, question_sd), noise ~ N(0, noise_sd).
// Open answers are drawn from a small per-microfiction vocabulary so that
// agreement matrices are non-trivial. Output depends only on the study, the
// options and the standard library's distributions.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mfeval/study.hpp"

namespace mfeval::simulate {

struct Options {
    std::size_t raters = 5;
    std::uint64_t seed = 1;
    double bias_sd = 0.5;
    double question_sd = 0.3;
    double noise_sd = 0.8;
    // Per microfiction, corpus order. Drawn uniformly from [2, 4.5] when empty.
    std::vector<double> quality;
    std::string id_prefix = "sim-";
};

struct Simulated {
    std::vector<study::Evaluator> evaluators;  // <prefix>1..m, cohort Other, alias left to the roster
    std::vector<study::ResponseSheet> sheets;  // every evaluator x every microfiction
};

// Throws ValidationError("invalid_simulation") for zero raters, a quality
// vector of the wrong length, or ids that already exist in the roster.
Simulated generate(const study::Study& s, const Options& options);

}  // namespace mfeval::simulate
