#pragma once
// Rubric scoring: deterministic checks are the primary mechanism, a pluggable
// qualitative judge is secondary and can only be lowered by them. Per-step
// raws on the 3-point scale aggregate by mean; the cumulative score weights
// E4/E5 at 1.5 and normalizes to 10.

#include "kgov/checks.hpp"
#include "kgov/provider.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgov::eval {

using checks::CheckSpec;
using checks::Dimension;

struct DimensionScore {
    Dimension dimension = Dimension::E1;
    std::map<int, int> per_step_raw;   // step -> {0,1,2}
    double aggregated = 0.0;           // mean over the dimension's applicable steps
    bool unchecked = false;            // no checks covered this dimension
};

struct RubricResult {
    std::array<DimensionScore, checks::kDimensionCount> scores;
    double cumulative = 0.0;           // in [0,10]
    bool deterministic_only = true;    // judge unavailable or not requested
    std::vector<std::string> flags;
};

double weight_of(Dimension d);  // 1.5 for E4/E5, 1.0 otherwise

// Scores every dimension over the assistant outputs (index 0 = step 1).
// Per (dimension, step): raw 2 when all checks pass, 1 when at least half
// pass, 0 otherwise. A dimension with no checks scores 0 and is flagged.
std::vector<DimensionScore> run_checks(const std::vector<std::string>& outputs,
                                       const std::vector<CheckSpec>& manifest);

// (sum of w_d * aggregated_d) * 10 / (2 * sum of w_d). Throws MissingDimension
// unless all six dimensions are present exactly once.
double cumulative_score(const std::vector<DimensionScore>& scores);

// Asks the judge provider to rate one qualitative dimension (E4 or E6) per
// step on the 0-2 scale. Throws JudgeUnavailable on provider failure.
std::map<int, int> judge_qualitative(const std::vector<std::string>& outputs,
                                     Dimension dimension,
                                     const std::vector<int>& steps,
                                     provider::CompletionProvider& judge);

// Deterministic scores merged with judge raws by per-step minimum; checks can
// lower, never raise, a judge score. Judge failure falls back to
// deterministic-only and flags the result.
RubricResult score_transcript(const std::vector<std::string>& outputs,
                              const std::vector<CheckSpec>& manifest,
                              provider::CompletionProvider* judge = nullptr);

std::string rubric_to_json(const RubricResult& result, int trial, const std::string& condition);

} // namespace kgov::eval
