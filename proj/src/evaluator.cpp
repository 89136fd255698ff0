#include "kgov/evaluator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

using nlohmann::json;
using nlohmann::ordered_json;

namespace kgov::eval {

double weight_of(Dimension d) {
    return (d == Dimension::E4 || d == Dimension::E5) ? 1.5 : 1.0;
}

std::vector<DimensionScore> run_checks(const std::vector<std::string>& outputs,
                                       const std::vector<CheckSpec>& manifest) {
    std::vector<DimensionScore> result;
    for (int d = 0; d < checks::kDimensionCount; ++d) {
        Dimension dim = static_cast<Dimension>(d);
        DimensionScore score;
        score.dimension = dim;

        std::set<int> applicable;
        for (const auto& check : manifest)
            if (check.dimension == dim)
                applicable.insert(check.steps.begin(), check.steps.end());

        if (applicable.empty()) {
            score.unchecked = true;
            score.aggregated = 0.0;
            result.push_back(std::move(score));
            continue;
        }

        double sum = 0.0;
        for (int step : applicable) {
            // an empty assistant output is a failed step outright; negative
            // checks must not pass vacuously on it
            bool empty_output = step < 1 || step > static_cast<int>(outputs.size()) ||
                                outputs[static_cast<size_t>(step) - 1].empty();
            int total = 0;
            int passed = 0;
            for (const auto& check : manifest) {
                if (check.dimension != dim) continue;
                if (std::find(check.steps.begin(), check.steps.end(), step) == check.steps.end())
                    continue;
                ++total;
                if (!empty_output && checks::evaluate_check(check, step, outputs).passed)
                    ++passed;
            }
            int raw = 0;
            if (passed == total) raw = 2;
            else if (2 * passed >= total) raw = 1;
            score.per_step_raw[step] = raw;
            sum += raw;
        }
        score.aggregated = sum / static_cast<double>(applicable.size());
        result.push_back(std::move(score));
    }
    return result;
}

double cumulative_score(const std::vector<DimensionScore>& scores) {
    std::set<Dimension> seen;
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (const auto& s : scores) {
        if (!seen.insert(s.dimension).second)
            throw MissingDimension("dimension " + to_string(s.dimension) + " scored twice");
        weighted += weight_of(s.dimension) * s.aggregated;
        weight_sum += weight_of(s.dimension);
    }
    if (seen.size() != checks::kDimensionCount)
        throw MissingDimension("cumulative score needs all six dimensions, got " +
                               std::to_string(seen.size()));
    return weighted * 10.0 / (2.0 * weight_sum);
}

std::map<int, int> judge_qualitative(const std::vector<std::string>& outputs,
                                     Dimension dimension,
                                     const std::vector<int>& steps,
                                     provider::CompletionProvider& judge) {
    std::string system =
        "You are a strict software quality judge. Rate the given workflow outputs on one "
        "dimension using a 3-point scale: 0 = non-compliant, 1 = partially compliant, "
        "2 = fully compliant. Reply with a JSON object mapping step numbers to scores "
        "and nothing else.";

    std::string request = "Dimension under review: " + to_string(dimension) + "\n";
    request += dimension == Dimension::E4
                   ? "Criterion: accurate reuse of methods, events, and config keys defined in "
                     "prior steps.\n"
                   : "Criterion: documentation matches the actual implementation: correct class "
                     "names, method signatures, and event names.\n";
    for (int step : steps) {
        request += "\n--- step " + std::to_string(step) + " output ---\n";
        if (step >= 1 && step <= static_cast<int>(outputs.size()))
            request += outputs[static_cast<size_t>(step) - 1];
    }

    std::string reply;
    try {
        reply = judge.complete(system, {{provider::ChatMessage::Role::User, request}});
    } catch (const std::exception& e) {
        throw JudgeUnavailable(e.what());
    }

    std::map<int, int> raw;
    try {
        auto begin = reply.find('{');
        auto end = reply.rfind('}');
        if (begin == std::string::npos || end == std::string::npos || end < begin)
            throw JudgeUnavailable("judge reply carries no JSON object");
        json obj = json::parse(reply.substr(begin, end - begin + 1));
        for (const auto& [key, value] : obj.items()) {
            int step = std::stoi(key);
            int score = value.get<int>();
            raw[step] = std::clamp(score, 0, 2);
        }
    } catch (const JudgeUnavailable&) {
        throw;
    } catch (const std::exception& e) {
        throw JudgeUnavailable(std::string("judge reply unparseable: ") + e.what());
    }
    return raw;
}

RubricResult score_transcript(const std::vector<std::string>& outputs,
                              const std::vector<CheckSpec>& manifest,
                              provider::CompletionProvider* judge) {
    RubricResult result;
    auto scores = run_checks(outputs, manifest);

    if (judge) {
        for (Dimension dim : {Dimension::E4, Dimension::E6}) {
            auto& det = scores[static_cast<size_t>(dim)];
            std::vector<int> steps;
            for (const auto& [step, _] : det.per_step_raw) steps.push_back(step);
            if (steps.empty()) continue;
            try {
                auto judged = judge_qualitative(outputs, dim, steps, *judge);
                double sum = 0.0;
                for (auto& [step, raw] : det.per_step_raw) {
                    auto it = judged.find(step);
                    if (it != judged.end()) raw = std::min(raw, it->second);
                    sum += raw;
                }
                det.aggregated = sum / static_cast<double>(det.per_step_raw.size());
                result.deterministic_only = false;
            } catch (const JudgeUnavailable& e) {
                result.flags.push_back("judge unavailable for " + to_string(dim) + ": " +
                                       e.what());
            }
        }
    }

    for (auto& s : scores) {
        if (s.unchecked)
            result.flags.push_back("dimension " + to_string(s.dimension) +
                                   " has no checks; scored 0");
        result.scores[static_cast<size_t>(s.dimension)] = s;
    }
    result.cumulative = cumulative_score(scores);
    return result;
}

std::string rubric_to_json(const RubricResult& result, int trial, const std::string& condition) {
    ordered_json doc;
    doc["trial"] = trial;
    doc["condition"] = condition;
    ordered_json scores;
    for (const auto& s : result.scores) {
        ordered_json entry;
        entry["aggregated"] = s.aggregated;
        ordered_json raw;
        for (const auto& [step, value] : s.per_step_raw)
            raw[std::to_string(step)] = value;
        entry["per_step_raw"] = std::move(raw);
        if (s.unchecked) entry["unchecked"] = true;
        scores[to_string(s.dimension)] = std::move(entry);
    }
    doc["scores"] = std::move(scores);
    doc["cumulative"] = result.cumulative;
    doc["deterministic_only"] = result.deterministic_only;
    if (!result.flags.empty()) doc["flags"] = result.flags;
    return doc.dump(2) + "\n";
}

} // namespace kgov::eval
