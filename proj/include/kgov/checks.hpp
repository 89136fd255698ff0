#pragma once
// Deterministic keyword/pattern/field checks over model output text.
// The same CheckSpec drives both pre-execution compliance checks (via the
// behavior a check is derived from) and post-hoc rubric scoring (via its
// dimension and step set).

#include "kgov/kg.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kgov::checks {

enum class Dimension { E1, E2, E3, E4, E5, E6 };

std::string to_string(Dimension d);
std::optional<Dimension> dimension_from(const std::string& s);
constexpr int kDimensionCount = 6;

enum class CheckKind {
    MustContain,
    MustNotContain,
    PatternMatch,
    AllOfValues,
    PayloadFields,
    CrossReference,
};

std::string to_string(CheckKind k);
std::optional<CheckKind> check_kind_from(const std::string& s);

struct CheckSpec {
    Dimension dimension = Dimension::E1;
    std::vector<int> steps;                 // workflow steps the check scores
    CheckKind kind = CheckKind::MustContain;

    // payload, populated per kind
    std::string token;                      // must-contain / must-not-contain
    std::string pattern;                    // pattern-match / cross-reference
    std::vector<std::string> values;        // all-of-values
    std::string event;                      // payload-fields
    std::vector<std::string> fields;        // payload-fields
    std::vector<int> defined_in;            // cross-reference: defining steps

    std::optional<kg::NodeId> behavior;     // source behavior rule, if any
};

struct CheckOutcome {
    bool passed = false;
    std::string evidence;   // what matched or what was missing
};

// Evaluates one check against the output of `step`. `all_outputs` maps step
// index -> assistant output for the whole workflow; cross-reference checks
// read their defining steps from it, every other kind reads only `step`.
CheckOutcome evaluate_check(const CheckSpec& check, int step,
                            const std::vector<std::string>& all_outputs);

// JSON manifest: a list of CheckSpec objects.
std::vector<CheckSpec> load_manifest(const std::filesystem::path& path);
std::vector<CheckSpec> parse_manifest(const std::string& text);

} // namespace kgov::checks
