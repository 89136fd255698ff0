#pragma once
// Multi-step workflow execution under the three prompting conditions.
//
// Every condition sees identical user messages and history; only the system
// prompt differs: absent (A), a static asset verbatim (B), or assembled
// per step from the graph plus accumulated state (C). Condition C feeds
// provider-emitted discoveries through the learning cycle between steps.

#include "kgov/checks.hpp"
#include "kgov/evaluator.hpp"
#include "kgov/kg.hpp"
#include "kgov/prompt.hpp"
#include "kgov/provider.hpp"
#include "kgov/session.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kgov::orch {

struct WorkflowStep {
    int index = 0;
    std::string instruction;
    std::optional<std::string> attachment;  // source text appended to the user message
    std::vector<checks::Dimension> applicable_dimensions;
    std::optional<kg::NodeId> skill;        // required for Condition C
};

struct WorkflowSpec {
    std::vector<WorkflowStep> steps;
};

// Loads a workflow document; attachment paths resolve relative to the file
// and are inlined as text.
WorkflowSpec load_workflow(const std::filesystem::path& path);

enum class Condition { AUnguided, BStatic, CDynamic };

std::string to_string(Condition c);
std::optional<Condition> condition_from(const std::string& s);

struct ConditionKind {
    Condition kind = Condition::AUnguided;
    std::optional<std::filesystem::path> static_prompt_ref; // required iff B
};

struct StepRecord {
    int index = 0;
    std::optional<std::string> system_prompt;
    std::string user_message;
    std::string assistant_output;
    long long wall_time_ms = 0;
    std::vector<kg::NodeId> prompt_sources; // C only
};

struct Transcript {
    Condition condition = Condition::AUnguided;
    std::vector<StepRecord> steps;

    std::vector<std::string> outputs() const; // assistant outputs, step order
};

std::string transcript_to_json(const Transcript& t, int trial = 0);
Transcript transcript_from_json(const std::string& text);
Transcript load_transcript(const std::filesystem::path& path);

struct RunOptions {
    prompt::TokenBudget budget{1680};
    std::optional<std::filesystem::path> dump_prompts; // one file per step
    int jobs = 1;                                      // trial parallelism
};

struct RunResult {
    Transcript transcript;
    session::SessionState final_state;
};

// A provider failure mid-run keeps the transcript up to the failure point.
struct WorkflowInterrupted : ProviderError {
    WorkflowInterrupted(const std::string& msg, RunResult partial)
        : ProviderError(msg), partial(std::move(partial)) {}
    RunResult partial;
};

RunResult run_workflow(const WorkflowSpec& spec, const ConditionKind& condition,
                       provider::CompletionProvider& provider,
                       const std::vector<kg::GraphDocument>& graphs,
                       const session::SessionState& seed_state,
                       const RunOptions& options = {});

struct TrialRecord {
    int trial = 0;
    Transcript transcript;
    session::SessionState final_state;
    std::optional<eval::RubricResult> rubric;
    std::optional<std::string> error; // failed trials are recorded, not fatal
};

// Independent trials over fresh copies of the seed state. When a manifest is
// given each trial is scored deterministically. A provider error marks that
// trial failed; remaining trials still run.
std::vector<TrialRecord> run_trials(const WorkflowSpec& spec, const ConditionKind& condition,
                                    provider::CompletionProvider& provider,
                                    const std::vector<kg::GraphDocument>& graphs,
                                    const session::SessionState& seed_state, int trials,
                                    const std::vector<checks::CheckSpec>& manifest = {},
                                    const RunOptions& options = {});

} // namespace kgov::orch
