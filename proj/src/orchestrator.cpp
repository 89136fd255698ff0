#include "kgov/orchestrator.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

using nlohmann::json;
using nlohmann::ordered_json;

namespace kgov::orch {

std::string to_string(Condition c) {
    switch (c) {
        case Condition::AUnguided: return "A-unguided";
        case Condition::BStatic: return "B-static";
        case Condition::CDynamic: return "C-dynamic";
    }
    return "A-unguided";
}

std::optional<Condition> condition_from(const std::string& s) {
    if (s == "A" || s == "A-unguided") return Condition::AUnguided;
    if (s == "B" || s == "B-static") return Condition::BStatic;
    if (s == "C" || s == "C-dynamic") return Condition::CDynamic;
    return std::nullopt;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

WorkflowSpec load_workflow(const std::filesystem::path& path) {
    json doc;
    {
        std::ifstream in(path);
        if (!in) throw MalformedDocument("cannot read " + path.string());
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw MalformedDocument(path.string() + ": " + e.what());
        }
    }
    if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
        throw MalformedDocument(path.string() + ": workflow needs a steps array");

    auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    WorkflowSpec spec;
    int expected = 1;
    for (const auto& obj : doc["steps"]) {
        WorkflowStep step;
        step.index = obj.value("index", 0);
        if (step.index != expected)
            throw MalformedDocument(path.string() + ": step indices must run 1..n, got " +
                                    std::to_string(step.index));
        ++expected;
        step.instruction = obj.value("instruction", "");
        if (step.instruction.empty())
            throw MalformedDocument(path.string() + ": step " + std::to_string(step.index) +
                                    " lacks an instruction");
        if (obj.contains("attachment"))
            step.attachment = read_file(base / obj["attachment"].get<std::string>());
        if (obj.contains("applicable_dimensions")) {
            for (const auto& d : obj["applicable_dimensions"]) {
                auto dim = checks::dimension_from(d.get<std::string>());
                if (!dim)
                    throw MalformedDocument(path.string() + ": bad dimension on step " +
                                            std::to_string(step.index));
                step.applicable_dimensions.push_back(*dim);
            }
        }
        if (obj.contains("skill")) step.skill = obj["skill"].get<std::string>();
        spec.steps.push_back(std::move(step));
    }
    return spec;
}

std::vector<std::string> Transcript::outputs() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.assistant_output);
    return out;
}

std::string transcript_to_json(const Transcript& t, int trial) {
    ordered_json doc;
    doc["condition"] = to_string(t.condition);
    doc["trial"] = trial;
    ordered_json steps = ordered_json::array();
    for (const auto& s : t.steps) {
        ordered_json obj;
        obj["index"] = s.index;
        if (s.system_prompt) obj["system_prompt"] = *s.system_prompt;
        else obj["system_prompt"] = nullptr;
        obj["user_message"] = s.user_message;
        obj["assistant_output"] = s.assistant_output;
        obj["wall_time_ms"] = s.wall_time_ms;
        if (!s.prompt_sources.empty()) obj["prompt_sources"] = s.prompt_sources;
        steps.push_back(std::move(obj));
    }
    doc["steps"] = std::move(steps);
    return doc.dump(2) + "\n";
}

Transcript transcript_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedDocument(std::string("transcript: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
        throw MalformedDocument("transcript: steps array missing");

    Transcript t;
    auto cond = condition_from(doc.value("condition", ""));
    t.condition = cond.value_or(Condition::AUnguided);
    for (const auto& obj : doc["steps"]) {
        StepRecord s;
        s.index = obj.value("index", 0);
        if (obj.contains("system_prompt") && !obj["system_prompt"].is_null())
            s.system_prompt = obj["system_prompt"].get<std::string>();
        s.user_message = obj.value("user_message", "");
        s.assistant_output = obj.value("assistant_output", "");
        s.wall_time_ms = obj.value("wall_time_ms", 0LL);
        if (obj.contains("prompt_sources"))
            for (const auto& id : obj["prompt_sources"])
                s.prompt_sources.push_back(id.get<std::string>());
        t.steps.push_back(std::move(s));
    }
    return t;
}

Transcript load_transcript(const std::filesystem::path& path) {
    return transcript_from_json(read_file(path));
}

RunResult run_workflow(const WorkflowSpec& spec, const ConditionKind& condition,
                       provider::CompletionProvider& provider,
                       const std::vector<kg::GraphDocument>& graphs,
                       const session::SessionState& seed_state, const RunOptions& options) {
    if (condition.kind == Condition::BStatic && !condition.static_prompt_ref)
        throw Error("Condition B needs a static prompt asset");
    std::string static_prompt;
    if (condition.kind == Condition::BStatic)
        static_prompt = read_file(*condition.static_prompt_ref);

    if (condition.kind == Condition::CDynamic)
        for (const auto& step : spec.steps)
            if (!step.skill)
                throw Error("Condition C requires a skill on step " + std::to_string(step.index));

    RunResult result;
    result.transcript.condition = condition.kind;
    result.final_state = seed_state;

    std::vector<provider::ChatMessage> history;

    for (const auto& step : spec.steps) {
        StepRecord record;
        record.index = step.index;

        switch (condition.kind) {
            case Condition::AUnguided:
                break;
            case Condition::BStatic:
                record.system_prompt = static_prompt;
                break;
            case Condition::CDynamic: {
                auto skill = gov::skill_spec(graphs, *step.skill);
                auto assembled = prompt::assemble_prompt(step.index, skill, graphs,
                                                         result.final_state, options.budget);
                record.system_prompt = assembled.rendered;
                record.prompt_sources = assembled.sources;
                break;
            }
        }

        record.user_message = step.instruction;
        if (step.attachment) record.user_message += "\n\n" + *step.attachment;

        history.push_back({provider::ChatMessage::Role::User, record.user_message});

        auto started = std::chrono::steady_clock::now();
        try {
            record.assistant_output = provider.complete(record.system_prompt, history);
        } catch (const ProviderError& e) {
            throw WorkflowInterrupted("step " + std::to_string(step.index) + ": " + e.what(),
                                      std::move(result));
        }
        auto elapsed = std::chrono::steady_clock::now() - started;
        record.wall_time_ms =
            provider.deterministic()
                ? 0
                : std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();

        history.push_back({provider::ChatMessage::Role::Assistant, record.assistant_output});

        if (options.dump_prompts && record.system_prompt) {
            std::filesystem::create_directories(*options.dump_prompts);
            auto path = *options.dump_prompts /
                        ("step-" + std::to_string(step.index) + "-prompt.txt");
            std::ofstream out(path);
            out << *record.system_prompt;
        }

        if (condition.kind == Condition::CDynamic) {
            for (const auto& candidate :
                 session::parse_state_block(record.assistant_output, step.index)) {
                auto outcome = session::learning_cycle(candidate, graphs, result.final_state,
                                                       session::CycleMode::Auto);
                result.final_state = std::move(outcome.state);
            }
        }

        result.transcript.steps.push_back(std::move(record));
    }

    return result;
}

namespace {

TrialRecord run_one_trial(int trial, const WorkflowSpec& spec, const ConditionKind& condition,
                          provider::CompletionProvider& provider,
                          const std::vector<kg::GraphDocument>& graphs,
                          const session::SessionState& seed_state,
                          const std::vector<checks::CheckSpec>& manifest,
                          const RunOptions& options) {
    TrialRecord record;
    record.trial = trial;
    try {
        RunOptions per_trial = options;
        if (options.dump_prompts)
            per_trial.dump_prompts = *options.dump_prompts / ("trial-" + std::to_string(trial));
        auto run = run_workflow(spec, condition, provider, graphs, seed_state, per_trial);
        record.transcript = std::move(run.transcript);
        record.final_state = std::move(run.final_state);
        if (!manifest.empty())
            record.rubric = eval::score_transcript(record.transcript.outputs(), manifest);
    } catch (const WorkflowInterrupted& e) {
        record.error = e.what();
        record.transcript = e.partial.transcript;
        record.final_state = e.partial.final_state;
        record.transcript.condition = condition.kind;
    } catch (const std::exception& e) {
        record.error = e.what();
        record.transcript.condition = condition.kind;
    }
    return record;
}

} // namespace

std::vector<TrialRecord> run_trials(const WorkflowSpec& spec, const ConditionKind& condition,
                                    provider::CompletionProvider& provider,
                                    const std::vector<kg::GraphDocument>& graphs,
                                    const session::SessionState& seed_state, int trials,
                                    const std::vector<checks::CheckSpec>& manifest,
                                    const RunOptions& options) {
    std::vector<TrialRecord> records(static_cast<size_t>(std::max(trials, 0)));
    if (trials <= 0) {
        records.clear();
        return records;
    }

    if (options.jobs <= 1) {
        for (int i = 0; i < trials; ++i)
            records[static_cast<size_t>(i)] =
                run_one_trial(i, spec, condition, provider, graphs, seed_state, manifest, options);
        return records;
    }

    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= trials) break;
            records[static_cast<size_t>(i)] =
                run_one_trial(i, spec, condition, provider, graphs, seed_state, manifest, options);
        }
    };
    std::vector<std::future<void>> pool;
    for (int j = 0; j < std::min(options.jobs, trials); ++j)
        pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
    return records;
}

} // namespace kgov::orch
