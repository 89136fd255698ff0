#include "kgov/cli.hpp"

#include "kgov/checks.hpp"
#include "kgov/evaluator.hpp"
#include "kgov/governance.hpp"
#include "kgov/kg.hpp"
#include "kgov/metrics.hpp"
#include "kgov/orchestrator.hpp"
#include "kgov/prompt.hpp"
#include "kgov/provider.hpp"
#include "kgov/session.hpp"
#include "kgov/stats.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using nlohmann::json;
using nlohmann::ordered_json;

namespace kgov::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kProvider = 3;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::vector<double> read_sample_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedDocument("cannot read " + path.string());
    std::vector<double> xs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            xs.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw MalformedDocument(path.string() + ": '" + line + "' is not a number");
        }
    }
    return xs;
}

int cmd_kg_validate(const std::string& dir, const std::string& format, std::ostream& out) {
    auto graphs = kg::load_tracks(dir);
    size_t total_nodes = 0;
    kg::ValidationReport all;
    for (const auto& g : graphs) {
        total_nodes += g.nodes.size();
        auto report = kg::validate_graph(g, graphs);
        all.insert(all.end(), report.begin(), report.end());
    }

    if (format == "json") {
        ordered_json doc;
        doc["graphs"] = graphs.size();
        doc["nodes"] = total_nodes;
        ordered_json violations = ordered_json::array();
        for (const auto& v : all)
            violations.push_back({{"code", v.code}, {"node", v.node}, {"detail", v.detail}});
        doc["violations"] = std::move(violations);
        out << doc.dump(2) << "\n";
    } else {
        out << graphs.size() << " graphs, " << total_nodes << " nodes, " << all.size()
            << " violations\n";
        for (const auto& v : all)
            out << "  " << v.code << " " << v.node << ": " << v.detail << "\n";
    }
    return all.empty() ? kOk : kFailure;
}

int cmd_kg_show(const std::string& dir, const std::string& id, const std::string& format,
                std::ostream& out, std::ostream& err) {
    auto graphs = kg::load_tracks(dir);
    const kg::KnowledgeNode* node = kg::find_node(graphs, id);
    if (!node) {
        err << "unknown node '" << id << "'\n";
        return kFailure;
    }
    if (format == "json") {
        out << kg::node_to_json_text(*node) << "\n";
    } else {
        out << node->id << " [" << kg::to_string(node->kind) << "] " << node->title << "\n";
        if (node->parent) out << "  parent: " << *node->parent << "\n";
        if (node->priority) out << "  priority: " << kg::to_string(*node->priority) << "\n";
        for (const auto& t : node->links.governs) out << "  governs: " << t << "\n";
        for (const auto& t : node->links.enforces) out << "  enforces: " << t << "\n";
        for (const auto& t : node->links.references) out << "  references: " << t << "\n";
        out << "  version: " << node->metadata.version << "\n";
    }
    return kOk;
}

int cmd_kg_add(const std::string& dir, const std::string& file, const std::string& role_name,
               std::ostream& out) {
    auto role = role_name == "builder" ? kg::RoleMode::Builder : kg::RoleMode::Expert;
    auto [track, node] = kg::load_node_file(file);

    auto graphs = kg::load_tracks(dir);
    const kg::GraphDocument* target = kg::find_track(graphs, track);
    if (!target) throw Error("no document for track " + kg::to_string(track));

    // cross-track id uniqueness gates before the single-track add
    if (kg::find_node(graphs, node.id)) throw DuplicateId(node.id);

    auto updated = kg::add_node(*target, node, role);
    auto report = kg::validate_graph(updated, graphs);
    if (!report.empty()) {
        std::string detail;
        for (const auto& v : report) detail += v.code + " " + v.node + "; ";
        throw Error("graph invalid after add: " + detail);
    }

    kg::save_graph(updated, std::filesystem::path(dir) / (kg::to_string(track) + ".json"));
    gov::AuditLog log(std::filesystem::path(dir) / "audit.log");
    log.append(role, "add-node", node.id);
    out << "added " << node.id << " to " << kg::to_string(track) << "\n";
    return kOk;
}

int cmd_state_show(const std::string& file, const std::string& format, std::ostream& out) {
    auto state = session::load_state(file);
    if (format == "json") {
        ordered_json doc;
        doc["phase"] = state.phase;
        doc["version"] = state.version;
        ordered_json entries = ordered_json::array();
        for (const auto& e : state.entries)
            entries.push_back({{"kind", session::to_string(e.kind)},
                               {"key", e.key},
                               {"value", e.value},
                               {"origin_step", e.origin_step},
                               {"validated", e.validated}});
        doc["entries"] = std::move(entries);
        out << doc.dump(2) << "\n";
    } else {
        out << "phase: " << state.phase << " (version " << state.version << ", "
            << state.entries.size() << " entries)\n";
        for (const auto& e : state.entries) out << prompt::render_state_entry(e) << "\n";
    }
    return kOk;
}

int cmd_experiment_run(const std::string& condition_name, int trials,
                       const std::string& provider_name, const std::string& mock_dir,
                       const std::string& dump_prompts, const std::string& out_dir,
                       const std::string& dir, const std::string& workflow_file,
                       const std::string& seed_state_file, const std::string& static_prompt,
                       const std::string& manifest_file, int budget, int jobs,
                       std::ostream& out) {
    auto condition = orch::condition_from(condition_name);
    if (!condition) throw Error("unknown condition '" + condition_name + "'");

    orch::ConditionKind kind;
    kind.kind = *condition;
    if (*condition == orch::Condition::BStatic) kind.static_prompt_ref = static_prompt;

    auto graphs = kg::load_tracks(dir);
    auto workflow = orch::load_workflow(workflow_file);
    auto seed = session::load_state(seed_state_file);
    auto manifest = checks::load_manifest(manifest_file);

    std::unique_ptr<provider::CompletionProvider> prov;
    if (provider_name == "mock")
        prov = std::make_unique<provider::MockProvider>(mock_dir);
    else
        prov = std::make_unique<provider::HttpProvider>();

    orch::RunOptions options;
    options.budget = prompt::TokenBudget{budget};
    options.jobs = jobs;
    if (!dump_prompts.empty()) options.dump_prompts = dump_prompts;

    auto records = orch::run_trials(workflow, kind, *prov, graphs, seed, trials, manifest,
                                    options);

    std::filesystem::create_directories(out_dir);
    std::filesystem::path base(out_dir);

    std::ofstream csv(base / "summary.csv");
    csv << "trial,condition,E1,E2,E3,E4,E5,E6,cumulative\n";

    bool provider_failed = false;
    for (const auto& record : records) {
        std::string prefix = "trial-" + std::to_string(record.trial);
        if (record.error) {
            provider_failed = true;
            out << prefix << ": FAILED (" << *record.error << ")\n";
            std::ofstream fail(base / (prefix + "-error.txt"));
            fail << *record.error << "\n";
            continue;
        }
        {
            std::ofstream f(base / (prefix + "-transcript.json"));
            f << orch::transcript_to_json(record.transcript, record.trial);
        }
        {
            session::SessionState state = record.final_state;
            session::persist_state(state, base / (prefix + "-state.json"));
        }
        if (record.rubric) {
            std::ofstream f(base / (prefix + "-rubric.json"));
            f << eval::rubric_to_json(*record.rubric, record.trial,
                                      orch::to_string(record.transcript.condition));
            csv << record.trial << "," << orch::to_string(record.transcript.condition);
            for (const auto& s : record.rubric->scores) csv << "," << format_double(s.aggregated);
            csv << "," << format_double(record.rubric->cumulative) << "\n";
            out << prefix << ": cumulative " << format_double(record.rubric->cumulative) << "\n";
        } else {
            out << prefix << ": recorded\n";
        }
    }
    out << records.size() << " trials -> " << out_dir << "\n";
    return provider_failed ? kProvider : kOk;
}

int cmd_eval_score(const std::string& transcript_file, const std::string& manifest_file,
                   const std::string& format, std::ostream& out) {
    auto transcript = orch::load_transcript(transcript_file);
    auto manifest = checks::load_manifest(manifest_file);
    auto result = eval::score_transcript(transcript.outputs(), manifest);

    if (format == "json") {
        out << eval::rubric_to_json(result, 0, orch::to_string(transcript.condition));
    } else {
        for (const auto& s : result.scores)
            out << to_string(s.dimension) << ": " << format_double(s.aggregated) << "\n";
        out << "cumulative: " << format_double(result.cumulative) << "\n";
        for (const auto& f : result.flags) out << "flag: " << f << "\n";
    }
    return kOk;
}

int cmd_eval_stats(const std::vector<std::string>& group_files, const std::string& format,
                   std::ostream& out) {
    if (group_files.size() != 2) throw Error("eval stats expects exactly two --group files");
    auto a = read_sample_file(group_files[0]);
    auto b = read_sample_file(group_files[1]);

    auto welch = stats::welch_t_test(a, b);
    auto f = stats::f_variance_test(a, b);

    if (format == "json") {
        ordered_json doc;
        doc["group_a"] = {{"n", a.size()}, {"mean", stats::mean(a)}, {"std", stats::sample_std(a)}};
        doc["group_b"] = {{"n", b.size()}, {"mean", stats::mean(b)}, {"std", stats::sample_std(b)}};
        if (welch.degenerate)
            doc["welch"] = {{"degenerate", true}};
        else
            doc["welch"] = {{"t", welch.t}, {"df", welch.df}, {"p", welch.p}};
        if (f.degenerate)
            doc["f_test"] = {{"degenerate", true}};
        else
            doc["f_test"] = {{"F", f.f}, {"df1", f.df1}, {"df2", f.df2}, {"p", f.p}};
        out << doc.dump(2) << "\n";
    } else {
        out << "group a: n=" << a.size() << " mean=" << format_double(stats::mean(a))
            << " sd=" << format_double(stats::sample_std(a)) << "\n";
        out << "group b: n=" << b.size() << " mean=" << format_double(stats::mean(b))
            << " sd=" << format_double(stats::sample_std(b)) << "\n";
        if (welch.degenerate) {
            out << "welch: degenerate (both variances zero)\n";
        } else {
            out << "welch: t=" << format_double(welch.t) << " df=" << format_double(welch.df)
                << " p=" << format_double(welch.p) << "\n";
        }
        if (f.degenerate) {
            out << "f-test: degenerate (denominator variance zero)\n";
        } else {
            out << "f-test: F=" << format_double(f.f) << " df=(" << f.df1 << "," << f.df2
                << ") p=" << format_double(f.p) << "\n";
        }
    }
    return kOk;
}

int cmd_metrics(const std::vector<std::string>& files, const std::string& format,
                std::ostream& out) {
    ordered_json all = ordered_json::array();
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw MalformedDocument("cannot read " + file);
        std::ostringstream buf;
        buf << in.rdbuf();
        auto report = metrics::analyze(buf.str());

        if (format == "json") {
            ordered_json doc;
            doc["file"] = file;
            doc["lloc"] = report.lloc;
            doc["cyclomatic"] = report.cyclomatic;
            doc["halstead_volume"] = report.halstead_volume;
            doc["maintainability_index"] = report.maintainability_index;
            ordered_json warnings = ordered_json::array();
            for (const auto& w : report.warnings)
                warnings.push_back({{"rule", w.rule}, {"line", w.line}, {"message", w.message}});
            doc["warnings"] = std::move(warnings);
            all.push_back(std::move(doc));
        } else {
            out << file << "\n";
            out << "  Logical SLOC          " << report.lloc << "\n";
            out << "  Cyclomatic Complexity " << report.cyclomatic << "\n";
            out << "  Maintainability Index " << format_double(report.maintainability_index)
                << "\n";
            out << "  Lint Warnings         " << report.warnings.size() << "\n";
            for (const auto& w : report.warnings)
                out << "    " << w.rule << " line " << w.line << ": " << w.message << "\n";
        }
    }
    if (format == "json") out << all.dump(2) << "\n";
    return kOk;
}

int cmd_report(const std::string& results_dir, const std::string& format, std::ostream& out) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(results_dir)) {
        auto name = entry.path().filename().string();
        if (name.rfind("trial-", 0) == 0 && name.find("-rubric.json") != std::string::npos)
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    struct Row {
        int trial;
        std::string condition;
        std::vector<double> scores;
        double cumulative;
    };
    std::vector<Row> rows;
    for (const auto& file : files) {
        std::ifstream in(file);
        json doc;
        in >> doc;
        Row row;
        row.trial = doc.value("trial", 0);
        row.condition = doc.value("condition", "");
        for (int d = 0; d < checks::kDimensionCount; ++d) {
            auto name = checks::to_string(static_cast<checks::Dimension>(d));
            row.scores.push_back(doc["scores"][name]["aggregated"].get<double>());
        }
        row.cumulative = doc.value("cumulative", 0.0);
        rows.push_back(std::move(row));
    }

    if (format == "json") {
        ordered_json doc = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json obj;
            obj["trial"] = r.trial;
            obj["condition"] = r.condition;
            for (int d = 0; d < checks::kDimensionCount; ++d)
                obj[checks::to_string(static_cast<checks::Dimension>(d))] = r.scores[d];
            obj["cumulative"] = r.cumulative;
            doc.push_back(std::move(obj));
        }
        out << doc.dump(2) << "\n";
    } else {
        out << "trial,condition,E1,E2,E3,E4,E5,E6,cumulative\n";
        for (const auto& r : rows) {
            out << r.trial << "," << r.condition;
            for (double s : r.scores) out << "," << format_double(s);
            out << "," << format_double(r.cumulative) << "\n";
        }
    }
    return kOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"knowledge-graph governance engine and experiment harness"};
    app.require_subcommand(1);

    std::string format = "text";

    // kg
    auto* kg_cmd = app.add_subcommand("kg", "knowledge graph management");
    kg_cmd->require_subcommand(1);

    std::string kg_dir = "fixtures/kg";
    auto* kg_validate = kg_cmd->add_subcommand("validate", "validate all tracks");
    kg_validate->add_option("--dir", kg_dir, "graph directory");
    kg_validate->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string show_id;
    auto* kg_show = kg_cmd->add_subcommand("show", "print one node");
    kg_show->add_option("id", show_id, "node id")->required();
    kg_show->add_option("--dir", kg_dir, "graph directory");
    kg_show->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::string add_file, add_role;
    auto* kg_add = kg_cmd->add_subcommand("add", "add a node from a JSON file");
    kg_add->add_option("--file", add_file, "node file")->required();
    kg_add->add_option("--role", add_role, "active role")
        ->required()
        ->check(CLI::IsMember({"builder", "expert"}));
    kg_add->add_option("--dir", kg_dir, "graph directory");

    // state
    auto* state_cmd = app.add_subcommand("state", "session state");
    state_cmd->require_subcommand(1);
    std::string state_file = "fixtures/state/seed-state.json";
    auto* state_show = state_cmd->add_subcommand("show", "print a session state file");
    state_show->add_option("--file", state_file, "state file");
    state_show->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    // experiment
    auto* experiment_cmd = app.add_subcommand("experiment", "workflow experiments");
    experiment_cmd->require_subcommand(1);
    std::string condition, provider_name = "mock";
    std::string mock_dir = "fixtures/mock";
    std::string dump_prompts, out_dir = "out";
    std::string workflow_file = "fixtures/workflow/refactor-workflow.json";
    std::string seed_state_file = "fixtures/state/seed-state.json";
    std::string static_prompt = "fixtures/workflow/static-context.md";
    std::string manifest_file = "fixtures/eval/manifest.json";
    int trials = 5;
    int budget = 1680;
    int jobs = 1;
    auto* experiment_run = experiment_cmd->add_subcommand("run", "run trials of one condition");
    experiment_run->add_option("--condition", condition, "A, B, or C")->required();
    experiment_run->add_option("--trials", trials, "trial count");
    experiment_run->add_option("--provider", provider_name)
        ->check(CLI::IsMember({"live", "mock"}));
    experiment_run->add_option("--mock-dir", mock_dir, "mock script directory");
    experiment_run->add_option("--dump-prompts", dump_prompts, "write per-step prompts here");
    experiment_run->add_option("--out", out_dir, "output directory");
    experiment_run->add_option("--dir", kg_dir, "graph directory");
    experiment_run->add_option("--workflow", workflow_file, "workflow spec");
    experiment_run->add_option("--seed-state", seed_state_file, "seed session state");
    experiment_run->add_option("--static-prompt", static_prompt, "Condition B asset");
    experiment_run->add_option("--manifest", manifest_file, "check manifest");
    experiment_run->add_option("--budget", budget, "token budget for Condition C");
    experiment_run->add_option("--jobs", jobs, "parallel trials");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "scoring and statistics");
    eval_cmd->require_subcommand(1);
    std::string transcript_file;
    std::string score_manifest = "fixtures/eval/manifest.json";
    auto* eval_score = eval_cmd->add_subcommand("score", "score one transcript");
    eval_score->add_option("--transcript", transcript_file)->required();
    eval_score->add_option("--manifest", score_manifest);
    eval_score->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    std::vector<std::string> group_files;
    auto* eval_stats = eval_cmd->add_subcommand("stats", "Welch t and F tests on two groups");
    eval_stats->add_option("--group", group_files, "sample file, one number per line");
    eval_stats->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    // metrics
    std::vector<std::string> metric_files;
    auto* metrics_cmd = app.add_subcommand("metrics", "source quality metrics");
    metrics_cmd->add_option("files", metric_files, "source files")->required();
    metrics_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    // report
    std::string results_dir;
    auto* report_cmd = app.add_subcommand("report", "summarize experiment results");
    report_cmd->add_option("--results", results_dir, "results directory")->required();
    report_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));

    std::vector<std::string> argv(args);
    try {
        std::vector<const char*> raw;
        raw.push_back("kgov");
        for (const auto& a : argv) raw.push_back(a.c_str());
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
    }

    try {
        if (kg_validate->parsed()) return cmd_kg_validate(kg_dir, format, out);
        if (kg_show->parsed()) return cmd_kg_show(kg_dir, show_id, format, out, err);
        if (kg_add->parsed()) return cmd_kg_add(kg_dir, add_file, add_role, out);
        if (state_show->parsed()) return cmd_state_show(state_file, format, out);
        if (experiment_run->parsed())
            return cmd_experiment_run(condition, trials, provider_name, mock_dir, dump_prompts,
                                      out_dir, kg_dir, workflow_file, seed_state_file,
                                      static_prompt, manifest_file, budget, jobs, out);
        if (eval_score->parsed()) return cmd_eval_score(transcript_file, score_manifest, format, out);
        if (eval_stats->parsed()) return cmd_eval_stats(group_files, format, out);
        if (metrics_cmd->parsed()) return cmd_metrics(metric_files, format, out);
        if (report_cmd->parsed()) return cmd_report(results_dir, format, out);
    } catch (const ProviderError& e) {
        err << "provider error: " << e.what() << "\n";
        return kProvider;
    } catch (const JudgeUnavailable& e) {
        err << "judge unavailable: " << e.what() << "\n";
        return kProvider;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }

    err << "no subcommand\n";
    return kUsage;
}

} // namespace kgov::cli
