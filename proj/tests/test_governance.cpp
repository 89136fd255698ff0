#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgov/governance.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <random>

using namespace kgov;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KGOV_FIXTURES_DIR;

std::vector<kg::GraphDocument> seed_graphs() {
    return kg::load_tracks(kFixtures / "kg");
}

std::vector<checks::CheckSpec> seed_manifest() {
    return checks::load_manifest(kFixtures / "eval/manifest.json");
}

} // namespace

TEST_CASE("authorize: the permission table is fixed") {
    CHECK(gov::authorize(gov::OpClass::Read, kg::RoleMode::Builder));
    CHECK(gov::authorize(gov::OpClass::Read, kg::RoleMode::Expert));
    CHECK(gov::authorize(gov::OpClass::StructureMutation, kg::RoleMode::Builder));
    CHECK_FALSE(gov::authorize(gov::OpClass::StructureMutation, kg::RoleMode::Expert));
    CHECK(gov::authorize(gov::OpClass::TaskExecution, kg::RoleMode::Expert));
    CHECK_FALSE(gov::authorize(gov::OpClass::TaskExecution, kg::RoleMode::Builder));
}

TEST_CASE("switch_role: transitions append to the audit log, self-switch is silent") {
    auto dir = fs::temp_directory_path() / "kgov-gov-audit";
    fs::remove_all(dir);
    fs::create_directories(dir);
    gov::AuditLog log(dir / "audit.log");

    auto mode = kg::RoleMode::Builder;
    mode = gov::switch_role(mode, kg::RoleMode::Expert, &log);
    CHECK(mode == kg::RoleMode::Expert);
    CHECK(log.entry_count() == 1);

    mode = gov::switch_role(mode, kg::RoleMode::Expert, &log);
    CHECK(mode == kg::RoleMode::Expert);
    CHECK(log.entry_count() == 1); // idempotent self-transition

    mode = gov::switch_role(mode, kg::RoleMode::Builder, &log);
    CHECK(mode == kg::RoleMode::Builder);
    CHECK(log.entry_count() == 2); // builder->expert->builder leaves two entries

    // each line is one JSON object with (ts, role, op, target)
    std::ifstream in(log.path());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto entry = nlohmann::json::parse(line);
        CHECK(entry.contains("ts"));
        CHECK(entry["op"] == "switch-role");
        CHECK((entry["role"] == "builder" || entry["role"] == "expert"));
        CHECK(entry.contains("target"));
    }
}

TEST_CASE("skill_spec: inputs, outputs, and governing behaviors from the graph") {
    auto graphs = seed_graphs();
    auto skill = gov::skill_spec(graphs, "skill:rbnerr-viz:refactor-ui-manager");

    CHECK(skill.id == "skill:rbnerr-viz:refactor-ui-manager");
    CHECK(skill.instruction_ref == "docs/skills/refactor-ui-manager.md");
    REQUIRE(skill.required_inputs.size() == 3);
    CHECK(skill.required_inputs[0].name == "legacy_source");
    CHECK(skill.required_inputs[0].type == "ecmascript-source");
    REQUIRE(skill.expected_outputs.size() == 1);
    CHECK(skill.expected_outputs[0].name == "ui_manager_module");

    REQUIRE(skill.governing_behaviors.size() == 3);
    CHECK(skill.governing_behaviors[0] ==
          "behavior:rbnerr-viz-builder:cross-module-event-contract");
    CHECK(skill.governing_behaviors[1] == "behavior:rbnerr-viz-builder:dom-id-preservation");
    CHECK(skill.governing_behaviors[2] ==
          "behavior:rbnerr-viz-builder:mutation-observer-replacement");
}

TEST_CASE("resolve_governing_behaviors: priority order, lexicographic ties") {
    auto graphs = seed_graphs();

    SUBCASE("step-4 skill: two Critical rules then the High rule") {
        auto skill = gov::skill_spec(graphs, "skill:rbnerr-viz:refactor-ui-manager");
        auto rules = gov::resolve_governing_behaviors(skill, graphs);
        REQUIRE(rules.size() == 3);
        CHECK(rules[0].id == "behavior:rbnerr-viz-builder:cross-module-event-contract");
        CHECK(rules[0].priority == kg::Priority::Critical);
        CHECK(rules[1].id == "behavior:rbnerr-viz-builder:dom-id-preservation");
        CHECK(rules[1].priority == kg::Priority::Critical);
        CHECK(rules[2].id == "behavior:rbnerr-viz-builder:mutation-observer-replacement");
        CHECK(rules[2].priority == kg::Priority::High);
    }

    SUBCASE("skill with no governing behaviors resolves to an empty list") {
        auto skill = gov::skill_spec(graphs, "skill:rbnerr-viz:analyze-legacy-monolith");
        CHECK(skill.governing_behaviors.empty());
        CHECK(gov::resolve_governing_behaviors(skill, graphs).empty());
    }

    SUBCASE("two same-priority rules order lexicographically by id") {
        // synthetic skill governed by two High rules
        auto graphs2 = graphs;
        for (auto& g : graphs2) {
            if (g.track != kg::Track::Behaviors) continue;
            auto rule = g.nodes.at("behavior:rbnerr-viz-builder:mutation-observer-replacement");
            rule.id = "behavior:rbnerr-viz-builder:aria-live-regions";
            rule.title = "ARIA Live Regions";
            rule.links.governs = {"skill:rbnerr-viz:refactor-chart-manager"};
            rule.links.references.clear();
            g.nodes.emplace(rule.id, rule);
        }
        auto skill = gov::skill_spec(graphs2, "skill:rbnerr-viz:refactor-chart-manager");
        auto rules = gov::resolve_governing_behaviors(skill, graphs2);
        REQUIRE(rules.size() == 3);
        CHECK(rules[0].priority == kg::Priority::Critical);
        CHECK(rules[1].id == "behavior:rbnerr-viz-builder:aria-live-regions");
        CHECK(rules[2].id == "behavior:rbnerr-viz-builder:mutation-observer-replacement");
    }

    SUBCASE("output is a permutation of the skill's governing behaviors") {
        for (const char* id :
             {"skill:rbnerr-viz:extract-config-module", "skill:rbnerr-viz:refactor-map-manager",
              "skill:rbnerr-viz:refactor-chart-manager", "skill:rbnerr-viz:refactor-ui-manager",
              "skill:rbnerr-viz:write-documentation"}) {
            auto skill = gov::skill_spec(graphs, id);
            auto rules = gov::resolve_governing_behaviors(skill, graphs);
            std::vector<std::string> got;
            for (const auto& r : rules) got.push_back(r.id);
            std::sort(got.begin(), got.end());
            auto want = skill.governing_behaviors; // already sorted
            CHECK(got == want);
        }
    }
}

TEST_CASE("behavior_rule: statements come from the node body, checks from the manifest") {
    auto graphs = seed_graphs();
    auto manifest = seed_manifest();
    auto rule = gov::behavior_rule(
        graphs, "behavior:rbnerr-viz-builder:mutation-observer-replacement", manifest);
    REQUIRE_FALSE(rule.statements.empty());
    CHECK(rule.statements[0] ==
          "Rule: Do not copy MutationObserver logic. Use direct event dispatch from sliders.");
    REQUIRE(rule.checks.size() == 1);
    CHECK(rule.checks[0].kind == checks::CheckKind::MustNotContain);
    CHECK(rule.governed_skills.size() == 2);
}

TEST_CASE("precheck_compliance") {
    auto graphs = seed_graphs();
    auto manifest = seed_manifest();

    SUBCASE("MutationObserver in a candidate violates the replacement rule") {
        auto rule = gov::behavior_rule(
            graphs, "behavior:rbnerr-viz-builder:mutation-observer-replacement", manifest);
        auto report = gov::precheck_compliance(
            "const watcher = new MutationObserver(update);", {rule});
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].rule ==
              "behavior:rbnerr-viz-builder:mutation-observer-replacement");
        CHECK(report.violations[0].evidence.find("MutationObserver") != std::string::npos);
    }

    SUBCASE("empty candidate, no rules: clean report") {
        CHECK(gov::precheck_compliance("", {}).clean());
    }

    SUBCASE("scenario-changed payload missing feet violates the event contract") {
        auto rule = gov::behavior_rule(
            graphs, "behavior:rbnerr-viz-builder:cross-module-event-contract", manifest);
        std::string candidate =
            "document.dispatchEvent(new CustomEvent('scenario-changed', "
            "{ detail: { year, level } }));";
        auto report = gov::precheck_compliance(candidate, {rule});
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].evidence.find("feet") != std::string::npos);

        std::string compliant =
            "document.dispatchEvent(new CustomEvent('scenario-changed', "
            "{ detail: { year, level, feet } }));";
        CHECK(gov::precheck_compliance(compliant, {rule}).clean());
    }

    SUBCASE("rules without checks are advisory and contribute nothing") {
        auto rule = gov::behavior_rule(
            graphs, "behavior:rbnerr-viz-builder:dom-id-preservation", {});
        CHECK(rule.checks.empty());
        CHECK(gov::precheck_compliance("anything at all", {rule}).clean());
    }

    SUBCASE("monotone: adding a rule never removes a violation") {
        auto mo = gov::behavior_rule(
            graphs, "behavior:rbnerr-viz-builder:mutation-observer-replacement", manifest);
        auto ev = gov::behavior_rule(
            graphs, "behavior:rbnerr-viz-builder:cross-module-event-contract", manifest);
        std::string candidate = "new MutationObserver(x)";
        auto small = gov::precheck_compliance(candidate, {mo});
        auto big = gov::precheck_compliance(candidate, {mo, ev});
        CHECK(big.violations.size() >= small.violations.size());
        for (const auto& v : small.violations) {
            bool still_there = false;
            for (const auto& w : big.violations)
                still_there |= w.rule == v.rule && w.evidence == v.evidence;
            CHECK(still_there);
        }
    }
}

TEST_CASE("permission monotonicity: expert-mode op sequences cannot change any graph") {
    auto graphs = seed_graphs();
    auto before = graphs;

    std::mt19937 rng(99);
    for (int i = 0; i < 300; ++i) {
        auto& g = graphs[rng() % graphs.size()];
        int op = static_cast<int>(rng() % 3);
        try {
            switch (op) {
                case 0: {
                    kg::KnowledgeNode n;
                    n.id = "knowledge:intruder-" + std::to_string(i);
                    n.kind = kg::NodeKind::Concept;
                    n.title = "intruder";
                    n.parent = g.root;
                    g = kg::add_node(g, n, kg::RoleMode::Expert);
                    break;
                }
                case 1:
                    kg::query(graphs, kg::Selector::by_kind(kg::NodeKind::Skill));
                    break;
                case 2:
                    kg::validate_graph(g, graphs);
                    break;
            }
        } catch (const PermissionDenied&) {
            // expected for mutation attempts
        }
    }

    REQUIRE(graphs.size() == before.size());
    for (size_t i = 0; i < graphs.size(); ++i) {
        CHECK(graphs[i].root == before[i].root);
        CHECK(graphs[i].nodes == before[i].nodes);
    }
}
