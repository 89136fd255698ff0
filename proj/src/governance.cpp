#include "kgov/governance.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace kgov::gov {

std::string to_string(OpClass c) {
    switch (c) {
        case OpClass::StructureMutation: return "structure-mutation";
        case OpClass::TaskExecution: return "task-execution";
        case OpClass::Read: return "read";
    }
    return "read";
}

bool PermissionTable::allows(OpClass op, kg::RoleMode role) const {
    switch (op) {
        case OpClass::StructureMutation: return role == kg::RoleMode::Builder;
        case OpClass::TaskExecution: return role == kg::RoleMode::Expert;
        case OpClass::Read: return true;
    }
    return false;
}

bool authorize(OpClass op, kg::RoleMode role, const PermissionTable& table) {
    return table.allows(op, role);
}

void AuditLog::append(kg::RoleMode actor, const std::string& op, const std::string& target) {
    if (path_.empty()) return;
    nlohmann::ordered_json entry{{"ts", kg::utc_now()},
                                 {"role", kg::to_string(actor)},
                                 {"op", op},
                                 {"target", target}};
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error("cannot append to audit log " + path_.string());
    out << entry.dump() << "\n";
}

size_t AuditLog::entry_count() const {
    std::ifstream in(path_);
    if (!in) return 0;
    size_t n = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

kg::RoleMode switch_role(kg::RoleMode current, kg::RoleMode target, AuditLog* log) {
    if (current == target) return current;
    if (log) log->append(current, "switch-role", kg::to_string(target));
    return target;
}

namespace {

// Statements are the non-empty body lines minus markdown headings.
std::vector<std::string> statements_of(const std::string& body) {
    std::vector<std::string> out;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

} // namespace

BehaviorRule behavior_rule(const std::vector<kg::GraphDocument>& graphs, const kg::NodeId& id,
                           const std::vector<checks::CheckSpec>& manifest) {
    const kg::KnowledgeNode* node = kg::find_node(graphs, id);
    if (!node) throw UnknownNode(id);
    if (node->kind != kg::NodeKind::Behavior)
        throw Error("node '" + id + "' is not a behavior");

    BehaviorRule rule;
    rule.id = id;
    rule.priority = node->priority.value_or(kg::Priority::Medium);
    rule.governed_skills = node->links.governs;

    const kg::GraphDocument* track = nullptr;
    for (const auto& g : graphs)
        if (g.find(id)) track = &g;
    rule.statements = statements_of(kg::node_body(*track, *node));

    for (const auto& check : manifest)
        if (check.behavior && *check.behavior == id) rule.checks.push_back(check);

    return rule;
}

namespace {

// Step templates open with an inputs/outputs header:
//   Inputs:
//   - name: semantic-type
//   Outputs:
//   - name: semantic-type
std::pair<std::vector<SkillParam>, std::vector<SkillParam>> parse_params(const std::string& body) {
    std::vector<SkillParam> inputs, outputs;
    std::vector<SkillParam>* current = nullptr;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line == "Inputs:") {
            current = &inputs;
        } else if (line == "Outputs:") {
            current = &outputs;
        } else if (current && line.rfind("- ", 0) == 0) {
            auto sep = line.find(": ");
            if (sep == std::string::npos) continue;
            current->push_back({line.substr(2, sep - 2), line.substr(sep + 2)});
        } else if (!line.empty() && line.rfind("- ", 0) != 0) {
            current = nullptr;
        }
    }
    return {inputs, outputs};
}

} // namespace

SkillSpec skill_spec(const std::vector<kg::GraphDocument>& graphs, const kg::NodeId& id) {
    const kg::KnowledgeNode* node = kg::find_node(graphs, id);
    if (!node) throw UnknownNode(id);
    if (node->kind != kg::NodeKind::Skill)
        throw Error("node '" + id + "' is not a skill");

    SkillSpec spec;
    spec.id = id;
    spec.instruction_ref = node->content_ref.value_or("");

    const kg::GraphDocument* track = nullptr;
    for (const auto& g : graphs)
        if (g.find(id)) track = &g;
    auto [inputs, outputs] = parse_params(kg::node_body(*track, *node));
    spec.required_inputs = std::move(inputs);
    spec.expected_outputs = std::move(outputs);

    // governs links point behavior -> skill; invert them here
    for (const auto& g : graphs) {
        if (g.track != kg::Track::Behaviors) continue;
        for (const auto& [bid, bnode] : g.nodes) {
            const auto& governs = bnode.links.governs;
            if (std::find(governs.begin(), governs.end(), id) != governs.end())
                spec.governing_behaviors.push_back(bid);
        }
    }
    std::sort(spec.governing_behaviors.begin(), spec.governing_behaviors.end());

    return spec;
}

std::vector<BehaviorRule> resolve_governing_behaviors(
    const SkillSpec& skill, const std::vector<kg::GraphDocument>& graphs,
    const std::vector<checks::CheckSpec>& manifest) {
    std::vector<BehaviorRule> rules;
    rules.reserve(skill.governing_behaviors.size());
    for (const auto& id : skill.governing_behaviors)
        rules.push_back(behavior_rule(graphs, id, manifest));

    std::stable_sort(rules.begin(), rules.end(), [](const BehaviorRule& a, const BehaviorRule& b) {
        if (a.priority != b.priority)
            return static_cast<int>(a.priority) < static_cast<int>(b.priority);
        return a.id < b.id;
    });
    return rules;
}

ComplianceReport precheck_compliance(const std::string& candidate,
                                     const std::vector<BehaviorRule>& rules) {
    ComplianceReport report;
    const std::vector<std::string> outputs{candidate};
    for (const auto& rule : rules) {
        for (const auto& check : rule.checks) {
            auto outcome = checks::evaluate_check(check, 1, outputs);
            if (!outcome.passed)
                report.violations.push_back({rule.id, outcome.evidence});
        }
    }
    return report;
}

} // namespace kgov::gov
