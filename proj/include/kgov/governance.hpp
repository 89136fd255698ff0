#pragma once
// Behavior resolution, pre-execution compliance checks, and role gating.
//
// Builder mutates system structure and never executes tasks; Expert executes
// tasks and never mutates structure. Role switches and structure mutations
// are recorded in an append-only audit log.

#include "kgov/checks.hpp"
#include "kgov/kg.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kgov::gov {

struct BehaviorRule {
    kg::NodeId id;
    kg::Priority priority = kg::Priority::Medium;
    std::vector<std::string> statements;      // rule lines from the node body
    std::vector<checks::CheckSpec> checks;    // machine-checkable form, if any
    std::vector<kg::NodeId> governed_skills;  // mirrors the node's governs links
};

struct SkillParam {
    std::string name;
    std::string type;
};

struct SkillSpec {
    kg::NodeId id;
    std::vector<SkillParam> required_inputs;
    std::vector<SkillParam> expected_outputs;
    std::vector<kg::NodeId> governing_behaviors; // behaviors whose governs name this skill
    std::string instruction_ref;                 // content path of the step template
};

enum class OpClass { StructureMutation, TaskExecution, Read };

std::string to_string(OpClass c);

// structure-mutation -> builder only, task-execution -> expert only,
// read -> both. Fixed at construction; authorize() is a pure lookup.
struct PermissionTable {
    bool allows(OpClass op, kg::RoleMode role) const;
};

bool authorize(OpClass op, kg::RoleMode role, const PermissionTable& table = {});

// Append-only JSON-lines audit channel: one object per event with
// (ts, role, op, target).
class AuditLog {
public:
    AuditLog() = default;
    explicit AuditLog(std::filesystem::path path) : path_(std::move(path)) {}

    void append(kg::RoleMode actor, const std::string& op, const std::string& target);
    size_t entry_count() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Returns the new active mode. A self-transition is a no-op and leaves the
// audit log untouched.
kg::RoleMode switch_role(kg::RoleMode current, kg::RoleMode target, AuditLog* log = nullptr);

// Builds the BehaviorRule for one behavior node. Checks are attached from the
// manifest by matching their source behavior id.
BehaviorRule behavior_rule(const std::vector<kg::GraphDocument>& graphs, const kg::NodeId& id,
                           const std::vector<checks::CheckSpec>& manifest = {});

// Materializes a SkillSpec from a skill node: inputs/outputs parsed from the
// node's step template, governing behaviors gathered from the behavior track.
SkillSpec skill_spec(const std::vector<kg::GraphDocument>& graphs, const kg::NodeId& id);

// Governing behaviors sorted Critical > High > Medium, ties broken
// lexicographically by id. Throws UnknownNode when a behavior is missing.
std::vector<BehaviorRule> resolve_governing_behaviors(
    const SkillSpec& skill, const std::vector<kg::GraphDocument>& graphs,
    const std::vector<checks::CheckSpec>& manifest = {});

struct ComplianceViolation {
    kg::NodeId rule;
    std::string evidence;
};

struct ComplianceReport {
    std::vector<ComplianceViolation> violations;
    bool clean() const { return violations.empty(); }
};

// Runs every rule's machine-checkable checks against a candidate action text.
// Rules without checks are advisory and contribute nothing.
ComplianceReport precheck_compliance(const std::string& candidate,
                                     const std::vector<BehaviorRule>& rules);

} // namespace kgov::gov
