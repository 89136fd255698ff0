#pragma once
// Step-specific governed system prompt assembly.
//
// Sections render in a fixed order with `--- id: <node-id> ---` delimiters
// before each constraint body. Critical behaviors and accumulated state are
// never truncated; advisory notes drop first, then High-priority bodies
// compress to their first statement.

#include "kgov/governance.hpp"
#include "kgov/kg.hpp"
#include "kgov/session.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgov::prompt {

enum class SectionName {
    RoleAndContext,
    MandatoryConstraints,
    RequiredConstraints,
    AdvisoryNotes,
    AccumulatedState,
};

std::string heading(SectionName name);

struct PromptSection {
    SectionName name = SectionName::RoleAndContext;
    std::string body;
    std::vector<kg::NodeId> sources;
};

struct TokenBudget {
    int max_tokens = 0;
};

struct AssembledPrompt {
    std::vector<PromptSection> sections;   // fixed order, empty sections omitted
    std::string rendered;
    int estimated_tokens = 0;
    std::vector<kg::NodeId> truncated;     // nodes dropped or compressed for budget
    std::vector<kg::NodeId> sources;       // every node id used
};

// ceil(character count / 4)
int estimate_tokens(std::string_view text);

// Builds the governed prompt for one step. Throws BudgetInfeasible when the
// untruncatable content alone exceeds the budget.
AssembledPrompt assemble_prompt(int step, const gov::SkillSpec& skill,
                                const std::vector<kg::GraphDocument>& graphs,
                                const session::SessionState& state,
                                const std::optional<TokenBudget>& budget = std::nullopt);

// One accumulated-state line: `- [<kind>] <key>: <value> (<seed|step N>)`
std::string render_state_entry(const session::StateEntry& entry);

} // namespace kgov::prompt
