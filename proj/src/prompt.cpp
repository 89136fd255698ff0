#include "kgov/prompt.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace kgov::prompt {

std::string heading(SectionName name) {
    switch (name) {
        case SectionName::RoleAndContext: return "## Role & Context";
        case SectionName::MandatoryConstraints: return "## Mandatory Constraints (Critical Priority)";
        case SectionName::RequiredConstraints: return "## Required Constraints (High Priority)";
        case SectionName::AdvisoryNotes: return "## Advisory Notes";
        case SectionName::AccumulatedState: return "## Accumulated State";
    }
    return "##";
}

int estimate_tokens(std::string_view text) {
    return static_cast<int>((text.size() + 3) / 4);
}

std::string render_state_entry(const session::StateEntry& entry) {
    std::string origin =
        entry.origin_step == 0 ? "seed" : "step " + std::to_string(entry.origin_step);
    return "- [" + to_string(entry.kind) + "] " + entry.key + ": " + entry.value + " (" +
           origin + ")";
}

namespace {

struct ConstraintBlock {
    kg::NodeId id;
    std::string body;        // full node body, trailing whitespace trimmed
    std::string first_statement;
    bool compressed = false; // render first_statement instead of body
};

std::string trim_trailing(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
        text.pop_back();
    return text;
}

std::string render_blocks(const std::vector<ConstraintBlock>& blocks) {
    std::string out;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += "--- id: " + blocks[i].id + " ---\n";
        out += blocks[i].compressed ? blocks[i].first_statement : blocks[i].body;
    }
    return out;
}

std::string first_statement_of(const std::string& body) {
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        return line;
    }
    return body;
}

struct Layout {
    std::string role_body;
    std::vector<ConstraintBlock> mandatory;
    std::vector<ConstraintBlock> required;
    std::vector<ConstraintBlock> advisory;
    std::vector<std::string> state_lines;
};

std::string render(const Layout& l) {
    std::string out = heading(SectionName::RoleAndContext) + "\n" + l.role_body + "\n";
    auto emit = [&out](SectionName name, const std::string& body) {
        if (body.empty()) return;
        out += "\n" + heading(name) + "\n" + body + "\n";
    };
    emit(SectionName::MandatoryConstraints, render_blocks(l.mandatory));
    emit(SectionName::RequiredConstraints, render_blocks(l.required));
    emit(SectionName::AdvisoryNotes, render_blocks(l.advisory));
    if (!l.state_lines.empty()) {
        std::string body;
        for (size_t i = 0; i < l.state_lines.size(); ++i) {
            if (i > 0) body += "\n";
            body += l.state_lines[i];
        }
        emit(SectionName::AccumulatedState, body);
    }
    return out;
}

std::vector<kg::NodeId> block_ids(const std::vector<ConstraintBlock>& blocks) {
    std::vector<kg::NodeId> out;
    for (const auto& b : blocks) out.push_back(b.id);
    return out;
}

} // namespace

AssembledPrompt assemble_prompt(int step, const gov::SkillSpec& skill,
                                const std::vector<kg::GraphDocument>& graphs,
                                const session::SessionState& state,
                                const std::optional<TokenBudget>& budget) {
    const kg::KnowledgeNode* skill_node = kg::find_node(graphs, skill.id);
    if (!skill_node) throw UnknownNode(skill.id);

    auto body_of = [&graphs](const kg::NodeId& id) {
        const kg::KnowledgeNode* node = kg::find_node(graphs, id);
        if (!node) throw UnknownNode(id);
        for (const auto& g : graphs)
            if (g.find(id)) return trim_trailing(kg::node_body(g, *node));
        return std::string();
    };

    Layout layout;
    layout.role_body =
        "You are performing step " + std::to_string(step) + ": " + skill_node->title + ".";

    auto rules = gov::resolve_governing_behaviors(skill, graphs);
    for (const auto& rule : rules) {
        ConstraintBlock block;
        block.id = rule.id;
        block.body = body_of(rule.id);
        block.first_statement = rule.statements.empty() ? block.body : rule.statements.front();
        switch (rule.priority) {
            case kg::Priority::Critical: layout.mandatory.push_back(std::move(block)); break;
            case kg::Priority::High: layout.required.push_back(std::move(block)); break;
            case kg::Priority::Medium: layout.advisory.push_back(std::move(block)); break;
        }
    }

    // linked knowledge travels in the advisory section, after Medium behaviors
    for (const auto& ref : skill_node->links.references) {
        ConstraintBlock block;
        block.id = ref;
        block.body = body_of(ref);
        block.first_statement = first_statement_of(block.body);
        layout.advisory.push_back(std::move(block));
    }

    for (const auto& entry : session::inject_state(state, step))
        layout.state_lines.push_back(render_state_entry(entry));

    AssembledPrompt result;

    if (budget) {
        // infeasibility is judged on the untruncatable floor
        Layout floor;
        floor.role_body = layout.role_body;
        floor.mandatory = layout.mandatory;
        if (estimate_tokens(render(floor)) > budget->max_tokens)
            throw BudgetInfeasible("role and critical constraints alone estimate " +
                                   std::to_string(estimate_tokens(render(floor))) +
                                   " tokens against a budget of " +
                                   std::to_string(budget->max_tokens));

        while (estimate_tokens(render(layout)) > budget->max_tokens && !layout.advisory.empty()) {
            result.truncated.push_back(layout.advisory.back().id);
            layout.advisory.pop_back();
        }
        for (auto it = layout.required.rbegin();
             it != layout.required.rend() && estimate_tokens(render(layout)) > budget->max_tokens;
             ++it) {
            it->compressed = true;
            result.truncated.push_back(it->id);
        }
        if (estimate_tokens(render(layout)) > budget->max_tokens)
            throw BudgetInfeasible("prompt still estimates " +
                                   std::to_string(estimate_tokens(render(layout))) +
                                   " tokens after truncation; budget " +
                                   std::to_string(budget->max_tokens));
    }

    auto add_section = [&result](SectionName name, std::string body,
                                 std::vector<kg::NodeId> sources) {
        if (body.empty()) return;
        result.sections.push_back({name, std::move(body), std::move(sources)});
    };

    add_section(SectionName::RoleAndContext, layout.role_body, {skill.id});
    add_section(SectionName::MandatoryConstraints, render_blocks(layout.mandatory),
                block_ids(layout.mandatory));
    add_section(SectionName::RequiredConstraints, render_blocks(layout.required),
                block_ids(layout.required));
    add_section(SectionName::AdvisoryNotes, render_blocks(layout.advisory),
                block_ids(layout.advisory));
    if (!layout.state_lines.empty()) {
        std::string body;
        for (size_t i = 0; i < layout.state_lines.size(); ++i) {
            if (i > 0) body += "\n";
            body += layout.state_lines[i];
        }
        add_section(SectionName::AccumulatedState, std::move(body), {});
    }

    result.rendered = render(layout);
    result.estimated_tokens = estimate_tokens(result.rendered);

    std::set<kg::NodeId> seen;
    auto add_source = [&](const kg::NodeId& id) {
        if (seen.insert(id).second) result.sources.push_back(id);
    };
    add_source(skill.id);
    for (const auto& section : result.sections)
        for (const auto& id : section.sources) add_source(id);

    return result;
}

} // namespace kgov::prompt
