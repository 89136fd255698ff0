#pragma once
// Per-session phase memory: typed state entries accumulated by the
// five-stage learning cycle (discover, structure, link, validate, persist)
// and injected into each subsequent step's prompt.

#include "kgov/kg.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kgov::session {

enum class EntryKind { ConfigKey, ClassSignature, EventContract, DomId, Pattern };

std::string to_string(EntryKind k);
std::optional<EntryKind> entry_kind_from(const std::string& s);

struct StateEntry {
    EntryKind kind = EntryKind::Pattern;
    std::string key;
    std::string value;
    int origin_step = 0;       // 0 = seed
    bool validated = false;    // only validated entries are injectable

    bool operator==(const StateEntry&) const = default;
};

struct SessionState {
    std::vector<StateEntry> entries;  // append-only within a session
    std::string phase;
    int version = 1;                  // bumped by persist_state

    bool operator==(const SessionState&) const = default;
};

// A raw discovery reported by a provider adapter, not yet validated.
// proposed_kind stays textual until the validation stage parses it.
struct DiscoveryCandidate {
    std::string raw;
    std::string proposed_kind;
    std::string proposed_key;
    std::string proposed_value;
    int origin_step = 1;
};

enum class CycleMode { Auto, Reviewed };

using ApprovalFn =
    std::function<bool(const StateEntry&, const std::optional<kg::KnowledgeNode>&)>;

struct LearningOutcome {
    SessionState state;
    std::optional<kg::KnowledgeNode> node;          // created when promoted
    std::optional<kg::GraphDocument> updated_track; // track holding the new node
};

// Runs the five stages in order. On any failure nothing is persisted and the
// input state is left untouched. When promote_under names a category, the
// candidate is additionally structured into a knowledge node, linked under
// that category, and added in builder role.
// Throws ValidationFailed, ApprovalWithheld, LinkTargetMissing.
LearningOutcome learning_cycle(const DiscoveryCandidate& candidate,
                               const std::vector<kg::GraphDocument>& graphs,
                               const SessionState& state, CycleMode mode,
                               const std::optional<kg::NodeId>& promote_under = std::nullopt,
                               const ApprovalFn& approve = nullptr);

// Exactly the validated entries with origin_step < step, in append order.
std::vector<StateEntry> inject_state(const SessionState& state, int step);

// Bumps the version, then writes. Rejects with StaleWrite when the on-disk
// version is newer than the state this write is based on.
void persist_state(SessionState& state, const std::filesystem::path& path);

SessionState load_state(const std::filesystem::path& path);

// Parses the fenced STATE block a provider may emit after its answer:
//   ```STATE:
//   <kind> <key> = <value>
//   ```
// Returns one candidate per well-formed line; origin_step is stamped from
// the current workflow step.
std::vector<DiscoveryCandidate> parse_state_block(const std::string& assistant_text, int step);

// Parses one "<kind> <key> = <value>" line.
std::optional<DiscoveryCandidate> parse_state_line(const std::string& line, int step);

} // namespace kgov::session
