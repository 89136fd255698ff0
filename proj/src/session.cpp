#include "kgov/session.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

using nlohmann::json;
using nlohmann::ordered_json;

namespace kgov::session {

std::string to_string(EntryKind k) {
    switch (k) {
        case EntryKind::ConfigKey: return "config-key";
        case EntryKind::ClassSignature: return "class-signature";
        case EntryKind::EventContract: return "event-contract";
        case EntryKind::DomId: return "dom-id";
        case EntryKind::Pattern: return "pattern";
    }
    return "pattern";
}

std::optional<EntryKind> entry_kind_from(const std::string& s) {
    if (s == "config-key") return EntryKind::ConfigKey;
    if (s == "class-signature") return EntryKind::ClassSignature;
    if (s == "event-contract") return EntryKind::EventContract;
    if (s == "dom-id") return EntryKind::DomId;
    if (s == "pattern") return EntryKind::Pattern;
    return std::nullopt;
}

namespace {

std::string slugify(const std::string& text) {
    std::string out;
    bool prev_dash = true;
    for (char c : text) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            out.push_back(c);
            prev_dash = false;
        } else if (!prev_dash) {
            out.push_back('-');
            prev_dash = true;
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

} // namespace

LearningOutcome learning_cycle(const DiscoveryCandidate& candidate,
                               const std::vector<kg::GraphDocument>& graphs,
                               const SessionState& state, CycleMode mode,
                               const std::optional<kg::NodeId>& promote_under,
                               const ApprovalFn& approve) {
    // 1. discovery: the candidate itself, reported by the provider adapter.
    // 2. structuring: formalize into a typed entry (and node draft if promoted).
    auto kind = entry_kind_from(candidate.proposed_kind);

    StateEntry entry;
    if (kind) entry.kind = *kind;
    entry.key = candidate.proposed_key;
    entry.value = candidate.proposed_value;
    entry.origin_step = candidate.origin_step;
    entry.validated = false;

    std::optional<kg::KnowledgeNode> draft;
    if (promote_under) {
        kg::KnowledgeNode node;
        node.id = "knowledge:learned:" + slugify(candidate.proposed_key);
        node.kind = kg::NodeKind::Concept;
        node.title = candidate.proposed_key;
        node.content = candidate.proposed_value;
        node.metadata.created = kg::utc_now();
        node.metadata.updated = node.metadata.created;
        node.metadata.version = 1;

        // 3. linking: attach the draft under the named category.
        const kg::KnowledgeNode* parent = kg::find_node(graphs, *promote_under);
        if (!parent) throw LinkTargetMissing(*promote_under);
        node.parent = *promote_under;
        draft = std::move(node);
    }

    // 4. validation: schema gate, plus builder approval in reviewed mode.
    if (!kind)
        throw ValidationFailed("unknown entry kind '" + candidate.proposed_kind + "'");
    if (candidate.raw.empty())
        throw ValidationFailed("candidate has no source span");
    if (entry.key.empty())
        throw ValidationFailed("candidate has no key");
    if (candidate.origin_step < 1)
        throw ValidationFailed("origin_step must be >= 1");
    for (const auto& existing : state.entries) {
        if (existing.kind == entry.kind && existing.key == entry.key)
            throw ValidationFailed("entry (" + to_string(entry.kind) + ", " + entry.key +
                                   ") already present");
    }
    if (mode == CycleMode::Reviewed) {
        if (!approve || !approve(entry, draft))
            throw ApprovalWithheld("builder approval withheld for '" + entry.key + "'");
    }

    // 5. persistence: append the validated entry; add the node in builder role.
    LearningOutcome out;
    out.state = state;
    entry.validated = true;
    out.state.entries.push_back(entry);

    if (draft) {
        const kg::GraphDocument* track = nullptr;
        for (const auto& g : graphs)
            if (g.find(*promote_under)) track = &g;
        out.updated_track = kg::add_node(*track, *draft, kg::RoleMode::Builder);
        out.node = std::move(draft);
    }
    return out;
}

std::vector<StateEntry> inject_state(const SessionState& state, int step) {
    std::vector<StateEntry> out;
    for (const auto& e : state.entries)
        if (e.validated && e.origin_step < step) out.push_back(e);
    return out;
}

SessionState load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedDocument("cannot read " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw MalformedDocument(path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        throw MalformedDocument(path.string() + ": not a session state document");

    SessionState state;
    state.phase = doc.value("phase", "");
    state.version = doc.value("version", 1);
    for (const auto& obj : doc["entries"]) {
        StateEntry e;
        auto kind = entry_kind_from(obj.value("kind", ""));
        if (!kind) throw MalformedDocument(path.string() + ": bad entry kind");
        e.kind = *kind;
        e.key = obj.value("key", "");
        e.value = obj.value("value", "");
        e.origin_step = obj.value("origin_step", 0);
        e.validated = obj.value("validated", false);
        state.entries.push_back(std::move(e));
    }
    return state;
}

void persist_state(SessionState& state, const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        SessionState disk = load_state(path);
        if (disk.version > state.version)
            throw StaleWrite("state file is at version " + std::to_string(disk.version) +
                             ", in-memory base is " + std::to_string(state.version));
    }

    state.version += 1;

    ordered_json doc;
    doc["phase"] = state.phase;
    doc["version"] = state.version;
    ordered_json entries = ordered_json::array();
    for (const auto& e : state.entries) {
        entries.push_back({{"kind", to_string(e.kind)},
                           {"key", e.key},
                           {"value", e.value},
                           {"origin_step", e.origin_step},
                           {"validated", e.validated}});
    }
    doc["entries"] = std::move(entries);

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

std::optional<DiscoveryCandidate> parse_state_line(const std::string& line, int step) {
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
        trimmed.pop_back();
    size_t start = trimmed.find_first_not_of(' ');
    if (start == std::string::npos) return std::nullopt;
    trimmed = trimmed.substr(start);

    size_t kind_end = trimmed.find(' ');
    if (kind_end == std::string::npos) return std::nullopt;
    size_t eq = trimmed.find(" = ", kind_end);
    if (eq == std::string::npos) return std::nullopt;

    DiscoveryCandidate c;
    c.raw = trimmed;
    c.proposed_kind = trimmed.substr(0, kind_end);
    c.proposed_key = trimmed.substr(kind_end + 1, eq - kind_end - 1);
    c.proposed_value = trimmed.substr(eq + 3);
    c.origin_step = step;
    if (c.proposed_key.empty()) return std::nullopt;
    return c;
}

std::vector<DiscoveryCandidate> parse_state_block(const std::string& assistant_text, int step) {
    std::vector<DiscoveryCandidate> out;
    std::istringstream in(assistant_text);
    std::string line;
    bool in_block = false;
    while (std::getline(in, line)) {
        while (!line.empty() && line.back() == '\r') line.pop_back();
        if (!in_block) {
            if (line == "```STATE:") in_block = true;
            continue;
        }
        if (line == "```") {
            in_block = false;
            continue;
        }
        if (auto c = parse_state_line(line, step)) out.push_back(std::move(*c));
    }
    return out;
}

} // namespace kgov::session
