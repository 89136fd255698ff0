#pragma once
// Three-track knowledge graph substrate.
//
// Each track (knowledge / behaviors / skills) is one single-rooted tree
// persisted as a JSON document. Parents live inside a track; links may
// cross tracks. Graphs are immutable values after load: mutation returns
// a new value, persistence is single-writer with stale-write detection.

#include "kgov/errors.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgov::kg {

using NodeId = std::string;

// namespace(:scope)*:name, lowercase kebab-case segments, at least two
bool valid_node_id(const NodeId& id);

// ISO-8601 UTC, second resolution
std::string utc_now();

enum class NodeKind { Category, Concept, Document, Behavior, Skill };
enum class Priority { Critical, High, Medium };
enum class Track { Knowledge, Behaviors, Skills };

std::string to_string(NodeKind k);
std::string to_string(Priority p);
std::string to_string(Track t);
std::optional<NodeKind> node_kind_from(const std::string& s);
std::optional<Priority> priority_from(const std::string& s);
std::optional<Track> track_from(const std::string& s);

struct LinkSet {
    std::vector<NodeId> governs;
    std::vector<NodeId> enforces;
    std::vector<NodeId> references;

    bool empty() const { return governs.empty() && enforces.empty() && references.empty(); }
    bool operator==(const LinkSet&) const = default;
};

struct NodeMeta {
    std::string created;   // ISO-8601 UTC
    std::string updated;   // ISO-8601 UTC
    int version = 1;       // monotone, bumped by any mutating operation

    bool operator==(const NodeMeta&) const = default;
};

struct KnowledgeNode {
    NodeId id;
    NodeKind kind = NodeKind::Concept;
    std::string title;
    std::optional<NodeId> parent;          // absent only on the root
    LinkSet links;
    std::optional<Priority> priority;      // required iff kind == Behavior
    std::optional<std::string> content;    // mutually exclusive with content_ref
    std::optional<std::string> content_ref;
    NodeMeta metadata;

    bool operator==(const KnowledgeNode&) const = default;
};

struct GraphDocument {
    Track track = Track::Knowledge;
    NodeId root;
    std::map<NodeId, KnowledgeNode> nodes;

    // Directory the document was loaded from; resolves content_ref targets.
    // Not serialized.
    std::filesystem::path base_dir;

    const KnowledgeNode* find(const NodeId& id) const;
};

// One invariant breach found by validate_graph. Violations are data, not errors.
struct Violation {
    std::string code;     // e.g. CycleDetected, DanglingParent, BrokenLink
    NodeId node;
    std::string detail;
};

using ValidationReport = std::vector<Violation>;

enum class RoleMode { Builder, Expert };

std::string to_string(RoleMode m);

// ── persistence ──────────────────────────────────────────────────────

// Parses one track document. Checks per-node field presence and types only;
// structural validation is validate_graph. Throws MalformedDocument or
// SchemaViolation.
GraphDocument load_graph(const std::filesystem::path& path);

// Writes the document. Rejects with StaleWrite when any on-disk node carries
// a strictly newer version than its in-memory counterpart.
void save_graph(const GraphDocument& g, const std::filesystem::path& path);

// Loads knowledge.json / behaviors.json / skills.json from a directory.
std::vector<GraphDocument> load_tracks(const std::filesystem::path& dir);

// Reads a node's body: inline content, or the content_ref file resolved
// against the document's base_dir. Empty string when the node has neither.
std::string node_body(const GraphDocument& g, const KnowledgeNode& node);

// Parses a single-node document {"track": ..., "id": ..., <node fields>}.
// Metadata defaults to version 1 with current timestamps when absent.
std::pair<Track, KnowledgeNode> load_node_file(const std::filesystem::path& path);

std::string node_to_json_text(const KnowledgeNode& node);

// ── validation ───────────────────────────────────────────────────────

// Enumerates every invariant breach: id grammar, root/parent structure,
// cycles, reachability, priority presence, content exclusivity, link
// resolution (against g plus peers), duplicate ids across tracks.
ValidationReport validate_graph(const GraphDocument& g,
                                const std::vector<GraphDocument>& peers = {});

// ── mutation ─────────────────────────────────────────────────────────

// Returns a copy of g with the node added (version forced to 1). Throws
// PermissionDenied unless role is Builder, DuplicateId, DanglingParent,
// or SchemaViolation when the node itself is ill-formed.
GraphDocument add_node(const GraphDocument& g, KnowledgeNode node, RoleMode role);

// ── query ────────────────────────────────────────────────────────────

struct LinkStep {
    enum Field { Governs, Enforces, References } field = References;
    bool inverse = false;
};

struct Selector {
    enum Kind { ChildrenOf, ByKind, ByPriority, LinkClosure } kind = ByKind;
    NodeId id;                    // ChildrenOf / LinkClosure
    NodeKind node_kind = NodeKind::Concept;
    Priority priority = Priority::Medium;
    std::vector<LinkStep> steps;  // LinkClosure: union of edge kinds to follow

    static Selector children_of(NodeId id);
    static Selector by_kind(NodeKind k);
    static Selector by_priority(Priority p);
    static Selector link_closure(NodeId id, std::vector<LinkStep> steps);
};

// Runs one selector over the union of the given graphs. Results are sorted
// lexicographically by id; equal inputs yield byte-identical output order.
// Throws UnknownNode when a selector id does not resolve.
std::vector<KnowledgeNode> query(const std::vector<GraphDocument>& graphs,
                                 const Selector& selector);

// Looks a node up across tracks.
const KnowledgeNode* find_node(const std::vector<GraphDocument>& graphs, const NodeId& id);
const GraphDocument* find_track(const std::vector<GraphDocument>& graphs, Track t);

} // namespace kgov::kg
