#include "kgov/kg.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;
using nlohmann::ordered_json;

namespace kgov::kg {

bool valid_node_id(const NodeId& id) {
    if (id.empty()) return false;
    size_t segments = 0;
    size_t start = 0;
    while (start <= id.size()) {
        size_t end = id.find(':', start);
        if (end == std::string::npos) end = id.size();
        if (end == start) return false; // empty segment
        // lowercase kebab-case: [a-z0-9]+(-[a-z0-9]+)*
        bool prev_dash = true; // no leading dash
        for (size_t i = start; i < end; ++i) {
            char c = id[i];
            if (c == '-') {
                if (prev_dash) return false;
                prev_dash = true;
            } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
                prev_dash = false;
            } else {
                return false;
            }
        }
        if (prev_dash) return false; // trailing dash
        ++segments;
        if (end == id.size()) break;
        start = end + 1;
    }
    return segments >= 2;
}

std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Category: return "category";
        case NodeKind::Concept: return "concept";
        case NodeKind::Document: return "document";
        case NodeKind::Behavior: return "behavior";
        case NodeKind::Skill: return "skill";
    }
    return "concept";
}

std::string to_string(Priority p) {
    switch (p) {
        case Priority::Critical: return "Critical";
        case Priority::High: return "High";
        case Priority::Medium: return "Medium";
    }
    return "Medium";
}

std::string to_string(Track t) {
    switch (t) {
        case Track::Knowledge: return "knowledge";
        case Track::Behaviors: return "behaviors";
        case Track::Skills: return "skills";
    }
    return "knowledge";
}

std::string to_string(RoleMode m) {
    return m == RoleMode::Builder ? "builder" : "expert";
}

std::optional<NodeKind> node_kind_from(const std::string& s) {
    if (s == "category") return NodeKind::Category;
    if (s == "concept") return NodeKind::Concept;
    if (s == "document") return NodeKind::Document;
    if (s == "behavior") return NodeKind::Behavior;
    if (s == "skill") return NodeKind::Skill;
    return std::nullopt;
}

std::optional<Priority> priority_from(const std::string& s) {
    if (s == "Critical") return Priority::Critical;
    if (s == "High") return Priority::High;
    if (s == "Medium") return Priority::Medium;
    return std::nullopt;
}

std::optional<Track> track_from(const std::string& s) {
    if (s == "knowledge") return Track::Knowledge;
    if (s == "behaviors") return Track::Behaviors;
    if (s == "skills") return Track::Skills;
    return std::nullopt;
}

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[24];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

const KnowledgeNode* GraphDocument::find(const NodeId& id) const {
    auto it = nodes.find(id);
    return it == nodes.end() ? nullptr : &it->second;
}

// ── load / save ──────────────────────────────────────────────────────

namespace {

std::string require_string(const json& obj, const char* field, const NodeId& node) {
    if (!obj.contains(field) || !obj[field].is_string())
        throw SchemaViolation(field, node);
    return obj[field].get<std::string>();
}

std::vector<NodeId> read_id_list(const json& obj, const char* field, const NodeId& node) {
    if (!obj.contains(field)) return {};
    if (!obj[field].is_array()) throw SchemaViolation(field, node);
    std::vector<NodeId> out;
    for (const auto& v : obj[field]) {
        if (!v.is_string()) throw SchemaViolation(field, node);
        out.push_back(v.get<std::string>());
    }
    return out;
}

KnowledgeNode parse_node(const NodeId& id, const json& obj) {
    if (!obj.is_object()) throw SchemaViolation("node", id);
    KnowledgeNode n;
    n.id = id;

    auto kind = node_kind_from(require_string(obj, "kind", id));
    if (!kind) throw SchemaViolation("kind", id);
    n.kind = *kind;

    n.title = require_string(obj, "title", id);

    if (obj.contains("parent")) {
        if (!obj["parent"].is_string()) throw SchemaViolation("parent", id);
        n.parent = obj["parent"].get<std::string>();
    }

    if (obj.contains("links")) {
        const auto& l = obj["links"];
        if (!l.is_object()) throw SchemaViolation("links", id);
        n.links.governs = read_id_list(l, "governs", id);
        n.links.enforces = read_id_list(l, "enforces", id);
        n.links.references = read_id_list(l, "references", id);
    }

    if (obj.contains("priority")) {
        if (!obj["priority"].is_string()) throw SchemaViolation("priority", id);
        auto p = priority_from(obj["priority"].get<std::string>());
        if (!p) throw SchemaViolation("priority", id);
        n.priority = *p;
    }
    if (n.kind == NodeKind::Behavior && !n.priority)
        throw SchemaViolation("priority", id);

    if (obj.contains("content")) {
        if (!obj["content"].is_string()) throw SchemaViolation("content", id);
        n.content = obj["content"].get<std::string>();
    }
    if (obj.contains("content_ref")) {
        if (!obj["content_ref"].is_string()) throw SchemaViolation("content_ref", id);
        n.content_ref = obj["content_ref"].get<std::string>();
    }
    if (n.content && n.content_ref) throw SchemaViolation("content", id);

    if (!obj.contains("metadata") || !obj["metadata"].is_object())
        throw SchemaViolation("metadata", id);
    const auto& m = obj["metadata"];
    n.metadata.created = require_string(m, "created", id);
    n.metadata.updated = require_string(m, "updated", id);
    if (!m.contains("version") || !m["version"].is_number_integer())
        throw SchemaViolation("version", id);
    n.metadata.version = m["version"].get<int>();
    if (n.metadata.version < 1) throw SchemaViolation("version", id);

    return n;
}

ordered_json node_to_json(const KnowledgeNode& n) {
    ordered_json obj;
    obj["kind"] = to_string(n.kind);
    obj["title"] = n.title;
    if (n.parent) obj["parent"] = *n.parent;
    if (!n.links.empty()) {
        ordered_json l;
        if (!n.links.governs.empty()) l["governs"] = n.links.governs;
        if (!n.links.enforces.empty()) l["enforces"] = n.links.enforces;
        if (!n.links.references.empty()) l["references"] = n.links.references;
        obj["links"] = std::move(l);
    }
    if (n.priority) obj["priority"] = to_string(*n.priority);
    if (n.content) obj["content"] = *n.content;
    if (n.content_ref) obj["content_ref"] = *n.content_ref;
    obj["metadata"] = {{"created", n.metadata.created},
                       {"updated", n.metadata.updated},
                       {"version", n.metadata.version}};
    return obj;
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedDocument("cannot read " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw MalformedDocument(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw MalformedDocument(path.string() + ": not a JSON object");
    return doc;
}

} // namespace

GraphDocument load_graph(const std::filesystem::path& path) {
    json doc = parse_file(path);

    GraphDocument g;
    if (!doc.contains("track") || !doc["track"].is_string())
        throw SchemaViolation("track", "<document>");
    auto track = track_from(doc["track"].get<std::string>());
    if (!track) throw SchemaViolation("track", "<document>");
    g.track = *track;

    if (!doc.contains("root") || !doc["root"].is_string())
        throw SchemaViolation("root", "<document>");
    g.root = doc["root"].get<std::string>();

    if (!doc.contains("nodes") || !doc["nodes"].is_object())
        throw SchemaViolation("nodes", "<document>");
    for (const auto& [id, obj] : doc["nodes"].items())
        g.nodes.emplace(id, parse_node(id, obj));

    g.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return g;
}

void save_graph(const GraphDocument& g, const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        GraphDocument disk = load_graph(path);
        for (const auto& [id, node] : disk.nodes) {
            auto it = g.nodes.find(id);
            if (it != g.nodes.end() && node.metadata.version > it->second.metadata.version)
                throw StaleWrite("node '" + id + "' is at version " +
                                 std::to_string(node.metadata.version) + " on disk, " +
                                 std::to_string(it->second.metadata.version) + " in memory");
        }
    }

    ordered_json doc;
    doc["track"] = to_string(g.track);
    doc["root"] = g.root;
    ordered_json nodes = ordered_json::object();
    for (const auto& [id, node] : g.nodes) // std::map: stable lexicographic order
        nodes[id] = node_to_json(node);
    doc["nodes"] = std::move(nodes);

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

std::vector<GraphDocument> load_tracks(const std::filesystem::path& dir) {
    std::vector<GraphDocument> graphs;
    for (const char* name : {"knowledge.json", "behaviors.json", "skills.json"})
        graphs.push_back(load_graph(dir / name));
    return graphs;
}

std::string node_body(const GraphDocument& g, const KnowledgeNode& node) {
    if (node.content) return *node.content;
    if (node.content_ref) {
        auto path = g.base_dir / *node.content_ref;
        std::ifstream in(path);
        if (!in) throw Error("content_ref of '" + node.id + "' not readable: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    return "";
}

std::pair<Track, KnowledgeNode> load_node_file(const std::filesystem::path& path) {
    json doc = parse_file(path);

    if (!doc.contains("track") || !doc["track"].is_string())
        throw SchemaViolation("track", "<node file>");
    auto track = track_from(doc["track"].get<std::string>());
    if (!track) throw SchemaViolation("track", "<node file>");

    if (!doc.contains("id") || !doc["id"].is_string())
        throw SchemaViolation("id", "<node file>");
    NodeId id = doc["id"].get<std::string>();

    if (!doc.contains("metadata")) {
        std::string now = utc_now();
        doc["metadata"] = {{"created", now}, {"updated", now}, {"version", 1}};
    }
    return {*track, parse_node(id, doc)};
}

std::string node_to_json_text(const KnowledgeNode& node) {
    ordered_json obj = node_to_json(node);
    ordered_json wrapped;
    wrapped["id"] = node.id;
    for (auto& [key, value] : obj.items()) wrapped[key] = value;
    return wrapped.dump(2);
}

// ── validation ───────────────────────────────────────────────────────

namespace {

void check_links(const KnowledgeNode& n, const char* field, const std::vector<NodeId>& targets,
                 const std::set<NodeId>& universe, ValidationReport& out) {
    std::set<NodeId> seen;
    for (const auto& t : targets) {
        if (t == n.id)
            out.push_back({"SelfLink", n.id, std::string(field) + " links to itself"});
        if (!seen.insert(t).second)
            out.push_back({"DuplicateLink", n.id, std::string(field) + " lists '" + t + "' twice"});
        if (!universe.count(t))
            out.push_back({"BrokenLink", n.id, std::string(field) + " target '" + t + "' unresolved"});
    }
}

} // namespace

ValidationReport validate_graph(const GraphDocument& g, const std::vector<GraphDocument>& peers) {
    ValidationReport report;

    std::set<NodeId> universe;
    for (const auto& [id, _] : g.nodes) universe.insert(id);
    for (const auto& peer : peers) {
        if (peer.track == g.track) continue; // parents are per-track; g may be an updated copy
        for (const auto& [id, _] : peer.nodes) {
            if (!universe.insert(id).second)
                report.push_back({"DuplicateId", id, "id exists in more than one track"});
        }
    }

    if (!g.nodes.count(g.root))
        report.push_back({"MissingRoot", g.root, "declared root is not a node"});

    size_t parentless = 0;
    for (const auto& [id, node] : g.nodes) {
        if (id != node.id)
            report.push_back({"IdMismatch", id, "node carries id '" + node.id + "'"});
        if (!valid_node_id(id))
            report.push_back({"BadId", id, "id does not match namespace(:scope)*:name"});

        if (!node.parent) {
            ++parentless;
            if (id != g.root)
                report.push_back({"OrphanNode", id, "parentless node is not the root"});
        } else {
            if (!g.nodes.count(*node.parent))
                report.push_back({"DanglingParent", id, "parent '" + *node.parent + "' absent"});
            if (*node.parent == id)
                report.push_back({"CycleDetected", id, "node is its own parent"});
        }

        if (node.kind == NodeKind::Behavior && !node.priority)
            report.push_back({"MissingPriority", id, "behavior node lacks a priority"});
        if (node.kind != NodeKind::Behavior && node.priority)
            report.push_back({"UnexpectedPriority", id, "priority on non-behavior node"});
        if (node.content && node.content_ref)
            report.push_back({"ContentConflict", id, "content and content_ref both set"});
        if (node.metadata.version < 1)
            report.push_back({"BadVersion", id, "version must be >= 1"});

        check_links(node, "governs", node.links.governs, universe, report);
        check_links(node, "enforces", node.links.enforces, universe, report);
        check_links(node, "references", node.links.references, universe, report);
    }

    if (g.nodes.count(g.root)) {
        const auto& root = g.nodes.at(g.root);
        if (root.parent)
            report.push_back({"RootHasParent", g.root, "root must be parentless"});
        else if (parentless != 1 && !g.nodes.empty())
            report.push_back({"MultipleRoots", g.root,
                              std::to_string(parentless) + " parentless nodes"});
    }

    // Walk each parent chain; a chain that revisits a node is a cycle, a chain
    // that leaves the document was already reported as DanglingParent.
    std::set<NodeId> in_cycle;
    for (const auto& [id, _] : g.nodes) {
        std::set<NodeId> path;
        NodeId cur = id;
        while (true) {
            if (in_cycle.count(cur)) break;
            if (!path.insert(cur).second) {
                for (const auto& p : path) {
                    if (in_cycle.insert(p).second)
                        report.push_back({"CycleDetected", p, "parent chain never reaches the root"});
                }
                break;
            }
            auto it = g.nodes.find(cur);
            if (it == g.nodes.end() || !it->second.parent) break;
            if (*it->second.parent == cur) break; // self-parent already reported
            cur = *it->second.parent;
        }
    }

    std::sort(report.begin(), report.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.node, a.code, a.detail) < std::tie(b.node, b.code, b.detail);
    });
    return report;
}

// ── mutation ─────────────────────────────────────────────────────────

GraphDocument add_node(const GraphDocument& g, KnowledgeNode node, RoleMode role) {
    if (role != RoleMode::Builder)
        throw PermissionDenied("structure mutation requires builder role (active: " +
                               to_string(role) + ")");
    if (!valid_node_id(node.id)) throw SchemaViolation("id", node.id);
    if (g.nodes.count(node.id)) throw DuplicateId(node.id);
    if (!node.parent) throw SchemaViolation("parent", node.id);
    if (!g.nodes.count(*node.parent)) throw DanglingParent(node.id, *node.parent);
    if (node.kind == NodeKind::Behavior && !node.priority)
        throw SchemaViolation("priority", node.id);
    if (node.content && node.content_ref)
        throw SchemaViolation("content", node.id);
    if (node.title.empty()) throw SchemaViolation("title", node.id);

    node.metadata.version = 1;
    if (node.metadata.updated.empty()) node.metadata.updated = node.metadata.created;

    GraphDocument out = g;
    out.nodes.emplace(node.id, std::move(node));
    return out;
}

// ── query ────────────────────────────────────────────────────────────

Selector Selector::children_of(NodeId id) {
    Selector s;
    s.kind = ChildrenOf;
    s.id = std::move(id);
    return s;
}

Selector Selector::by_kind(NodeKind k) {
    Selector s;
    s.kind = ByKind;
    s.node_kind = k;
    return s;
}

Selector Selector::by_priority(Priority p) {
    Selector s;
    s.kind = ByPriority;
    s.priority = p;
    return s;
}

Selector Selector::link_closure(NodeId id, std::vector<LinkStep> steps) {
    Selector s;
    s.kind = LinkClosure;
    s.id = std::move(id);
    s.steps = std::move(steps);
    return s;
}

const KnowledgeNode* find_node(const std::vector<GraphDocument>& graphs, const NodeId& id) {
    for (const auto& g : graphs)
        if (const auto* n = g.find(id)) return n;
    return nullptr;
}

const GraphDocument* find_track(const std::vector<GraphDocument>& graphs, Track t) {
    for (const auto& g : graphs)
        if (g.track == t) return &g;
    return nullptr;
}

namespace {

const std::vector<NodeId>& link_field(const KnowledgeNode& n, LinkStep::Field f) {
    switch (f) {
        case LinkStep::Governs: return n.links.governs;
        case LinkStep::Enforces: return n.links.enforces;
        case LinkStep::References: return n.links.references;
    }
    return n.links.references;
}

} // namespace

std::vector<KnowledgeNode> query(const std::vector<GraphDocument>& graphs,
                                 const Selector& selector) {
    std::map<NodeId, KnowledgeNode> hits; // keyed map gives the lexicographic order

    switch (selector.kind) {
        case Selector::ChildrenOf: {
            if (!find_node(graphs, selector.id)) throw UnknownNode(selector.id);
            for (const auto& g : graphs)
                for (const auto& [id, n] : g.nodes)
                    if (n.parent && *n.parent == selector.id) hits.emplace(id, n);
            break;
        }
        case Selector::ByKind: {
            for (const auto& g : graphs)
                for (const auto& [id, n] : g.nodes)
                    if (n.kind == selector.node_kind) hits.emplace(id, n);
            break;
        }
        case Selector::ByPriority: {
            for (const auto& g : graphs)
                for (const auto& [id, n] : g.nodes)
                    if (n.priority && *n.priority == selector.priority) hits.emplace(id, n);
            break;
        }
        case Selector::LinkClosure: {
            if (!find_node(graphs, selector.id)) throw UnknownNode(selector.id);
            std::set<NodeId> visited{selector.id};
            std::vector<NodeId> frontier{selector.id};
            while (!frontier.empty()) {
                std::vector<NodeId> next;
                for (const auto& cur : frontier) {
                    const auto* node = find_node(graphs, cur);
                    if (!node) continue;
                    for (const auto& step : selector.steps) {
                        if (!step.inverse) {
                            for (const auto& t : link_field(*node, step.field))
                                if (visited.insert(t).second) next.push_back(t);
                        } else {
                            for (const auto& g : graphs) {
                                for (const auto& [id, n] : g.nodes) {
                                    const auto& targets = link_field(n, step.field);
                                    if (std::find(targets.begin(), targets.end(), cur) != targets.end())
                                        if (visited.insert(id).second) next.push_back(id);
                                }
                            }
                        }
                    }
                }
                frontier = std::move(next);
            }
            visited.erase(selector.id);
            for (const auto& id : visited)
                if (const auto* n = find_node(graphs, id)) hits.emplace(id, *n);
            break;
        }
    }

    std::vector<KnowledgeNode> out;
    out.reserve(hits.size());
    for (auto& [_, n] : hits) out.push_back(std::move(n));
    return out;
}

} // namespace kgov::kg
