#pragma once

#include <stdexcept>
#include <string>

namespace kgov {

// Base class for all engine errors. Subcommands map these to exit codes;
// library callers catch the specific type they care about.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Document could not be parsed at all (bad JSON, empty file, wrong shape).
struct MalformedDocument : Error {
    explicit MalformedDocument(const std::string& msg) : Error(msg) {}
};

// A node is missing a required field or a field has the wrong type.
struct SchemaViolation : Error {
    SchemaViolation(const std::string& field, const std::string& node_id)
        : Error("schema violation: field '" + field + "' on node '" + node_id + "'"),
          field(field), node_id(node_id) {}
    std::string field;
    std::string node_id;
};

struct PermissionDenied : Error {
    explicit PermissionDenied(const std::string& msg) : Error(msg) {}
};

struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id) : Error("duplicate node id '" + id + "'"), id(id) {}
    std::string id;
};

struct DanglingParent : Error {
    DanglingParent(const std::string& node, const std::string& parent)
        : Error("node '" + node + "' names absent parent '" + parent + "'"),
          node(node), parent(parent) {}
    std::string node;
    std::string parent;
};

struct UnknownNode : Error {
    explicit UnknownNode(const std::string& id) : Error("unknown node '" + id + "'"), id(id) {}
    std::string id;
};

// On-disk document is newer than the in-memory base the caller mutated.
struct StaleWrite : Error {
    explicit StaleWrite(const std::string& msg) : Error(msg) {}
};

// Role-and-context plus untruncatable content exceed the token budget.
struct BudgetInfeasible : Error {
    explicit BudgetInfeasible(const std::string& msg) : Error(msg) {}
};

struct ValidationFailed : Error {
    explicit ValidationFailed(const std::string& msg) : Error(msg) {}
};

struct ApprovalWithheld : Error {
    explicit ApprovalWithheld(const std::string& msg) : Error(msg) {}
};

struct LinkTargetMissing : Error {
    explicit LinkTargetMissing(const std::string& id)
        : Error("link target '" + id + "' does not resolve"), id(id) {}
    std::string id;
};

// Transport or credential failure talking to a completion provider.
struct ProviderError : Error {
    explicit ProviderError(const std::string& msg) : Error(msg) {}
};

struct JudgeUnavailable : Error {
    explicit JudgeUnavailable(const std::string& msg) : Error(msg) {}
};

struct MissingDimension : Error {
    explicit MissingDimension(const std::string& msg) : Error(msg) {}
};

// Lexer hit end of input inside a string, template, or pattern literal.
struct UnterminatedLiteral : Error {
    explicit UnterminatedLiteral(int line)
        : Error("unterminated literal at line " + std::to_string(line)), line(line) {}
    int line;
};

} // namespace kgov
