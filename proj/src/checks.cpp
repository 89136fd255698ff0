#include "kgov/checks.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <regex>
#include <sstream>

using nlohmann::json;

namespace kgov::checks {

std::string to_string(Dimension d) {
    switch (d) {
        case Dimension::E1: return "E1";
        case Dimension::E2: return "E2";
        case Dimension::E3: return "E3";
        case Dimension::E4: return "E4";
        case Dimension::E5: return "E5";
        case Dimension::E6: return "E6";
    }
    return "E1";
}

std::optional<Dimension> dimension_from(const std::string& s) {
    if (s == "E1") return Dimension::E1;
    if (s == "E2") return Dimension::E2;
    if (s == "E3") return Dimension::E3;
    if (s == "E4") return Dimension::E4;
    if (s == "E5") return Dimension::E5;
    if (s == "E6") return Dimension::E6;
    return std::nullopt;
}

std::string to_string(CheckKind k) {
    switch (k) {
        case CheckKind::MustContain: return "must-contain";
        case CheckKind::MustNotContain: return "must-not-contain";
        case CheckKind::PatternMatch: return "pattern-match";
        case CheckKind::AllOfValues: return "all-of-values";
        case CheckKind::PayloadFields: return "payload-fields";
        case CheckKind::CrossReference: return "cross-reference";
    }
    return "must-contain";
}

std::optional<CheckKind> check_kind_from(const std::string& s) {
    if (s == "must-contain") return CheckKind::MustContain;
    if (s == "must-not-contain") return CheckKind::MustNotContain;
    if (s == "pattern-match") return CheckKind::PatternMatch;
    if (s == "all-of-values") return CheckKind::AllOfValues;
    if (s == "payload-fields") return CheckKind::PayloadFields;
    if (s == "cross-reference") return CheckKind::CrossReference;
    return std::nullopt;
}

namespace {

const std::string& output_of(const std::vector<std::string>& outputs, int step) {
    static const std::string empty;
    if (step < 1 || step > static_cast<int>(outputs.size())) return empty;
    return outputs[static_cast<size_t>(step) - 1];
}

// Finds the balanced {...} block that starts at the first '{' at or after
// `from`. Returns the block contents, or nullopt when no balanced block opens
// within `window` characters.
std::optional<std::string> balanced_brace_block(const std::string& text, size_t from,
                                                size_t window = 400) {
    size_t open = text.find('{', from);
    if (open == std::string::npos || open - from > window) return std::nullopt;
    int depth = 0;
    for (size_t i = open; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        else if (text[i] == '}') {
            --depth;
            if (depth == 0) return text.substr(open + 1, i - open - 1);
        }
    }
    return std::nullopt;
}

CheckOutcome check_payload_fields(const CheckSpec& check, const std::string& text) {
    size_t pos = text.find(check.event);
    if (pos == std::string::npos)
        return {false, "event '" + check.event + "' never dispatched"};

    std::string best_missing;
    while (pos != std::string::npos) {
        auto block = balanced_brace_block(text, pos + check.event.size());
        if (block) {
            std::string missing;
            for (const auto& f : check.fields) {
                if (block->find(f) == std::string::npos)
                    missing += missing.empty() ? f : ", " + f;
            }
            if (missing.empty())
                return {true, "event '" + check.event + "' carries all required fields"};
            best_missing = missing;
        }
        pos = text.find(check.event, pos + 1);
    }
    if (best_missing.empty())
        return {false, "event '" + check.event + "' has no payload object"};
    return {false, "event '" + check.event + "' payload missing: " + best_missing};
}

CheckOutcome check_cross_reference(const CheckSpec& check, const std::string& text,
                                   const std::vector<std::string>& outputs) {
    std::regex re(check.pattern);
    auto begin = std::sregex_iterator(text.begin(), text.end(), re);
    auto end = std::sregex_iterator();
    for (auto it = begin; it != end; ++it) {
        const std::string token = it->str();
        bool defined = false;
        for (int src : check.defined_in) {
            if (output_of(outputs, src).find(token) != std::string::npos) {
                defined = true;
                break;
            }
        }
        if (!defined)
            return {false, "'" + token + "' is not defined in any source step"};
    }
    return {true, "all referenced tokens resolve"};
}

} // namespace

CheckOutcome evaluate_check(const CheckSpec& check, int step,
                            const std::vector<std::string>& all_outputs) {
    const std::string& text = output_of(all_outputs, step);

    switch (check.kind) {
        case CheckKind::MustContain: {
            if (text.find(check.token) != std::string::npos)
                return {true, "found '" + check.token + "'"};
            return {false, "missing '" + check.token + "'"};
        }
        case CheckKind::MustNotContain: {
            if (text.find(check.token) == std::string::npos)
                return {true, "'" + check.token + "' absent"};
            return {false, "found forbidden '" + check.token + "'"};
        }
        case CheckKind::PatternMatch: {
            std::regex re(check.pattern);
            if (std::regex_search(text, re)) return {true, "pattern matched"};
            return {false, "pattern '" + check.pattern + "' not matched"};
        }
        case CheckKind::AllOfValues: {
            std::string missing;
            for (const auto& v : check.values) {
                if (text.find(v) == std::string::npos)
                    missing += missing.empty() ? v : ", " + v;
            }
            if (missing.empty()) return {true, "all values present"};
            return {false, "missing values: " + missing};
        }
        case CheckKind::PayloadFields:
            return check_payload_fields(check, text);
        case CheckKind::CrossReference:
            return check_cross_reference(check, text, all_outputs);
    }
    return {false, "unknown check kind"};
}

std::vector<CheckSpec> parse_manifest(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw MalformedDocument(std::string("check manifest: ") + e.what());
    }
    if (!doc.is_array()) throw MalformedDocument("check manifest must be a JSON array");

    std::vector<CheckSpec> out;
    for (const auto& obj : doc) {
        CheckSpec c;
        auto dim = dimension_from(obj.value("dimension", ""));
        if (!dim) throw MalformedDocument("check manifest: bad dimension");
        c.dimension = *dim;

        auto kind = check_kind_from(obj.value("kind", ""));
        if (!kind) throw MalformedDocument("check manifest: bad kind");
        c.kind = *kind;

        if (!obj.contains("steps") || !obj["steps"].is_array() || obj["steps"].empty())
            throw MalformedDocument("check manifest: steps must be a non-empty array");
        for (const auto& s : obj["steps"]) c.steps.push_back(s.get<int>());

        const auto payload = obj.value("payload", json::object());
        c.token = payload.value("token", "");
        c.pattern = payload.value("pattern", "");
        c.event = payload.value("event", "");
        if (payload.contains("values"))
            for (const auto& v : payload["values"]) c.values.push_back(v.get<std::string>());
        if (payload.contains("fields"))
            for (const auto& f : payload["fields"]) c.fields.push_back(f.get<std::string>());
        if (payload.contains("defined_in"))
            for (const auto& s : payload["defined_in"]) c.defined_in.push_back(s.get<int>());

        bool payload_ok = false;
        switch (c.kind) {
            case CheckKind::MustContain:
            case CheckKind::MustNotContain: payload_ok = !c.token.empty(); break;
            case CheckKind::PatternMatch: payload_ok = !c.pattern.empty(); break;
            case CheckKind::AllOfValues: payload_ok = !c.values.empty(); break;
            case CheckKind::PayloadFields: payload_ok = !c.event.empty() && !c.fields.empty(); break;
            case CheckKind::CrossReference: payload_ok = !c.pattern.empty() && !c.defined_in.empty(); break;
        }
        if (!payload_ok) throw MalformedDocument("check manifest: empty payload for " + to_string(c.kind));

        if (obj.contains("behavior")) c.behavior = obj["behavior"].get<std::string>();
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CheckSpec> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedDocument("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

} // namespace kgov::checks
