#pragma once
// ECMAScript source metrics: a lexer that is careful about strings, template
// literals, comments, and the division-vs-pattern-literal ambiguity, plus
// logical SLOC, cyclomatic complexity, Halstead volume, the 0-100
// maintainability index, and a small fixed lint rule set.
//
// No parse tree is built; every metric is defined as a closed rule over the
// token stream so that hand counts are reproducible.

#include "kgov/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace kgov::metrics {

enum class TokenKind {
    Keyword,
    Identifier,
    Punctuator,
    String,
    Template,        // raw template chunks, interpolation expressions re-enter as tokens
    PatternLiteral,  // /regex/flags
    Number,
    Comment,
};

struct SourceToken {
    TokenKind kind = TokenKind::Identifier;
    std::string lexeme;
    int line = 1;
};

// Throws UnterminatedLiteral when a string, template, pattern literal, or
// block comment runs past end of input.
std::vector<SourceToken> tokenize(std::string_view source);

// Executable statements: `;`-or-ASI-terminated statements at statement level
// plus control/declaration headers. Comments and blank regions contribute 0.
int logical_sloc(const std::vector<SourceToken>& tokens);

// Decision points: if, for, while, do, case, catch, ternary `?`, `&&`, `||`,
// `??` (a do-while's closing `while` is not recounted). File value is
// decisions + one per function unit (function keywords, arrows, class
// methods), with the top level standing in as the single implicit unit of a
// function-free file.
int cyclomatic(const std::vector<SourceToken>& tokens);

// V = N*log2(n) over operators (keywords + punctuators) and operands
// (identifiers + string/number/template/pattern literals). 0 for empty input.
double halstead_volume(const std::vector<SourceToken>& tokens);

// max(0, (171 - 5.2*ln(V) - 0.23*G - 16.2*ln(L)) * 100/171) clamped to
// [0,100]; inputs below 1 clamp to 1.
double maintainability_index(int lloc, int cyclomatic, double halstead_volume);

struct LintWarning {
    std::string rule;   // W001 loose equality, W002 var, W003 assignment in
                        // condition, W004 empty block
    int line = 1;
    std::string message;
};

// Deterministic, sorted by (line, rule).
std::vector<LintWarning> lint(const std::vector<SourceToken>& tokens);

struct MetricsReport {
    int lloc = 0;
    int cyclomatic = 1;
    double halstead_volume = 0.0;
    double maintainability_index = 100.0;
    std::vector<LintWarning> warnings;
};

MetricsReport analyze(std::string_view source);

} // namespace kgov::metrics
