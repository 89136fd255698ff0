#include "kgov/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

namespace kgov::metrics {

namespace {

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {
        "async", "await", "break", "case", "catch", "class", "const", "continue",
        "debugger", "default", "delete", "do", "else", "enum", "export", "extends",
        "false", "finally", "for", "function", "if", "import", "in", "instanceof",
        "let", "new", "null", "of", "return", "static", "super", "switch", "this",
        "throw", "true", "try", "typeof", "var", "void", "while", "with", "yield",
    };
    return kw;
}

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_ident_part(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// longest-match punctuator table
const std::array<const char*, 57>& punctuators() {
    static const std::array<const char*, 57> table = {
        ">>>=", "===", "!==", "**=", "<<=", ">>=", ">>>", "...", "&&=", "||=", "?\?=",
        "=>", "==", "!=", "<=", ">=", "&&", "||", "?\?", "?.", "++", "--", "+=", "-=",
        "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**",
        "{", "}", "(", ")", "[", "]", ";", ",", ".", "<", ">", "+", "-", "*", "/",
        "%", "&", "|", "^", "!", "~", "?", ":", "=",
    };
    return table;
}

// Division when the previous significant token can end an expression;
// pattern-literal position otherwise.
bool division_position(const SourceToken* prev) {
    if (!prev) return false;
    switch (prev->kind) {
        case TokenKind::Identifier:
        case TokenKind::Number:
        case TokenKind::String:
        case TokenKind::Template:
        case TokenKind::PatternLiteral:
            return true;
        case TokenKind::Punctuator:
            return prev->lexeme == ")" || prev->lexeme == "]" || prev->lexeme == "}" ||
                   prev->lexeme == "++" || prev->lexeme == "--";
        default:
            return false;
    }
}

} // namespace

std::vector<SourceToken> tokenize(std::string_view src) {
    std::vector<SourceToken> tokens;
    const SourceToken* prev_significant = nullptr;
    size_t i = 0;
    int line = 1;

    // open `${` interpolations; the value is the '{'-nesting inside each
    std::vector<int> template_stack;

    auto push = [&](TokenKind kind, size_t begin, size_t end, int at_line) {
        tokens.push_back({kind, std::string(src.substr(begin, end - begin)), at_line});
        if (kind != TokenKind::Comment) prev_significant = &tokens.back();
    };

    // scans a template chunk from the opening backtick or a resuming `}` up
    // to the closing backtick or the next `${`
    auto scan_template_chunk = [&](size_t begin) -> size_t {
        int start_line = line;
        size_t j = begin + 1;
        while (j < src.size()) {
            char c = src[j];
            if (c == '\\' && j + 1 < src.size()) {
                if (src[j + 1] == '\n') ++line;
                j += 2;
                continue;
            }
            if (c == '\n') {
                ++line;
                ++j;
                continue;
            }
            if (c == '`') {
                push(TokenKind::Template, begin, j + 1, start_line);
                return j + 1;
            }
            if (c == '$' && j + 1 < src.size() && src[j + 1] == '{') {
                push(TokenKind::Template, begin, j + 2, start_line);
                template_stack.push_back(0);
                return j + 2;
            }
            ++j;
        }
        throw UnterminatedLiteral(start_line);
    };

    while (i < src.size()) {
        char c = src[i];

        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
            ++i;
            continue;
        }

        // comments
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            size_t j = i;
            while (j < src.size() && src[j] != '\n') ++j;
            push(TokenKind::Comment, i, j, line);
            i = j;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            int start_line = line;
            size_t j = i + 2;
            while (j + 1 < src.size() && !(src[j] == '*' && src[j + 1] == '/')) {
                if (src[j] == '\n') ++line;
                ++j;
            }
            if (j + 1 >= src.size()) throw UnterminatedLiteral(start_line);
            push(TokenKind::Comment, i, j + 2, start_line);
            i = j + 2;
            continue;
        }

        // strings
        if (c == '\'' || c == '"') {
            int start_line = line;
            size_t j = i + 1;
            while (j < src.size()) {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    if (src[j + 1] == '\n') ++line;
                    j += 2;
                    continue;
                }
                if (src[j] == '\n') throw UnterminatedLiteral(start_line);
                if (src[j] == c) break;
                ++j;
            }
            if (j >= src.size()) throw UnterminatedLiteral(start_line);
            push(TokenKind::String, i, j + 1, start_line);
            i = j + 1;
            continue;
        }

        // template literal
        if (c == '`') {
            i = scan_template_chunk(i);
            continue;
        }

        // numbers (including .5)
        if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            size_t j = i;
            if (src[j] == '0' && j + 1 < src.size() &&
                (src[j + 1] == 'x' || src[j + 1] == 'X' || src[j + 1] == 'b' ||
                 src[j + 1] == 'B' || src[j + 1] == 'o' || src[j + 1] == 'O')) {
                j += 2;
                while (j < src.size() && is_ident_part(src[j])) ++j;
            } else {
                bool seen_dot = false;
                while (j < src.size()) {
                    char d = src[j];
                    if (is_digit(d) || d == '_') {
                        ++j;
                    } else if (d == '.' && !seen_dot) {
                        seen_dot = true;
                        ++j;
                    } else if ((d == 'e' || d == 'E') && j + 1 < src.size() &&
                               (is_digit(src[j + 1]) || src[j + 1] == '+' || src[j + 1] == '-')) {
                        j += 2;
                    } else if (d == 'n') { // bigint suffix
                        ++j;
                        break;
                    } else {
                        break;
                    }
                }
            }
            push(TokenKind::Number, i, j, line);
            i = j;
            continue;
        }

        // identifiers and keywords
        if (is_ident_start(c)) {
            size_t j = i;
            while (j < src.size() && is_ident_part(src[j])) ++j;
            std::string word(src.substr(i, j - i));
            push(keywords().count(word) ? TokenKind::Keyword : TokenKind::Identifier, i, j, line);
            i = j;
            continue;
        }

        // pattern literal vs division
        if (c == '/' && !division_position(prev_significant)) {
            int start_line = line;
            size_t j = i + 1;
            bool in_class = false;
            while (j < src.size()) {
                char d = src[j];
                if (d == '\\' && j + 1 < src.size()) {
                    j += 2;
                    continue;
                }
                if (d == '\n') throw UnterminatedLiteral(start_line);
                if (d == '[') in_class = true;
                else if (d == ']') in_class = false;
                else if (d == '/' && !in_class) break;
                ++j;
            }
            if (j >= src.size()) throw UnterminatedLiteral(start_line);
            ++j; // closing slash
            while (j < src.size() && is_ident_part(src[j])) ++j; // flags
            push(TokenKind::PatternLiteral, i, j, start_line);
            i = j;
            continue;
        }

        // punctuators, longest match first
        bool matched = false;
        for (const char* p : punctuators()) {
            size_t len = std::char_traits<char>::length(p);
            if (src.compare(i, len, p) == 0) {
                if (len == 1 && *p == '}' && !template_stack.empty()) {
                    if (template_stack.back() == 0) {
                        // closes an interpolation, resume the template
                        template_stack.pop_back();
                        i = scan_template_chunk(i);
                        matched = true;
                        break;
                    }
                    --template_stack.back();
                } else if (len == 1 && *p == '{' && !template_stack.empty()) {
                    ++template_stack.back();
                }
                push(TokenKind::Punctuator, i, i + len, line);
                i += len;
                matched = true;
                break;
            }
        }
        if (matched) continue;

        // unknown byte: single-character punctuator keeps reconstruction intact
        push(TokenKind::Punctuator, i, i + 1, line);
        ++i;
    }

    if (!template_stack.empty()) throw UnterminatedLiteral(line);
    return tokens;
}

// ── structural scan shared by lloc / cyclomatic / lint ────────────────

namespace {

enum class FrameKind { Paren, Bracket, Block, ObjectLiteral, ClassBody };

struct Frame {
    FrameKind kind = FrameKind::Block;
    bool saved_pending = false;
};

struct DoFrame {
    size_t stack_size = 0;   // frame-stack size at the `do`
    bool body_is_block = false;
    bool body_done = false;
};

// What follows a counted header and is still part of it:
//   Condition -- a parenthesized condition, then the body (if/while/for/...)
//   Signature -- everything up to the opening brace (function/class)
//   Bare      -- the body starts immediately (else/do/try/finally)
enum class Residue { None, Condition, Signature, Bare };

struct StructuralScan {
    int lloc = 0;
    int decisions = 0;
    int function_units = 0;
    std::vector<LintWarning> warnings;

    void run(const std::vector<SourceToken>& all);

private:
    std::vector<Frame> stack_;
    std::vector<DoFrame> do_frames_;
    bool pending_ = false;       // statement content since the last boundary
    Residue residue_ = Residue::None;
    bool class_head_ = false;    // between `class` and its `{`
    bool in_case_label_ = false; // between `case` and its `:`
    bool suppress_ = false;      // swallowing a do-while tail `while (...);`
    long condition_frame_ = -1;  // stack size of an open if/while condition
    bool expect_condition_ = false;

    bool statement_level() const {
        return stack_.empty() || stack_.back().kind == FrameKind::Block ||
               stack_.back().kind == FrameKind::ClassBody;
    }
    bool in_class_body() const {
        return !stack_.empty() && stack_.back().kind == FrameKind::ClassBody;
    }

    void count_statement() {
        ++lloc;
        pending_ = false;
    }
    void header(Residue residue) {
        ++lloc;
        pending_ = false;
        residue_ = residue;
    }
    // a statement-level token other than the body brace ends the header residue
    bool consume_residue() {
        if (!statement_level()) return false;
        if (residue_ == Residue::Signature) return true; // holds until `{`
        residue_ = Residue::None;
        return false;
    }

    static bool ends_expression(const SourceToken& t);
    static bool continues_expression(const SourceToken& t);
    void maybe_asi(const SourceToken& cur, const SourceToken* next);
};

bool StructuralScan::ends_expression(const SourceToken& t) {
    switch (t.kind) {
        case TokenKind::Identifier:
        case TokenKind::Number:
        case TokenKind::String:
        case TokenKind::Template:
        case TokenKind::PatternLiteral:
            return true;
        case TokenKind::Keyword:
            return t.lexeme == "this" || t.lexeme == "true" || t.lexeme == "false" ||
                   t.lexeme == "null" || t.lexeme == "super";
        case TokenKind::Punctuator:
            return t.lexeme == ")" || t.lexeme == "]" || t.lexeme == "++" || t.lexeme == "--";
        default:
            return false;
    }
}

bool StructuralScan::continues_expression(const SourceToken& t) {
    if (t.kind == TokenKind::Punctuator) {
        static const std::set<std::string> cont = {
            ".",   ",",  "+",  "-",  "*",  "/",  "%",  "**",  "==",  "===", "!=",
            "!==", "<",  "<=", ">",  ">=", "&&", "||", "?\?", "?",   ":",   "=",
            "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=",  "<<",  ">>",  ">>>",
            "=>",  "?.", "(",  "[",  "&",  "|",  "^",  "&&=", "||=", "?\?=",
        };
        return cont.count(t.lexeme) > 0;
    }
    if (t.kind == TokenKind::Keyword)
        return t.lexeme == "instanceof" || t.lexeme == "in";
    return false;
}

void StructuralScan::maybe_asi(const SourceToken& cur, const SourceToken* next) {
    if (!statement_level() || !pending_) return;
    if (!next) return; // pending at EOF is counted by the caller
    if (next->line <= cur.line) return;
    if (!ends_expression(cur)) return;
    if (continues_expression(*next)) return;
    count_statement();
}

void StructuralScan::run(const std::vector<SourceToken>& all) {
    std::vector<const SourceToken*> toks;
    toks.reserve(all.size());
    for (const auto& t : all)
        if (t.kind != TokenKind::Comment) toks.push_back(&t);

    auto at = [&](size_t k) -> const SourceToken* {
        return k < toks.size() ? toks[k] : nullptr;
    };

    bool awaiting_condition = false; // header seen, its `(` not yet

    for (size_t k = 0; k < toks.size(); ++k) {
        const SourceToken& tok = *toks[k];
        const SourceToken* prev = k > 0 ? toks[k - 1] : nullptr;
        const SourceToken* next = at(k + 1);
        const std::string& lx = tok.lexeme;

        if (tok.kind == TokenKind::Punctuator) {
            if (lx == "?" || lx == "&&" || lx == "||" || lx == "?\?") ++decisions;
            if (lx == "=>") ++function_units;

            if (lx == "==" || lx == "!=")
                warnings.push_back({"W001", tok.line,
                                    "loose equality '" + lx + "', use strict comparison"});
            if (lx == "=" && condition_frame_ >= 0 &&
                static_cast<long>(stack_.size()) > condition_frame_)
                warnings.push_back({"W003", tok.line, "assignment inside a condition"});

            if (lx == "(") {
                if (expect_condition_ && condition_frame_ < 0) {
                    condition_frame_ = static_cast<long>(stack_.size());
                    expect_condition_ = false;
                }
                if (residue_ == Residue::Condition && awaiting_condition) {
                    awaiting_condition = false; // the header's own condition group
                } else if (residue_ == Residue::None) {
                    if (statement_level() && !suppress_) pending_ = true;
                }
                stack_.push_back({FrameKind::Paren, false});
                continue;
            }
            if (lx == "[") {
                if (residue_ == Residue::None && statement_level() && !suppress_)
                    pending_ = true;
                stack_.push_back({FrameKind::Bracket, false});
                continue;
            }
            if (lx == ")" || lx == "]") {
                if (!stack_.empty()) stack_.pop_back();
                if (condition_frame_ >= 0 &&
                    static_cast<long>(stack_.size()) == condition_frame_)
                    condition_frame_ = -1;
                if (residue_ == Residue::None && statement_level() && !suppress_)
                    pending_ = true;
                maybe_asi(tok, next);
                continue;
            }

            if (lx == "{") {
                FrameKind kind = FrameKind::Block;
                if (class_head_) {
                    kind = FrameKind::ClassBody;
                    class_head_ = false;
                } else if (prev) {
                    bool object_position =
                        (prev->kind == TokenKind::Punctuator &&
                         (prev->lexeme == "=" || prev->lexeme == "," || prev->lexeme == ":" ||
                          prev->lexeme == "(" || prev->lexeme == "[" || prev->lexeme == "?" ||
                          prev->lexeme == "?\?" || prev->lexeme == "||" ||
                          prev->lexeme == "&&")) ||
                        (prev->kind == TokenKind::Keyword &&
                         (prev->lexeme == "return" || prev->lexeme == "in" ||
                          prev->lexeme == "of" || prev->lexeme == "typeof" ||
                          prev->lexeme == "import" || prev->lexeme == "export" ||
                          prev->lexeme == "default" || prev->lexeme == "const" ||
                          prev->lexeme == "let" || prev->lexeme == "var"));
                    if (object_position) kind = FrameKind::ObjectLiteral;
                }
                if (kind != FrameKind::ObjectLiteral && next &&
                    next->kind == TokenKind::Punctuator && next->lexeme == "}")
                    warnings.push_back({"W004", tok.line, "empty block"});
                bool saved = residue_ == Residue::None ? pending_ : false;
                if (statement_level()) {
                    residue_ = Residue::None;
                    awaiting_condition = false;
                }
                stack_.push_back({kind, saved});
                pending_ = false;
                continue;
            }
            if (lx == "}") {
                if (statement_level() && pending_) count_statement();
                Frame closed{FrameKind::Block, false};
                if (!stack_.empty()) {
                    closed = stack_.back();
                    stack_.pop_back();
                }
                if (in_class_body()) {
                    pending_ = false; // a method body closed; the signature is not a statement
                } else if (closed.kind == FrameKind::ObjectLiteral) {
                    pending_ = true; // the surrounding expression continues
                    if (statement_level() && next && next->line > tok.line &&
                        !continues_expression(*next))
                        count_statement(); // object literal ends the statement via ASI
                } else {
                    pending_ = closed.saved_pending;
                }
                for (auto& f : do_frames_)
                    if (!f.body_done && f.body_is_block && f.stack_size == stack_.size())
                        f.body_done = true;
                maybe_asi(tok, next);
                continue;
            }
            if (lx == ";") {
                if (statement_level()) {
                    residue_ = Residue::None;
                    awaiting_condition = false;
                    if (suppress_) {
                        suppress_ = false;
                        pending_ = false;
                    } else if (pending_) {
                        count_statement();
                    }
                    for (auto& f : do_frames_)
                        if (!f.body_done && !f.body_is_block && f.stack_size == stack_.size())
                            f.body_done = true;
                }
                continue;
            }
            if (lx == ":" && in_case_label_ && statement_level()) {
                in_case_label_ = false;
                pending_ = false;
                continue;
            }

            if (consume_residue()) continue; // signature punctuation
            if (statement_level() && !suppress_) pending_ = true;
            maybe_asi(tok, next);
            continue;
        }

        if (tok.kind == TokenKind::Keyword) {
            if (lx == "if") {
                ++decisions;
                header(Residue::Condition);
                awaiting_condition = true;
                expect_condition_ = true;
                continue;
            }
            if (lx == "for" || lx == "switch") {
                if (lx == "for") ++decisions;
                header(Residue::Condition);
                awaiting_condition = true;
                continue;
            }
            if (lx == "while") {
                if (!do_frames_.empty() && do_frames_.back().body_done) {
                    do_frames_.pop_back();
                    suppress_ = true; // do not recount the loop; eat `(cond)` and `;`
                    pending_ = false;
                    residue_ = Residue::None;
                    continue;
                }
                ++decisions;
                header(Residue::Condition);
                awaiting_condition = true;
                expect_condition_ = true;
                continue;
            }
            if (lx == "do") {
                ++decisions;
                header(Residue::Bare);
                DoFrame f;
                f.stack_size = stack_.size();
                f.body_is_block =
                    next && next->kind == TokenKind::Punctuator && next->lexeme == "{";
                do_frames_.push_back(f);
                continue;
            }
            if (lx == "case") {
                ++decisions;
                header(Residue::None);
                in_case_label_ = true;
                continue;
            }
            if (lx == "catch") {
                ++decisions;
                header(Residue::Condition);
                awaiting_condition = true;
                continue;
            }
            if (lx == "try" || lx == "finally") {
                header(Residue::Bare);
                continue;
            }
            if (lx == "else") {
                bool own_statement =
                    next && !(next->kind == TokenKind::Punctuator && next->lexeme == "{") &&
                    !(next->kind == TokenKind::Keyword && next->lexeme == "if");
                if (own_statement) header(Residue::Bare);
                else pending_ = false;
                continue;
            }
            if (lx == "function") {
                ++function_units;
                if (statement_level() && !pending_ && residue_ == Residue::None)
                    header(Residue::Signature); // declaration
                else if (residue_ == Residue::None && statement_level())
                    pending_ = true; // expression
                continue;
            }
            if (lx == "class") {
                if (statement_level() && !pending_ && residue_ == Residue::None)
                    header(Residue::Signature);
                else if (residue_ == Residue::None && statement_level())
                    pending_ = true;
                class_head_ = true;
                continue;
            }
            if (lx == "var")
                warnings.push_back({"W002", tok.line, "'var' declaration, use let or const"});
            if (lx == "return" || lx == "break" || lx == "continue" || lx == "throw") {
                if (statement_level()) {
                    residue_ = Residue::None;
                    pending_ = true;
                    // restricted production: a line break terminates immediately
                    bool next_terminates =
                        next && next->kind == TokenKind::Punctuator &&
                        (next->lexeme == ";" || next->lexeme == "}");
                    if (!next_terminates && (!next || next->line > tok.line))
                        count_statement();
                }
                continue;
            }

            if (consume_residue()) continue;
            if (statement_level() && !suppress_) pending_ = true;
            maybe_asi(tok, next);
            continue;
        }

        // identifiers and literals
        if (tok.kind == TokenKind::Identifier && in_class_body() && next &&
            next->kind == TokenKind::Punctuator && next->lexeme == "(")
            ++function_units; // method definition

        if (consume_residue()) continue;
        if (statement_level() && !suppress_) pending_ = true;
        maybe_asi(tok, next);
    }

    if (pending_ && statement_level()) ++lloc; // statement running into EOF

    std::sort(warnings.begin(), warnings.end(), [](const LintWarning& a, const LintWarning& b) {
        return std::tie(a.line, a.rule) < std::tie(b.line, b.rule);
    });
}

} // namespace

int logical_sloc(const std::vector<SourceToken>& tokens) {
    StructuralScan scan;
    scan.run(tokens);
    return scan.lloc;
}

int cyclomatic(const std::vector<SourceToken>& tokens) {
    StructuralScan scan;
    scan.run(tokens);
    return scan.decisions + std::max(1, scan.function_units);
}

std::vector<LintWarning> lint(const std::vector<SourceToken>& tokens) {
    StructuralScan scan;
    scan.run(tokens);
    return scan.warnings;
}

double halstead_volume(const std::vector<SourceToken>& tokens) {
    long long total = 0;
    std::set<std::string> distinct_operators;
    std::set<std::string> distinct_operands;

    for (const auto& t : tokens) {
        switch (t.kind) {
            case TokenKind::Keyword:
            case TokenKind::Punctuator:
                ++total;
                distinct_operators.insert(t.lexeme);
                break;
            case TokenKind::Identifier:
            case TokenKind::String:
            case TokenKind::Template:
            case TokenKind::PatternLiteral:
            case TokenKind::Number:
                ++total;
                distinct_operands.insert(t.lexeme);
                break;
            case TokenKind::Comment:
                break;
        }
    }

    double n = static_cast<double>(distinct_operators.size() + distinct_operands.size());
    if (total == 0 || n == 0.0) return 0.0;
    return static_cast<double>(total) * std::log2(n);
}

double maintainability_index(int lloc, int cyclo, double volume) {
    double l = std::max(1.0, static_cast<double>(lloc));
    double g = std::max(1.0, static_cast<double>(cyclo));
    double v = std::max(1.0, volume);
    double mi = (171.0 - 5.2 * std::log(v) - 0.23 * g - 16.2 * std::log(l)) * 100.0 / 171.0;
    return std::clamp(mi, 0.0, 100.0);
}

MetricsReport analyze(std::string_view source) {
    auto tokens = tokenize(source);
    MetricsReport report;
    StructuralScan scan;
    scan.run(tokens);
    report.lloc = scan.lloc;
    report.cyclomatic = scan.decisions + std::max(1, scan.function_units);
    report.halstead_volume = halstead_volume(tokens);
    report.maintainability_index =
        maintainability_index(report.lloc, report.cyclomatic, report.halstead_volume);
    report.warnings = scan.warnings;
    return report;
}

} // namespace kgov::metrics
