#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

using namespace kgov;
using metrics::TokenKind;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(KGOV_FIXTURES_DIR) + "/metrics/" + name);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct HandCount {
    const char* file;
    int lloc;
    int cyclomatic;
    size_t warnings;
};

// counted by hand against the closed statement/decision rules
const HandCount kHandCounts[] = {
    {"m01_empty.js", 0, 1, 0},
    {"m02_statements.js", 20, 1, 0},
    {"m03_ifelse.js", 3, 2, 0},
    {"m04_funcs.js", 1, 1, 1},
    {"m05_decisions.js", 4, 3, 0},
    {"m06_switch.js", 9, 4, 0},
    {"m07_loops.js", 12, 5, 0},
    {"m08_ternary.js", 5, 4, 0},
    {"m09_strings.js", 5, 1, 0},
    {"m10_classes.js", 5, 2, 0},
    {"m11_arrows.js", 6, 3, 0},
    {"m12_lint.js", 7, 4, 5},
    {"m13_asi.js", 6, 1, 0},
    {"m14_nested.js", 13, 5, 0},
};

// Rebuilds source text from tokens with single spaces, inserting a comment at
// one inter-token boundary.
std::string tokens_with_comment(const std::vector<metrics::SourceToken>& tokens,
                                size_t boundary) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i == boundary) out += " /* inserted */ ";
        out += tokens[i].lexeme;
        out += " ";
    }
    return out;
}

} // namespace

TEST_CASE("tokenize: empty input gives no tokens") {
    CHECK(metrics::tokenize("").empty());
}

TEST_CASE("tokenize: string semicolons and trailing comment stay inside their tokens") {
    auto tokens = metrics::tokenize("let x = \"a;b\" // c");
    REQUIRE(tokens.size() == 5);
    CHECK(tokens[0].kind == TokenKind::Keyword);
    CHECK(tokens[3].kind == TokenKind::String);
    CHECK(tokens[3].lexeme == "\"a;b\"");
    CHECK(tokens[4].kind == TokenKind::Comment);
    CHECK(tokens[4].lexeme == "// c");
}

TEST_CASE("tokenize: template interpolation re-enters as tokens") {
    auto tokens = metrics::tokenize("`n=${a+b}`");
    REQUIRE(tokens.size() == 5);
    CHECK(tokens[0].kind == TokenKind::Template);
    CHECK(tokens[0].lexeme == "`n=${");
    CHECK(tokens[1].kind == TokenKind::Identifier);
    CHECK(tokens[1].lexeme == "a");
    CHECK(tokens[2].lexeme == "+");
    CHECK(tokens[3].lexeme == "b");
    CHECK(tokens[4].kind == TokenKind::Template);
    CHECK(tokens[4].lexeme == "}`");
}

TEST_CASE("tokenize: division versus pattern literal") {
    auto division = metrics::tokenize("let q = x / y / 2;");
    int patterns = 0;
    for (const auto& t : division) patterns += t.kind == TokenKind::PatternLiteral;
    CHECK(patterns == 0);

    auto pattern = metrics::tokenize("let r = /a;b/g;");
    bool found = false;
    for (const auto& t : pattern)
        if (t.kind == TokenKind::PatternLiteral) {
            found = true;
            CHECK(t.lexeme == "/a;b/g");
        }
    CHECK(found);
}

TEST_CASE("tokenize: lexemes reappear in order in the source") {
    std::string src = read_fixture("m14_nested.js");
    auto tokens = metrics::tokenize(src);
    size_t pos = 0;
    for (const auto& t : tokens) {
        size_t found = src.find(t.lexeme, pos);
        REQUIRE(found != std::string::npos);
        pos = found + t.lexeme.size();
    }
}

TEST_CASE("tokenize: unterminated literals carry their line") {
    CHECK_THROWS_AS(metrics::tokenize("let s = 'open"), UnterminatedLiteral);
    CHECK_THROWS_AS(metrics::tokenize("\n\nlet t = `open"), UnterminatedLiteral);
    try {
        metrics::tokenize("\n\nlet s = 'open");
        FAIL("expected UnterminatedLiteral");
    } catch (const UnterminatedLiteral& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("hand-counted corpus: lloc and cyclomatic match exactly") {
    for (const auto& expected : kHandCounts) {
        CAPTURE(expected.file);
        auto report = metrics::analyze(read_fixture(expected.file));
        CHECK(report.lloc == expected.lloc);
        CHECK(report.cyclomatic == expected.cyclomatic);
        CHECK(report.warnings.size() == expected.warnings);
    }
}

TEST_CASE("lint: rule table on the lint fixture") {
    auto tokens = metrics::tokenize(read_fixture("m12_lint.js"));
    auto warnings = metrics::lint(tokens);
    REQUIRE(warnings.size() == 5);
    CHECK(warnings[0].rule == "W002");
    CHECK(warnings[0].line == 1);
    CHECK(warnings[1].rule == "W001");
    CHECK(warnings[1].line == 3);
    CHECK(warnings[2].rule == "W004");
    CHECK(warnings[2].line == 3);
    CHECK(warnings[3].rule == "W003");
    CHECK(warnings[3].line == 4);
    CHECK(warnings[4].rule == "W001");
    CHECK(warnings[4].line == 7);
}

TEST_CASE("lint: loose equality plus empty block, var, clean file") {
    auto w1 = metrics::lint(metrics::tokenize("if (a == b) {}"));
    REQUIRE(w1.size() == 2);
    CHECK(w1[0].rule == "W001");
    CHECK(w1[1].rule == "W004");

    auto w2 = metrics::lint(metrics::tokenize("var x = 1;"));
    REQUIRE(w2.size() == 1);
    CHECK(w2[0].rule == "W002");
    CHECK(w2[0].line == 1);

    auto clean = metrics::lint(metrics::tokenize(read_fixture("m05_decisions.js")));
    CHECK(clean.empty());
}

TEST_CASE("lint: empty object literal is not an empty block") {
    CHECK(metrics::lint(metrics::tokenize("let x = {};")).empty());
}

TEST_CASE("halstead: direct formula on a + b") {
    auto tokens = metrics::tokenize("a + b");
    double v = metrics::halstead_volume(tokens);
    CHECK(v == doctest::Approx(3.0 * std::log2(3.0)).epsilon(1e-12));
}

TEST_CASE("halstead: empty input and self-concatenation growth") {
    CHECK(metrics::halstead_volume(metrics::tokenize("")) == 0.0);
    std::string src = read_fixture("m08_ternary.js");
    double once = metrics::halstead_volume(metrics::tokenize(src));
    double twice = metrics::halstead_volume(metrics::tokenize(src + "\n" + src));
    CHECK(twice > once);
}

TEST_CASE("maintainability index: spot values against direct evaluation") {
    double mi = metrics::maintainability_index(1, 1, 1.0);
    CHECK(mi == doctest::Approx((171.0 - 0.23) * 100.0 / 171.0).epsilon(1e-9));

    for (auto [l, g, v] : {std::tuple<int, int, double>{10, 3, 120.0},
                           std::tuple<int, int, double>{555, 62, 9000.0},
                           std::tuple<int, int, double>{1086, 126, 48000.0}}) {
        double direct =
            (171.0 - 5.2 * std::log(v) - 0.23 * g - 16.2 * std::log(static_cast<double>(l))) *
            100.0 / 171.0;
        direct = std::clamp(direct, 0.0, 100.0);
        CHECK(metrics::maintainability_index(l, g, v) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("maintainability index: bounds and monotone decrease in complexity") {
    CHECK(metrics::maintainability_index(0, 0, 0.0) <= 100.0);
    CHECK(metrics::maintainability_index(0, 0, 0.0) >= 0.0);
    CHECK(metrics::maintainability_index(100000, 5000, 1e9) == 0.0);

    double prev = metrics::maintainability_index(50, 1, 500.0);
    for (int g = 2; g < 40; ++g) {
        double cur = metrics::maintainability_index(50, g, 500.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("comment insensitivity: inserting comments changes nothing") {
    std::mt19937 rng(20311);
    for (const auto& expected : kHandCounts) {
        CAPTURE(expected.file);
        std::string src = read_fixture(expected.file);
        auto base = metrics::analyze(src);
        auto tokens = metrics::tokenize(src);

        // line-preserving insertion: a block comment appended to each line
        // that does not sit inside a template literal
        std::string line_variant;
        std::istringstream lines(src);
        std::string line;
        bool in_template = false;
        while (std::getline(lines, line)) {
            size_t ticks = static_cast<size_t>(std::count(line.begin(), line.end(), '`'));
            bool crosses = ticks % 2 == 1;
            if (!in_template && !crosses) line_variant += line + " /* note */\n";
            else line_variant += line + "\n";
            if (crosses) in_template = !in_template;
        }
        auto report = metrics::analyze(line_variant);
        CHECK(report.lloc == base.lloc);
        CHECK(report.cyclomatic == base.cyclomatic);
        CHECK(report.halstead_volume == doctest::Approx(base.halstead_volume));
        CHECK(report.warnings.size() == base.warnings.size());

        // token-boundary insertion loses newlines, so skip the fixtures whose
        // counts depend on automatic semicolons
        if (expected.file == std::string("m09_strings.js") ||
            expected.file == std::string("m13_asi.js"))
            continue;
        if (tokens.empty()) continue;
        for (int trial = 0; trial < 8; ++trial) {
            size_t boundary = rng() % (tokens.size() + 1);
            bool near_template =
                (boundary > 0 && tokens[boundary - 1].kind == TokenKind::Template) ||
                (boundary < tokens.size() && tokens[boundary].kind == TokenKind::Template);
            if (near_template) continue;
            std::string variant = tokens_with_comment(tokens, boundary);
            auto flat = metrics::analyze(tokens_with_comment(tokens, tokens.size() + 1));
            auto varied = metrics::analyze(variant);
            CHECK(varied.lloc == flat.lloc);
            CHECK(varied.cyclomatic == flat.cyclomatic);
        }
    }
}

TEST_CASE("concatenation additivity for function-bearing files") {
    const char* files[] = {"m05_decisions.js", "m06_switch.js", "m07_loops.js",
                           "m08_ternary.js", "m14_nested.js"};
    for (const char* a : files) {
        for (const char* b : files) {
            CAPTURE(a);
            CAPTURE(b);
            std::string sa = read_fixture(a);
            std::string sb = read_fixture(b);
            auto ra = metrics::analyze(sa);
            auto rb = metrics::analyze(sb);
            auto rc = metrics::analyze(sa + "\n" + sb);
            CHECK(rc.lloc == ra.lloc + rb.lloc);
            CHECK(rc.cyclomatic == ra.cyclomatic + rb.cyclomatic);
        }
    }
}

TEST_CASE("cyclomatic: at least 1 for any input") {
    CHECK(metrics::cyclomatic(metrics::tokenize("let x = 1;")) == 1);
    CHECK(metrics::cyclomatic(metrics::tokenize("")) == 1);
}

TEST_CASE("legacy stand-in file analyzes cleanly") {
    std::ifstream in(std::string(KGOV_FIXTURES_DIR) + "/workflow/legacy/input.js");
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto report = metrics::analyze(buf.str());
    CHECK(report.lloc > 100);
    CHECK(report.cyclomatic > 20);
    bool has_var = false;
    for (const auto& w : report.warnings) has_var |= w.rule == "W002";
    CHECK(has_var);
    CHECK(report.maintainability_index > 0.0);
    CHECK(report.maintainability_index < 100.0);
}
