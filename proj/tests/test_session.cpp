#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgov/session.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace kgov;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KGOV_FIXTURES_DIR;

session::DiscoveryCandidate make_candidate(const std::string& kind, const std::string& key,
                                           int step) {
    session::DiscoveryCandidate c;
    c.raw = kind + " " + key + " = something discovered";
    c.proposed_kind = kind;
    c.proposed_key = key;
    c.proposed_value = "something discovered";
    c.origin_step = step;
    return c;
}

// the 13 scripted discoveries shipped with the mock, in emission order
std::vector<session::DiscoveryCandidate> scripted_discoveries() {
    std::vector<session::DiscoveryCandidate> all;
    for (int step = 1; step <= 5; ++step) {
        auto path = kFixtures / "mock" / ("step-" + std::to_string(step) + ".state");
        std::ifstream in(path);
        if (!in) continue;
        std::string line;
        while (std::getline(in, line)) {
            if (auto c = session::parse_state_line(line, step)) all.push_back(*c);
        }
    }
    return all;
}

} // namespace

TEST_CASE("seed state fixture carries four validated seed entries") {
    auto state = session::load_state(kFixtures / "state/seed-state.json");
    CHECK(state.entries.size() == 4);
    for (const auto& e : state.entries) {
        CHECK(e.origin_step == 0);
        CHECK(e.validated);
    }
}

TEST_CASE("learning_cycle: class-signature discovery lands as a validated entry") {
    auto graphs = kg::load_tracks(kFixtures / "kg");
    session::SessionState state;

    auto candidate = make_candidate("class-signature", "MapManager.initMap", 2);
    auto outcome = session::learning_cycle(candidate, graphs, state, session::CycleMode::Auto);
    REQUIRE(outcome.state.entries.size() == 1);
    const auto& entry = outcome.state.entries[0];
    CHECK(entry.kind == session::EntryKind::ClassSignature);
    CHECK(entry.key == "MapManager.initMap");
    CHECK(entry.origin_step == 2);
    CHECK(entry.validated);
    CHECK_FALSE(outcome.node.has_value());
    CHECK(state.entries.empty()); // input untouched
}

TEST_CASE("learning_cycle: schema gate rejects unknown kinds, nothing persists") {
    auto graphs = kg::load_tracks(kFixtures / "kg");
    session::SessionState state;
    auto candidate = make_candidate("", "CONFIG.map.zoom", 1);
    CHECK_THROWS_AS(
        session::learning_cycle(candidate, graphs, state, session::CycleMode::Auto),
        ValidationFailed);
    CHECK(state.entries.empty());

    auto dup = make_candidate("config-key", "CONFIG.map.zoom", 1);
    auto once = session::learning_cycle(dup, graphs, state, session::CycleMode::Auto);
    CHECK_THROWS_AS(
        session::learning_cycle(dup, graphs, once.state, session::CycleMode::Auto),
        ValidationFailed);
}

TEST_CASE("learning_cycle: reviewed mode needs builder approval") {
    auto graphs = kg::load_tracks(kFixtures / "kg");
    session::SessionState state;
    auto candidate = make_candidate("pattern", "vector-tile-fallback", 2);

    CHECK_THROWS_AS(
        session::learning_cycle(candidate, graphs, state, session::CycleMode::Reviewed),
        ApprovalWithheld);

    auto deny = [](const session::StateEntry&, const std::optional<kg::KnowledgeNode>&) {
        return false;
    };
    CHECK_THROWS_AS(session::learning_cycle(candidate, graphs, state,
                                            session::CycleMode::Reviewed, std::nullopt, deny),
                    ApprovalWithheld);

    auto approve = [](const session::StateEntry&, const std::optional<kg::KnowledgeNode>&) {
        return true;
    };
    auto outcome = session::learning_cycle(candidate, graphs, state,
                                           session::CycleMode::Reviewed, std::nullopt, approve);
    CHECK(outcome.state.entries.size() == 1);
}

TEST_CASE("learning_cycle: promotion drafts a node under an existing category") {
    auto graphs = kg::load_tracks(kFixtures / "kg");
    session::SessionState state;
    auto candidate = make_candidate("pattern", "vector-tile-fallback", 2);

    SUBCASE("missing link target") {
        CHECK_THROWS_AS(
            session::learning_cycle(candidate, graphs, state, session::CycleMode::Auto,
                                    std::optional<kg::NodeId>("knowledge:not-there")),
            LinkTargetMissing);
    }

    SUBCASE("promoted under a live category") {
        auto outcome = session::learning_cycle(
            candidate, graphs, state, session::CycleMode::Auto,
            std::optional<kg::NodeId>("knowledge:architecture-patterns"));
        REQUIRE(outcome.node.has_value());
        CHECK(outcome.node->id == "knowledge:learned:vector-tile-fallback");
        CHECK(outcome.node->parent == "knowledge:architecture-patterns");
        REQUIRE(outcome.updated_track.has_value());
        CHECK(outcome.updated_track->nodes.count("knowledge:learned:vector-tile-fallback") == 1);
        CHECK(kg::validate_graph(*outcome.updated_track).empty());
    }
}

TEST_CASE("scripted replay: 13 discoveries grow the seed state from 4 to 17") {
    auto graphs = kg::load_tracks(kFixtures / "kg");
    auto state = session::load_state(kFixtures / "state/seed-state.json");
    auto discoveries = scripted_discoveries();
    REQUIRE(discoveries.size() == 13);

    for (const auto& c : discoveries) {
        auto outcome = session::learning_cycle(c, graphs, state, session::CycleMode::Auto);
        state = std::move(outcome.state);
    }
    CHECK(state.entries.size() == 17);
}

TEST_CASE("inject_state: validated entries strictly before the step, append order") {
    auto state = session::load_state(kFixtures / "state/seed-state.json");

    SUBCASE("step 1 over the seed yields exactly the 4 seed entries") {
        auto injected = session::inject_state(state, 1);
        CHECK(injected.size() == 4);
    }

    SUBCASE("unvalidated entries never inject") {
        session::StateEntry hidden;
        hidden.kind = session::EntryKind::Pattern;
        hidden.key = "unreviewed";
        hidden.origin_step = 0;
        hidden.validated = false;
        state.entries.push_back(hidden);
        auto injected = session::inject_state(state, 5);
        for (const auto& e : injected) CHECK(e.key != "unreviewed");
    }

    SUBCASE("same-step discoveries appear only from the next step on") {
        session::StateEntry fresh;
        fresh.kind = session::EntryKind::ConfigKey;
        fresh.key = "CONFIG.map.zoom";
        fresh.origin_step = 2;
        fresh.validated = true;
        state.entries.push_back(fresh);
        CHECK(session::inject_state(state, 2).size() == 4);
        CHECK(session::inject_state(state, 3).size() == 5);
    }
}

TEST_CASE("property: injection is monotone over randomized discovery logs") {
    std::mt19937 rng(2025);
    const char* kinds[] = {"config-key", "class-signature", "event-contract", "dom-id",
                           "pattern"};
    auto graphs = kg::load_tracks(kFixtures / "kg");

    for (int trial = 0; trial < 50; ++trial) {
        auto state = session::load_state(kFixtures / "state/seed-state.json");
        int discoveries = static_cast<int>(rng() % 20);
        for (int i = 0; i < discoveries; ++i) {
            int step = 1 + static_cast<int>(rng() % 5);
            auto c = make_candidate(kinds[rng() % 5],
                                    "key-" + std::to_string(trial) + "-" + std::to_string(i),
                                    step);
            state = session::learning_cycle(c, graphs, state, session::CycleMode::Auto).state;
        }
        size_t prev = 0;
        for (int step = 1; step <= 6; ++step) {
            auto injected = session::inject_state(state, step);
            CHECK(injected.size() >= prev);
            prev = injected.size();
        }
    }
}

TEST_CASE("persist/load: identity round-trip with a version bump") {
    auto dir = fs::temp_directory_path() / "kgov-session";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto state = session::load_state(kFixtures / "state/seed-state.json");
    state.version = 3;
    session::persist_state(state, dir / "state.json");
    CHECK(state.version == 4); // persist bumps 3 -> 4

    auto reloaded = session::load_state(dir / "state.json");
    CHECK(reloaded == state);
    CHECK(session::inject_state(reloaded, 4) == session::inject_state(state, 4));
}

TEST_CASE("persist: stale write against a newer file") {
    auto dir = fs::temp_directory_path() / "kgov-session-stale";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto state = session::load_state(kFixtures / "state/seed-state.json");
    auto newer = state;
    newer.version = 9;
    session::persist_state(newer, dir / "state.json"); // file now at version 10

    auto older = state;
    older.version = 7;
    CHECK_THROWS_AS(session::persist_state(older, dir / "state.json"), StaleWrite);
}

TEST_CASE("parse_state_block: fenced STATE blocks and line grammar") {
    std::string text =
        "Some assistant answer.\n"
        "```STATE:\n"
        "config-key CONFIG.map.zoom = initial zoom level\n"
        "dom-id sl-opac = opacity slider\n"
        "not a valid line\n"
        "```\n"
        "Trailing prose.\n";
    auto candidates = session::parse_state_block(text, 3);
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].proposed_kind == "config-key");
    CHECK(candidates[0].proposed_key == "CONFIG.map.zoom");
    CHECK(candidates[0].proposed_value == "initial zoom level");
    CHECK(candidates[0].origin_step == 3);
    CHECK(candidates[1].proposed_kind == "dom-id");

    CHECK(session::parse_state_block("no block here", 1).empty());
    CHECK_FALSE(session::parse_state_line("junk", 1).has_value());
}

TEST_CASE("malformed state files") {
    auto dir = fs::temp_directory_path() / "kgov-session-bad";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "bad.json");
        out << "[1,2,3]";
    }
    CHECK_THROWS_AS(session::load_state(dir / "bad.json"), MalformedDocument);
    CHECK_THROWS_AS(session::load_state(dir / "missing.json"), MalformedDocument);
}
