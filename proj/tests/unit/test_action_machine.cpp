#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>
#include <set>
#include <sstream>

#include "fightgen/errors.hpp"
#include "support.hpp"

using namespace fightgen;
using support::RosterEntry;

namespace {

ActionAnnotation annotation(ActionId id, Category c, int clip, int duration) {
    ActionAnnotation a;
    a.id = id;
    a.name = "a" + std::to_string(id);
    a.category = c;
    a.start = {clip, 0};
    a.end = {clip, duration};
    a.duration = duration;
    a.line = id;
    return a;
}

// Oracle: b follows a iff b is choosable and its start is reachable from a's
// end in the frame graph.
bool graph_reaches(const FrameGraph& g, FrameRef from, FrameRef to) {
    const auto s = *g.index_of(from), t = *g.index_of(to);
    std::vector<bool> seen(g.size(), false);
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        if (u == t) return true;
        for (const auto& e : g.out_edges(u)) {
            if (!seen[e.to]) {
                seen[e.to] = true;
                q.push(e.to);
            }
        }
    }
    return false;
}

}  // namespace

TEST_CASE("active window inside the duration is accepted, overflow is not") {
    const auto data = support::build_roster({{"ten", Category::Transition, 10}, {"other", Category::Transition, 12}});
    const FrameGraph& g = *data->graph;

    ActionAnnotation ok = annotation(1, Category::Offense, 1, 10);
    ok.offense = OffenseProfile{AttackKind::Jab, {3, 6}, 0.4, 1.0, 0.3, 1.0};
    CHECK_NOTHROW(load_actions(std::vector{ok}, g));

    ActionAnnotation bad = ok;
    bad.offense->active = {9, 12};
    CHECK_THROWS_AS(load_actions(std::vector{bad}, g), ValidationError);

    ActionAnnotation guard = annotation(1, Category::Defense, 1, 10);
    guard.defense = DefenseProfile{{4, 11}};
    CHECK_THROWS_AS(load_actions(std::vector{guard}, g), ValidationError);

    ActionAnnotation missing_profile = annotation(1, Category::Offense, 1, 10);
    CHECK_THROWS_AS(load_actions(std::vector{missing_profile}, g), ValidationError);
}

TEST_CASE("a segment whose frames are not chained by edges is rejected") {
    const auto data = support::build_roster({{"ten", Category::Transition, 10}, {"other", Category::Transition, 12}});
    ActionAnnotation a = annotation(1, Category::Transition, 1, 10);
    a.end = {2, 10};
    CHECK_THROWS_AS(load_actions(std::vector{a}, *data->graph), ValidationError);

    // A graph without the middle successor edge.
    std::vector<std::pair<FrameRef, FramePose>> nodes;
    std::vector<FrameGraph::RawEdge> edges;
    for (int i = 0; i <= 4; ++i) nodes.push_back({{1, i}, FramePose{}});
    for (int i = 0; i < 4; ++i)
        if (i != 2) edges.push_back({{1, i}, {1, i + 1}, 0.0, EdgeKind::Successor});
    const FrameGraph broken(nodes, edges);
    CHECK_THROWS_AS(load_actions(std::vector{annotation(1, Category::Transition, 1, 4)}, broken), ValidationError);
}

TEST_CASE("shipped roster loads 18 actions") {
    const ActionMachine& m = support::fixture().machine;
    CHECK(m.actions().size() == 18);
    for (const char* name : {"jab", "straight", "hook", "uppercut", "low-kick", "head-slip", "parry", "block",
                             "sway-back", "duck", "step-forward", "step-left", "step-right", "shuffle",
                             "back-step", "flinch", "stagger", "knockdown"}) {
        CHECK_MESSAGE(m.find_by_name(name).has_value(), name);
    }
}

TEST_CASE("two transitions reach each other and themselves") {
    const auto data = support::build_roster({{"left", Category::Transition, 8}, {"right", Category::Transition, 9}});
    const ActionMachine& m = data->machine;
    CHECK(std::vector<ActionId>(m.successors(1).begin(), m.successors(1).end()) == std::vector<ActionId>{1, 2});
    CHECK(std::vector<ActionId>(m.successors(2).begin(), m.successors(2).end()) == std::vector<ActionId>{1, 2});
    CHECK(m.glue(1, 2).frames == 1);
    CHECK(m.glue(1, 1).frames == 2);
    CHECK(m.glue(1, 1).track.size() == 3);
}

TEST_CASE("reactions are never offered and always lead somewhere") {
    const ActionMachine& m = support::fixture().machine;
    std::set<ActionId> reactions;
    for (const auto& a : m.actions())
        if (a.category == Category::Reaction) reactions.insert(a.id);
    REQUIRE(reactions.size() == 3);
    for (const auto& a : m.actions()) {
        for (ActionId s : m.successors(a.id)) CHECK(!reactions.contains(s));
        if (a.category == Category::Reaction) CHECK(!m.successors(a.id).empty());
    }
}

TEST_CASE("successor lists match graph reachability") {
    const FightData& d = support::fixture();
    const ActionMachine& m = d.machine;
    for (const auto& a : m.actions()) {
        std::vector<ActionId> expected;
        for (const auto& b : m.actions()) {
            if (b.category == Category::Reaction) continue;
            if (graph_reaches(*d.graph, a.end_node(), b.start_node())) expected.push_back(b.id);
        }
        const auto got = m.successors(a.id);
        CHECK(std::vector<ActionId>(got.begin(), got.end()) == expected);
    }
}

TEST_CASE("jab successors are ascending and stable") {
    const ActionMachine& m = support::fixture().machine;
    const ActionId jab = support::id_of(m, "jab");
    const auto first = launchable_actions(m, jab);
    CHECK(std::is_sorted(first.begin(), first.end()));
    CHECK(first.size() == 15);
    for (int k = 0; k < 3; ++k) CHECK(launchable_actions(m, jab) == first);
}

TEST_CASE("unknown ids are input errors") {
    const ActionMachine& m = support::fixture().machine;
    CHECK_THROWS_AS(m.action(999), InputError);
    CHECK_THROWS_AS(m.successors(-3), InputError);
    CHECK_THROWS_AS(m.glue(1, 999), InputError);
    CHECK_THROWS_AS(m.glue(1, support::id_of(m, "stagger")), InputError);
    CHECK(m.find(999) == nullptr);
}

TEST_CASE("glue ends on the next action's entry and carries its root motion") {
    const FightData& d = support::fixture();
    const ActionMachine& m = d.machine;
    for (const auto& a : m.actions()) {
        for (ActionId b : m.successors(a.id)) {
            const Transition& t = m.glue(a.id, b);
            CHECK(t.frames >= 1);
            CHECK(t.track.size() == static_cast<std::size_t>(t.frames) + 1);
            CHECK(t.frames == (a.id == b ? 2 : 1));
        }
    }
    const Action& step = m.action(support::id_of(m, "step-forward"));
    CHECK(step.root_displacement.x == doctest::Approx(0.45));
    CHECK(step.track.size() == static_cast<std::size_t>(step.duration) + 1);
}

TEST_CASE("broken connectivity names the unreachable pair") {
    // Clip 1 can flow into clip 2, but nothing leads back.
    std::vector<std::pair<FrameRef, FramePose>> nodes;
    std::vector<FrameGraph::RawEdge> edges;
    for (int c = 1; c <= 2; ++c) {
        for (int i = 0; i <= 3; ++i) nodes.push_back({{c, i}, FramePose{}});
        for (int i = 0; i < 3; ++i) edges.push_back({{c, i}, {c, i + 1}, 0.0, EdgeKind::Successor});
    }
    edges.push_back({{1, 3}, {2, 0}, 0.0, EdgeKind::Transition});
    edges.push_back({{2, 3}, {2, 0}, 0.0, EdgeKind::Transition});
    edges.push_back({{1, 3}, {1, 0}, 0.0, EdgeKind::Transition});
    const FrameGraph g(nodes, edges);
    std::vector<ActionAnnotation> ann{annotation(1, Category::Transition, 1, 3),
                                      annotation(2, Category::Transition, 2, 3)};
    auto acts = load_actions(ann, g);
    std::map<ActionId, FrameRef> starts{{1, {1, 0}}, {2, {2, 0}}};
    const PathTable paths = shortest_paths_to_action_starts(g, starts);
    try {
        build_action_machine(acts, paths);
        FAIL("expected a construction error");
    } catch (const ConstructionError& e) {
        CHECK(std::string(e.what()).find("a1 unreachable from a2") != std::string::npos);
    }
}

TEST_CASE("annotation files round-trip") {
    const auto path = support::data_dir() / "actions.txt";
    const auto records = load_annotations(path.string());
    std::stringstream ss;
    write_annotations(ss, records);
    const auto again = parse_annotations(ss);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(again[i].id == records[i].id);
        CHECK(again[i].name == records[i].name);
        CHECK(again[i].offense == records[i].offense);
        CHECK(again[i].defense == records[i].defense);
        CHECK(again[i].duration == records[i].duration);
    }
}
