// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <string>

#include "../unit/oracles.hpp"
#include "../unit/support.hpp"

using namespace fightgen;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Batch {
    std::vector<BatchRow> rows;
    std::vector<FightTrace> traces;
    double max_plan_ms = 0.0;
    double seconds = 0.0;
    BatchTotals totals;
};

const Batch& batch(const std::string& preset) {
    static std::map<std::string, Batch> cache;
    if (auto it = cache.find(preset); it != cache.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioConfig cfg = load_scenario(support::preset_path(preset));
    const auto data = load_fight_data(cfg);
    Batch b;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        FightResult r = run_scenario(cfg, *data, seed);
        b.rows.push_back({seed, r.stats});
        b.max_plan_ms = std::max(b.max_plan_ms, r.timing.max_ms);
        b.traces.push_back(std::move(r.trace));
    }
    b.seconds = seconds_since(t0);
    b.totals = totals(b.rows);
    return cache.emplace(preset, std::move(b)).first->second;
}

PlannerContext fixture_context(double tf) {
    const FightData& d = support::fixture();
    PlannerContext ctx{&d.machine, &d.table, {}, {}};
    ctx.params[0].t_f = ctx.params[1].t_f = tf;
    return ctx;
}

std::vector<PlanningWorld> bout_worlds(std::uint64_t seed, int frames, std::size_t limit) {
    const FightData& d = support::fixture();
    ArenaSetup setup = make_setup(load_scenario(support::preset_path("tf_1_vs_1")), d, seed);
    setup.duration_frames = frames;
    std::vector<PlanningWorld> worlds;
    run_arena(setup, {}, [&](const PlanningWorld& w, const GameTree&, const PlanResult&) {
        if (worlds.size() < limit) worlds.push_back(w);
    });
    return worlds;
}

Verdict oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(7);
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
        GameTree t = oracle::random_tree(rng, static_cast<int>(rng.range(1, 6)), k % 2 == 0);
        const oracle::Solution o = oracle::enumerate(t);
        const PlanResult mm = minimax(t);
        const PlanResult ab = alpha_beta(t);
        bad += mm.root_value != o.value || mm.chosen_action != o.choice || ab.root_value != mm.root_value ||
               ab.chosen_action != mm.chosen_action;
    }
    const double s = seconds_since(t0);
    return {bad == 0 && s < 10.0, "100 trees, " + std::to_string(bad) + " disagreements, " + fmt(s) + " s"};
}

Verdict zero_sum() {
    Rng rng(8);
    int bad = 0, leaves = 0;
    for (int k = 0; k < 100; ++k) {
        GameTree t = oracle::random_tree(rng, static_cast<int>(rng.range(1, 6)), k % 2 == 0);
        minimax(t);
        int n = 0;
        bad += oracle::zero_sum_violations(*t.root, &n);
        leaves += n;
    }
    const PlannerContext ctx = fixture_context(1.5);
    for (const auto& w : bout_worlds(4, 600, 10)) {
        GameTree t = expand_tree(w, ctx);
        minimax(t);
        int n = 0;
        bad += oracle::zero_sum_violations(*t.root, &n);
        leaves += n;
    }
    return {bad == 0 && leaves > 0, std::to_string(leaves) + " leaves, " + std::to_string(bad) + " violations"};
}

Verdict horizon_asymmetry() {
    const Batch& b = batch("tf_1_vs_3");
    const auto weak = b.totals.hits[0], strong = b.totals.hits[1];
    const bool pass = strong >= 2 * weak && strong > 0;
    return {pass, "hits t_f=3: " + std::to_string(strong) + ", t_f=1: " + std::to_string(weak) + " (" +
                      fmt(b.seconds, 1) + " s)"};
}

Verdict mutual_caution() {
    const Batch& deep = batch("tf_3_vs_3");
    const Batch& shallow = batch("tf_1_vs_1");
    const double fd = deep.totals.defense_fraction(), fs = shallow.totals.defense_fraction();
    const auto hd = deep.totals.total_hits(), hs = shallow.totals.total_hits();
    return {fd > fs && hd < hs, "defense fraction " + fmt(fd) + " vs " + fmt(fs) + ", hits " + std::to_string(hd) +
                                    " vs " + std::to_string(hs)};
}

Verdict style_separation() {
    const double out = batch("outboxer_vs_infighter").totals.separation_mean;
    const double in = batch("infighter_vs_infighter").totals.separation_mean;
    const double ratio = out / in;
    return {ratio >= 1.25, "mean separation " + fmt(out) + " m vs " + fmt(in) + " m, ratio " + fmt(ratio, 2)};
}

Verdict structure() {
    const auto t0 = std::chrono::steady_clock::now();
    const FightData& d = support::fixture();
    const ActionMachine& m = d.machine;
    std::vector<std::string> failures;

    // Every choosable action reaches every other through successor lists.
    std::vector<ActionId> choosable;
    for (const auto& a : m.actions())
        if (a.category != Category::Reaction) choosable.push_back(a.id);
    for (ActionId s : choosable) {
        std::set<ActionId> seen{s};
        std::queue<ActionId> q;
        q.push(s);
        while (!q.empty()) {
            const ActionId u = q.front();
            q.pop();
            for (ActionId v : m.successors(u))
                if (seen.insert(v).second) q.push(v);
        }
        if (seen.size() != choosable.size()) failures.push_back("machine not strongly connected");
    }

    const FrameGraph again = largest_scc(*d.graph);
    if (again.size() != d.graph->size()) failures.push_back("SCC not idempotent");

    Rng rng(30);
    int path_bad = 0;
    for (int round = 0; round < 4; ++round) {
        const FrameGraph g = oracle::ring_with_chords(rng, 30, 12);
        path_bad += oracle::path_table_mismatches(g, static_cast<int>(rng.range(0, 29)));
    }
    if (path_bad) failures.push_back(std::to_string(path_bad) + " path mismatches");

    int forced = 0, forced_bad = 0;
    const PlannerContext ctx = fixture_context(1.5);
    for (const auto& w : bout_worlds(2, 600, 10)) {
        GameTree t = expand_tree(w, ctx);
        std::function<void(const TreeNode&)> walk = [&](const TreeNode& n) {
            if (n.kind == NodeKind::Forced) {
                ++forced;
                forced_bad += n.edges.size() != 1 ||
                              m.action(n.edges.front().action_id).category != Category::Reaction;
            }
            for (const auto& e : n.edges)
                if (e.child) walk(*e.child);
        };
        walk(*t.root);
    }
    if (forced == 0 || forced_bad) failures.push_back("forced nodes " + std::to_string(forced_bad) + "/" +
                                                      std::to_string(forced) + " bad");

    // Actions play whole: a start is closed by its end at the planned frame
    // unless interrupted by a hit on that frame.
    int subdivided = 0;
    for (const auto& trace : batch("tf_1_vs_1").traces) {
        std::array<std::optional<FightEvent>, 2> open;
        std::array<int, 2> last_hit{-1, -1};
        for (const auto& e : trace) {
            if (e.kind == EventKind::Hit) {
                last_hit[index(other(e.fighter))] = e.frame;
                continue;
            }
            auto& cur = open[index(e.fighter)];
            if (e.kind == EventKind::ActionEnd) {
                if (!cur || cur->action != e.action) ++subdivided;
                else if (e.interrupted ? last_hit[index(e.fighter)] != e.frame : e.frame != cur->end) ++subdivided;
                cur.reset();
            } else {
                subdivided += cur.has_value();
                cur = e;
            }
        }
    }
    if (subdivided) failures.push_back(std::to_string(subdivided) + " subdivided actions");

    const double s = seconds_since(t0);
    if (s >= 30.0) failures.push_back("took " + fmt(s, 1) + " s");
    std::string detail = failures.empty() ? "connectivity, SCC, paths, " + std::to_string(forced) +
                                                " forced nodes, traces ok (" + fmt(s, 1) + " s)"
                                          : "";
    for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
    return {failures.empty(), detail};
}

Verdict table_and_replay() {
    const FightData& d = support::fixture();
    const ActionMachine& m = d.machine;
    const int mismatches = oracle::table_mismatches(d.table, d.log, m);

    // Scripted uppercut against a standing opponent, with and without the
    // table's modal counter at its modal offset.
    const ActionId idle = support::id_of(m, "shuffle");
    const ActionId upper = support::id_of(m, "uppercut");
    const auto counters = d.table.entries(AttackKind::Uppercut);
    if (counters.empty()) return {false, "no uppercut counters in the table"};
    const DefenseEntry& top = counters.front();
    std::vector<ActionId> pool{idle};
    for (const auto& a : m.actions())
        if (a.category == Category::Defense) pool.push_back(a.id);
    const auto prefixes = support::align_prefixes(m, idle, pool, upper, top.defense_id, top.delta_t_mode);
    if (!prefixes) return {false, "no aligned prefixes"};

    const auto& o = *m.action(upper).offense;
    ArenaSetup setup;
    setup.machine = &m;
    setup.table = &d.table;
    setup.duration_frames = 240;
    const double gap = 0.5 * (o.reach_min + o.reach_max);
    setup.start = {Pose{{0.0, 0.0}, 0.0}, Pose{{gap, 0.0}, std::numbers::pi}};

    auto uppercut_result = [&](ActionId b_next) {
        auto a_plan = prefixes->first;
        a_plan.push_back(upper);
        auto b_plan = prefixes->second;
        b_plan.push_back(b_next);
        const FightResult r = run_arena(setup, support::script({a_plan, b_plan}, idle));
        std::optional<OutcomeKind> out;
        for (const auto& e : r.trace)
            if (e.kind == EventKind::ActionEnd && e.fighter == Side::A && e.action == upper) out = e.outcome;
        return out;
    };
    const auto plain = uppercut_result(idle);
    const auto defended = uppercut_result(top.defense_id);
    const bool pass = mismatches == 0 && plain == OutcomeKind::Hit && defended == OutcomeKind::Miss;
    auto name = [](std::optional<OutcomeKind> k) { return k ? std::string(to_string(*k)) : std::string("none"); };
    return {pass, std::to_string(mismatches) + " table mismatches over " + std::to_string(d.table.size()) +
                      " entries; uppercut vs " + m.action(top.defense_id).name + " at dt " +
                      std::to_string(top.delta_t_mode) + ": " + name(plain) + " -> " + name(defended)};
}

Verdict determinism_and_speed() {
    const ScenarioConfig cfg = load_scenario(support::preset_path("tf_1_vs_1"));
    const FightData& d = support::fixture();
    std::string first;
    bool same = true;
    for (int k = 0; k < 5; ++k) {
        const FightResult r = run_scenario(cfg, d, cfg.seed);
        std::ostringstream out;
        write_trace(out, r.trace, d.machine);
        if (k == 0) first = out.str();
        else same &= out.str() == first;
    }
    const ScenarioConfig deep = load_scenario(support::preset_path("tf_3_vs_3"));
    const double max_ms = batch("tf_3_vs_3").max_plan_ms;
    const bool pass = same && !first.empty() && max_ms < 1000.0 && deep.fighters[0].t_f == 3.0 &&
                      deep.planner.branching_cap == 8;
    return {pass, std::string(same ? "5 identical traces" : "traces differ") + ", slowest plan at t_f=3 " +
                      fmt(max_ms, 1) + " ms"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"oracle equivalence", oracle_equivalence}, {"zero-sum leaves", zero_sum},
        {"horizon asymmetry", horizon_asymmetry},   {"mutual caution", mutual_caution},
        {"style separation", style_separation},     {"structural properties", structure},
        {"table and replay", table_and_replay},     {"determinism and speed", determinism_and_speed},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << "criterion " << i + 1 << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
                  << v.detail << std::endl;
    }
    return failed ? 1 : 0;
}
