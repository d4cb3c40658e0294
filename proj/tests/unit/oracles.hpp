#pragma once

// Independent reference computations shared by the unit and acceptance tests:
// brute-force shortest paths, the sparring-log tally, random temporal trees
// and exhaustive route enumeration.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "fightgen/planner.hpp"
#include "fightgen/rng.hpp"
#include "fightgen/scenario.hpp"

namespace oracle {

using namespace fightgen;

// --- graphs -------------------------------------------------------------------

/// Graph over nodes (1, 0..n-1) with the given directed edges.
inline FrameGraph digraph(int n, const std::vector<std::pair<int, int>>& edges, std::vector<double> costs = {}) {
    std::vector<std::pair<FrameRef, FramePose>> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back({{1, i}, FramePose{}});
    std::vector<FrameGraph::RawEdge> raw;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        raw.push_back({{1, edges[k].first}, {1, edges[k].second}, costs.empty() ? 1.0 : costs[k],
                       EdgeKind::Transition});
    }
    return FrameGraph(std::move(nodes), raw);
}

/// Ring of n nodes plus `chords` random edges, integer costs 0..6.
inline FrameGraph ring_with_chords(Rng& rng, int n, int chords) {
    std::vector<std::pair<int, int>> e;
    std::vector<double> cost;
    for (int i = 0; i < n; ++i) {
        e.push_back({i, (i + 1) % n});
        cost.push_back(static_cast<double>(rng.range(0, 6)));
    }
    for (int k = 0; k < chords; ++k) {
        const int a = static_cast<int>(rng.range(0, n - 1)), b = static_cast<int>(rng.range(0, n - 1));
        if (a == b) continue;
        e.push_back({a, b});
        cost.push_back(static_cast<double>(rng.range(0, 6)));
    }
    return digraph(n, e, cost);
}

struct BestPath {
    double cost = 0.0;
    std::vector<int> frames;
};

/// Minimum of (cost, hops, node sequence) over all simple paths src -> target.
inline std::optional<BestPath> brute_force_path(const FrameGraph& g, int src, int target) {
    using Key = std::tuple<double, std::size_t, std::vector<int>>;
    std::optional<Key> best;
    std::vector<int> path{src};
    std::vector<bool> on(g.size(), false);
    on[static_cast<std::size_t>(src)] = true;
    std::function<void(int, double)> dfs = [&](int u, double c) {
        if (u == target) {
            Key k{c, path.size() - 1, path};
            if (!best || k < *best) best = k;
            return;
        }
        for (const auto& edge : g.out_edges(static_cast<std::size_t>(u))) {
            const int v = static_cast<int>(edge.to);
            if (on[static_cast<std::size_t>(v)]) continue;
            on[static_cast<std::size_t>(v)] = true;
            path.push_back(v);
            dfs(v, c + edge.cost);
            path.pop_back();
            on[static_cast<std::size_t>(v)] = false;
        }
    };
    dfs(src, 0.0);
    if (!best) return std::nullopt;
    return BestPath{std::get<0>(*best), std::get<2>(*best)};
}

/// Count of sources whose table path differs from the brute-force one.
inline int path_table_mismatches(const FrameGraph& g, int target) {
    const PathTable t = shortest_paths_to_action_starts(g, {{1, {1, target}}});
    int bad = 0;
    for (int src = 0; src < static_cast<int>(g.size()); ++src) {
        const auto want = brute_force_path(g, src, target);
        const auto got = t.find({1, src}, 1);
        if (!want || !got) {
            bad += want.has_value() != got.has_value();
            continue;
        }
        std::vector<int> frames;
        for (const auto& r : got->nodes) frames.push_back(r.frame);
        bad += got->cost != want->cost || frames != want->frames;
    }
    return bad;
}

// --- sparring log ---------------------------------------------------------------

struct TallyEntry {
    std::vector<int> offsets;  // successful observations
    int overlapped = 0;
};

// Written straight from the pairing rule: for every attack, look at each
// opponent defense record, keep those whose guard frames share at least one
// frame with the attack's active frames, and take the one launched closest to
// the attack (earlier launch, then lower id, on equal distance).
inline std::map<std::pair<AttackKind, ActionId>, TallyEntry> tally(const std::vector<SparringRecord>& log,
                                                                   const ActionMachine& m) {
    std::map<std::pair<AttackKind, ActionId>, TallyEntry> out;
    for (const auto& atk : log) {
        const Action& a = m.action(atk.action);
        if (!a.offense) continue;
        std::vector<int> active;
        for (int f = a.offense->active.begin; f < a.offense->active.end; ++f) active.push_back(atk.frame + f);
        const SparringRecord* pick = nullptr;
        int pick_dist = 0;
        for (const auto& d : log) {
            if (d.fighter == atk.fighter) continue;
            const Action& def = m.action(d.action);
            if (!def.defense) continue;
            bool shares = false;
            for (int f : active) shares |= def.defense->guard.contains(f - d.frame);
            if (!shares) continue;
            const int dist = std::abs(d.frame - atk.frame);
            const bool better = !pick || dist < pick_dist ||
                                (dist == pick_dist && (d.frame < pick->frame ||
                                                       (d.frame == pick->frame && d.action < pick->action)));
            if (better) {
                pick = &d;
                pick_dist = dist;
            }
        }
        if (!pick) continue;
        auto& e = out[{a.offense->kind, pick->action}];
        ++e.overlapped;
        if (atk.outcome != LogOutcome::Hit) e.offsets.push_back(pick->frame - atk.frame);
    }
    return out;
}

/// Entry-for-entry comparison of a table with the tally; returns mismatch count.
inline int table_mismatches(const OffenseDefenseTable& table, const std::vector<SparringRecord>& log,
                            const ActionMachine& m) {
    int bad = 0;
    std::size_t expected = 0;
    for (const auto& [key, o] : tally(log, m)) {
        const DefenseEntry* e = table.find(key.first, key.second);
        if (o.offsets.empty()) {
            bad += e != nullptr;
            continue;
        }
        ++expected;
        if (!e) {
            ++bad;
            continue;
        }
        std::map<int, int> freq;
        for (int x : o.offsets) ++freq[x];
        int mode = 0, best = 0;
        for (auto [x, n] : freq)
            if (n > best) best = n, mode = x;
        const double rate = static_cast<double>(o.offsets.size()) / o.overlapped;
        bad += e->count != static_cast<int>(o.offsets.size()) || e->delta_t_min != freq.begin()->first ||
               e->delta_t_max != freq.rbegin()->first || e->delta_t_mode != mode ||
               std::abs(e->success_rate - rate) > 1e-12;
    }
    bad += table.size() != expected;
    return bad;
}

// --- game trees -----------------------------------------------------------------

inline std::unique_ptr<TreeNode> leaf(int time) {
    auto n = std::make_unique<TreeNode>();
    n->kind = NodeKind::Leaf;
    n->time = time;
    return n;
}

inline std::unique_ptr<TreeNode> choice(Side owner, int time) {
    auto n = std::make_unique<TreeNode>();
    n->kind = NodeKind::Choice;
    n->owner = owner;
    n->time = time;
    return n;
}

inline ActionEdge& add_edge(TreeNode& n, ActionId a, int length, std::vector<Settlement> settled,
                            std::unique_ptr<TreeNode> child) {
    ActionEdge e;
    e.action_id = a;
    e.owner = n.owner;
    e.start = n.time;
    e.end = n.time + length;
    e.settled = std::move(settled);
    e.child = std::move(child);
    n.edges.push_back(std::move(e));
    return n.edges.back();
}

inline GameTree wrap(std::unique_ptr<TreeNode> root) {
    GameTree t;
    t.root = std::move(root);
    return t;
}

// Random temporal tree: owners do not alternate, forced nodes have one edge,
// every edge settles zero to two evaluations. `coarse` draws small integers
// so that ties are common.
inline std::unique_ptr<TreeNode> random_node(Rng& rng, int depth, int max_depth, int time, bool root, bool coarse) {
    const double r = rng.uniform();
    if (!root && (depth == max_depth || r < 0.12)) return leaf(time);
    auto n = choice(rng.chance(0.5) ? Side::A : Side::B, time);
    const bool forced = !root && r < 0.25;
    if (forced) n->kind = NodeKind::Forced;
    const int width = forced ? 1 : static_cast<int>(rng.range(1, 5));
    std::set<ActionId> used;
    for (int k = 0; k < width; ++k) {
        ActionId a;
        do a = static_cast<ActionId>(rng.range(1, 18));
        while (used.contains(a));
        used.insert(a);
        std::vector<Settlement> s;
        const int count = static_cast<int>(rng.range(0, 2));
        for (int j = 0; j < count; ++j) {
            const double v = coarse ? static_cast<double>(rng.range(-3, 3)) : rng.uniform(-30.0, 30.0);
            s.push_back({rng.chance(0.5) ? Side::A : Side::B, a, v});
        }
        const int length = static_cast<int>(rng.range(10, 40));
        add_edge(*n, a, length, std::move(s),
                 random_node(rng, depth + 1, max_depth, time + static_cast<int>(rng.range(1, length)), false, coarse));
    }
    return n;
}

inline GameTree random_tree(Rng& rng, int max_depth, bool coarse) {
    return wrap(random_node(rng, 0, max_depth, 0, true, coarse));
}

using LeafTable = std::map<std::vector<std::size_t>, double>;

// Every root-to-leaf route, keyed by its edge indices, valued by the
// zero-sum difference of everything settled along it.
inline void collect_routes(const TreeNode& n, std::vector<std::size_t>& path, std::vector<Settlement>& settled,
                           LeafTable& leaves) {
    if (n.kind == NodeKind::Leaf) {
        leaves[path] = zero_sum_value(route_score(settled));
        return;
    }
    for (std::size_t i = 0; i < n.edges.size(); ++i) {
        const auto& e = n.edges[i];
        path.push_back(i);
        settled.insert(settled.end(), e.settled.begin(), e.settled.end());
        collect_routes(*e.child, path, settled, leaves);
        settled.resize(settled.size() - e.settled.size());
        path.pop_back();
    }
}

inline LeafTable route_table(const TreeNode& root) {
    LeafTable leaves;
    std::vector<std::size_t> path;
    std::vector<Settlement> settled;
    collect_routes(root, path, settled, leaves);
    return leaves;
}

// Game value from the leaf table alone: the owner of each node picks the best
// route prefix for itself.
inline double route_value(const TreeNode& n, std::vector<std::size_t>& prefix, const LeafTable& leaves) {
    if (n.kind == NodeKind::Leaf) return leaves.at(prefix);
    std::vector<double> vals;
    for (std::size_t i = 0; i < n.edges.size(); ++i) {
        prefix.push_back(i);
        vals.push_back(route_value(*n.edges[i].child, prefix, leaves));
        prefix.pop_back();
    }
    if (n.kind == NodeKind::Forced) return vals.front();
    return n.owner == Side::A ? *std::max_element(vals.begin(), vals.end())
                              : *std::min_element(vals.begin(), vals.end());
}

struct Solution {
    double value = 0.0;
    ActionId choice = 0;
};

/// Root value and choice; ties go to the shortest edge, then the lowest id.
inline Solution enumerate(const GameTree& t) {
    const LeafTable leaves = route_table(*t.root);
    Solution o;
    std::vector<std::size_t> prefix;
    o.value = route_value(*t.root, prefix, leaves);
    std::optional<std::pair<int, ActionId>> best;
    for (std::size_t i = 0; i < t.root->edges.size(); ++i) {
        prefix = {i};
        const auto& e = t.root->edges[i];
        if (route_value(*e.child, prefix, leaves) != o.value) continue;
        const std::pair<int, ActionId> key{e.length(), e.action_id};
        if (!best || key < *best) best = key;
    }
    o.choice = best->second;
    return o;
}

/// Leaves whose stored value differs from the route difference; `count`
/// receives the number of leaves seen. Run after minimax or alpha-beta.
inline int zero_sum_violations(const TreeNode& root, int* count = nullptr) {
    int bad = 0, seen = 0;
    std::vector<Settlement> acc;
    std::function<void(const TreeNode&)> walk = [&](const TreeNode& n) {
        if (n.kind == NodeKind::Leaf) {
            const RouteScore s = route_score(acc);
            bad += n.value != s.a - s.b;
            ++seen;
            return;
        }
        for (const auto& e : n.edges) {
            if (!e.child) continue;
            acc.insert(acc.end(), e.settled.begin(), e.settled.end());
            walk(*e.child);
            acc.resize(acc.size() - e.settled.size());
        }
    };
    walk(root);
    if (count) *count = seen;
    return bad;
}

}  // namespace oracle
