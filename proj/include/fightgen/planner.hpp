#pragma once

// Temporal game-tree search. Nodes sit at the frames where a fighter has to
// launch something: a free choice when its action ends, a forced reaction
// when it is hit. Fighters therefore move non-alternately, at the pace of
// their own actions, until the mover's horizon.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "fightgen/action_machine.hpp"
#include "fightgen/combat.hpp"
#include "fightgen/defense_table.hpp"
#include "fightgen/scoring.hpp"

namespace fightgen {

struct PlannerConfig {
    double penetration = 0.3;      // m; candidates ending closer are pruned
    double facing_limit_deg = 135.0;
    int branching_cap = 8;

    bool operator==(const PlannerConfig&) const = default;
};

/// Shared, immutable inputs of every planning call in a fight.
struct PlannerContext {
    const ActionMachine* machine = nullptr;
    const OffenseDefenseTable* table = nullptr;
    std::array<FighterParams, 2> params;
    PlannerConfig config;
};

/// World at the moment `mover` has to pick its next action. When both
/// fighters finished at the same frame and the other one plans second,
/// `other_pending` is set and the other fighter's choice is part of the tree.
struct PlanningWorld {
    int time = 0;
    std::array<Fighter, 2> fighters;
    Side mover = Side::A;
    bool other_pending = false;
};

/// Which of two fighters finishing at the same frame plans first: the one
/// whose finished motion started earlier, A on a tie.
Side first_to_choose(const std::array<Fighter, 2>& fighters);

enum class NodeKind : std::uint8_t { Choice, Forced, Leaf };

std::string_view to_string(NodeKind k);

struct TreeNode;

struct ActionEdge {
    ActionId action_id = 0;
    Side owner = Side::A;
    int start = 0;
    int end = 0;  // start + glue + duration
    std::optional<AttackOutcome> predicted_outcome;
    double score_self = 0.0;  // immediate evaluation used for ranking
    /// Edge evaluations that close between this edge's node and its child
    /// (plus, above a leaf, everything still open at the horizon).
    std::vector<Settlement> settled;
    std::unique_ptr<TreeNode> child;

    int length() const { return end - start; }
};

struct TreeNode {
    Side owner = Side::A;
    NodeKind kind = NodeKind::Leaf;
    int time = 0;
    std::array<Fighter, 2> world;
    std::vector<ActionEdge> edges;
    double value = 0.0;  // filled in by minimax / alpha_beta
};

struct GameTree {
    std::unique_ptr<TreeNode> root;
    int horizon = 0;
    long long pruned_heuristic = 0;  // candidates dropped during expansion
};

struct PlanResult {
    ActionId chosen_action = 0;
    double root_value = 0.0;
    long long nodes_expanded = 0;
    long long nodes_pruned_ab = 0;         // child edges skipped by cutoffs
    long long nodes_pruned_heuristic = 0;  // candidates removed before search

    bool operator==(const PlanResult&) const = default;
};

/// Fully expands the tree up to the mover's horizon.
GameTree expand_tree(const PlanningWorld& world, const PlannerContext& ctx);

/// Plain minimax over a materialized tree; leaf values are S_A - S_B of the
/// settlements along the route. Root ties go to the shorter edge, then the
/// lower action id.
PlanResult minimax(GameTree& tree);
PlanResult alpha_beta(GameTree& tree);

/// Alpha-beta interleaved with expansion; same result as
/// alpha_beta(expand_tree(world, ctx)) without materializing the tree.
/// When `explored` is given it receives the nodes actually visited.
PlanResult plan(const PlanningWorld& world, const PlannerContext& ctx, GameTree* explored = nullptr);

/// One node per line, indented by depth: `<time> <owner> <kind> <action> f=<value>`.
/// `<action>` is the edge leading into the node (`-` at the root).
void dump_tree(std::ostream& out, const GameTree& tree, const ActionMachine* machine);

std::size_t count_nodes(const TreeNode& node);

/// Ranking of one candidate at a Choice node, exposed for tests.
struct CandidateEval {
    ActionId action = 0;
    double rank = 0.0;
    bool self_hit = false;
    std::optional<AttackOutcome> outcome;
    Pose self_end;
    Pose opp_end;
};

/// Plays `candidate` for `mover` from `fighters` at `time` while the opponent
/// finishes its current motion and then holds still.
CandidateEval evaluate_candidate(const std::array<Fighter, 2>& fighters, Side mover, ActionId candidate,
                                 int time, const PlannerContext& ctx);

/// Applies the pruning rules and the branching cap; the result is ordered by
/// rank (descending, then id). Never returns an empty list for non-empty input.
std::vector<CandidateEval> prune_candidates(std::vector<CandidateEval> candidates,
                                            const std::array<Fighter, 2>& fighters, Side mover,
                                            int time, const PlannerContext& ctx, long long* pruned = nullptr);

}  // namespace fightgen
