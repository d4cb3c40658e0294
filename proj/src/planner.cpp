#include "fightgen/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "fightgen/errors.hpp"
#include "fightgen/text.hpp"

namespace fightgen {

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Choice: return "choice";
        case NodeKind::Forced: return "forced";
        case NodeKind::Leaf: return "leaf";
    }
    return "?";
}

Side first_to_choose(const std::array<Fighter, 2>& fighters) {
    return fighters[1].motion.start < fighters[0].motion.start ? Side::B : Side::A;
}

CandidateEval evaluate_candidate(const std::array<Fighter, 2>& fighters, Side mover, ActionId candidate,
                                 int time, const PlannerContext& ctx) {
    const ActionMachine& machine = *ctx.machine;
    const Side opp = other(mover);
    std::array<Fighter, 2> sim = fighters;
    Fighter& self = sim[index(mover)];
    const Pose at = pose_at(self.motion, time);
    const Pose opp_at = pose_at(sim[index(opp)].motion, time);
    self.history.push(self.motion.id());
    self.motion = launch_motion(machine, self.motion.id(), candidate, time, at);

    CandidateEval ev;
    ev.action = candidate;
    int t2 = self.motion.end();
    for (int f = next_event_frame(sim, time); f <= self.motion.end(); f = next_event_frame(sim, f)) {
        const FrameResult r = resolve_frame(sim, f, *ctx.table);
        if (r.victim(mover)) {
            ev.self_hit = true;
            t2 = f;
            break;
        }
        // A hit opponent stops threatening; its reaction is not modelled here.
        Motion& om = sim[index(opp)].motion;
        if (r.victim(opp) && om.attack == AttackStatus::Pending) om.attack = AttackStatus::Missed;
    }
    ev.outcome = final_outcome(self.motion);
    ev.self_end = pose_at(self.motion, t2);
    ev.opp_end = pose_at(sim[index(opp)].motion, t2);

    EvalContext ec;
    ec.e_self = candidate;
    ec.e_opp = sim[index(opp)].motion.id();
    ec.delta_t = sim[index(opp)].motion.body_start() - self.motion.body_start();
    ec.t1 = time;
    ec.t2 = t2;
    ec.self_start = at;
    ec.opp_start = opp_at;
    ec.self_end = ev.self_end;
    ec.opp_end = ev.opp_end;
    ec.outcome = ev.outcome;
    ec.history = self.history.view();
    ev.rank = evaluate_edge(ec, ctx.params[index(mover)], machine);
    if (ev.self_hit) {
        const FighterParams& op = ctx.params[index(opp)];
        ev.rank -= op.w_f * op.interaction_bias;
    }
    return ev;
}

std::vector<CandidateEval> prune_candidates(std::vector<CandidateEval> candidates,
                                            const std::array<Fighter, 2>& fighters, Side mover,
                                            int time, const PlannerContext& ctx, long long* pruned) {
    auto better = [](const CandidateEval& x, const CandidateEval& y) {
        return x.rank != y.rank ? x.rank > y.rank : x.action < y.action;
    };
    std::sort(candidates.begin(), candidates.end(), better);
    if (candidates.empty()) return candidates;

    // Defenses the table says still work against the incoming attack.
    std::vector<ActionId> counters;
    const Motion& om = fighters[index(other(mover))].motion;
    if (om.attack == AttackStatus::Pending && om.action->offense) {
        const int elapsed = std::max(0, time - om.body_start());
        for (ActionId d : query_defenses(*ctx.table, om.action->offense->kind, elapsed)) {
            const bool offered = std::any_of(candidates.begin(), candidates.end(),
                                             [&](const CandidateEval& c) { return c.action == d; });
            if (offered) counters.push_back(d);
        }
    }
    const double facing_limit = ctx.config.facing_limit_deg * std::numbers::pi / 180.0;
    const ActionMachine& machine = *ctx.machine;

    std::vector<CandidateEval> kept;
    for (const auto& c : candidates) {
        const bool exposed = c.self_hit && !counters.empty() &&
                             machine.action(c.action).category != Category::Defense;
        const bool turned_away = std::abs(bearing_error(c.self_end, c.opp_end.pos)) > facing_limit;
        const bool too_close = distance(c.self_end.pos, c.opp_end.pos) < ctx.config.penetration;
        if (!exposed && !turned_away && !too_close) kept.push_back(c);
    }
    if (kept.empty()) kept.push_back(candidates.front());
    const auto cap = static_cast<std::size_t>(std::max(1, ctx.config.branching_cap));
    if (kept.size() > cap) kept.resize(cap);
    if (pruned) *pruned += static_cast<long long>(candidates.size() - kept.size());
    return kept;
}

namespace {

enum class Pending : std::uint8_t { None, Choice, Forced };

struct Span {
    bool open = false;
    int t1 = 0;
    Pose self_start;
    Pose opp_start;
};

struct SearchState {
    int time = 0;
    bool leaf = false;
    std::array<Fighter, 2> fighters;
    std::array<Span, 2> spans;
    std::array<Pending, 2> pending{Pending::None, Pending::None};
    std::array<ActionId, 2> reaction{};
    std::array<double, 2> push_direction{};
};

struct Decision {
    Side owner = Side::A;
    NodeKind kind = NodeKind::Leaf;
};

class Expander {
public:
    Expander(const PlannerContext& ctx, int horizon)
        : ctx_(ctx), machine_(*ctx.machine), reactions_(ReactionSet::from(*ctx.machine)), horizon_(horizon) {}

    int horizon() const { return horizon_; }

    SearchState root(const PlanningWorld& w) const {
        SearchState s;
        s.time = w.time;
        s.fighters = w.fighters;
        s.pending[index(w.mover)] = Pending::Choice;
        const Side o = other(w.mover);
        if (w.other_pending) s.pending[index(o)] = Pending::Choice;
        else open_span(s, o);
        return s;
    }

    Decision decision(const SearchState& s) const {
        if (s.leaf) return {Side::A, NodeKind::Leaf};
        for (Side x : kSides) {
            if (s.pending[index(x)] == Pending::Forced) return {x, NodeKind::Forced};
        }
        const bool a = s.pending[0] == Pending::Choice;
        const bool b = s.pending[1] == Pending::Choice;
        if (a && b) return {first_to_choose(s.fighters), NodeKind::Choice};
        if (a) return {Side::A, NodeKind::Choice};
        if (b) return {Side::B, NodeKind::Choice};
        return {Side::A, NodeKind::Leaf};
    }

    /// Edges out of a node, ranked; `pruned` counts heuristic removals.
    std::vector<ActionEdge> edges(const SearchState& s, Decision d, long long& pruned) const {
        std::vector<ActionEdge> out;
        const Fighter& f = s.fighters[index(d.owner)];
        if (d.kind == NodeKind::Forced) {
            ActionEdge e;
            e.action_id = s.reaction[index(d.owner)];
            e.owner = d.owner;
            e.start = s.time;
            e.end = s.time + machine_.action(e.action_id).duration;
            out.push_back(std::move(e));
            return out;
        }
        std::vector<CandidateEval> cands;
        for (ActionId a : launchable_actions(machine_, f.motion.id())) {
            cands.push_back(evaluate_candidate(s.fighters, d.owner, a, s.time, ctx_));
        }
        cands = prune_candidates(std::move(cands), s.fighters, d.owner, s.time, ctx_, &pruned);
        for (const auto& c : cands) {
            ActionEdge e;
            e.action_id = c.action;
            e.owner = d.owner;
            e.start = s.time;
            e.end = s.time + machine_.glue(f.motion.id(), c.action).frames + machine_.action(c.action).duration;
            e.predicted_outcome = c.outcome;
            e.score_self = c.rank;
            out.push_back(std::move(e));
        }
        return out;
    }

    /// Launches `edge` and simulates until the next node or the horizon.
    SearchState follow(const SearchState& s, const ActionEdge& edge, std::vector<Settlement>& settled) const {
        SearchState c = s;
        Fighter& f = c.fighters[index(edge.owner)];
        if (c.pending[index(edge.owner)] == Pending::Forced) {
            apply_interruption(f, machine_.action(edge.action_id), c.time, c.push_direction[index(edge.owner)]);
        } else {
            const Pose at = pose_at(f.motion, c.time);
            f.history.push(f.motion.id());
            f.motion = launch_motion(machine_, f.motion.id(), edge.action_id, c.time, at);
        }
        c.pending[index(edge.owner)] = Pending::None;
        open_span(c, edge.owner);
        const bool more = c.pending[0] != Pending::None || c.pending[1] != Pending::None;
        if (more && c.time < horizon_) return c;
        if (more) {
            close_at_horizon(c, settled);
            return c;
        }
        advance(c, settled);
        return c;
    }

private:
    void open_span(SearchState& s, Side x) const {
        Span& sp = s.spans[index(x)];
        sp.open = true;
        sp.t1 = s.time;
        sp.self_start = pose_at(s.fighters[index(x)].motion, s.time);
        sp.opp_start = pose_at(s.fighters[index(other(x))].motion, s.time);
    }

    void settle(SearchState& s, Side x, int t2, const std::optional<AttackOutcome>& outcome,
                std::vector<Settlement>& settled) const {
        Span& sp = s.spans[index(x)];
        if (!sp.open) return;
        const Motion& self = s.fighters[index(x)].motion;
        const Motion& opp = s.fighters[index(other(x))].motion;
        EvalContext ec;
        ec.e_self = self.id();
        ec.e_opp = opp.id();
        ec.delta_t = opp.body_start() - self.body_start();
        ec.t1 = sp.t1;
        ec.t2 = t2;
        ec.self_start = sp.self_start;
        ec.opp_start = sp.opp_start;
        ec.self_end = pose_at(self, t2);
        ec.opp_end = pose_at(opp, t2);
        ec.outcome = outcome;
        ec.history = s.fighters[index(x)].history.view();
        settled.push_back({x, self.id(), evaluate_edge(ec, ctx_.params[index(x)], machine_)});
        sp.open = false;
    }

    void close_at_horizon(SearchState& s, std::vector<Settlement>& settled) const {
        for (Side x : kSides) settle(s, x, s.time, open_outcome(s.fighters[index(x)].motion), settled);
        s.pending = {Pending::None, Pending::None};
        s.leaf = true;
    }

    void advance(SearchState& s, std::vector<Settlement>& settled) const {
        for (int f = next_event_frame(s.fighters, s.time); f <= horizon_; f = next_event_frame(s.fighters, f)) {
            const FrameResult r = resolve_frame(s.fighters, f, *ctx_.table);
            const bool event = r.hit_by[0] || r.hit_by[1] || r.completed[0] || r.completed[1];
            if (!event) continue;
            s.time = f;
            for (Side x : kSides) {
                if (r.victim(x)) {
                    const Contact& c = *r.hit_by[index(other(x))];
                    settle(s, x, f, final_outcome(s.fighters[index(x)].motion), settled);
                    s.pending[index(x)] = Pending::Forced;
                    s.reaction[index(x)] = reactions_.for_impulse(c.impulse);
                    s.push_direction[index(x)] = c.direction;
                } else if (r.completed[index(x)]) {
                    settle(s, x, f, final_outcome(s.fighters[index(x)].motion), settled);
                    s.pending[index(x)] = Pending::Choice;
                }
            }
            if (f == horizon_) close_at_horizon(s, settled);
            return;
        }
        s.time = horizon_;
        close_at_horizon(s, settled);
    }

    const PlannerContext& ctx_;
    const ActionMachine& machine_;
    ReactionSet reactions_;
    int horizon_;
};

void check_context(const PlannerContext& ctx) {
    if (!ctx.machine || !ctx.table) throw InputError("planner context lacks machine or table");
}

int horizon_for(const PlanningWorld& w, const PlannerContext& ctx) {
    return w.time + ctx.params[index(w.mover)].horizon_frames();
}

void add_settled(RouteScore& acc, const std::vector<Settlement>& settled) {
    for (const auto& st : settled) (st.fighter == Side::A ? acc.a : acc.b) += st.value;
}

/// Root edges in tie-break order: shorter edge first, then lower action id.
std::vector<std::size_t> root_order(const std::vector<ActionEdge>& edges) {
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = edges[x];
        const auto& b = edges[y];
        return a.length() != b.length() ? a.length() < b.length() : a.action_id < b.action_id;
    });
    return order;
}

std::unique_ptr<TreeNode> make_node(const SearchState& s, Decision d) {
    auto n = std::make_unique<TreeNode>();
    n->owner = d.owner;
    n->kind = d.kind;
    n->time = s.time;
    n->world = s.fighters;
    return n;
}

void build(const Expander& ex, const SearchState& s, Decision d, TreeNode& node, long long& pruned) {
    if (d.kind == NodeKind::Leaf) return;
    node.edges = ex.edges(s, d, pruned);
    for (auto& e : node.edges) {
        SearchState c = ex.follow(s, e, e.settled);
        const Decision cd = ex.decision(c);
        e.child = make_node(c, cd);
        build(ex, c, cd, *e.child, pruned);
    }
}

// Alpha-beta over either a materialized tree or the lazy expansion. A tree
// adapter provides kind/owner, the edge list, and the child reached by an
// edge (whose settlements are valid once child() returned).
template <class Tree>
class AlphaBeta {
public:
    AlphaBeta(Tree& tree, PlanResult& r) : tree_(tree), r_(r) {}

    double search(typename Tree::Node& n, RouteScore acc, double alpha, double beta, int depth) {
        ++r_.nodes_expanded;
        const bool root = depth == 0;
        const NodeKind kind = tree_.kind(n);
        double v = 0.0;
        if (kind == NodeKind::Leaf) {
            v = zero_sum_value(acc);
        } else if (kind == NodeKind::Forced) {
            auto&& c = tree_.child(n, 0);
            RouteScore next = acc;
            add_settled(next, tree_.edges(n)[0].settled);
            v = search(c, next, alpha, beta, depth + 1);
        } else {
            const bool maxing = tree_.owner(n) == Side::A;
            const auto& edges = tree_.edges(n);
            const std::size_t count = edges.size();
            const std::vector<std::size_t> order = root ? root_order(edges) : killer_order(edges, depth);
            v = maxing ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < count; ++k) {
                const std::size_t i = order[k];
                auto&& c = tree_.child(n, i);
                RouteScore next = acc;
                add_settled(next, tree_.edges(n)[i].settled);
                const double cv = search(c, next, alpha, beta, depth + 1);
                const bool improves = maxing ? cv > v : cv < v;
                if (improves) {
                    v = cv;
                    if (root) r_.chosen_action = tree_.edges(n)[i].action_id;
                }
                if (maxing) alpha = std::max(alpha, v);
                else beta = std::min(beta, v);
                if (alpha >= beta && !root) {
                    remember_killer(tree_.edges(n)[i].action_id, depth);
                    r_.nodes_pruned_ab += static_cast<long long>(count - k - 1);
                    break;
                }
            }
        }
        tree_.set_value(n, v);
        return v;
    }

private:
    // Moves that caused a cutoff at the same depth elsewhere in the tree are
    // tried first; the rest keep their ranked order. Ordering never changes
    // the value, only how much gets cut.
    std::vector<std::size_t> killer_order(const std::vector<ActionEdge>& edges, int depth) const {
        std::vector<std::size_t> order(edges.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (static_cast<std::size_t>(depth) >= killers_.size()) return order;
        std::size_t front = 0;
        for (ActionId k : killers_[static_cast<std::size_t>(depth)]) {
            for (std::size_t j = front; j < order.size(); ++j) {
                if (edges[order[j]].action_id == k) {
                    std::rotate(order.begin() + static_cast<std::ptrdiff_t>(front),
                                order.begin() + static_cast<std::ptrdiff_t>(j),
                                order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                    ++front;
                    break;
                }
            }
        }
        return order;
    }

    void remember_killer(ActionId a, int depth) {
        const auto d = static_cast<std::size_t>(depth);
        if (killers_.size() <= d) killers_.resize(d + 1, {kNoKiller, kNoKiller});
        auto& k = killers_[d];
        if (k[0] == a) return;
        k[1] = k[0];
        k[0] = a;
    }

    static constexpr ActionId kNoKiller = std::numeric_limits<ActionId>::min();

    Tree& tree_;
    PlanResult& r_;
    std::vector<std::array<ActionId, 2>> killers_;
};

struct MaterializedTree {
    using Node = TreeNode;
    NodeKind kind(const TreeNode& n) const { return n.kind; }
    Side owner(const TreeNode& n) const { return n.owner; }
    const std::vector<ActionEdge>& edges(const TreeNode& n) const { return n.edges; }
    TreeNode& child(TreeNode& n, std::size_t i) const { return *n.edges[i].child; }
    void set_value(TreeNode& n, double v) const { n.value = v; }
};

struct LazyNode {
    SearchState state;
    Decision decision;
    std::vector<ActionEdge> edges;
    bool expanded = false;
    TreeNode* record = nullptr;
};

class LazyTree {
public:
    using Node = LazyNode;

    LazyTree(const Expander& ex, PlanResult& r) : ex_(ex), r_(r) {}

    NodeKind kind(const LazyNode& n) const { return n.decision.kind; }
    Side owner(const LazyNode& n) const { return n.decision.owner; }

    const std::vector<ActionEdge>& edges(LazyNode& n) const {
        if (!n.expanded) {
            n.edges = ex_.edges(n.state, n.decision, r_.nodes_pruned_heuristic);
            n.expanded = true;
            if (n.record) {
                for (const auto& e : n.edges) {
                    ActionEdge copy;
                    copy.action_id = e.action_id;
                    copy.owner = e.owner;
                    copy.start = e.start;
                    copy.end = e.end;
                    copy.predicted_outcome = e.predicted_outcome;
                    copy.score_self = e.score_self;
                    n.record->edges.push_back(std::move(copy));
                }
            }
        }
        return n.edges;
    }

    LazyNode child(LazyNode& n, std::size_t i) const {
        edges(n);
        ActionEdge& e = n.edges[i];
        e.settled.clear();
        LazyNode c;
        c.state = ex_.follow(n.state, e, e.settled);
        c.decision = ex_.decision(c.state);
        if (n.record) {
            ActionEdge& re = n.record->edges[i];
            re.settled = e.settled;
            re.child = make_node(c.state, c.decision);
            c.record = re.child.get();
        }
        return c;
    }

    void set_value(LazyNode& n, double v) const {
        if (n.record) n.record->value = v;
    }

private:
    const Expander& ex_;
    PlanResult& r_;
};

double minimax_value(TreeNode& n, RouteScore acc, long long& visited) {
    ++visited;
    double v = 0.0;
    if (n.kind == NodeKind::Leaf) {
        v = zero_sum_value(acc);
    } else if (n.kind == NodeKind::Forced) {
        RouteScore next = acc;
        add_settled(next, n.edges.front().settled);
        v = minimax_value(*n.edges.front().child, next, visited);
    } else {
        const bool maxing = n.owner == Side::A;
        v = maxing ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (auto& e : n.edges) {
            RouteScore next = acc;
            add_settled(next, e.settled);
            const double cv = minimax_value(*e.child, next, visited);
            v = maxing ? std::max(v, cv) : std::min(v, cv);
        }
    }
    n.value = v;
    return v;
}

void check_tree(const GameTree& tree) {
    if (!tree.root) throw InputError("empty game tree");
    if (tree.root->kind != NodeKind::Choice || tree.root->edges.empty()) {
        throw InputError("game tree root must be a choice node with at least one edge");
    }
}

void dump_node(std::ostream& out, const TreeNode& n, const ActionEdge* in, int depth,
               const ActionMachine* machine) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.time << ' ' << to_string(n.owner)
        << ' ' << to_string(n.kind) << ' ';
    if (!in) out << '-';
    else if (machine && machine->find(in->action_id)) out << machine->action(in->action_id).name;
    else out << in->action_id;
    out << " f=" << text::format_double(n.value) << '\n';
    for (const auto& e : n.edges) {
        if (e.child) dump_node(out, *e.child, &e, depth + 1, machine);
    }
}

}  // namespace

GameTree expand_tree(const PlanningWorld& world, const PlannerContext& ctx) {
    check_context(ctx);
    const Expander ex(ctx, horizon_for(world, ctx));
    const SearchState s = ex.root(world);
    const Decision d{world.mover, NodeKind::Choice};
    GameTree tree;
    tree.horizon = ex.horizon();
    tree.root = make_node(s, d);
    build(ex, s, d, *tree.root, tree.pruned_heuristic);
    return tree;
}

PlanResult minimax(GameTree& tree) {
    check_tree(tree);
    PlanResult r;
    r.nodes_pruned_heuristic = tree.pruned_heuristic;
    TreeNode& root = *tree.root;
    r.root_value = minimax_value(root, RouteScore{}, r.nodes_expanded);
    const auto order = root_order(root.edges);
    for (std::size_t i : order) {
        if (root.edges[i].child->value == r.root_value) {
            r.chosen_action = root.edges[i].action_id;
            break;
        }
    }
    return r;
}

PlanResult alpha_beta(GameTree& tree) {
    check_tree(tree);
    PlanResult r;
    r.nodes_pruned_heuristic = tree.pruned_heuristic;
    MaterializedTree adapter;
    AlphaBeta<MaterializedTree> ab(adapter, r);
    r.root_value = ab.search(*tree.root, RouteScore{}, -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), 0);
    return r;
}

PlanResult plan(const PlanningWorld& world, const PlannerContext& ctx, GameTree* explored) {
    check_context(ctx);
    const Expander ex(ctx, horizon_for(world, ctx));
    PlanResult r;
    LazyTree tree(ex, r);
    LazyNode root;
    root.state = ex.root(world);
    root.decision = {world.mover, NodeKind::Choice};
    if (explored) {
        explored->horizon = ex.horizon();
        explored->root = make_node(root.state, root.decision);
        root.record = explored->root.get();
    }
    AlphaBeta<LazyTree> ab(tree, r);
    r.root_value = ab.search(root, RouteScore{}, -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity(), 0);
    return r;
}

void dump_tree(std::ostream& out, const GameTree& tree, const ActionMachine* machine) {
    if (tree.root) dump_node(out, *tree.root, nullptr, 0, machine);
}

std::size_t count_nodes(const TreeNode& node) {
    std::size_t n = 1;
    for (const auto& e : node.edges) {
        if (e.child) n += count_nodes(*e.child);
    }
    return n;
}

}  // namespace fightgen
