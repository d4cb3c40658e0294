#include "fightgen/arena.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

#include "fightgen/errors.hpp"
#include "fightgen/text.hpp"

namespace fightgen {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::ActionStart: return "ActionStart";
        case EventKind::Hit: return "Hit";
        case EventKind::Reaction: return "Reaction";
        case EventKind::ActionEnd: return "ActionEnd";
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
    for (auto k : {EventKind::ActionStart, EventKind::Hit, EventKind::Reaction, EventKind::ActionEnd}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

void write_event(std::ostream& out, const FightEvent& e, const ActionMachine& machine) {
    const Action* a = machine.find(e.action);
    out << "frame=" << e.frame << " fighter=" << to_string(e.fighter) << " event=" << to_string(e.kind)
        << " action=" << (a ? a->name : std::string("?")) << " id=" << e.action;
    switch (e.kind) {
        case EventKind::ActionStart: out << " glue=" << e.glue << " end=" << e.end; break;
        case EventKind::Reaction: out << " end=" << e.end; break;
        case EventKind::Hit:
            out << " impulse=" << text::format_double(e.impulse) << " phase=" << e.phase;
            break;
        case EventKind::ActionEnd:
            out << " interrupted=" << (e.interrupted ? 1 : 0);
            if (e.outcome) out << " outcome=" << to_string(*e.outcome);
            break;
    }
    out << " x=" << text::format_double(e.pose.pos.x) << " y=" << text::format_double(e.pose.pos.y)
        << " facing=" << text::format_double(e.pose.facing) << '\n';
}

void write_trace(std::ostream& out, std::span<const FightEvent> trace, const ActionMachine& machine) {
    for (const auto& e : trace) write_event(out, e, machine);
}

FightTrace parse_trace(std::istream& in) {
    FightTrace trace;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto fail = [&](const std::string& msg) {
            return InputError("trace line " + std::to_string(line_no) + ": " + msg);
        };
        std::map<std::string, std::string, std::less<>> kv;
        for (auto tok : text::split_ws(body)) {
            auto p = text::split_kv(tok);
            if (!p) throw fail("expected key=value, got '" + std::string(tok) + "'");
            kv[std::string(p->first)] = std::string(p->second);
        }
        auto need = [&](std::string_view key) -> const std::string& {
            auto it = kv.find(key);
            if (it == kv.end()) throw fail("missing '" + std::string(key) + "'");
            return it->second;
        };
        auto need_int = [&](std::string_view key) {
            auto v = text::parse_int(need(key));
            if (!v) throw fail("bad integer for '" + std::string(key) + "'");
            return static_cast<int>(*v);
        };
        auto need_double = [&](std::string_view key) {
            auto v = text::parse_double(need(key));
            if (!v) throw fail("bad number for '" + std::string(key) + "'");
            return *v;
        };
        FightEvent e;
        e.frame = need_int("frame");
        const auto& f = need("fighter");
        if (f == "A") e.fighter = Side::A;
        else if (f == "B") e.fighter = Side::B;
        else throw fail("fighter must be A or B");
        auto kind = parse_event_kind(need("event"));
        if (!kind) throw fail("unknown event '" + need("event") + "'");
        e.kind = *kind;
        e.action = need_int("id");
        e.pose.pos.x = need_double("x");
        e.pose.pos.y = need_double("y");
        e.pose.facing = need_double("facing");
        switch (e.kind) {
            case EventKind::ActionStart:
                e.glue = need_int("glue");
                e.end = need_int("end");
                break;
            case EventKind::Reaction: e.end = need_int("end"); break;
            case EventKind::Hit:
                e.impulse = need_double("impulse");
                e.phase = need_int("phase");
                break;
            case EventKind::ActionEnd: {
                const auto& i = need("interrupted");
                if (i != "0" && i != "1") throw fail("interrupted must be 0 or 1");
                e.interrupted = i == "1";
                if (auto it = kv.find("outcome"); it != kv.end()) {
                    if (it->second == "hit") e.outcome = OutcomeKind::Hit;
                    else if (it->second == "miss") e.outcome = OutcomeKind::Miss;
                    else if (it->second == "undecided") e.outcome = OutcomeKind::Undecided;
                    else throw fail("bad outcome '" + it->second + "'");
                }
                break;
            }
        }
        trace.push_back(e);
    }
    return trace;
}

FightTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file " + path);
    return parse_trace(in);
}

Chooser replay_chooser(const FightTrace& trace) {
    auto queues = std::make_shared<std::array<std::deque<std::pair<int, ActionId>>, 2>>();
    for (const auto& e : trace) {
        if (e.kind == EventKind::ActionStart) (*queues)[index(e.fighter)].emplace_back(e.frame, e.action);
    }
    return [queues](const PlanningWorld& w, PlanResult*) {
        auto& q = (*queues)[index(w.mover)];
        if (q.empty() || q.front().first != w.time) {
            throw InputError("replay: trace has no ActionStart for fighter " + std::string(to_string(w.mover)) +
                             " at frame " + std::to_string(w.time));
        }
        const ActionId a = q.front().second;
        q.pop_front();
        return a;
    };
}

double FightStats::mean_separation() const {
    if (separation.empty()) return 0.0;
    double s = 0.0;
    for (double d : separation) s += d;
    return s / static_cast<double>(separation.size());
}

double FightStats::separation_percentile(double q) const {
    if (separation.empty()) return 0.0;
    std::vector<double> v = separation;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return v[rank - 1];
}

void write_stats(std::ostream& out, const FightStats& s) {
    auto num = [](double v) { return text::format_double(v); };
    out << "frames=" << s.frames << '\n';
    for (Side x : kSides) {
        const auto i = index(x);
        const auto n = to_string(x);
        out << "hits_landed_" << n << '=' << s.hits_landed[i] << '\n';
        out << "knockdowns_" << n << '=' << s.knockdowns[i] << '\n';
        out << "actions_chosen_" << n << '=' << s.actions_chosen[i] << '\n';
        for (auto c : {Category::Offense, Category::Defense, Category::Transition, Category::Reaction}) {
            out << to_string(c) << '_' << n << '=' << s.category_counts[i][static_cast<int>(c)] << '\n';
        }
        out << "attacks_missed_" << n << '=' << s.attacks_missed[i] << '\n';
    }
    const int chosen = s.actions_chosen[0] + s.actions_chosen[1];
    const int defenses = s.defenses_chosen(Side::A) + s.defenses_chosen(Side::B);
    out << "hits_total=" << s.total_hits() << '\n';
    out << "defense_fraction=" << num(chosen ? static_cast<double>(defenses) / chosen : 0.0) << '\n';
    out << "separation_samples=" << s.separation.size() << '\n';
    out << "separation_mean=" << num(s.mean_separation()) << '\n';
    out << "separation_p10=" << num(s.separation_percentile(0.1)) << '\n';
    out << "separation_p90=" << num(s.separation_percentile(0.9)) << '\n';
}

Arena::Arena(ArenaSetup setup, Chooser chooser)
    : setup_(std::move(setup)), chooser_(std::move(chooser)) {
    if (!setup_.machine || !setup_.table) throw InputError("arena setup lacks machine or table");
    if (setup_.duration_frames < 0) throw InputError("arena duration must be >= 0");
    for (const auto& p : setup_.params) p.validate();
    planner_.machine = setup_.machine;
    planner_.table = setup_.table;
    planner_.params = setup_.params;
    planner_.config = setup_.config;
    reactions_ = ReactionSet::from(*setup_.machine);
    const auto idle = setup_.machine->find_by_name(setup_.idle_action);
    if (!idle) throw InputError("unknown idle action '" + setup_.idle_action + "'");
    const Action& a = setup_.machine->action(*idle);
    for (Side s : kSides) {
        Fighter& f = fighters_[index(s)];
        f.history = ActionHistory(setup_.params[index(s)].repeat_window);
        // A zero-length idle motion ending at frame 0 on the start pose.
        f.motion.action = &a;
        f.motion.origin = setup_.start[index(s)];
        f.motion.entry = setup_.start[index(s)];
        f.motion.ref_angle = setup_.start[index(s)].facing;
        f.motion.origin_rot = f.motion.ref_rot = {std::cos(f.motion.ref_angle), std::sin(f.motion.ref_angle)};
    }
}

void Arena::record(const FightEvent& e, std::vector<FightEvent>& out) {
    const auto i = index(e.fighter);
    switch (e.kind) {
        case EventKind::ActionStart: {
            ++stats_.actions_chosen[i];
            ++stats_.category_counts[i][static_cast<int>(setup_.machine->action(e.action).category)];
            break;
        }
        case EventKind::Reaction:
            ++stats_.category_counts[i][static_cast<int>(Category::Reaction)];
            if (e.action == reactions_.knockdown) ++stats_.knockdowns[i];
            break;
        case EventKind::Hit: ++stats_.hits_landed[i]; break;
        case EventKind::ActionEnd:
            if (e.outcome == OutcomeKind::Miss) ++stats_.attacks_missed[i];
            break;
    }
    out.push_back(e);
}

void Arena::choose(Side s, bool other_pending, std::vector<FightEvent>& out) {
    PlanningWorld w;
    w.time = frame_;
    w.fighters = fighters_;
    w.mover = s;
    w.other_pending = other_pending;

    ActionId next = 0;
    if (chooser_) {
        next = chooser_(w, nullptr);
    } else {
        const auto t0 = std::chrono::steady_clock::now();
        PlanResult r;
        if (on_plan) {
            GameTree explored;
            r = plan(w, planner_, &explored);
            on_plan(w, explored, r);
        } else {
            r = plan(w, planner_);
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        ++timing_.calls;
        timing_.nodes_expanded += r.nodes_expanded;
        timing_.pruned_ab += r.nodes_pruned_ab;
        timing_.pruned_heuristic += r.nodes_pruned_heuristic;
        timing_.total_ms += ms;
        timing_.max_ms = std::max(timing_.max_ms, ms);
        next = r.chosen_action;
    }

    Fighter& f = fighters_[index(s)];
    const Pose at = pose_at(f.motion, frame_);
    f.history.push(f.motion.id());
    f.motion = launch_motion(*setup_.machine, f.motion.id(), next, frame_, at);
    FightEvent e;
    e.frame = frame_;
    e.fighter = s;
    e.kind = EventKind::ActionStart;
    e.action = next;
    e.pose = at;
    e.glue = f.motion.glue;
    e.end = f.motion.end();
    record(e, out);
}

std::vector<FightEvent> Arena::start() {
    if (started_) throw InputError("arena already started");
    started_ = true;
    std::vector<FightEvent> out;
    if (setup_.duration_frames == 0) return out;
    const Side first = first_to_choose(fighters_);
    choose(first, true, out);
    choose(other(first), false, out);
    return out;
}

std::vector<FightEvent> Arena::step() {
    if (!started_) throw InputError("arena not started");
    std::vector<FightEvent> out;
    if (finished()) return out;
    ++frame_;
    const FrameResult r = resolve_frame(fighters_, frame_, *setup_.table);

    for (Side s : kSides) {
        if (!r.hit_by[index(s)]) continue;
        const Contact& c = *r.hit_by[index(s)];
        FightEvent e;
        e.frame = frame_;
        e.fighter = s;
        e.kind = EventKind::Hit;
        e.action = fighters_[index(s)].motion.id();
        e.pose = pose_at(fighters_[index(other(s))].motion, frame_);
        e.impulse = c.impulse;
        e.phase = c.contact_phase;
        record(e, out);
    }
    for (Side s : kSides) {
        if (!r.victim(s)) continue;
        const Contact& c = *r.hit_by[index(other(s))];
        Fighter& f = fighters_[index(s)];
        FightEvent end;
        end.frame = frame_;
        end.fighter = s;
        end.kind = EventKind::ActionEnd;
        end.action = f.motion.id();
        end.pose = pose_at(f.motion, frame_);
        end.interrupted = true;
        if (auto o = final_outcome(f.motion)) end.outcome = o->kind;
        record(end, out);

        const ActionId reaction = reactions_.for_impulse(c.impulse);
        apply_interruption(f, setup_.machine->action(reaction), frame_, c.direction);
        FightEvent re;
        re.frame = frame_;
        re.fighter = s;
        re.kind = EventKind::Reaction;
        re.action = reaction;
        re.pose = end.pose;
        re.end = f.motion.end();
        record(re, out);
    }

    std::vector<Side> done;
    for (Side s : kSides) {
        if (r.completed[index(s)]) done.push_back(s);
    }
    if (done.size() == 2 && first_to_choose(fighters_) == Side::B) std::swap(done[0], done[1]);
    for (Side s : done) {
        Fighter& f = fighters_[index(s)];
        FightEvent end;
        end.frame = frame_;
        end.fighter = s;
        end.kind = EventKind::ActionEnd;
        end.action = f.motion.id();
        end.pose = pose_at(f.motion, frame_);
        if (auto o = final_outcome(f.motion)) end.outcome = o->kind;
        record(end, out);
    }
    for (std::size_t k = 0; k < done.size(); ++k) choose(done[k], k + 1 < done.size(), out);

    stats_.frames = frame_;
    stats_.separation.push_back(
        distance(pose_at(fighters_[0].motion, frame_).pos, pose_at(fighters_[1].motion, frame_).pos));
    return out;
}

bool Arena::finished() const {
    if (frame_ >= setup_.duration_frames) return true;
    return std::max(stats_.knockdowns[0], stats_.knockdowns[1]) >= setup_.knockdown_limit;
}

FightResult run_arena(const ArenaSetup& setup, Chooser chooser,
                      std::function<void(const PlanningWorld&, const GameTree&, const PlanResult&)> on_plan) {
    Arena arena(setup, std::move(chooser));
    arena.on_plan = std::move(on_plan);
    FightResult res;
    auto ev = arena.start();
    res.trace.insert(res.trace.end(), ev.begin(), ev.end());
    while (!arena.finished()) {
        ev = arena.step();
        res.trace.insert(res.trace.end(), ev.begin(), ev.end());
    }
    res.stats = arena.stats();
    res.timing = arena.timing();
    return res;
}

}  // namespace fightgen
