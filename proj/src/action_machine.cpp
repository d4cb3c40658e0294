#include "fightgen/action_machine.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>

#include "fightgen/errors.hpp"
#include "fightgen/text.hpp"

namespace fightgen {

namespace {

constexpr std::array<std::string_view, 4> kCategoryNames{"offense", "defense", "transition",
                                                         "reaction"};
constexpr std::array<std::string_view, 5> kAttackNames{"jab", "straight", "hook", "uppercut",
                                                       "kick"};

std::optional<FrameWindow> parse_window(std::string_view s) {
    auto kv = text::split_kv(s, ':');
    if (!kv) return std::nullopt;
    auto a = text::parse_int(kv->first);
    auto b = text::parse_int(kv->second);
    if (!a || !b) return std::nullopt;
    return FrameWindow{static_cast<int>(*a), static_cast<int>(*b)};
}

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view s) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (kCategoryNames[i] == s) return static_cast<Category>(i);
    }
    return std::nullopt;
}

std::string_view to_string(AttackKind k) { return kAttackNames[static_cast<std::size_t>(k)]; }

std::optional<AttackKind> parse_attack_kind(std::string_view s) {
    for (std::size_t i = 0; i < kAttackNames.size(); ++i) {
        if (kAttackNames[i] == s) return static_cast<AttackKind>(i);
    }
    return std::nullopt;
}

std::vector<ActionAnnotation> parse_annotations(std::istream& in) {
    std::vector<ActionAnnotation> out;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        return InputError("annotation line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        auto tok = text::split_ws(body);
        if (tok[0] == "action") {
            if (tok.size() != 7) {
                throw fail("expected 'action <id> <name> <category> <start> <end> <duration>'");
            }
            ActionAnnotation a;
            a.line = line_no;
            auto id = text::parse_int(tok[1]);
            auto cat = parse_category(tok[3]);
            auto start = parse_frame_ref(tok[4]);
            auto end = parse_frame_ref(tok[5]);
            auto dur = text::parse_int(tok[6]);
            if (!id) throw fail("bad action id");
            if (!cat) throw fail("unknown category '" + std::string(tok[3]) + "'");
            if (!start || !end) throw fail("bad node reference (expected <clip>:<frame>)");
            if (!dur) throw fail("bad duration");
            for (const auto& prev : out) {
                if (prev.id == *id) throw fail("duplicate action id " + std::to_string(*id));
            }
            a.id = static_cast<ActionId>(*id);
            a.name = std::string(tok[2]);
            a.category = *cat;
            a.start = *start;
            a.end = *end;
            a.duration = static_cast<int>(*dur);
            out.push_back(std::move(a));
        } else if (tok[0] == "offense") {
            if (out.empty()) throw fail("offense line before any action");
            OffenseProfile p;
            bool kind = false, window = false, reach = false, angle = false, impulse = false;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                auto kv = text::split_kv(tok[i]);
                if (!kv) throw fail("expected key=value, got '" + std::string(tok[i]) + "'");
                auto [k, v] = *kv;
                if (k == "kind") {
                    auto ak = parse_attack_kind(v);
                    if (!ak) throw fail("unknown attack kind '" + std::string(v) + "'");
                    p.kind = *ak;
                    kind = true;
                } else if (k == "window") {
                    auto w = parse_window(v);
                    if (!w) throw fail("bad window");
                    p.active = *w;
                    window = true;
                } else if (k == "reach") {
                    auto kv2 = text::split_kv(v, ':');
                    auto lo = kv2 ? text::parse_double(kv2->first) : std::nullopt;
                    auto hi = kv2 ? text::parse_double(kv2->second) : std::nullopt;
                    if (!lo || !hi) throw fail("bad reach");
                    p.reach_min = *lo;
                    p.reach_max = *hi;
                    reach = true;
                } else if (k == "angle") {
                    auto a = text::parse_double(v);
                    if (!a) throw fail("bad angle");
                    p.half_angle = *a;
                    angle = true;
                } else if (k == "impulse") {
                    auto x = text::parse_double(v);
                    if (!x) throw fail("bad impulse");
                    p.impulse = *x;
                    impulse = true;
                } else {
                    throw fail("unknown offense key '" + std::string(k) + "'");
                }
            }
            if (!(kind && window && reach && angle && impulse)) {
                throw fail("offense line needs kind, window, reach, angle and impulse");
            }
            out.back().offense = p;
        } else if (tok[0] == "defense") {
            if (out.empty()) throw fail("defense line before any action");
            if (tok.size() != 2) throw fail("expected 'defense window=<a>:<b>'");
            auto kv = text::split_kv(tok[1]);
            if (!kv || kv->first != "window") throw fail("expected window=<a>:<b>");
            auto w = parse_window(kv->second);
            if (!w) throw fail("bad window");
            out.back().defense = DefenseProfile{*w};
        } else {
            throw fail("unknown record '" + std::string(tok[0]) + "'");
        }
    }
    return out;
}

std::vector<ActionAnnotation> load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open annotation file " + path);
    return parse_annotations(in);
}

void write_annotations(std::ostream& out, std::span<const ActionAnnotation> records) {
    for (const auto& a : records) {
        out << "action " << a.id << ' ' << a.name << ' ' << to_string(a.category) << ' '
            << to_string(a.start) << ' ' << to_string(a.end) << ' ' << a.duration << '\n';
        if (a.offense) {
            const auto& o = *a.offense;
            out << "  offense kind=" << to_string(o.kind) << " window=" << o.active.begin << ':'
                << o.active.end << " reach=" << text::format_double(o.reach_min) << ':'
                << text::format_double(o.reach_max) << " angle=" << text::format_double(o.half_angle)
                << " impulse=" << text::format_double(o.impulse) << '\n';
        }
        if (a.defense) {
            out << "  defense window=" << a.defense->guard.begin << ':' << a.defense->guard.end
                << '\n';
        }
    }
}

std::vector<LocalOffset> accumulate_track(const FrameGraph& graph, std::span<const FrameRef> frames) {
    std::vector<LocalOffset> track;
    track.reserve(frames.size());
    LocalOffset cur;
    track.push_back(cur);
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        auto idx = graph.index_of(frames[i]);
        if (!idx) throw InputError("track node " + to_string(frames[i]) + " not in graph");
        const auto& p = graph.pose(*idx);
        cur.offset = cur.offset + rotate(p.root_delta, cur.yaw);
        cur.yaw += p.yaw_delta;
        track.push_back(cur);
    }
    return track;
}

std::vector<Action> load_actions(std::span<const ActionAnnotation> annotations,
                                 const FrameGraph& graph) {
    std::vector<Action> out;
    out.reserve(annotations.size());
    for (const auto& a : annotations) {
        const std::string where =
            "action " + std::to_string(a.id) + " (" + a.name + ", line " + std::to_string(a.line) + ")";
        if (a.duration < 1) throw ValidationError(where + ": duration must be >= 1");
        if (a.offense.has_value() != (a.category == Category::Offense)) {
            throw ValidationError(where + ": offense profile required exactly for offense actions");
        }
        if (a.defense.has_value() != (a.category == Category::Defense)) {
            throw ValidationError(where + ": defense profile required exactly for defense actions");
        }
        auto check_window = [&](const FrameWindow& w, const char* what) {
            if (w.begin < 0 || w.end > a.duration || w.begin >= w.end) {
                throw ValidationError(where + ": " + what + " window [" + std::to_string(w.begin) +
                                      "," + std::to_string(w.end) + ") outside [0," +
                                      std::to_string(a.duration) + ")");
            }
        };
        if (a.offense) {
            check_window(a.offense->active, "active");
            if (!(a.offense->reach_min < a.offense->reach_max) || a.offense->reach_min < 0.0) {
                throw ValidationError(where + ": need 0 <= reach_min < reach_max");
            }
            if (!(a.offense->half_angle > 0.0) || !(a.offense->impulse > 0.0)) {
                throw ValidationError(where + ": angle and impulse must be positive");
            }
        }
        if (a.defense) check_window(a.defense->guard, "guard");

        // The body of an action is a run of successor edges inside one clip.
        if (a.start.clip != a.end.clip || a.end.frame - a.start.frame != a.duration) {
            throw ValidationError(where + ": " + to_string(a.start) + " -> " + to_string(a.end) +
                                  " is not a " + std::to_string(a.duration) + "-frame clip segment");
        }
        Action act;
        act.id = a.id;
        act.name = a.name;
        act.category = a.category;
        act.duration = a.duration;
        act.offense = a.offense;
        act.defense = a.defense;
        for (int f = a.start.frame; f <= a.end.frame; ++f) act.frame_path.push_back({a.start.clip, f});
        for (std::size_t i = 0; i < act.frame_path.size(); ++i) {
            if (!graph.contains(act.frame_path[i])) {
                throw ValidationError(where + ": frame " + to_string(act.frame_path[i]) +
                                      " is outside the motion graph");
            }
            if (i > 0 && !graph.edge_cost(act.frame_path[i - 1], act.frame_path[i])) {
                throw ValidationError(where + ": missing edge " + to_string(act.frame_path[i - 1]) +
                                      " -> " + to_string(act.frame_path[i]));
            }
        }
        act.track = accumulate_track(graph, act.frame_path);
        act.root_displacement = act.track.back().offset;
        act.yaw_change = act.track.back().yaw;
        out.push_back(std::move(act));
    }
    std::sort(out.begin(), out.end(), [](const Action& x, const Action& y) { return x.id < y.id; });
    return out;
}

// --- ActionMachine ------------------------------------------------------------

const Action* ActionMachine::find(ActionId id) const {
    const int i = slot(id);
    return i < 0 ? nullptr : &actions_[static_cast<std::size_t>(i)];
}

const Action& ActionMachine::action(ActionId id) const {
    const Action* a = find(id);
    if (!a) throw InputError("unknown action id " + std::to_string(id));
    return *a;
}

std::optional<ActionId> ActionMachine::find_by_name(std::string_view name) const {
    for (const auto& a : actions_) {
        if (a.name == name) return a.id;
    }
    return std::nullopt;
}

std::span<const ActionId> ActionMachine::successors(ActionId id) const {
    const int i = slot(id);
    if (i < 0) throw InputError("unknown action id " + std::to_string(id));
    return successors_[static_cast<std::size_t>(i)];
}

const Transition& ActionMachine::glue(ActionId from, ActionId to) const {
    const int i = slot(from);
    if (i < 0) throw InputError("unknown action id " + std::to_string(from));
    const int j = slot(to);
    const std::optional<Transition>* g =
        j < 0 ? nullptr : &glue_[static_cast<std::size_t>(i) * actions_.size() + static_cast<std::size_t>(j)];
    if (!g || !*g) throw InputError("action " + std::to_string(to) + " cannot follow " + std::to_string(from));
    return **g;
}

ActionMachine build_action_machine(std::vector<Action> actions, const PathTable& paths) {
    ActionMachine m;
    std::sort(actions.begin(), actions.end(),
              [](const Action& a, const Action& b) { return a.id < b.id; });
    m.actions_ = std::move(actions);
    constexpr ActionId kDenseLimit = 4096;
    for (std::size_t i = 0; i < m.actions_.size(); ++i) {
        const ActionId id = m.actions_[i].id;
        if (i > 0 && m.actions_[i - 1].id == id) {
            throw ConstructionError("duplicate action id " + std::to_string(id));
        }
        if (id >= 0 && id < kDenseLimit) {
            if (m.dense_.size() <= static_cast<std::size_t>(id)) m.dense_.resize(static_cast<std::size_t>(id) + 1, -1);
            m.dense_[static_cast<std::size_t>(id)] = static_cast<int>(i);
        } else {
            m.sparse_.emplace(id, i);
        }
    }
    const std::size_t n = m.actions_.size();
    m.successors_.resize(n);
    m.glue_.resize(n * n);
    m.max_duration_ = 1;
    std::vector<std::size_t> choosable;
    for (std::size_t i = 0; i < m.actions_.size(); ++i) {
        if (m.actions_[i].category != Category::Reaction) {
            choosable.push_back(i);
            m.max_duration_ = std::max(m.max_duration_, m.actions_[i].duration);
        }
    }
    if (choosable.empty()) throw ConstructionError("no choosable (non-reaction) actions");

    for (std::size_t i = 0; i < m.actions_.size(); ++i) {
        const Action& a = m.actions_[i];
        for (std::size_t j : choosable) {
            const Action& b = m.actions_[j];
            auto path = paths.find(a.end_node(), b.id);
            if (!path) continue;
            m.successors_[i].push_back(b.id);
            Transition t;
            t.frames = static_cast<int>(path->hops());
            t.track = accumulate_track(paths.graph(), path->nodes);
            m.glue_[i * n + j] = std::move(t);
        }
    }

    // Strong connectivity over the choosable layer: every choosable action
    // must reach every other one.
    for (std::size_t s : choosable) {
        std::vector<bool> seen(m.actions_.size(), false);
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            auto u = q.front();
            q.pop();
            for (ActionId nid : m.successors_[u]) {
                const auto v = static_cast<std::size_t>(m.slot(nid));
                if (!seen[v]) {
                    seen[v] = true;
                    q.push(v);
                }
            }
        }
        for (std::size_t t : choosable) {
            if (!seen[t]) {
                throw ConstructionError("action machine not strongly connected: " +
                                        m.actions_[t].name + " unreachable from " +
                                        m.actions_[s].name);
            }
        }
    }
    for (std::size_t i = 0; i < m.actions_.size(); ++i) {
        if (m.actions_[i].category == Category::Reaction && m.successors_[i].empty()) {
            throw ConstructionError("reaction " + m.actions_[i].name + " has no successor");
        }
    }
    return m;
}

std::vector<ActionId> launchable_actions(const ActionMachine& machine, ActionId current) {
    auto s = machine.successors(current);
    return {s.begin(), s.end()};
}

}  // namespace fightgen
