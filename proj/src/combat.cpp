#include "fightgen/combat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fightgen/errors.hpp"

namespace fightgen {

Pose pose_at(const Motion& m, int frame) {
    int k = std::clamp(frame - m.start, 0, m.length);
    if (k < m.glue) return apply_offset(m.origin, m.origin_rot.x, m.origin_rot.y, m.glue_track->track[k]);
    return apply_offset(m.entry, m.ref_rot.x, m.ref_rot.y, m.action->track[k - m.glue]);
}

namespace {

AttackStatus initial_status(const Action& a) {
    return a.category == Category::Offense ? AttackStatus::Pending : AttackStatus::None;
}

void cache_rotations(Motion& m) {
    m.origin_rot = {std::cos(m.origin.facing), std::sin(m.origin.facing)};
    m.ref_rot = {std::cos(m.ref_angle), std::sin(m.ref_angle)};
}

}  // namespace

Motion launch_motion(const ActionMachine& machine, ActionId previous, ActionId next, int frame,
                     const Pose& at) {
    const Transition& t = machine.glue(previous, next);
    Motion m;
    m.action = &machine.action(next);
    m.glue_track = t.frames > 0 ? &t : nullptr;
    m.start = frame;
    m.glue = t.frames;
    m.length = t.frames + m.action->duration;
    m.origin = at;
    m.entry = t.frames > 0 ? apply_offset(at, at.facing, t.track.back()) : at;
    m.ref_angle = m.entry.facing;
    m.attack = initial_status(*m.action);
    cache_rotations(m);
    return m;
}

Motion launch_reaction(const Action& reaction, int frame, const Pose& at, double contact_direction) {
    Motion m;
    m.action = &reaction;
    m.start = frame;
    m.glue = 0;
    m.length = reaction.duration;
    m.origin = at;
    m.entry = at;
    // Reaction tracks step backwards (-x); rotate so backwards is along the push.
    m.ref_angle = wrap_angle(contact_direction + std::numbers::pi);
    m.attack = initial_status(reaction);
    cache_rotations(m);
    return m;
}

void ActionHistory::push(ActionId id) {
    const std::size_t cap = window_;
    if (size_ == cap) {
        std::move(ids_.begin() + 1, ids_.begin() + static_cast<std::ptrdiff_t>(size_), ids_.begin());
        --size_;
    }
    ids_[size_++] = id;
}

bool guard_covers(const Fighter& defender, AttackKind kind, int frame, const OffenseDefenseTable& table) {
    const Motion& m = defender.motion;
    if (!m.action || m.action->category != Category::Defense) return false;
    if (!table.lists(kind, m.id())) return false;
    return m.action->defense->guard.contains(m.phase_at(frame));
}

AttackOutcome resolve_attack(const Fighter& attacker, const Action& attack, int phase,
                             const Fighter& defender, const OffenseDefenseTable& table) {
    if (attack.category != Category::Offense || !attack.offense) {
        throw InputError("resolve_attack: action " + attack.name + " is not an offense");
    }
    const OffenseProfile& o = *attack.offense;
    if (!o.active.contains(phase)) return AttackOutcome::miss();
    const int frame = attacker.motion.body_start() + phase;
    const Pose a = pose_at(attacker.motion, frame);
    const Pose d = pose_at(defender.motion, frame);
    const double dist = distance(a.pos, d.pos);
    if (dist < o.reach_min || dist > o.reach_max) return AttackOutcome::miss();
    if (std::abs(bearing_error(a, d.pos)) > o.half_angle) return AttackOutcome::miss();
    if (guard_covers(defender, o.kind, frame, table)) return AttackOutcome::undecided();
    return AttackOutcome::hit(o.impulse, phase);
}

std::optional<AttackOutcome> final_outcome(const Motion& m) {
    switch (m.attack) {
        case AttackStatus::None: return std::nullopt;
        case AttackStatus::Hit: return AttackOutcome::hit(m.impulse, m.contact_phase);
        default: return AttackOutcome::miss();
    }
}

std::optional<AttackOutcome> open_outcome(const Motion& m) {
    switch (m.attack) {
        case AttackStatus::None: return std::nullopt;
        case AttackStatus::Hit: return AttackOutcome::hit(m.impulse, m.contact_phase);
        case AttackStatus::Missed: return AttackOutcome::miss();
        default: return AttackOutcome::undecided();
    }
}

ReactionSet ReactionSet::from(const ActionMachine& machine) {
    auto get = [&](std::string_view name) {
        auto id = machine.find_by_name(name);
        if (!id || machine.action(*id).category != Category::Reaction) {
            throw InputError("action roster lacks reaction '" + std::string(name) + "'");
        }
        return *id;
    };
    return ReactionSet{get("flinch"), get("stagger"), get("knockdown")};
}

ActionId ReactionSet::for_impulse(double impulse) const {
    if (impulse < kStaggerImpulse) return flinch;
    if (impulse < kKnockdownImpulse) return stagger;
    return knockdown;
}

ActionId reaction_for_impulse(const ActionMachine& machine, double impulse, double /*contact_direction*/) {
    if (!(impulse > 0.0)) throw InputError("reaction_for_impulse: impulse must be > 0");
    return ReactionSet::from(machine).for_impulse(impulse);
}

FrameResult resolve_frame(std::array<Fighter, 2>& fighters, int frame, const OffenseDefenseTable& table) {
    FrameResult r;
    std::array<AttackStatus, 2> next{fighters[0].motion.attack, fighters[1].motion.attack};
    for (Side s : kSides) {
        const Fighter& att = fighters[index(s)];
        const Fighter& def = fighters[index(other(s))];
        const Motion& m = att.motion;
        if (m.attack != AttackStatus::Pending || frame > m.end()) continue;
        const int phase = m.phase_at(frame);
        if (!m.action->offense->active.contains(phase)) continue;
        const AttackOutcome out = resolve_attack(att, *m.action, phase, def, table);
        if (out.kind == OutcomeKind::Hit) {
            next[index(s)] = AttackStatus::Hit;
            const Vec2 dir = pose_at(def.motion, frame).pos - pose_at(m, frame).pos;
            r.hit_by[index(s)] = Contact{s, out.impulse, phase, std::atan2(dir.y, dir.x)};
        } else if (out.kind == OutcomeKind::Undecided) {
            next[index(s)] = AttackStatus::Dodged;
        }
    }
    for (Side s : kSides) {
        Motion& m = fighters[index(s)].motion;
        m.attack = next[index(s)];
        if (auto& c = r.hit_by[index(s)]) {
            m.contact_phase = c->contact_phase;
            m.impulse = c->impulse;
        }
    }
    for (Side s : kSides) {
        r.completed[index(s)] = fighters[index(s)].motion.end() == frame && !r.victim(s);
    }
    return r;
}

int next_event_frame(const std::array<Fighter, 2>& fighters, int after) {
    int next = std::numeric_limits<int>::max();
    for (const Fighter& f : fighters) {
        const Motion& m = f.motion;
        if (!m.action || m.end() <= after) continue;
        next = std::min(next, m.end());
        if (m.attack != AttackStatus::Pending) continue;
        const FrameWindow& w = m.action->offense->active;
        const int first = std::max(after + 1, m.body_start() + w.begin);
        if (first < m.body_start() + w.end) next = std::min(next, first);
    }
    return next;
}

void apply_interruption(Fighter& victim, const Action& reaction, int frame, double direction) {
    const Pose at = pose_at(victim.motion, frame);
    victim.history.push(victim.motion.id());
    victim.motion = launch_reaction(reaction, frame, at, direction);
}

}  // namespace fightgen
