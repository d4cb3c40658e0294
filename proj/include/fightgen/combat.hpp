#pragma once

// Frame-exact combat rules shared by the arena and the planner's lookahead:
// action playback along root tracks, annulus-sector hit tests against the
// offense/defense table, and forced reactions. Keeping a single
// implementation makes in-tree predictions identical to simulated outcomes.

#include <algorithm>
#include <array>
#include <optional>
#include <span>

#include "fightgen/action_machine.hpp"
#include "fightgen/defense_table.hpp"
#include "fightgen/geometry.hpp"
#include "fightgen/scoring.hpp"
#include "fightgen/types.hpp"

namespace fightgen {

enum class AttackStatus : std::uint8_t {
    None,     // not an offense
    Pending,  // no contact yet
    Hit,
    Dodged,   // contact met a listed defense; becomes a miss when the attack ends
    Missed,
};

/// An action being played: optional glue frames, then the action body.
struct Motion {
    const Action* action = nullptr;
    const Transition* glue_track = nullptr;  // null when glue == 0
    int start = 0;   // frame the motion began
    int glue = 0;
    int length = 0;  // glue + duration
    Pose origin;     // pose at `start`
    Pose entry;      // pose when the body begins
    double ref_angle = 0.0;  // heading the body track is rotated by
    Vec2 origin_rot{1.0, 0.0};  // cos/sin of origin.facing
    Vec2 ref_rot{1.0, 0.0};     // cos/sin of ref_angle
    AttackStatus attack = AttackStatus::None;
    int contact_phase = 0;
    double impulse = 0.0;

    ActionId id() const { return action->id; }
    int end() const { return start + length; }
    int body_start() const { return start + glue; }
    /// Action-local phase at `frame`; negative during glue.
    int phase_at(int frame) const { return frame - body_start(); }
};

/// Pose at `frame`; frames past the end hold the final pose.
Pose pose_at(const Motion& m, int frame);

/// Starts `next` after `previous` at `frame` from pose `at` (glue included).
Motion launch_motion(const ActionMachine& machine, ActionId previous, ActionId next, int frame,
                     const Pose& at);

/// Starts a reaction immediately (no glue). Its track is laid out along the
/// contact direction, i.e. the victim is pushed away from the attacker.
Motion launch_reaction(const Action& reaction, int frame, const Pose& at, double contact_direction);

/// Fixed-capacity list of the most recent action ids, oldest first.
class ActionHistory {
public:
    explicit ActionHistory(int window = 8) : window_(static_cast<std::uint8_t>(window)) {}

    void push(ActionId id);
    std::span<const ActionId> view() const { return {ids_.data(), size_}; }
    int window() const { return window_; }

    bool operator==(const ActionHistory& o) const {
        return window_ == o.window_ && std::equal(view().begin(), view().end(), o.view().begin(),
                                                  o.view().end());
    }

private:
    std::array<ActionId, kMaxRepeatWindow> ids_{};
    std::size_t size_ = 0;
    std::uint8_t window_;
};

/// The dynamic part of a fighter: what it is playing and what it played.
struct Fighter {
    Motion motion;
    ActionHistory history;  // actions before the current one
};

/// Frame-level verdict for an attack at one phase: Hit (contact, not
/// covered), Undecided (contact met a listed defense whose guard covers the
/// phase), or Miss (no contact at this phase).
AttackOutcome resolve_attack(const Fighter& attacker, const Action& attack, int phase,
                             const Fighter& defender, const OffenseDefenseTable& table);

/// Whether `defender`'s current action guards against `kind` at `frame`.
bool guard_covers(const Fighter& defender, AttackKind kind, int frame, const OffenseDefenseTable& table);

/// Outcome for scoring once the action is over (completed or interrupted).
std::optional<AttackOutcome> final_outcome(const Motion& m);
/// Outcome for scoring at a horizon cut while the action is still running.
std::optional<AttackOutcome> open_outcome(const Motion& m);

struct ReactionSet {
    ActionId flinch = 0;
    ActionId stagger = 0;
    ActionId knockdown = 0;

    /// Looks the reactions up by name; throws InputError when one is missing.
    static ReactionSet from(const ActionMachine& machine);
    ActionId for_impulse(double impulse) const;
};

inline constexpr double kStaggerImpulse = 1.0;
inline constexpr double kKnockdownImpulse = 2.5;

ActionId reaction_for_impulse(const ActionMachine& machine, double impulse, double contact_direction);

struct Contact {
    Side attacker = Side::A;
    double impulse = 0.0;
    int contact_phase = 0;
    double direction = 0.0;  // attacker -> victim
};

struct FrameResult {
    std::array<std::optional<Contact>, 2> hit_by;  // indexed by attacker
    std::array<bool, 2> completed{};               // motion ended this frame, not hit

    bool victim(Side s) const { return hit_by[index(other(s))].has_value(); }
};

/// Resolves attacks at `frame` for both fighters against their poses at that
/// frame and updates attack statuses. Does not start reactions.
FrameResult resolve_frame(std::array<Fighter, 2>& fighters, int frame, const OffenseDefenseTable& table);

/// First frame after `after` at which resolve_frame can report or change
/// anything: an attack's active frame or the end of a motion. INT_MAX when
/// neither fighter has anything left.
int next_event_frame(const std::array<Fighter, 2>& fighters, int after);

/// Ends the victim's motion at `frame` and starts the reaction.
void apply_interruption(Fighter& victim, const Action& reaction, int frame, double direction);

}  // namespace fightgen
