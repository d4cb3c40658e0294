#pragma once

// Upper layer of the motion graph: actions as indivisible planning units and
// the state machine of which action may follow which. Frame connectivity is
// hidden here; moving from one action's exit frame to the next action's entry
// frame is a "glue" transition of a few frames with no combat effect.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fightgen/geometry.hpp"
#include "fightgen/motion_model.hpp"
#include "fightgen/types.hpp"

namespace fightgen {

enum class Category : std::uint8_t { Offense, Defense, Transition, Reaction };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

enum class AttackKind : std::uint8_t { Jab, Straight, Hook, Uppercut, Kick };

std::string_view to_string(AttackKind k);
std::optional<AttackKind> parse_attack_kind(std::string_view s);

/// Half-open frame range [begin, end) in action-local phase.
struct FrameWindow {
    int begin = 0;
    int end = 0;

    bool contains(int phase) const { return phase >= begin && phase < end; }
    bool operator==(const FrameWindow&) const = default;
};

struct OffenseProfile {
    AttackKind kind = AttackKind::Jab;
    FrameWindow active;
    double reach_min = 0.0;  // m, centre to centre
    double reach_max = 0.0;
    double half_angle = 0.0;  // rad around the attacker's facing
    double impulse = 0.0;

    bool operator==(const OffenseProfile&) const = default;
};

struct DefenseProfile {
    FrameWindow guard;

    bool operator==(const DefenseProfile&) const = default;
};

struct Action {
    ActionId id = 0;
    std::string name;
    Category category = Category::Transition;
    int duration = 0;  // frames, == frame_path.size() - 1
    std::vector<FrameRef> frame_path;
    Vec2 root_displacement;  // net, in the entry heading
    double yaw_change = 0.0;
    std::optional<OffenseProfile> offense;
    std::optional<DefenseProfile> defense;
    /// Root offset relative to the entry pose at each phase 0..duration.
    std::vector<LocalOffset> track;

    FrameRef start_node() const { return frame_path.front(); }
    FrameRef end_node() const { return frame_path.back(); }
};

/// One `action` record of an annotation file plus its continuation lines.
struct ActionAnnotation {
    ActionId id = 0;
    std::string name;
    Category category = Category::Transition;
    FrameRef start;
    FrameRef end;
    int duration = 0;
    std::optional<OffenseProfile> offense;
    std::optional<DefenseProfile> defense;
    int line = 0;
};

std::vector<ActionAnnotation> parse_annotations(std::istream& in);
std::vector<ActionAnnotation> load_annotations(const std::string& path);
void write_annotations(std::ostream& out, std::span<const ActionAnnotation> records);

/// Validates every record against the (pruned) frame graph and builds the
/// per-phase root track. Throws ValidationError naming the record's line.
std::vector<Action> load_actions(std::span<const ActionAnnotation> annotations,
                                 const FrameGraph& graph);

/// Frames walked between two actions, with their root track relative to the
/// pose where the previous action ended.
struct Transition {
    int frames = 0;
    std::vector<LocalOffset> track;  // size frames + 1
};

class ActionMachine {
public:
    ActionMachine() = default;

    std::span<const Action> actions() const { return actions_; }
    const Action* find(ActionId id) const;
    /// Throws InputError for unknown ids.
    const Action& action(ActionId id) const;
    std::optional<ActionId> find_by_name(std::string_view name) const;

    std::span<const ActionId> successors(ActionId id) const;
    /// Glue from `from`'s exit to `to`'s entry. `to` must be a successor.
    const Transition& glue(ActionId from, ActionId to) const;

    /// Longest non-Reaction duration.
    int max_duration() const { return max_duration_; }

private:
    friend ActionMachine build_action_machine(std::vector<Action> actions, const PathTable& paths);

    /// Position of `id` in actions_, or -1.
    int slot(ActionId id) const {
        if (id >= 0 && static_cast<std::size_t>(id) < dense_.size()) return dense_[static_cast<std::size_t>(id)];
        auto it = sparse_.find(id);
        return it == sparse_.end() ? -1 : static_cast<int>(it->second);
    }

    std::vector<Action> actions_;  // ascending id
    std::vector<int> dense_;       // small ids -> slot
    std::map<ActionId, std::size_t> sparse_;  // ids outside the dense range
    std::vector<std::vector<ActionId>> successors_;
    std::vector<std::optional<Transition>> glue_;  // slot(from) * size + slot(to)
    int max_duration_ = 1;
};

/// Throws ConstructionError naming the first unreachable pair when the
/// non-Reaction upper layer is not strongly connected or a reaction has no way out.
ActionMachine build_action_machine(std::vector<Action> actions, const PathTable& paths);

std::vector<ActionId> launchable_actions(const ActionMachine& machine, ActionId current);

/// Accumulates a root track over the given frames: entry k is the offset after
/// k frames. Used for action bodies and glue paths alike.
std::vector<LocalOffset> accumulate_track(const FrameGraph& graph, std::span<const FrameRef> frames);

/// Pose reached after applying `off` to `origin`, with positions rotated by `ref_angle`.
inline Pose apply_offset(const Pose& origin, double ref_angle, const LocalOffset& off) {
    return Pose{origin.pos + rotate(off.offset, ref_angle), wrap_angle(origin.facing + off.yaw)};
}

/// Same with the rotation given as cosine and sine.
inline Pose apply_offset(const Pose& origin, double c, double s, const LocalOffset& off) {
    return Pose{origin.pos + rotate(off.offset, c, s), wrap_angle(origin.facing + off.yaw)};
}

}  // namespace fightgen
