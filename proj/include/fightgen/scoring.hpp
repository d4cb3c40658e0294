#pragma once

// Objective function for one fighter's action over a span of time:
//   S = w_l * F_loc + w_f * F_fight + w_c * F_control
// plus the route sums and the zero-sum leaf value used by the search.

#include <optional>
#include <span>
#include <string_view>

#include "fightgen/action_machine.hpp"
#include "fightgen/geometry.hpp"
#include "fightgen/types.hpp"

namespace fightgen {

inline constexpr int kMaxRepeatWindow = 16;

struct FighterParams {
    double w_l = 5.0;
    double w_f = 20.0;
    double w_c = 2.0;
    double t_f = 1.0;                 // planning horizon, seconds
    double preferred_distance = 1.2;  // m
    int approach_polarity = +1;       // +1 close in, -1 keep away
    int facing_polarity = +1;         // +1 face the opponent, -1 turn away
    double interaction_bias = 1.0;    // multiplier on offense outcomes
    int repeat_window = 8;
    double repeat_penalty = 0.25;

    int horizon_frames() const;
    /// Throws InputError describing the first bad field.
    void validate() const;

    bool operator==(const FighterParams&) const = default;
};

enum class OutcomeKind : std::uint8_t { Hit, Miss, Undecided };

std::string_view to_string(OutcomeKind k);

struct AttackOutcome {
    OutcomeKind kind = OutcomeKind::Undecided;
    double impulse = 0.0;   // Hit only
    int contact_frame = 0;  // Hit only, action-local phase

    static AttackOutcome hit(double impulse, int contact_frame) {
        return {OutcomeKind::Hit, impulse, contact_frame};
    }
    static AttackOutcome miss() { return {OutcomeKind::Miss, 0.0, 0}; }
    static AttackOutcome undecided() { return {}; }

    bool operator==(const AttackOutcome&) const = default;
};

/// Everything needed to score one fighter's action over [t1, t2].
struct EvalContext {
    ActionId e_self = 0;
    ActionId e_opp = 0;
    int delta_t = 0;  // opponent's action start minus own action start, frames
    int t1 = 0;
    int t2 = 0;
    Pose self_start;  // at t1
    Pose opp_start;
    Pose self_end;  // at t2
    Pose opp_end;
    std::optional<AttackOutcome> outcome;  // own attack; empty for non-offense
    std::span<const ActionId> history;     // own previous actions, most recent last
};

/// 0.5 * position + 0.5 * orientation, both evaluated at the end of the span.
double location_score(const EvalContext& ctx, const FighterParams& params);
double position_component(double separation, const FighterParams& params);
double orientation_component(const Pose& self, const Pose& opp, const FighterParams& params);

double characteristic_score(const std::optional<AttackOutcome>& outcome, const FighterParams& params);

/// (1 - duration / max_duration) - repeat_penalty * occurrences in history.
double control_score(const Action& action, std::span<const ActionId> history,
                     const FighterParams& params, int max_duration);

struct ScoreTerms {
    double location = 0.0;
    double fight = 0.0;
    double control = 0.0;
};

double weighted_sum(const ScoreTerms& terms, const FighterParams& params);

double evaluate_edge(const EvalContext& ctx, const FighterParams& params, const ActionMachine& machine);

/// One settled edge evaluation attributed to a fighter along a route.
struct Settlement {
    Side fighter = Side::A;
    ActionId action = 0;
    double value = 0.0;
};

struct RouteScore {
    double a = 0.0;
    double b = 0.0;

    bool operator==(const RouteScore&) const = default;
};

RouteScore route_score(std::span<const Settlement> settlements);

inline double zero_sum_value(double s_a, double s_b) { return s_a - s_b; }
inline double zero_sum_value(const RouteScore& s) { return zero_sum_value(s.a, s.b); }

}  // namespace fightgen
