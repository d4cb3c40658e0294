#include "fightgen/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "fightgen/errors.hpp"

namespace fightgen {

int FighterParams::horizon_frames() const {
    return static_cast<int>(std::lround(t_f * kFramesPerSecond));
}

void FighterParams::validate() const {
    auto bad = [](const std::string& what) { return InputError("fighter params: " + what); };
    if (!(w_l >= 0.0) || !(w_f >= 0.0) || !(w_c >= 0.0)) throw bad("weights must be >= 0");
    if (!(t_f > 0.0)) throw bad("t_f must be > 0");
    if (!(preferred_distance > 0.0)) throw bad("preferred_distance must be > 0");
    if (approach_polarity != 1 && approach_polarity != -1) throw bad("approach_polarity must be +1 or -1");
    if (facing_polarity != 1 && facing_polarity != -1) throw bad("facing_polarity must be +1 or -1");
    if (!std::isfinite(interaction_bias)) throw bad("interaction_bias must be finite");
    if (repeat_window < 1 || repeat_window > kMaxRepeatWindow) {
        throw bad("repeat_window must be in [1, " + std::to_string(kMaxRepeatWindow) + "]");
    }
    if (!(repeat_penalty >= 0.0)) throw bad("repeat_penalty must be >= 0");
}

std::string_view to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Hit: return "hit";
        case OutcomeKind::Miss: return "miss";
        case OutcomeKind::Undecided: return "undecided";
    }
    return "?";
}

double position_component(double separation, const FighterParams& params) {
    const double pd = params.preferred_distance;
    if (params.approach_polarity > 0) {
        return std::clamp(1.0 - std::abs(separation - pd) / pd, -1.0, 1.0);
    }
    // Keep-away: grows with separation until the preferred distance is reached.
    return std::clamp(2.0 * separation / pd - 1.0, -1.0, 1.0);
}

double orientation_component(const Pose& self, const Pose& opp, const FighterParams& params) {
    const Vec2 d = opp.pos - self.pos;
    if (d.x == 0.0 && d.y == 0.0) return params.facing_polarity;
    return params.facing_polarity * std::cos(bearing_error(self, opp.pos));
}

double location_score(const EvalContext& ctx, const FighterParams& params) {
    const double sep = distance(ctx.self_end.pos, ctx.opp_end.pos);
    return 0.5 * position_component(sep, params) +
           0.5 * orientation_component(ctx.self_end, ctx.opp_end, params);
}

double characteristic_score(const std::optional<AttackOutcome>& outcome, const FighterParams& params) {
    if (!outcome) return 0.0;
    switch (outcome->kind) {
        case OutcomeKind::Hit: return params.interaction_bias;
        case OutcomeKind::Miss: return -params.interaction_bias;
        case OutcomeKind::Undecided: return 0.0;
    }
    return 0.0;
}

double control_score(const Action& action, std::span<const ActionId> history,
                     const FighterParams& params, int max_duration) {
    const double duration_term =
        1.0 - static_cast<double>(action.duration) / static_cast<double>(max_duration);
    const auto repeats = std::count(history.begin(), history.end(), action.id);
    return duration_term - params.repeat_penalty * static_cast<double>(repeats);
}

double weighted_sum(const ScoreTerms& t, const FighterParams& p) {
    return p.w_l * t.location + p.w_f * t.fight + p.w_c * t.control;
}

double evaluate_edge(const EvalContext& ctx, const FighterParams& params, const ActionMachine& machine) {
    const Action& act = machine.action(ctx.e_self);
    const std::size_t w = static_cast<std::size_t>(params.repeat_window);
    auto history = ctx.history.size() > w ? ctx.history.subspan(ctx.history.size() - w) : ctx.history;
    ScoreTerms terms;
    terms.location = location_score(ctx, params);
    terms.fight = characteristic_score(ctx.outcome, params);
    terms.control = control_score(act, history, params, machine.max_duration());
    return weighted_sum(terms, params);
}

RouteScore route_score(std::span<const Settlement> settlements) {
    RouteScore s;
    for (const auto& st : settlements) {
        (st.fighter == Side::A ? s.a : s.b) += st.value;
    }
    return s;
}

}  // namespace fightgen
