#pragma once

// Frame-stepped fight simulator. Both fighters play their actions; hits
// interrupt the victim with a reaction, and a fighter whose action ends asks
// its chooser (normally the planner) for the next one.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fightgen/combat.hpp"
#include "fightgen/planner.hpp"

namespace fightgen {

enum class EventKind : std::uint8_t { ActionStart, Hit, Reaction, ActionEnd };

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct FightEvent {
    int frame = 0;
    Side fighter = Side::A;  // attacker for Hit events
    EventKind kind = EventKind::ActionStart;
    ActionId action = 0;
    Pose pose;  // the fighter's pose; the victim's pose for Hit events
    int glue = 0;                        // ActionStart
    int end = 0;                         // ActionStart, Reaction: planned end frame
    bool interrupted = false;            // ActionEnd
    std::optional<OutcomeKind> outcome;  // ActionEnd of an offense
    double impulse = 0.0;                // Hit
    int phase = 0;                       // Hit: attack phase at contact

    bool operator==(const FightEvent&) const = default;
};

using FightTrace = std::vector<FightEvent>;

/// One event per line: `frame=<n> fighter=<A|B> event=<kind> key=value...`.
void write_event(std::ostream& out, const FightEvent& e, const ActionMachine& machine);
void write_trace(std::ostream& out, std::span<const FightEvent> trace, const ActionMachine& machine);
/// Action names are not needed to read a trace back; ids are authoritative.
FightTrace parse_trace(std::istream& in);
FightTrace load_trace(const std::string& path);

/// Picks the next action for `world.mover`. The planner result is optional
/// output for bookkeeping.
using Chooser = std::function<ActionId(const PlanningWorld& world, PlanResult* result)>;

/// Replays the ActionStart choices of a trace; throws InputError when the
/// simulation asks for a choice the trace does not have.
Chooser replay_chooser(const FightTrace& trace);

struct ArenaSetup {
    const ActionMachine* machine = nullptr;
    const OffenseDefenseTable* table = nullptr;
    std::array<FighterParams, 2> params;
    PlannerConfig config;
    int duration_frames = 60 * kFramesPerSecond;
    int knockdown_limit = 3;
    std::array<Pose, 2> start;
    std::string idle_action = "shuffle";  // both fighters begin as if it just ended
};

struct FightStats {
    int frames = 0;
    std::array<int, 2> hits_landed{};
    std::array<int, 2> knockdowns{};
    std::array<int, 2> actions_chosen{};
    std::array<std::array<int, 4>, 2> category_counts{};  // by Category, incl. reactions
    std::array<int, 2> attacks_missed{};
    std::vector<double> separation;  // one sample per simulated frame

    int defenses_chosen(Side s) const { return category_counts[index(s)][static_cast<int>(Category::Defense)]; }
    int total_hits() const { return hits_landed[0] + hits_landed[1]; }
    double mean_separation() const;
    /// Nearest-rank percentile, q in [0, 1].
    double separation_percentile(double q) const;

    bool operator==(const FightStats&) const = default;
};

/// Flat key=value text, byte-stable for equal stats.
void write_stats(std::ostream& out, const FightStats& stats);

struct PlanTiming {
    long long calls = 0;
    long long nodes_expanded = 0;
    long long pruned_ab = 0;
    long long pruned_heuristic = 0;
    double total_ms = 0.0;
    double max_ms = 0.0;
};

class Arena {
public:
    /// Without a chooser the planner picks every action.
    explicit Arena(ArenaSetup setup, Chooser chooser = {});

    /// Launches the opening actions at frame 0.
    std::vector<FightEvent> start();
    /// Advances one frame and returns the events it produced.
    std::vector<FightEvent> step();
    bool finished() const;

    int frame() const { return frame_; }
    const std::array<Fighter, 2>& fighters() const { return fighters_; }
    const FightStats& stats() const { return stats_; }
    const PlanTiming& timing() const { return timing_; }

    /// Called with every planning tree when set (debug dumps).
    std::function<void(const PlanningWorld&, const GameTree&, const PlanResult&)> on_plan;

private:
    void record(const FightEvent& e, std::vector<FightEvent>& out);
    void choose(Side s, bool other_pending, std::vector<FightEvent>& out);

    ArenaSetup setup_;
    PlannerContext planner_;
    Chooser chooser_;
    ReactionSet reactions_;
    std::array<Fighter, 2> fighters_;
    int frame_ = 0;
    bool started_ = false;
    FightStats stats_;
    PlanTiming timing_;
};

struct FightResult {
    FightTrace trace;
    FightStats stats;
    PlanTiming timing;
};

/// Runs a whole bout.
FightResult run_arena(const ArenaSetup& setup, Chooser chooser = {},
                      std::function<void(const PlanningWorld&, const GameTree&, const PlanResult&)> on_plan = {});

}  // namespace fightgen
