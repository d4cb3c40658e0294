#pragma once

// Scenario files and everything needed to turn one into a fight: loading the
// motion data, building the action machine and the offense/defense table,
// running bouts, and batch aggregation.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fightgen/arena.hpp"
#include "fightgen/defense_table.hpp"
#include "fightgen/motion_model.hpp"
#include "fightgen/planner.hpp"

namespace fightgen {

/// `log = synthetic` generates the sparring log from the seed instead of reading a file.
inline constexpr std::string_view kSyntheticLog = "synthetic";

struct ScenarioConfig {
    std::string name = "scenario";
    double duration_s = 60.0;
    std::uint64_t seed = 1;
    int knockdown_limit = 3;
    double start_distance = 1.8;  // m
    double start_jitter = 0.2;    // m, seeded
    std::string clips = "clips.txt";
    std::string actions = "actions.txt";
    std::string log = "sparring.log";
    int log_records = 200;  // synthetic logs only
    double transition_threshold = 0.1;
    std::string output_dir = "out";
    PlannerConfig planner;
    std::array<FighterParams, 2> fighters;

    /// Directory relative paths are resolved against (not serialized).
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& p) const;
    int duration_frames() const;

    bool operator==(const ScenarioConfig& o) const;
};

/// Sections `[scenario]`, `[planner]`, `[fighter_A]`, `[fighter_B]` of
/// `key = value` lines; `#` starts a comment. Throws ConfigError naming the
/// field and line.
ScenarioConfig parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);
void write_scenario(std::ostream& out, const ScenarioConfig& cfg);

/// Motion data, action machine and table for a scenario.
struct FightData {
    ClipLibrary clips;
    std::shared_ptr<const FrameGraph> graph;  // pruned to the largest SCC
    ActionMachine machine;
    std::vector<SparringRecord> log;
    OffenseDefenseTable table;
};

std::unique_ptr<FightData> load_fight_data(const ScenarioConfig& cfg);

/// Machine from clip and annotation files alone.
std::unique_ptr<FightData> load_motion_data(const std::filesystem::path& clips,
                                            const std::filesystem::path& actions, double threshold);

/// Seeded start poses: fighters face each other along x.
std::array<Pose, 2> start_poses(const ScenarioConfig& cfg, std::uint64_t seed);

ArenaSetup make_setup(const ScenarioConfig& cfg, const FightData& data, std::uint64_t seed);

/// Runs one bout. With `tree_dump`, every planning call appends its explored
/// tree under a `# plan frame=<f> fighter=<X> chosen=<name>` header.
FightResult run_scenario(const ScenarioConfig& cfg, const FightData& data, std::uint64_t seed,
                         std::ostream* tree_dump = nullptr);

/// Writes trace.txt, stats.txt and timing.txt into `dir` (created if needed).
void write_run(const std::filesystem::path& dir, const FightResult& result, const ActionMachine& machine);

void write_timing(std::ostream& out, const PlanTiming& timing);

/// Per-run summary row of a batch.
struct BatchRow {
    std::uint64_t seed = 0;
    FightStats stats;
};

void write_batch_row(std::ostream& out, const BatchRow& row);

/// Totals over runs, written with the same keys as a single run's stats plus
/// per-run means; one run aggregates to its own values.
void write_aggregate(std::ostream& out, std::span<const BatchRow> rows);

struct BatchTotals {
    int runs = 0;
    std::array<long long, 2> hits{};
    long long defenses = 0;
    long long chosen = 0;
    double separation_mean = 0.0;  // mean of per-run means

    long long total_hits() const { return hits[0] + hits[1]; }
    double defense_fraction() const { return chosen ? static_cast<double>(defenses) / chosen : 0.0; }
};

BatchTotals totals(std::span<const BatchRow> rows);

/// Comma-separated seed list, e.g. "1,2,3" or "1-20".
std::vector<std::uint64_t> parse_seeds(std::string_view s);

}  // namespace fightgen
