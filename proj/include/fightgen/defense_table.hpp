#pragma once

// Offense/defense table: for each attack kind, which defenses were observed
// to make it miss in sparring logs, and at what launch offset relative to the
// attack's start.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fightgen/action_machine.hpp"
#include "fightgen/types.hpp"

namespace fightgen {

enum class LogOutcome : std::uint8_t { Hit, Miss, Dodged };

struct SparringRecord {
    int frame = 0;
    Side fighter = Side::A;
    ActionId action = 0;
    std::optional<LogOutcome> outcome;  // offense records only

    bool operator==(const SparringRecord&) const = default;
};

std::vector<SparringRecord> parse_log(std::istream& in);
std::vector<SparringRecord> load_log(const std::string& path);
void write_log(std::ostream& out, std::span<const SparringRecord> log);

struct DefenseEntry {
    ActionId defense_id = 0;
    int delta_t_min = 0;  // frames, defense start minus attack start
    int delta_t_max = 0;
    int delta_t_mode = 0;  // most frequent offset; ties to the smaller one
    int count = 0;         // successful (miss/dodged) observations
    double success_rate = 0.0;

    bool operator==(const DefenseEntry&) const = default;
};

class OffenseDefenseTable {
public:
    std::span<const DefenseEntry> entries(AttackKind kind) const;
    const DefenseEntry* find(AttackKind kind, ActionId defense) const;
    bool lists(AttackKind kind, ActionId defense) const { return find(kind, defense) != nullptr; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const;
    const std::map<AttackKind, std::vector<DefenseEntry>>& all() const { return entries_; }

    bool operator==(const OffenseDefenseTable&) const = default;

private:
    friend OffenseDefenseTable build_table(std::span<const SparringRecord>, const ActionMachine&);
    std::map<AttackKind, std::vector<DefenseEntry>> entries_;
};

/// Pairs each missed or dodged attack with the opponent defense whose guard
/// overlaps the attack's active frames and whose start is closest to the
/// attack's start. Throws InputError for unknown ids, missing offense
/// outcomes, or decreasing times.
OffenseDefenseTable build_table(std::span<const SparringRecord> log, const ActionMachine& machine);

/// Defenses whose observed launch window has not yet closed `elapsed` frames
/// after the attack started; table order (count desc, id asc).
std::vector<ActionId> query_defenses(const OffenseDefenseTable& table, AttackKind kind, int elapsed);

void dump_table(std::ostream& out, const OffenseDefenseTable& table, const ActionMachine& machine);

/// Scripted sparring-log generator: attacks answered by preferred defenses
/// launched so their guard centres on the attack's active frames, with
/// jittered offsets. Deterministic for a given seed.
std::vector<SparringRecord> generate_sparring_log(const ActionMachine& machine, std::uint64_t seed,
                                                  std::size_t records);

}  // namespace fightgen
