#include "fightgen/defense_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "fightgen/errors.hpp"
#include "fightgen/rng.hpp"
#include "fightgen/text.hpp"

namespace fightgen {

namespace {

std::string_view outcome_word(LogOutcome o) {
    switch (o) {
        case LogOutcome::Hit: return "hit";
        case LogOutcome::Miss: return "miss";
        case LogOutcome::Dodged: return "dodged";
    }
    return "?";
}

}  // namespace

std::vector<SparringRecord> parse_log(std::istream& in) {
    std::vector<SparringRecord> out;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        return InputError("log line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        auto tok = text::split_ws(body);
        if (tok[0] != "t" || (tok.size() != 4 && tok.size() != 5)) {
            throw fail("expected 't <frame> <A|B> <action_id> [hit|miss|dodged]'");
        }
        SparringRecord r;
        auto frame = text::parse_int(tok[1]);
        auto id = text::parse_int(tok[3]);
        if (!frame || *frame < 0) throw fail("bad frame");
        if (tok[2] == "A") r.fighter = Side::A;
        else if (tok[2] == "B") r.fighter = Side::B;
        else throw fail("fighter must be A or B");
        if (!id) throw fail("bad action id");
        r.frame = static_cast<int>(*frame);
        r.action = static_cast<ActionId>(*id);
        if (tok.size() == 5) {
            if (tok[4] == "hit") r.outcome = LogOutcome::Hit;
            else if (tok[4] == "miss") r.outcome = LogOutcome::Miss;
            else if (tok[4] == "dodged") r.outcome = LogOutcome::Dodged;
            else throw fail("outcome must be hit, miss or dodged");
        }
        out.push_back(r);
    }
    return out;
}

std::vector<SparringRecord> load_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open log file " + path);
    return parse_log(in);
}

void write_log(std::ostream& out, std::span<const SparringRecord> log) {
    for (const auto& r : log) {
        out << "t " << r.frame << ' ' << to_string(r.fighter) << ' ' << r.action;
        if (r.outcome) out << ' ' << outcome_word(*r.outcome);
        out << '\n';
    }
}

std::span<const DefenseEntry> OffenseDefenseTable::entries(AttackKind kind) const {
    auto it = entries_.find(kind);
    if (it == entries_.end()) return {};
    return it->second;
}

const DefenseEntry* OffenseDefenseTable::find(AttackKind kind, ActionId defense) const {
    for (const auto& e : entries(kind)) {
        if (e.defense_id == defense) return &e;
    }
    return nullptr;
}

std::size_t OffenseDefenseTable::size() const {
    std::size_t n = 0;
    for (const auto& [_, v] : entries_) n += v.size();
    return n;
}

OffenseDefenseTable build_table(std::span<const SparringRecord> log, const ActionMachine& machine) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& r = log[i];
        const Action* a = machine.find(r.action);
        if (!a) throw InputError("log record " + std::to_string(i + 1) + ": unknown action id " +
                                 std::to_string(r.action));
        if (a->category == Category::Offense && !r.outcome) {
            throw InputError("log record " + std::to_string(i + 1) + ": offense without outcome");
        }
        if (a->category != Category::Offense && r.outcome) {
            throw InputError("log record " + std::to_string(i + 1) + ": outcome on non-offense action");
        }
        if (i > 0 && r.frame < log[i - 1].frame) {
            throw InputError("log record " + std::to_string(i + 1) + ": time goes backwards");
        }
    }
    // Simultaneous records are ordered by fighter, then action id.
    std::vector<SparringRecord> recs(log.begin(), log.end());
    std::stable_sort(recs.begin(), recs.end(), [](const auto& x, const auto& y) {
        return std::tuple(x.frame, index(x.fighter), x.action) <
               std::tuple(y.frame, index(y.fighter), y.action);
    });

    struct Tally {
        int overlapped = 0;
        std::vector<int> successes;  // delta t per successful observation
    };
    std::map<std::pair<AttackKind, ActionId>, Tally> tallies;

    for (const auto& atk : recs) {
        const Action& attack = machine.action(atk.action);
        if (attack.category != Category::Offense) continue;
        const int a0 = atk.frame + attack.offense->active.begin;
        const int a1 = atk.frame + attack.offense->active.end;
        const SparringRecord* best = nullptr;
        for (const auto& d : recs) {
            if (d.fighter == atk.fighter) continue;
            const Action& def = machine.action(d.action);
            if (def.category != Category::Defense) continue;
            const int g0 = d.frame + def.defense->guard.begin;
            const int g1 = d.frame + def.defense->guard.end;
            if (std::max(a0, g0) >= std::min(a1, g1)) continue;
            if (!best) {
                best = &d;
                continue;
            }
            const auto key = [&](const SparringRecord& r) {
                return std::tuple(std::abs(r.frame - atk.frame), r.frame, r.action);
            };
            if (key(d) < key(*best)) best = &d;
        }
        if (!best) continue;
        auto& t = tallies[{attack.offense->kind, best->action}];
        ++t.overlapped;
        if (*atk.outcome != LogOutcome::Hit) t.successes.push_back(best->frame - atk.frame);
    }

    OffenseDefenseTable table;
    for (auto& [key, t] : tallies) {
        if (t.successes.empty()) continue;
        auto& ds = t.successes;
        std::sort(ds.begin(), ds.end());
        DefenseEntry e;
        e.defense_id = key.second;
        e.delta_t_min = ds.front();
        e.delta_t_max = ds.back();
        e.count = static_cast<int>(ds.size());
        e.success_rate = static_cast<double>(e.count) / static_cast<double>(t.overlapped);
        int best_run = 0;
        for (std::size_t i = 0; i < ds.size();) {
            std::size_t j = i;
            while (j < ds.size() && ds[j] == ds[i]) ++j;
            if (static_cast<int>(j - i) > best_run) {
                best_run = static_cast<int>(j - i);
                e.delta_t_mode = ds[i];
            }
            i = j;
        }
        table.entries_[key.first].push_back(e);
    }
    for (auto& [_, v] : table.entries_) {
        std::sort(v.begin(), v.end(), [](const DefenseEntry& x, const DefenseEntry& y) {
            return x.count != y.count ? x.count > y.count : x.defense_id < y.defense_id;
        });
    }
    return table;
}

std::vector<ActionId> query_defenses(const OffenseDefenseTable& table, AttackKind kind, int elapsed) {
    if (elapsed < 0) throw InputError("query_defenses: elapsed must be >= 0");
    std::vector<ActionId> out;
    for (const auto& e : table.entries(kind)) {
        if (elapsed <= e.delta_t_max) out.push_back(e.defense_id);
    }
    return out;
}

void dump_table(std::ostream& out, const OffenseDefenseTable& table, const ActionMachine& machine) {
    out << "# attack defense defense_id dt_min dt_max dt_mode count success_rate\n";
    for (const auto& [kind, entries] : table.all()) {
        for (const auto& e : entries) {
            const Action* d = machine.find(e.defense_id);
            out << to_string(kind) << ' ' << (d ? d->name : std::string("?")) << ' ' << e.defense_id
                << ' ' << e.delta_t_min << ' ' << e.delta_t_max << ' ' << e.delta_t_mode << ' '
                << e.count << ' ' << text::format_double(e.success_rate) << '\n';
        }
    }
}

namespace {

struct Preference {
    std::string_view defense;
    double weight;
};

// Which defenses sparring partners reach for against each attack kind.
std::vector<Preference> preferences(AttackKind kind) {
    switch (kind) {
        case AttackKind::Jab: return {{"head-slip", 0.5}, {"parry", 0.4}, {"block", 0.1}};
        case AttackKind::Straight: return {{"parry", 0.45}, {"head-slip", 0.35}, {"block", 0.2}};
        case AttackKind::Hook: return {{"duck", 0.55}, {"block", 0.35}, {"sway-back", 0.1}};
        case AttackKind::Uppercut: return {{"sway-back", 0.7}, {"block", 0.2}, {"duck", 0.1}};
        case AttackKind::Kick: return {{"block", 0.7}, {"sway-back", 0.3}};
    }
    return {};
}

}  // namespace

std::vector<SparringRecord> generate_sparring_log(const ActionMachine& machine, std::uint64_t seed,
                                                  std::size_t records) {
    Rng rng(seed);
    std::vector<const Action*> attacks, fillers;
    for (const auto& a : machine.actions()) {
        if (a.category == Category::Offense) attacks.push_back(&a);
        if (a.category == Category::Transition) fillers.push_back(&a);
    }
    std::vector<SparringRecord> log;
    if (attacks.empty() || records == 0) return log;

    int t = 0;
    while (log.size() < records) {
        const Side attacker = rng.chance(0.5) ? Side::A : Side::B;
        const Action& atk = *attacks[static_cast<std::size_t>(rng.range(0, static_cast<long long>(attacks.size()) - 1))];
        SparringRecord rec{t, attacker, atk.id, LogOutcome::Hit};

        std::optional<SparringRecord> def_rec;
        if (rng.chance(0.75)) {
            auto prefs = preferences(atk.offense->kind);
            double total = 0.0;
            for (const auto& p : prefs) total += machine.find_by_name(p.defense) ? p.weight : 0.0;
            double pick = rng.uniform() * total;
            const Action* def = nullptr;
            for (const auto& p : prefs) {
                auto id = machine.find_by_name(p.defense);
                if (!id) continue;
                def = &machine.action(*id);
                if (pick < p.weight) break;
                pick -= p.weight;
            }
            if (def && def->defense) {
                const auto& act = atk.offense->active;
                const auto& g = def->defense->guard;
                const int centre = static_cast<int>(std::lround(
                    0.5 * (act.begin + act.end) - 0.5 * (g.begin + g.end)));
                const int dt = std::max(0, centre + static_cast<int>(rng.range(-2, 2)));
                def_rec = SparringRecord{t + dt, other(attacker), def->id, std::nullopt};
                const double r = rng.uniform();
                rec.outcome = r < 0.8 ? LogOutcome::Dodged : (r < 0.9 ? LogOutcome::Miss : LogOutcome::Hit);
            }
        } else {
            rec.outcome = rng.chance(0.55) ? LogOutcome::Hit : LogOutcome::Miss;
        }
        log.push_back(rec);
        if (def_rec) log.push_back(*def_rec);
        if (!fillers.empty() && rng.chance(0.5)) {
            const Action& f = *fillers[static_cast<std::size_t>(rng.range(0, static_cast<long long>(fillers.size()) - 1))];
            log.push_back({t + atk.duration + 1, rng.chance(0.5) ? Side::A : Side::B, f.id, std::nullopt});
        }
        t += atk.duration + static_cast<int>(rng.range(6, 24));
    }
    std::stable_sort(log.begin(), log.end(), [](const auto& x, const auto& y) {
        return std::tuple(x.frame, index(x.fighter), x.action) <
               std::tuple(y.frame, index(y.fighter), y.action);
    });
    log.resize(records);
    return log;
}

}  // namespace fightgen
