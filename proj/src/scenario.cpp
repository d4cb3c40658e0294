#include "fightgen/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "fightgen/errors.hpp"
#include "fightgen/rng.hpp"
#include "fightgen/text.hpp"

namespace fightgen {

std::filesystem::path ScenarioConfig::resolve(const std::string& p) const {
    std::filesystem::path path(p);
    if (path.is_absolute() || base_dir.empty()) return path;
    return base_dir / path;
}

int ScenarioConfig::duration_frames() const {
    return static_cast<int>(std::lround(duration_s * kFramesPerSecond));
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
    return name == o.name && duration_s == o.duration_s && seed == o.seed &&
           knockdown_limit == o.knockdown_limit && start_distance == o.start_distance &&
           start_jitter == o.start_jitter && clips == o.clips && actions == o.actions && log == o.log &&
           log_records == o.log_records && transition_threshold == o.transition_threshold &&
           output_dir == o.output_dir && planner == o.planner && fighters == o.fighters;
}

namespace {

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const ScenarioConfig&)> get;
    // Returns an error message, empty on success.
    std::function<std::string(ScenarioConfig&, std::string_view)> set;
};

template <class T, class Get>
Field number_field(std::string section, std::string key, Get get) {
    Field f;
    f.section = std::move(section);
    f.key = std::move(key);
    f.get = [get](const ScenarioConfig& c) {
        const T& v = get(const_cast<ScenarioConfig&>(c));
        if constexpr (std::is_floating_point_v<T>) return text::format_double(v);
        else return std::to_string(v);
    };
    f.set = [get](ScenarioConfig& c, std::string_view s) -> std::string {
        if constexpr (std::is_floating_point_v<T>) {
            auto v = text::parse_double(s);
            if (!v || !std::isfinite(*v)) return "expected a number";
            get(c) = *v;
        } else {
            auto v = text::parse_int(s);
            if (!v) return "expected an integer";
            if constexpr (std::is_unsigned_v<T>) {
                if (*v < 0) return "expected a non-negative integer";
            }
            get(c) = static_cast<T>(*v);
        }
        return {};
    };
    return f;
}

template <class Get>
Field string_field(std::string section, std::string key, Get get) {
    Field f;
    f.section = std::move(section);
    f.key = std::move(key);
    f.get = [get](const ScenarioConfig& c) { return get(const_cast<ScenarioConfig&>(c)); };
    f.set = [get](ScenarioConfig& c, std::string_view s) -> std::string {
        if (s.empty()) return "expected a value";
        if (s.find_first_of(" \t") != std::string_view::npos) return "value must not contain spaces";
        get(c) = std::string(s);
        return {};
    };
    return f;
}

void add_fighter_fields(std::vector<Field>& out, Side side) {
    const std::string sec = "fighter_" + std::string(to_string(side));
    const auto i = index(side);
    out.push_back(number_field<double>(sec, "w_l", [i](ScenarioConfig& c) -> double& { return c.fighters[i].w_l; }));
    out.push_back(number_field<double>(sec, "w_f", [i](ScenarioConfig& c) -> double& { return c.fighters[i].w_f; }));
    out.push_back(number_field<double>(sec, "w_c", [i](ScenarioConfig& c) -> double& { return c.fighters[i].w_c; }));
    out.push_back(number_field<double>(sec, "t_f", [i](ScenarioConfig& c) -> double& { return c.fighters[i].t_f; }));
    out.push_back(number_field<double>(sec, "preferred_distance",
                                       [i](ScenarioConfig& c) -> double& { return c.fighters[i].preferred_distance; }));
    out.push_back(number_field<int>(sec, "approach_polarity",
                                    [i](ScenarioConfig& c) -> int& { return c.fighters[i].approach_polarity; }));
    out.push_back(number_field<int>(sec, "facing_polarity",
                                    [i](ScenarioConfig& c) -> int& { return c.fighters[i].facing_polarity; }));
    out.push_back(number_field<double>(sec, "interaction_bias",
                                       [i](ScenarioConfig& c) -> double& { return c.fighters[i].interaction_bias; }));
    out.push_back(number_field<int>(sec, "repeat_window",
                                    [i](ScenarioConfig& c) -> int& { return c.fighters[i].repeat_window; }));
    out.push_back(number_field<double>(sec, "repeat_penalty",
                                       [i](ScenarioConfig& c) -> double& { return c.fighters[i].repeat_penalty; }));
}

const std::vector<Field>& fields() {
    static const std::vector<Field> all = [] {
        std::vector<Field> f;
        const std::string s = "scenario";
        f.push_back(string_field(s, "name", [](ScenarioConfig& c) -> std::string& { return c.name; }));
        f.push_back(number_field<double>(s, "duration_s", [](ScenarioConfig& c) -> double& { return c.duration_s; }));
        f.push_back(number_field<std::uint64_t>(s, "seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.seed; }));
        f.push_back(number_field<int>(s, "knockdown_limit", [](ScenarioConfig& c) -> int& { return c.knockdown_limit; }));
        f.push_back(number_field<double>(s, "start_distance", [](ScenarioConfig& c) -> double& { return c.start_distance; }));
        f.push_back(number_field<double>(s, "start_jitter", [](ScenarioConfig& c) -> double& { return c.start_jitter; }));
        f.push_back(string_field(s, "clips", [](ScenarioConfig& c) -> std::string& { return c.clips; }));
        f.push_back(string_field(s, "actions", [](ScenarioConfig& c) -> std::string& { return c.actions; }));
        f.push_back(string_field(s, "log", [](ScenarioConfig& c) -> std::string& { return c.log; }));
        f.push_back(number_field<int>(s, "log_records", [](ScenarioConfig& c) -> int& { return c.log_records; }));
        f.push_back(number_field<double>(s, "transition_threshold",
                                         [](ScenarioConfig& c) -> double& { return c.transition_threshold; }));
        f.push_back(string_field(s, "output_dir", [](ScenarioConfig& c) -> std::string& { return c.output_dir; }));
        const std::string p = "planner";
        f.push_back(number_field<double>(p, "penetration", [](ScenarioConfig& c) -> double& { return c.planner.penetration; }));
        f.push_back(number_field<double>(p, "facing_limit_deg",
                                         [](ScenarioConfig& c) -> double& { return c.planner.facing_limit_deg; }));
        f.push_back(number_field<int>(p, "branching_cap", [](ScenarioConfig& c) -> int& { return c.planner.branching_cap; }));
        add_fighter_fields(f, Side::A);
        add_fighter_fields(f, Side::B);
        return f;
    }();
    return all;
}

// Range checks once every field is known, reported at the field's line.
void check_config(const ScenarioConfig& c, const std::map<std::string, int>& lines) {
    auto line_of = [&](const std::string& sec, const std::string& key) {
        auto it = lines.find(sec + "." + key);
        return it == lines.end() ? 0 : it->second;
    };
    auto require = [&](bool ok, const std::string& sec, const std::string& key, const std::string& what) {
        if (!ok) throw ConfigError(sec + "." + key, line_of(sec, key), what);
    };
    require(c.duration_s >= 0.0, "scenario", "duration_s", "must be >= 0");
    require(c.knockdown_limit >= 1, "scenario", "knockdown_limit", "must be >= 1");
    require(c.start_distance > 0.0, "scenario", "start_distance", "must be > 0");
    require(c.start_jitter >= 0.0 && c.start_jitter < c.start_distance, "scenario", "start_jitter",
            "must be in [0, start_distance)");
    require(c.log_records >= 0, "scenario", "log_records", "must be >= 0");
    require(c.transition_threshold >= 0.0, "scenario", "transition_threshold", "must be >= 0");
    require(c.planner.penetration >= 0.0, "planner", "penetration", "must be >= 0");
    require(c.planner.facing_limit_deg > 0.0 && c.planner.facing_limit_deg <= 180.0, "planner",
            "facing_limit_deg", "must be in (0, 180]");
    require(c.planner.branching_cap >= 1, "planner", "branching_cap", "must be >= 1");
    for (Side s : kSides) {
        const std::string sec = "fighter_" + std::string(to_string(s));
        const FighterParams& p = c.fighters[index(s)];
        require(p.w_l >= 0.0, sec, "w_l", "must be >= 0");
        require(p.w_f >= 0.0, sec, "w_f", "must be >= 0");
        require(p.w_c >= 0.0, sec, "w_c", "must be >= 0");
        require(p.t_f > 0.0, sec, "t_f", "must be > 0");
        require(p.preferred_distance > 0.0, sec, "preferred_distance", "must be > 0");
        require(p.approach_polarity == 1 || p.approach_polarity == -1, sec, "approach_polarity", "must be 1 or -1");
        require(p.facing_polarity == 1 || p.facing_polarity == -1, sec, "facing_polarity", "must be 1 or -1");
        require(p.repeat_window >= 1 && p.repeat_window <= kMaxRepeatWindow, sec, "repeat_window",
                "must be in [1, " + std::to_string(kMaxRepeatWindow) + "]");
        require(p.repeat_penalty >= 0.0, sec, "repeat_penalty", "must be >= 0");
    }
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
    ScenarioConfig cfg;
    cfg.base_dir = base_dir;
    std::map<std::string, int> seen;  // "section.key" -> line
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError("[section]", line_no, "unterminated section header");
            section = std::string(text::trim(body.substr(1, body.size() - 2)));
            if (section != "scenario" && section != "planner" && section != "fighter_A" && section != "fighter_B") {
                throw ConfigError(section, line_no, "unknown section");
            }
            continue;
        }
        auto kv = text::split_kv(body);
        if (!kv) throw ConfigError(std::string(body), line_no, "expected 'key = value'");
        const std::string key(text::trim(kv->first));
        const std::string_view value = text::trim(kv->second);
        if (section.empty()) throw ConfigError(key, line_no, "field outside of any section");
        const std::string full = section + "." + key;
        const Field* field = nullptr;
        for (const auto& f : fields()) {
            if (f.section == section && f.key == key) field = &f;
        }
        if (!field) throw ConfigError(full, line_no, "unknown field");
        if (seen.contains(full)) {
            throw ConfigError(full, line_no, "duplicate field (first set on line " + std::to_string(seen[full]) + ")");
        }
        seen[full] = line_no;
        if (auto err = field->set(cfg, value); !err.empty()) {
            throw ConfigError(full, line_no, err + ", got '" + std::string(value) + "'");
        }
    }
    check_config(cfg, seen);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file " + path.string());
    return parse_scenario(in, path.parent_path());
}

void write_scenario(std::ostream& out, const ScenarioConfig& cfg) {
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(cfg) << '\n';
    }
}

std::unique_ptr<FightData> load_motion_data(const std::filesystem::path& clips,
                                            const std::filesystem::path& actions, double threshold) {
    auto data = std::make_unique<FightData>();
    data->clips = load_clips(clips.string());
    const FrameGraph full = build_frame_graph(data->clips.clips, threshold);
    data->graph = std::make_shared<const FrameGraph>(largest_scc(full));
    const auto annotations = load_annotations(actions.string());
    std::vector<Action> acts = load_actions(annotations, *data->graph);
    std::map<ActionId, FrameRef> starts;
    for (const auto& a : acts) starts.emplace(a.id, a.start_node());
    const PathTable paths = shortest_paths_to_action_starts(*data->graph, starts);
    data->machine = build_action_machine(std::move(acts), paths);
    return data;
}

std::unique_ptr<FightData> load_fight_data(const ScenarioConfig& cfg) {
    auto data = load_motion_data(cfg.resolve(cfg.clips), cfg.resolve(cfg.actions), cfg.transition_threshold);
    if (cfg.log == kSyntheticLog) {
        data->log = generate_sparring_log(data->machine, cfg.seed, static_cast<std::size_t>(cfg.log_records));
    } else {
        data->log = load_log(cfg.resolve(cfg.log).string());
    }
    data->table = build_table(data->log, data->machine);
    return data;
}

std::array<Pose, 2> start_poses(const ScenarioConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    const double d = cfg.start_distance + rng.uniform(-cfg.start_jitter, cfg.start_jitter);
    const double lateral = rng.uniform(-cfg.start_jitter, cfg.start_jitter);
    const double yaw_a = rng.uniform(-0.1, 0.1);
    const double yaw_b = rng.uniform(-0.1, 0.1);
    return {Pose{{-0.5 * d, 0.0}, wrap_angle(yaw_a)},
            Pose{{0.5 * d, lateral}, wrap_angle(std::numbers::pi + yaw_b)}};
}

ArenaSetup make_setup(const ScenarioConfig& cfg, const FightData& data, std::uint64_t seed) {
    ArenaSetup s;
    s.machine = &data.machine;
    s.table = &data.table;
    s.params = cfg.fighters;
    s.config = cfg.planner;
    s.duration_frames = cfg.duration_frames();
    s.knockdown_limit = cfg.knockdown_limit;
    s.start = start_poses(cfg, seed);
    return s;
}

FightResult run_scenario(const ScenarioConfig& cfg, const FightData& data, std::uint64_t seed,
                         std::ostream* tree_dump) {
    const ArenaSetup setup = make_setup(cfg, data, seed);
    if (!tree_dump) return run_arena(setup);
    auto dump = [&](const PlanningWorld& w, const GameTree& tree, const PlanResult& r) {
        *tree_dump << "# plan frame=" << w.time << " fighter=" << to_string(w.mover)
                   << " chosen=" << data.machine.action(r.chosen_action).name
                   << " value=" << text::format_double(r.root_value) << '\n';
        dump_tree(*tree_dump, tree, &data.machine);
    };
    return run_arena(setup, {}, dump);
}

void write_timing(std::ostream& out, const PlanTiming& t) {
    out << "plan_calls=" << t.calls << '\n';
    out << "nodes_expanded=" << t.nodes_expanded << '\n';
    out << "nodes_pruned_ab=" << t.pruned_ab << '\n';
    out << "nodes_pruned_heuristic=" << t.pruned_heuristic << '\n';
    out << "plan_ms_mean=" << text::format_double(t.calls ? t.total_ms / t.calls : 0.0) << '\n';
    out << "plan_ms_max=" << text::format_double(t.max_ms) << '\n';
}

void write_run(const std::filesystem::path& dir, const FightResult& result, const ActionMachine& machine) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw InputError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("trace.txt");
        write_trace(f, result.trace, machine);
    }
    {
        auto f = open("stats.txt");
        write_stats(f, result.stats);
    }
    auto f = open("timing.txt");
    write_timing(f, result.timing);
}

void write_batch_row(std::ostream& out, const BatchRow& row) {
    const auto& s = row.stats;
    const int chosen = s.actions_chosen[0] + s.actions_chosen[1];
    const int defenses = s.defenses_chosen(Side::A) + s.defenses_chosen(Side::B);
    out << "seed=" << row.seed << " frames=" << s.frames << " hits_landed_A=" << s.hits_landed[0]
        << " hits_landed_B=" << s.hits_landed[1] << " knockdowns_A=" << s.knockdowns[0]
        << " knockdowns_B=" << s.knockdowns[1] << " defense_A=" << s.defenses_chosen(Side::A)
        << " defense_B=" << s.defenses_chosen(Side::B) << " actions_chosen=" << chosen
        << " defense_fraction=" << text::format_double(chosen ? static_cast<double>(defenses) / chosen : 0.0)
        << " separation_mean=" << text::format_double(s.mean_separation()) << '\n';
}

BatchTotals totals(std::span<const BatchRow> rows) {
    BatchTotals t;
    double sep = 0.0;
    for (const auto& r : rows) {
        ++t.runs;
        for (Side s : kSides) {
            t.hits[index(s)] += r.stats.hits_landed[index(s)];
            t.defenses += r.stats.defenses_chosen(s);
            t.chosen += r.stats.actions_chosen[index(s)];
        }
        sep += r.stats.mean_separation();
    }
    t.separation_mean = t.runs ? sep / t.runs : 0.0;
    return t;
}

void write_aggregate(std::ostream& out, std::span<const BatchRow> rows) {
    const BatchTotals t = totals(rows);
    auto num = [](double v) { return text::format_double(v); };
    auto mean = [&](long long v) { return num(t.runs ? static_cast<double>(v) / t.runs : 0.0); };
    long long frames = 0;
    std::array<long long, 2> knockdowns{}, defenses{};
    for (const auto& r : rows) {
        frames += r.stats.frames;
        for (Side s : kSides) {
            knockdowns[index(s)] += r.stats.knockdowns[index(s)];
            defenses[index(s)] += r.stats.defenses_chosen(s);
        }
    }
    out << "runs=" << t.runs << '\n';
    out << "frames=" << frames << '\n';
    for (Side s : kSides) {
        const auto n = to_string(s);
        out << "hits_landed_" << n << '=' << t.hits[index(s)] << '\n';
        out << "mean_hits_landed_" << n << '=' << mean(t.hits[index(s)]) << '\n';
        out << "knockdowns_" << n << '=' << knockdowns[index(s)] << '\n';
        out << "defense_" << n << '=' << defenses[index(s)] << '\n';
    }
    out << "hits_total=" << t.total_hits() << '\n';
    out << "actions_chosen=" << t.chosen << '\n';
    out << "defense_fraction=" << num(t.defense_fraction()) << '\n';
    out << "separation_mean=" << num(t.separation_mean) << '\n';
}

std::vector<std::uint64_t> parse_seeds(std::string_view s) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto tok = text::trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos));
        if (tok.empty()) throw InputError("empty entry in seed list '" + std::string(s) + "'");
        const auto dash = tok.find('-', 1);
        auto parse = [&](std::string_view t) {
            auto v = text::parse_int(t);
            if (!v || *v < 0) throw InputError("bad seed '" + std::string(t) + "'");
            return static_cast<std::uint64_t>(*v);
        };
        if (dash != std::string_view::npos) {
            const auto lo = parse(tok.substr(0, dash));
            const auto hi = parse(tok.substr(dash + 1));
            if (hi < lo) throw InputError("bad seed range '" + std::string(tok) + "'");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(parse(tok));
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace fightgen
