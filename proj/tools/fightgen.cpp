// fightgen: run, batch, plot and inspect fight scenarios.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fightgen/errors.hpp"
#include "fightgen/plot.hpp"
#include "fightgen/scenario.hpp"
#include "fightgen/text.hpp"

namespace fs = std::filesystem;
using namespace fightgen;

namespace {

void print_summary(std::ostream& out, const FightStats& s, const PlanTiming& t) {
    out << "frames " << s.frames << "  hits A " << s.hits_landed[0] << "  hits B " << s.hits_landed[1]
        << "  knockdowns A " << s.knockdowns[0] << "  knockdowns B " << s.knockdowns[1] << '\n';
    out << "defenses A " << s.defenses_chosen(Side::A) << "/" << s.actions_chosen[0] << "  defenses B "
        << s.defenses_chosen(Side::B) << "/" << s.actions_chosen[1] << '\n';
    out << "separation mean " << text::format_double(s.mean_separation()) << "  p10 "
        << text::format_double(s.separation_percentile(0.1)) << "  p90 "
        << text::format_double(s.separation_percentile(0.9)) << '\n';
    if (t.calls) {
        out << "plan calls " << t.calls << "  mean " << text::format_double(t.total_ms / t.calls) << " ms  max "
            << text::format_double(t.max_ms) << " ms\n";
    }
}

fs::path output_dir(const ScenarioConfig& cfg, const std::string& override_dir) {
    return override_dir.empty() ? cfg.resolve(cfg.output_dir) : fs::path(override_dir);
}

int cmd_run(const std::string& scenario, bool tree_dump, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
    const ScenarioConfig cfg = load_scenario(scenario);
    const auto data = load_fight_data(cfg);
    const fs::path dir = output_dir(cfg, out_dir);
    fs::create_directories(dir);
    std::ofstream dump;
    if (tree_dump) {
        dump.open(dir / "tree_dump.txt");
        if (!dump) throw InputError("cannot write " + (dir / "tree_dump.txt").string());
    }
    const FightResult r = run_scenario(cfg, *data, seed.value_or(cfg.seed), tree_dump ? &dump : nullptr);
    write_run(dir, r, data->machine);
    print_summary(std::cout, r.stats, r.timing);
    std::cout << "wrote " << (dir / "trace.txt").string() << " and " << (dir / "stats.txt").string() << '\n';
    return 0;
}

int cmd_batch(const std::string& scenario, const std::string& seeds_arg, const std::string& out_dir) {
    const ScenarioConfig cfg = load_scenario(scenario);
    const auto seeds = parse_seeds(seeds_arg);
    if (seeds.empty()) throw InputError("no seeds given");
    const fs::path dir = output_dir(cfg, out_dir);
    fs::create_directories(dir);
    std::vector<BatchRow> rows;
    std::ofstream table(dir / "batch.txt");
    if (!table) throw InputError("cannot write " + (dir / "batch.txt").string());
    for (auto seed : seeds) {
        try {
            ScenarioConfig c = cfg;
            c.seed = seed;
            const auto data = load_fight_data(c);
            const FightResult r = run_scenario(c, *data, seed);
            write_run(dir / ("seed_" + std::to_string(seed)), r, data->machine);
            rows.push_back({seed, r.stats});
            write_batch_row(table, rows.back());
            write_batch_row(std::cout, rows.back());
        } catch (const std::exception& e) {
            throw InputError("seed " + std::to_string(seed) + " failed: " + e.what());
        }
    }
    std::ofstream agg(dir / "aggregate.txt");
    if (!agg) throw InputError("cannot write " + (dir / "aggregate.txt").string());
    write_aggregate(agg, rows);
    write_aggregate(std::cout, rows);
    return 0;
}

int cmd_plot(const std::string& trace_path, const std::string& out) {
    const FightTrace trace = load_trace(trace_path);
    fs::path target = out.empty() ? fs::path(trace_path).replace_extension(".svg") : fs::path(out);
    std::ofstream f(target);
    if (!f) throw InputError("cannot write " + target.string());
    write_svg(f, trace);
    std::size_t hits = 0;
    for (const auto& e : trace) hits += e.kind == EventKind::Hit;
    std::cout << "wrote " << target.string() << " (" << trace.size() << " events, " << hits << " hits)\n";
    return 0;
}

int cmd_table(const std::string& log_path, const std::string& clips, const std::string& actions, double threshold) {
    const auto data = load_motion_data(clips, actions, threshold);
    const auto log = load_log(log_path);
    const auto table = build_table(log, data->machine);
    dump_table(std::cout, table, data->machine);
    return 0;
}

int cmd_validate(const std::string& scenario) {
    const ScenarioConfig cfg = load_scenario(scenario);
    const auto data = load_fight_data(cfg);
    std::cout << "scenario " << cfg.name << ": ok\n"
              << "  frames in graph " << data->graph->size() << ", actions " << data->machine.actions().size()
              << ", log records " << data->log.size() << ", table entries " << data->table.size() << '\n'
              << "  t_f A " << text::format_double(cfg.fighters[0].t_f) << " s, t_f B "
              << text::format_double(cfg.fighters[1].t_f) << " s, duration "
              << text::format_double(cfg.duration_s) << " s\n";
    return 0;
}

int cmd_genlog(const std::string& clips, const std::string& actions, double threshold, std::uint64_t seed,
               std::size_t records, const std::string& out) {
    const auto data = load_motion_data(clips, actions, threshold);
    const auto log = generate_sparring_log(data->machine, seed, records);
    std::ofstream f(out);
    if (!f) throw InputError("cannot write " + out);
    f << "# synthetic sparring log, seed " << seed << ", " << records << " records\n";
    write_log(f, log);
    std::cout << "wrote " << out << " (" << log.size() << " records)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-fighter temporal game-tree planner and fight simulator"};
    app.require_subcommand(1);

    std::string scenario, trace_path, log_path, seeds, out, out_dir;
    std::string clips = "data/clips.txt", actions = "data/actions.txt";
    double threshold = 0.1;
    bool tree_dump = false;
    std::optional<std::uint64_t> seed;
    std::uint64_t gen_seed = 1;
    std::size_t records = 200;

    auto* run = app.add_subcommand("run", "Run one bout and write trace and stats");
    run->add_option("scenario", scenario, "Scenario file")->required();
    run->add_flag("--tree-dump", tree_dump, "Write every planning tree to tree_dump.txt");
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_dir, "Output directory (default: the scenario's output_dir)");

    auto* batch = app.add_subcommand("batch", "Run one bout per seed and aggregate");
    batch->add_option("scenario", scenario, "Scenario file")->required();
    batch->add_option("--seeds", seeds, "Seeds, e.g. 1,2,3 or 1-20")->required();
    batch->add_option("--out", out_dir, "Output directory (default: the scenario's output_dir)");

    auto* plot = app.add_subcommand("plot", "Render a trace as SVG");
    plot->add_option("trace", trace_path, "Trace file")->required();
    plot->add_option("-o,--output", out, "SVG file (default: trace path with .svg)");

    auto* table = app.add_subcommand("table", "Build and print the offense/defense table of a sparring log");
    table->add_option("log", log_path, "Sparring log")->required();

    auto* validate = app.add_subcommand("validate", "Check a scenario and the data it references");
    validate->add_option("scenario", scenario, "Scenario file")->required();

    auto* genlog = app.add_subcommand("genlog", "Generate a synthetic sparring log");
    genlog->add_option("--seed", gen_seed, "Generator seed");
    genlog->add_option("--records", records, "Number of records");
    genlog->add_option("-o,--output", out, "Log file")->required();

    for (auto* sub : {table, genlog}) {
        sub->add_option("--clips", clips, "Clip file");
        sub->add_option("--actions", actions, "Action annotation file");
        sub->add_option("--threshold", threshold, "Transition threshold");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(scenario, tree_dump, seed, out_dir);
        if (*batch) return cmd_batch(scenario, seeds, out_dir);
        if (*plot) return cmd_plot(trace_path, out);
        if (*table) return cmd_table(log_path, clips, actions, threshold);
        if (*validate) return cmd_validate(scenario);
        if (*genlog) return cmd_genlog(clips, actions, threshold, gen_seed, records, out);
    } catch (const std::exception& e) {
        std::cerr << "fightgen: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
