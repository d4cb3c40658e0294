// Python access to scenarios, bouts, batches and the offense/defense table.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fightgen/errors.hpp"
#include "fightgen/plot.hpp"
#include "fightgen/scenario.hpp"

namespace py = pybind11;
using namespace fightgen;

namespace {

py::dict stats_dict(const FightStats& s) {
    py::dict d;
    d["frames"] = s.frames;
    d["hits_landed"] = s.hits_landed;
    d["knockdowns"] = s.knockdowns;
    d["actions_chosen"] = s.actions_chosen;
    d["defenses_chosen"] = std::array<int, 2>{s.defenses_chosen(Side::A), s.defenses_chosen(Side::B)};
    d["attacks_missed"] = s.attacks_missed;
    d["separation_mean"] = s.mean_separation();
    return d;
}

py::dict timing_dict(const PlanTiming& t) {
    py::dict d;
    d["calls"] = t.calls;
    d["nodes_expanded"] = t.nodes_expanded;
    d["pruned_ab"] = t.pruned_ab;
    d["pruned_heuristic"] = t.pruned_heuristic;
    d["total_ms"] = t.total_ms;
    d["max_ms"] = t.max_ms;
    return d;
}

py::list events_list(const FightTrace& trace, const ActionMachine& m) {
    py::list out;
    for (const auto& e : trace) {
        py::dict d;
        d["frame"] = e.frame;
        d["fighter"] = std::string(to_string(e.fighter));
        d["event"] = std::string(to_string(e.kind));
        d["action"] = m.action(e.action).name;
        d["x"] = e.pose.pos.x;
        d["y"] = e.pose.pos.y;
        if (e.outcome) d["outcome"] = std::string(to_string(*e.outcome));
        out.append(d);
    }
    return out;
}

py::dict run(const std::filesystem::path& scenario, std::optional<std::uint64_t> seed,
             std::optional<double> duration_s) {
    ScenarioConfig cfg = load_scenario(scenario);
    if (duration_s) cfg.duration_s = *duration_s;
    const auto data = load_fight_data(cfg);
    FightResult r;
    {
        py::gil_scoped_release release;
        r = run_scenario(cfg, *data, seed.value_or(cfg.seed));
    }
    std::ostringstream text;
    write_trace(text, r.trace, data->machine);
    py::dict d;
    d["stats"] = stats_dict(r.stats);
    d["timing"] = timing_dict(r.timing);
    d["events"] = events_list(r.trace, data->machine);
    d["trace"] = text.str();
    return d;
}

py::dict batch(const std::filesystem::path& scenario, const std::string& seeds, std::optional<double> duration_s) {
    ScenarioConfig cfg = load_scenario(scenario);
    if (duration_s) cfg.duration_s = *duration_s;
    const auto data = load_fight_data(cfg);
    std::vector<BatchRow> rows;
    {
        py::gil_scoped_release release;
        for (auto s : parse_seeds(seeds)) rows.push_back({s, run_scenario(cfg, *data, s).stats});
    }
    const BatchTotals t = totals(rows);
    py::list per_run;
    for (const auto& row : rows) {
        py::dict d = stats_dict(row.stats);
        d["seed"] = row.seed;
        per_run.append(d);
    }
    py::dict d;
    d["runs"] = per_run;
    d["hits"] = t.hits;
    d["defense_fraction"] = t.defense_fraction();
    d["separation_mean"] = t.separation_mean;
    return d;
}

py::dict table(const std::filesystem::path& scenario) {
    const auto data = load_fight_data(load_scenario(scenario));
    py::dict out;
    for (const auto& [kind, entries] : data->table.all()) {
        py::list list;
        for (const auto& e : entries) {
            py::dict d;
            d["defense"] = data->machine.action(e.defense_id).name;
            d["delta_t_min"] = e.delta_t_min;
            d["delta_t_max"] = e.delta_t_max;
            d["delta_t_mode"] = e.delta_t_mode;
            d["count"] = e.count;
            d["success_rate"] = e.success_rate;
            list.append(d);
        }
        out[py::str(std::string(to_string(kind)))] = list;
    }
    return out;
}

py::dict scenario_dict(const std::filesystem::path& path) {
    const ScenarioConfig cfg = load_scenario(path);
    py::dict d;
    d["name"] = cfg.name;
    d["duration_s"] = cfg.duration_s;
    d["seed"] = cfg.seed;
    d["start_distance"] = cfg.start_distance;
    py::list fighters;
    for (const auto& p : cfg.fighters) {
        py::dict f;
        f["w_l"] = p.w_l;
        f["w_f"] = p.w_f;
        f["w_c"] = p.w_c;
        f["t_f"] = p.t_f;
        f["preferred_distance"] = p.preferred_distance;
        f["approach_polarity"] = p.approach_polarity;
        f["facing_polarity"] = p.facing_polarity;
        fighters.append(f);
    }
    d["fighters"] = fighters;
    return d;
}

std::string svg(const std::string& trace_text) {
    std::istringstream in(trace_text);
    const FightTrace trace = parse_trace(in);
    std::ostringstream out;
    write_svg(out, trace);
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-fighter game-tree planner and fight simulator";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);

    m.def("load_scenario", &scenario_dict, py::arg("path"), "Parsed scenario fields");
    m.def("run", &run, py::arg("scenario"), py::arg("seed") = py::none(), py::arg("duration_s") = py::none(),
          "Run one bout; returns stats, timing, events and the trace text");
    m.def("batch", &batch, py::arg("scenario"), py::arg("seeds"), py::arg("duration_s") = py::none(),
          "Run one bout per seed and aggregate");
    m.def("table", &table, py::arg("scenario"), "Offense/defense table of the scenario's sparring log");
    m.def("svg", &svg, py::arg("trace"), "Render trace text as SVG");
    m.def("parse_seeds", &parse_seeds, py::arg("seeds"));
}
