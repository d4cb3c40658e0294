#pragma once

// Helpers shared by the unit tests: the shipped fixture data and small
// in-memory rosters built through the same loaders as real data.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fightgen/errors.hpp"
#include "fightgen/scenario.hpp"

namespace support {

using namespace fightgen;
namespace fs = std::filesystem;

inline fs::path data_dir() { return FIGHTGEN_DATA_DIR; }

inline fs::path preset_path(const std::string& name) { return data_dir() / "scenarios" / (name + ".ini"); }

/// Shipped clips, actions and sparring log.
inline const FightData& fixture() {
    static const std::unique_ptr<FightData> data = [] {
        auto cfg = load_scenario(preset_path("tf_1_vs_1"));
        return load_fight_data(cfg);
    }();
    return *data;
}

inline ActionId id_of(const ActionMachine& m, std::string_view name) {
    auto id = m.find_by_name(name);
    if (!id) throw InputError("test roster lacks " + std::string(name));
    return *id;
}

struct RosterEntry {
    std::string name;
    Category category = Category::Transition;
    int duration = 30;
    double forward = 0.0;  // net displacement along the entry heading
    std::optional<OffenseProfile> offense;
    std::optional<DefenseProfile> defense;
};

/// One clip per entry. First and last frames share a neutral descriptor so
/// every action can follow every other; body frames are far apart.
inline ClipLibrary roster_clips(const std::vector<RosterEntry>& roster) {
    ClipLibrary lib;
    lib.descriptor_dim = static_cast<int>(roster.size());
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const RosterEntry& r = roster[i];
        MotionClip clip;
        clip.clip_id = static_cast<int>(i) + 1;
        clip.name = r.name;
        for (int k = 0; k <= r.duration; ++k) {
            FramePose p;
            const bool edge = k == 0 || k == r.duration;
            p.root_delta = {k < r.duration ? r.forward / r.duration : 0.0, 0.0};
            p.descriptor.assign(roster.size(), 0.0);
            if (!edge) p.descriptor[i] = 1.0;
            clip.frames.push_back(std::move(p));
        }
        lib.clips.push_back(std::move(clip));
    }
    return lib;
}

/// Builds motion data and an offense/defense table from `log` for a roster.
/// Action ids follow roster order starting at 1.
inline std::unique_ptr<FightData> build_roster(const std::vector<RosterEntry>& roster,
                                               std::vector<SparringRecord> log = {}) {
    auto data = std::make_unique<FightData>();
    data->clips = roster_clips(roster);
    data->graph = std::make_shared<const FrameGraph>(largest_scc(build_frame_graph(data->clips.clips, 0.1)));
    std::vector<ActionAnnotation> ann;
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const RosterEntry& r = roster[i];
        ActionAnnotation a;
        a.id = static_cast<ActionId>(i) + 1;
        a.name = r.name;
        a.category = r.category;
        a.start = {a.id, 0};
        a.end = {a.id, r.duration};
        a.duration = r.duration;
        a.offense = r.offense;
        a.defense = r.defense;
        a.line = static_cast<int>(i) + 1;
        ann.push_back(a);
    }
    std::vector<Action> acts = load_actions(ann, *data->graph);
    std::map<ActionId, FrameRef> starts;
    for (const auto& a : acts) starts.emplace(a.id, a.start_node());
    const PathTable paths = shortest_paths_to_action_starts(*data->graph, starts);
    data->machine = build_action_machine(std::move(acts), paths);
    data->log = std::move(log);
    data->table = build_table(data->log, data->machine);
    return data;
}

inline std::vector<RosterEntry> reactions() {
    return {{"flinch", Category::Reaction, 10, -0.05},
            {"stagger", Category::Reaction, 20, -0.2},
            {"knockdown", Category::Reaction, 40, -0.3}};
}

/// Motion of `next` launched after `previous` at `frame`.
inline Motion motion(const ActionMachine& m, ActionId previous, ActionId next, int frame, Pose at) {
    return launch_motion(m, previous, next, frame, at);
}

/// Fighter idle at `at` whose last action `idle` ended at `frame`.
inline Fighter idle_fighter(const ActionMachine& m, ActionId idle, Pose at, int frame = 0) {
    Fighter f;
    f.motion.action = &m.action(idle);
    f.motion.start = frame;
    f.motion.origin = at;
    f.motion.entry = at;
    f.motion.ref_angle = at.facing;
    f.motion.origin_rot = f.motion.ref_rot = {std::cos(at.facing), std::sin(at.facing)};
    return f;
}

/// Frames from launching `seq` one after another, starting right after `previous`.
inline int sequence_length(const ActionMachine& m, ActionId previous, const std::vector<ActionId>& seq) {
    int t = 0;
    for (ActionId a : seq) {
        t += m.glue(previous, a).frames + m.action(a).duration;
        previous = a;
    }
    return t;
}

/// Two prefixes of up to `depth` actions from `pool`, both played after
/// `idle`, such that `next_b` launched after the second prefix enters its body
/// exactly `offset` frames after `next_a` launched after the first one does.
inline std::optional<std::pair<std::vector<ActionId>, std::vector<ActionId>>> align_prefixes(
    const ActionMachine& m, ActionId idle, const std::vector<ActionId>& pool, ActionId next_a, ActionId next_b,
    int offset, int depth = 3) {
    std::vector<std::vector<ActionId>> seqs{{}};
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (static_cast<int>(seqs[i].size()) == depth) continue;
        for (ActionId a : pool) {
            auto s = seqs[i];
            s.push_back(a);
            seqs.push_back(std::move(s));
        }
    }
    auto body = [&](const std::vector<ActionId>& seq, ActionId next) {
        const ActionId last = seq.empty() ? idle : seq.back();
        return sequence_length(m, idle, seq) + m.glue(last, next).frames;
    };
    for (const auto& a : seqs) {
        for (const auto& b : seqs) {
            if (body(b, next_b) - body(a, next_a) == offset) return std::pair{a, b};
        }
    }
    return std::nullopt;
}

/// Chooser that plays fixed action lists, then `filler`.
inline Chooser script(std::array<std::vector<ActionId>, 2> plan, ActionId filler) {
    auto queues = std::make_shared<std::array<std::vector<ActionId>, 2>>(std::move(plan));
    auto pos = std::make_shared<std::array<std::size_t, 2>>();
    return [queues, pos, filler](const PlanningWorld& w, PlanResult*) {
        const auto i = index(w.mover);
        auto& q = (*queues)[i];
        return (*pos)[i] < q.size() ? q[(*pos)[i]++] : filler;
    };
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs a shell command; returns its exit status and captures stdout.
inline int run_command(const std::string& cmd, std::string* out = nullptr) {
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe) return -1;
    std::string text;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) text.append(buf, n);
    const int status = pclose(pipe);
    if (out) *out = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("fightgen_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace support
