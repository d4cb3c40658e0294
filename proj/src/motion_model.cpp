#include "fightgen/motion_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "fightgen/errors.hpp"
#include "fightgen/text.hpp"

namespace fightgen {

void validate_clip(const MotionClip& clip, int descriptor_dim) {
    const std::string where = "clip " + std::to_string(clip.clip_id);
    if (clip.frames.empty()) throw ValidationError(where + ": no frames");
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        const auto& f = clip.frames[i];
        if (static_cast<int>(f.descriptor.size()) != descriptor_dim) {
            throw ValidationError(where + " frame " + std::to_string(i) + ": descriptor has " +
                                  std::to_string(f.descriptor.size()) + " values, expected " +
                                  std::to_string(descriptor_dim));
        }
        if (!(f.root_delta.norm() <= kMaxRootDeltaPerFrame)) {
            throw ValidationError(where + " frame " + std::to_string(i) + ": root delta too large");
        }
        if (!(std::abs(f.yaw_delta) <= kMaxYawDeltaPerFrame)) {
            throw ValidationError(where + " frame " + std::to_string(i) + ": yaw delta too large");
        }
    }
}

ClipLibrary parse_clips(std::istream& in) {
    ClipLibrary lib;
    std::string line;
    int line_no = 0;
    MotionClip* current = nullptr;
    std::size_t expected = 0;
    auto fail = [&](const std::string& msg) -> InputError {
        return InputError("clip file line " + std::to_string(line_no) + ": " + msg);
    };
    auto close_clip = [&] {
        if (current && current->frames.size() != expected) {
            throw fail("clip " + std::to_string(current->clip_id) + " declares " +
                       std::to_string(expected) + " frames, got " +
                       std::to_string(current->frames.size()));
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        auto tok = text::split_ws(body);
        if (tok[0] == "descriptor_dim") {
            if (tok.size() != 2 || lib.descriptor_dim != 0) throw fail("bad descriptor_dim header");
            auto k = text::parse_int(tok[1]);
            if (!k || *k <= 0) throw fail("descriptor_dim must be a positive integer");
            lib.descriptor_dim = static_cast<int>(*k);
        } else if (tok[0] == "clip") {
            if (lib.descriptor_dim == 0) throw fail("clip before descriptor_dim header");
            if (tok.size() != 4) throw fail("expected 'clip <id> <name> <frame_count>'");
            close_clip();
            auto id = text::parse_int(tok[1]);
            auto n = text::parse_int(tok[3]);
            if (!id || !n || *n <= 0) throw fail("bad clip header");
            for (const auto& c : lib.clips) {
                if (c.clip_id == *id) throw fail("duplicate clip id " + std::to_string(*id));
            }
            lib.clips.push_back(MotionClip{static_cast<int>(*id), std::string(tok[2]), {}});
            current = &lib.clips.back();
            expected = static_cast<std::size_t>(*n);
        } else {
            if (!current) throw fail("frame line before any clip header");
            if (current->frames.size() >= expected) throw fail("more frames than declared");
            if (tok.size() != static_cast<std::size_t>(3 + lib.descriptor_dim)) {
                throw fail("expected " + std::to_string(3 + lib.descriptor_dim) + " numbers");
            }
            std::vector<double> vals;
            for (auto t : tok) {
                auto v = text::parse_double(t);
                if (!v) throw fail("not a number: '" + std::string(t) + "'");
                vals.push_back(*v);
            }
            FramePose f;
            f.root_delta = {vals[0], vals[1]};
            f.yaw_delta = vals[2];
            f.descriptor.assign(vals.begin() + 3, vals.end());
            current->frames.push_back(std::move(f));
        }
    }
    close_clip();
    for (const auto& c : lib.clips) validate_clip(c, lib.descriptor_dim);
    return lib;
}

ClipLibrary load_clips(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open clip file " + path);
    return parse_clips(in);
}

void write_clips(std::ostream& out, const ClipLibrary& lib) {
    out << "descriptor_dim " << lib.descriptor_dim << '\n';
    for (const auto& c : lib.clips) {
        out << "clip " << c.clip_id << ' ' << c.name << ' ' << c.frames.size() << '\n';
        for (const auto& f : c.frames) {
            out << text::format_double(f.root_delta.x) << ' ' << text::format_double(f.root_delta.y)
                << ' ' << text::format_double(f.yaw_delta);
            for (double d : f.descriptor) out << ' ' << text::format_double(d);
            out << '\n';
        }
    }
}

std::string to_string(FrameRef r) {
    return std::to_string(r.clip) + ":" + std::to_string(r.frame);
}

std::optional<FrameRef> parse_frame_ref(std::string_view s) {
    auto kv = text::split_kv(s, ':');
    if (!kv) return std::nullopt;
    auto c = text::parse_int(kv->first);
    auto f = text::parse_int(kv->second);
    if (!c || !f || *f < 0) return std::nullopt;
    return FrameRef{static_cast<int>(*c), static_cast<int>(*f)};
}

// --- FrameGraph ---------------------------------------------------------------

FrameGraph::FrameGraph(std::vector<std::pair<FrameRef, FramePose>> nodes,
                       std::span<const RawEdge> edges) {
    std::sort(nodes.begin(), nodes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i].first == nodes[i - 1].first) {
            throw InputError("duplicate frame node " + to_string(nodes[i].first));
        }
    }
    refs_.reserve(nodes.size());
    poses_.reserve(nodes.size());
    for (auto& [r, p] : nodes) {
        refs_.push_back(r);
        poses_.push_back(std::move(p));
    }
    adj_.resize(refs_.size());
    for (const auto& e : edges) {
        auto u = index_of(e.from);
        auto v = index_of(e.to);
        if (!u || !v) {
            throw InputError("edge " + to_string(e.from) + "->" + to_string(e.to) +
                             " references a missing node");
        }
        if (!(e.cost >= 0.0)) throw InputError("negative edge cost");
        adj_[*u].push_back(Edge{*v, e.cost, e.kind});
    }
    for (auto& out : adj_) {
        std::stable_sort(out.begin(), out.end(),
                         [](const Edge& a, const Edge& b) { return a.to < b.to; });
    }
}

std::optional<std::size_t> FrameGraph::index_of(FrameRef r) const {
    auto it = std::lower_bound(refs_.begin(), refs_.end(), r);
    if (it == refs_.end() || *it != r) return std::nullopt;
    return static_cast<std::size_t>(it - refs_.begin());
}

std::optional<double> FrameGraph::edge_cost(FrameRef from, FrameRef to) const {
    auto u = index_of(from);
    auto v = index_of(to);
    if (!u || !v) return std::nullopt;
    std::optional<double> best;
    for (const auto& e : adj_[*u]) {
        if (e.to == *v && (!best || e.cost < *best)) best = e.cost;
    }
    return best;
}

std::size_t FrameGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& out : adj_) n += out.size();
    return n;
}

std::size_t FrameGraph::edge_count(EdgeKind kind) const {
    std::size_t n = 0;
    for (const auto& out : adj_) {
        n += static_cast<std::size_t>(
            std::count_if(out.begin(), out.end(), [kind](const Edge& e) { return e.kind == kind; }));
    }
    return n;
}

FrameGraph FrameGraph::induced(std::span<const std::size_t> keep) const {
    std::vector<bool> in(size(), false);
    for (auto i : keep) in.at(i) = true;
    std::vector<std::pair<FrameRef, FramePose>> nodes;
    std::vector<RawEdge> edges;
    for (std::size_t u = 0; u < size(); ++u) {
        if (!in[u]) continue;
        nodes.emplace_back(refs_[u], poses_[u]);
        for (const auto& e : adj_[u]) {
            if (in[e.to]) edges.push_back(RawEdge{refs_[u], refs_[e.to], e.cost, e.kind});
        }
    }
    return FrameGraph(std::move(nodes), edges);
}

std::vector<FrameGraph::RawEdge> FrameGraph::raw_edges() const {
    std::vector<RawEdge> out;
    for (std::size_t u = 0; u < size(); ++u) {
        for (const auto& e : adj_[u]) out.push_back(RawEdge{refs_[u], refs_[e.to], e.cost, e.kind});
    }
    return out;
}

double descriptor_distance(const FramePose& a, const FramePose& b) {
    double sum = 0.0;
    const std::size_t n = std::min(a.descriptor.size(), b.descriptor.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.descriptor[i] - b.descriptor[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

FrameGraph build_frame_graph(std::span<const MotionClip> clips, double threshold) {
    if (clips.empty()) throw InputError("build_frame_graph: empty clip list");
    if (!(threshold >= 0.0)) throw InputError("build_frame_graph: threshold must be >= 0");

    std::vector<std::pair<FrameRef, FramePose>> nodes;
    std::vector<FrameGraph::RawEdge> edges;
    for (const auto& clip : clips) {
        if (clip.frames.empty()) throw InputError("clip " + std::to_string(clip.clip_id) + " is empty");
        for (std::size_t f = 0; f < clip.frames.size(); ++f) {
            FrameRef r{clip.clip_id, static_cast<int>(f)};
            nodes.emplace_back(r, clip.frames[f]);
            if (f + 1 < clip.frames.size()) {
                edges.push_back({r, FrameRef{clip.clip_id, static_cast<int>(f + 1)}, 0.0,
                                 EdgeKind::Successor});
            }
        }
    }
    for (const auto& ca : clips) {
        for (const auto& cb : clips) {
            if (ca.clip_id == cb.clip_id) continue;
            for (std::size_t i = 0; i < ca.frames.size(); ++i) {
                for (std::size_t j = 0; j < cb.frames.size(); ++j) {
                    const double d = descriptor_distance(ca.frames[i], cb.frames[j]);
                    if (d < threshold) {
                        edges.push_back({FrameRef{ca.clip_id, static_cast<int>(i)},
                                         FrameRef{cb.clip_id, static_cast<int>(j)}, d,
                                         EdgeKind::Transition});
                    }
                }
            }
        }
    }
    return FrameGraph(std::move(nodes), edges);
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const FrameGraph& graph) {
    // Iterative Tarjan.
    const std::size_t n = graph.size();
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;

    for (std::size_t s = 0; s < n; ++s) {
        if (order[s] != kUnvisited) continue;
        call.push_back({s, 0});
        order[s] = low[s] = counter++;
        stack.push_back(s);
        on_stack[s] = true;
        while (!call.empty()) {
            auto& [u, ei] = call.back();
            auto out = graph.out_edges(u);
            if (ei < out.size()) {
                const std::size_t v = out[ei++].to;
                if (order[v] == kUnvisited) {
                    order[v] = low[v] = counter++;
                    stack.push_back(v);
                    on_stack[v] = true;
                    call.push_back({v, 0});
                } else if (on_stack[v]) {
                    low[u] = std::min(low[u], order[v]);
                }
                continue;
            }
            if (low[u] == order[u]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != u);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            const std::size_t done = u;
            call.pop_back();
            if (!call.empty()) {
                auto& parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

FrameGraph largest_scc(const FrameGraph& graph) {
    if (graph.empty()) throw InputError("largest_scc: empty graph");
    auto comps = strongly_connected_components(graph);
    // Components are sorted by smallest member, so the first maximum wins ties.
    const auto* best = &comps.front();
    for (const auto& c : comps) {
        if (c.size() > best->size()) best = &c;
    }
    return graph.induced(*best);
}

// --- PathTable ----------------------------------------------------------------

std::optional<GraphPath> PathTable::find(FrameRef from, ActionId target) const {
    auto it = targets_.find(target);
    if (it == targets_.end() || !graph_) return std::nullopt;
    auto u = graph_->index_of(from);
    if (!u) return std::nullopt;
    const auto& t = it->second;
    if (!t.reachable[*u]) return std::nullopt;
    GraphPath path;
    std::size_t cur = *u;
    path.nodes.push_back(graph_->ref(cur));
    while (cur != t.start) {
        const auto nxt = static_cast<std::size_t>(t.next[cur]);
        double c = 0.0;
        bool found = false;
        for (const auto& e : graph_->out_edges(cur)) {
            if (e.to == nxt && (!found || e.cost < c)) {
                c = e.cost;
                found = true;
            }
        }
        path.cost += c;
        cur = nxt;
        path.nodes.push_back(graph_->ref(cur));
    }
    return path;
}

std::optional<double> PathTable::cost(FrameRef from, ActionId target) const {
    auto p = find(from, target);
    if (!p) return std::nullopt;
    return p->cost;
}

std::vector<ActionId> PathTable::targets() const {
    std::vector<ActionId> out;
    for (const auto& [id, _] : targets_) out.push_back(id);
    return out;
}

PathTable shortest_paths_to_action_starts(const FrameGraph& graph,
                                          const std::map<ActionId, FrameRef>& action_starts) {
    PathTable table;
    table.graph_ = std::make_shared<const FrameGraph>(graph);
    const FrameGraph& g = *table.graph_;
    const std::size_t n = g.size();

    // Reverse adjacency, keeping the cheapest parallel edge.
    std::vector<std::vector<std::pair<std::size_t, double>>> rev(n);
    for (std::size_t u = 0; u < n; ++u) {
        for (const auto& e : g.out_edges(u)) rev[e.to].push_back({u, e.cost});
    }

    for (const auto& [action, start_ref] : action_starts) {
        auto start = g.index_of(start_ref);
        if (!start) {
            throw InputError("action " + std::to_string(action) + " start node " +
                             to_string(start_ref) + " is not in the frame graph");
        }
        PathTable::Target t;
        t.start = *start;
        t.next.assign(n, -1);
        t.reachable.assign(n, false);

        // Lexicographic Dijkstra on (cost, hops, next node) towards the target.
        using Key = std::tuple<double, std::size_t, std::ptrdiff_t>;
        std::vector<Key> best(n, Key{INFINITY, 0, -1});
        std::vector<bool> done(n, false);
        using Item = std::pair<Key, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        best[*start] = Key{0.0, 0, -1};
        pq.push({best[*start], *start});
        while (!pq.empty()) {
            auto [key, v] = pq.top();
            pq.pop();
            if (done[v] || key != best[v]) continue;
            done[v] = true;
            t.reachable[v] = true;
            t.next[v] = std::get<2>(key);
            for (const auto& [u, c] : rev[v]) {
                if (done[u]) continue;
                Key cand{std::get<0>(key) + c, std::get<1>(key) + 1, static_cast<std::ptrdiff_t>(v)};
                if (cand < best[u]) {
                    best[u] = cand;
                    pq.push({cand, u});
                }
            }
        }
        table.targets_.emplace(action, std::move(t));
    }
    return table;
}

}  // namespace fightgen
