#pragma once

// Frame-level motion graph: clips of root-motion frames connected by
// intra-clip successor edges and cross-clip transitions between similar
// poses, pruned to its largest strongly connected component, plus shortest
// paths from every frame to each action entry frame.

#include <compare>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fightgen/geometry.hpp"
#include "fightgen/types.hpp"

namespace fightgen {

/// Sanity bounds for synthetic frame data.
inline constexpr double kMaxRootDeltaPerFrame = 0.2;  // m
inline constexpr double kMaxYawDeltaPerFrame = 0.5;   // rad

struct FramePose {
    Vec2 root_delta;    // motion to the next frame, in the frame's own heading
    double yaw_delta = 0.0;
    std::vector<double> descriptor;

    bool operator==(const FramePose&) const = default;
};

struct MotionClip {
    int clip_id = 0;
    std::string name;
    std::vector<FramePose> frames;

    bool operator==(const MotionClip&) const = default;
};

struct ClipLibrary {
    int descriptor_dim = 0;
    std::vector<MotionClip> clips;

    bool operator==(const ClipLibrary&) const = default;
};

/// Throws ValidationError on empty clips, ragged descriptors or out-of-range deltas.
void validate_clip(const MotionClip& clip, int descriptor_dim);

ClipLibrary parse_clips(std::istream& in);
ClipLibrary load_clips(const std::string& path);
void write_clips(std::ostream& out, const ClipLibrary& lib);

/// Node identity: (clip, frame). Ordering defines "smallest node id".
struct FrameRef {
    int clip = 0;
    int frame = 0;

    auto operator<=>(const FrameRef&) const = default;
};

std::string to_string(FrameRef r);
std::optional<FrameRef> parse_frame_ref(std::string_view s);

enum class EdgeKind : std::uint8_t { Successor, Transition };

class FrameGraph {
public:
    struct Edge {
        std::size_t to = 0;
        double cost = 0.0;
        EdgeKind kind = EdgeKind::Successor;
    };

    struct RawEdge {
        FrameRef from;
        FrameRef to;
        double cost = 0.0;
        EdgeKind kind = EdgeKind::Successor;
    };

    FrameGraph() = default;
    /// Nodes may come in any order; they are stored sorted by FrameRef.
    /// Edges referring to unknown nodes throw InputError.
    FrameGraph(std::vector<std::pair<FrameRef, FramePose>> nodes, std::span<const RawEdge> edges);

    std::size_t size() const { return refs_.size(); }
    bool empty() const { return refs_.empty(); }

    const FrameRef& ref(std::size_t i) const { return refs_[i]; }
    const FramePose& pose(std::size_t i) const { return poses_[i]; }
    std::span<const FrameRef> refs() const { return refs_; }

    std::optional<std::size_t> index_of(FrameRef r) const;
    bool contains(FrameRef r) const { return index_of(r).has_value(); }

    std::span<const Edge> out_edges(std::size_t i) const { return adj_[i]; }
    std::optional<double> edge_cost(FrameRef from, FrameRef to) const;

    std::size_t edge_count() const;
    std::size_t edge_count(EdgeKind kind) const;

    /// Subgraph over the given node indices (all edges between them kept).
    FrameGraph induced(std::span<const std::size_t> keep) const;

    std::vector<RawEdge> raw_edges() const;

private:
    std::vector<FrameRef> refs_;
    std::vector<FramePose> poses_;
    std::vector<std::vector<Edge>> adj_;
};

/// Euclidean distance between pose descriptors.
double descriptor_distance(const FramePose& a, const FramePose& b);

/// Successor edges (cost 0) inside each clip; a transition edge u->v across
/// clips whenever descriptor distance < threshold, with that distance as cost.
FrameGraph build_frame_graph(std::span<const MotionClip> clips, double threshold);

/// Maximum-node-count SCC; ties go to the component holding the smallest node.
FrameGraph largest_scc(const FrameGraph& graph);

/// All SCCs as sorted node-index lists (test and diagnostic use).
std::vector<std::vector<std::size_t>> strongly_connected_components(const FrameGraph& graph);

struct GraphPath {
    std::vector<FrameRef> nodes;
    double cost = 0.0;  // forward sum of edge costs along `nodes`

    std::size_t hops() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Shortest paths from every node to a set of action entry nodes. Ties on
/// cost go to fewer hops, then to the smaller next node.
class PathTable {
public:
    std::optional<GraphPath> find(FrameRef from, ActionId target) const;
    std::optional<double> cost(FrameRef from, ActionId target) const;
    bool has_target(ActionId target) const { return targets_.contains(target); }
    std::vector<ActionId> targets() const;
    const FrameGraph& graph() const { return *graph_; }

private:
    friend PathTable shortest_paths_to_action_starts(const FrameGraph&,
                                                     const std::map<ActionId, FrameRef>&);
    struct Target {
        std::size_t start = 0;
        std::vector<std::ptrdiff_t> next;  // -1: unreachable or the target itself
        std::vector<bool> reachable;
    };
    std::shared_ptr<const FrameGraph> graph_;
    std::map<ActionId, Target> targets_;
};

PathTable shortest_paths_to_action_starts(const FrameGraph& graph,
                                          const std::map<ActionId, FrameRef>& action_starts);

}  // namespace fightgen
