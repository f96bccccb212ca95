#pragma once
// Reset-style disambiguation navigation on the lattice: plan a shortest walk
// under risk-adjusted edge weights, traverse it until the first edge that
// meets an ambiguous disk, pay to disambiguate that disk from the near
// endpoint, update the field, and replan from there until the target.
//
// Weight rule for an edge e with Euclidean length l(e):
//   - blocked (absent) if e intersects any revealed-obstacle disk;
//   - otherwise l(e) + (1/2) * sum over ambiguous disks whose boundary circle
//     e crosses of c/(1-rho).
// Charging the half-penalty on boundary crossings makes a planned pass
// through a disk (one edge in, one edge out) cost c/(1-rho) in total, which
// is what reproduces the published worked example; edges fully interior to a
// disk carry no surcharge but are unreachable without crossing in anyway.
// Revealed clutter contributes nothing; revealed obstacles block rather than
// carrying an infinite weight.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cnav/geometry.hpp"
#include "cnav/lattice.hpp"
#include "cnav/scene.hpp"

namespace cnav {

struct Disambiguation {
    GridPoint vertex;
    int disk_id;
    Truth revealed;
};

struct TraversalStep {
    enum class Kind { move, disambiguate };
    Kind kind;
    GridPoint from;      // move: edge tail; disambiguate: where the cost is paid
    GridPoint to;        // move only
    double length = 0;   // move only
    int disk_id = -1;    // disambiguate only
    Truth revealed = Truth::clutter;
};

struct TraversalResult {
    std::vector<GridPoint> walk;  // may revisit vertices across replans
    double total_length = 0.0;    // movement plus disambiguation costs
    std::vector<Disambiguation> disambiguations;
    int replans = 0;  // plan recomputations after the initial plan
    std::vector<TraversalStep> steps;
};

inline Vec2 to_vec(GridPoint p) { return {static_cast<double>(p.i), static_cast<double>(p.j)}; }

// Spatial incidence between a fixed disk layout and the lattice edges.
// Disk states change during navigation; geometry does not, so the edge lists
// are computed once per scene.
class SceneIndex {
  public:
    SceneIndex(const LatticeGraph& g, const Scene& scene) : graph_(&g) {
        const auto& edges = g.edges();
        open_edges_.resize(scene.disks.size());
        boundary_edges_.resize(scene.disks.size());
        edge_disks_.resize(edges.size());
        for (std::size_t k = 0; k < scene.disks.size(); ++k) {
            const Disk d = scene.disks[k].disk();
            const double pad = d.radius + 1.5;  // covers any edge reaching the disk
            const int i_lo = std::max(1, static_cast<int>(std::floor(d.center.x - pad)));
            const int i_hi = std::min(g.spec().i_max, static_cast<int>(std::ceil(d.center.x + pad)));
            const int j_lo = std::max(1, static_cast<int>(std::floor(d.center.y - pad)));
            const int j_hi = std::min(g.spec().j_max, static_cast<int>(std::ceil(d.center.y + pad)));
            std::vector<int> cand;
            for (int i = i_lo; i <= i_hi; ++i) {
                for (int j = j_lo; j <= j_hi; ++j) {
                    const int v = g.vertex_id({i, j});
                    for (const auto* a = g.adj_begin(v); a != g.adj_end(v); ++a)
                        cand.push_back(a->edge);
                }
            }
            std::sort(cand.begin(), cand.end());
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
            for (int e : cand) {
                const Vec2 pa = to_vec(g.point(edges[e].a));
                const Vec2 pb = to_vec(g.point(edges[e].b));
                if (segment_intersects_disk(pa, pb, d)) {
                    open_edges_[k].push_back(e);
                    edge_disks_[e].push_back(static_cast<int>(k));
                }
                if (segment_crosses_disk_boundary(pa, pb, d)) boundary_edges_[k].push_back(e);
            }
        }
    }

    // Planning weights for the current disk states.
    WeightMap weight_map(const Scene& scene) const {
        WeightMap wm(*graph_);
        for (std::size_t k = 0; k < scene.disks.size(); ++k) {
            const SceneDisk& d = scene.disks[k];
            if (d.state == DiskState::known_obstacle) {
                for (int e : open_edges_[k]) wm.blocked[e] = 1;
            } else if (d.state == DiskState::ambiguous) {
                const double rho = std::fmin(d.mark, kMarkCeil);
                const double pen = 0.5 * scene.disambiguation_cost / (1.0 - rho);
                for (int e : boundary_edges_[k]) wm.weight[e] += pen;
            }
        }
        return wm;
    }

    // Weights treating every disk that is not revealed clutter as a hard
    // obstacle (the zero-risk view of the field).
    WeightMap risk_free_map(const Scene& scene) const {
        WeightMap wm(*graph_);
        for (std::size_t k = 0; k < scene.disks.size(); ++k) {
            if (scene.disks[k].state == DiskState::known_clutter) continue;
            for (int e : open_edges_[k]) wm.blocked[e] = 1;
        }
        return wm;
    }

    // Disk indices (into scene.disks) whose open region meets edge e.
    const std::vector<int>& disks_on_edge(int e) const { return edge_disks_[e]; }

  private:
    const LatticeGraph* graph_;
    std::vector<std::vector<int>> open_edges_;
    std::vector<std::vector<int>> boundary_edges_;
    std::vector<std::vector<int>> edge_disks_;
};

// Weight of a single lattice edge under the current scene, straight from the
// geometry (the batch path above must agree with this; tests cross-check).
struct EdgeWeight {
    bool blocked = false;
    double weight = 0.0;
};

inline EdgeWeight edge_weight(Vec2 a, Vec2 b, const Scene& scene) {
    EdgeWeight r;
    r.weight = dist(a, b);
    for (const SceneDisk& d : scene.disks) {
        switch (d.state) {
            case DiskState::known_obstacle:
                if (segment_intersects_disk(a, b, d.disk())) return {true, 0.0};
                break;
            case DiskState::ambiguous:
                if (segment_crosses_disk_boundary(a, b, d.disk())) {
                    const double rho = std::fmin(d.mark, kMarkCeil);
                    r.weight += 0.5 * scene.disambiguation_cost / (1.0 - rho);
                }
                break;
            case DiskState::known_clutter:
                break;
        }
    }
    return r;
}

namespace detail {

inline int edge_between(const LatticeGraph& g, int a, int b) {
    for (const auto* x = g.adj_begin(a); x != g.adj_end(a); ++x)
        if (x->nbr == b) return x->edge;
    throw std::logic_error("edge_between: vertices not adjacent");
}

}  // namespace detail

// Executes the navigation policy on a private copy of the scene. The policy
// is deterministic: identical scenes (including truths) give identical
// traversals. Throws InfeasibleError if the target becomes unreachable.
inline TraversalResult navigate(const LatticeGraph& g, Scene scene) {
    scene.validate();
    if (g.spec().i_max != scene.lattice.i_max || g.spec().j_max != scene.lattice.j_max)
        throw std::logic_error("navigate: graph does not match scene lattice");
    const SceneIndex index(g, scene);
    TraversalResult res;
    res.walk.push_back(scene.s);
    int v = g.vertex_id(scene.s);
    const int tv = g.vertex_id(scene.t);
    int plans = 0;
    while (v != tv) {
        if (plans > static_cast<int>(scene.disks.size()) + 1)
            throw std::logic_error("navigate: replanning did not terminate");
        const WeightMap wm = index.weight_map(scene);
        const ShortestResult sr = shortest_walk(g, wm, g.point(v), scene.t);
        ++plans;
        if (!sr.reachable)
            throw InfeasibleError("navigate: target unreachable from (" +
                                  std::to_string(g.point(v).i) + "," +
                                  std::to_string(g.point(v).j) + ")");
        for (std::size_t k = 0; k + 1 < sr.path.vertices.size(); ++k) {
            const int a = sr.path.vertices[k];
            const int b = sr.path.vertices[k + 1];
            const int e = detail::edge_between(g, a, b);

            int chosen = -1;
            double chosen_dist = 0.0;
            const Vec2 va = to_vec(g.point(a));
            for (int di : index.disks_on_edge(e)) {
                if (scene.disks[di].state != DiskState::ambiguous) continue;
                const double cd = dist(va, scene.disks[di].center);
                if (chosen < 0 || cd < chosen_dist ||
                    (cd == chosen_dist && scene.disks[di].id < scene.disks[chosen].id)) {
                    chosen = di;
                    chosen_dist = cd;
                }
            }
            if (chosen >= 0) {
                // Disambiguate from the near endpoint, which must sit outside
                // the (open) disk.
                if (chosen_dist < scene.disks[chosen].radius)
                    throw ContractError("navigate: disambiguation vertex inside disk");
                const int id = scene.disks[chosen].id;
                const Truth revealed = disambiguate(scene, id);
                res.total_length += scene.disambiguation_cost;
                res.disambiguations.push_back({g.point(a), id, revealed});
                res.steps.push_back(TraversalStep{TraversalStep::Kind::disambiguate, g.point(a),
                                                  g.point(a), 0.0, id, revealed});
                v = a;
                break;
            }
            res.total_length += g.edges()[e].len;
            res.walk.push_back(g.point(b));
            res.steps.push_back(TraversalStep{TraversalStep::Kind::move, g.point(a), g.point(b),
                                              g.edges()[e].len, -1, Truth::clutter});
            v = b;
        }
    }
    res.replans = plans - 1;
    return res;
}

inline TraversalResult navigate(const Scene& scene) {
    const LatticeGraph g(scene.lattice);
    return navigate(g, scene);
}

struct ZeroRiskResult {
    bool reachable = false;
    double length = 0.0;
};

// Shortest s-t walk length treating every disk that is not revealed clutter
// as blocked; no disambiguation costs.
inline ZeroRiskResult zero_risk_length(const LatticeGraph& g, const Scene& scene) {
    scene.validate();
    const SceneIndex index(g, scene);
    const ShortestResult sr = shortest_walk(g, index.risk_free_map(scene), scene.s, scene.t);
    if (!sr.reachable) return {};
    return {true, sr.path.total_weight};
}

inline ZeroRiskResult zero_risk_length(const Scene& scene) {
    const LatticeGraph g(scene.lattice);
    return zero_risk_length(g, scene);
}

// Step log: one record per move/disambiguation plus a closing summary line
// `total_length,n_disambiguations,n_replans`.
inline void write_trace(const TraversalResult& res, std::ostream& os) {
    char buf[64];
    for (const TraversalStep& s : res.steps) {
        if (s.kind == TraversalStep::Kind::move) {
            std::snprintf(buf, sizeof(buf), "%.6f", s.length);
            os << "move," << s.from.i << ',' << s.from.j << ',' << s.to.i << ',' << s.to.j << ','
               << buf << '\n';
        } else {
            os << "disambiguate," << s.from.i << ',' << s.from.j << ',' << s.disk_id << ','
               << to_string(s.revealed) << '\n';
        }
    }
    std::snprintf(buf, sizeof(buf), "%.6f", res.total_length);
    os << "summary," << buf << ',' << res.disambiguations.size() << ',' << res.replans << '\n';
}

}  // namespace cnav
