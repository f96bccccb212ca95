#pragma once
// The 8-adjacency integer lattice: vertices (i,j) with 1 <= i <= i_max,
// 1 <= j <= j_max, and the four edge families
//   (i,j)-(i+1,j)    length 1
//   (i,j)-(i,j+1)    length 1
//   (i,j)-(i+1,j+1)  length sqrt(2)
//   (i+1,j)-(i,j+1)  length sqrt(2)
// plus shortest walks under arbitrary nonnegative per-edge weight maps with
// blocked edges removed from the graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cnav {

struct LatticeSpec {
    int i_max = 0;
    int j_max = 0;

    void validate() const {
        if (i_max < 2 || j_max < 2)
            throw std::invalid_argument("LatticeSpec: i_max and j_max must be >= 2");
    }
};

struct GridPoint {
    int i = 0;
    int j = 0;
};

inline bool operator==(GridPoint a, GridPoint b) { return a.i == b.i && a.j == b.j; }
inline bool operator!=(GridPoint a, GridPoint b) { return !(a == b); }

class LatticeGraph {
  public:
    struct Edge {
        int a;       // vertex ids, a < b in enumeration order
        int b;
        double len;  // 1 or sqrt(2)
    };

    explicit LatticeGraph(LatticeSpec spec) : spec_(spec) {
        spec.validate();
        build();
    }

    const LatticeSpec& spec() const { return spec_; }
    int vertex_count() const { return spec_.i_max * spec_.j_max; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool in_lattice(GridPoint p) const {
        return p.i >= 1 && p.i <= spec_.i_max && p.j >= 1 && p.j <= spec_.j_max;
    }

    // Vertex ids follow lexicographic (i,j) order, which is also the tie-break
    // order for shortest walks.
    int vertex_id(GridPoint p) const {
        if (!in_lattice(p)) throw std::out_of_range("LatticeGraph: vertex outside lattice");
        return (p.i - 1) * spec_.j_max + (p.j - 1);
    }

    GridPoint point(int v) const {
        return GridPoint{v / spec_.j_max + 1, v % spec_.j_max + 1};
    }

    // Neighbors of v in ascending vertex-id order, as (neighbor, edge id).
    struct Adj {
        int nbr;
        int edge;
    };
    const Adj* adj_begin(int v) const { return adj_.data() + offsets_[v]; }
    const Adj* adj_end(int v) const { return adj_.data() + offsets_[v + 1]; }

  private:
    LatticeSpec spec_;
    std::vector<Edge> edges_;
    std::vector<int> offsets_;
    std::vector<Adj> adj_;

    void push_edge(GridPoint p, GridPoint q, double len) {
        int a = vertex_id(p);
        int b = vertex_id(q);
        if (a > b) std::swap(a, b);
        edges_.push_back(Edge{a, b, len});
    }

    void build() {
        const double kDiag = std::sqrt(2.0);
        edges_.reserve(static_cast<std::size_t>(spec_.i_max) * spec_.j_max * 4);
        for (int i = 1; i <= spec_.i_max; ++i) {
            for (int j = 1; j <= spec_.j_max; ++j) {
                if (i + 1 <= spec_.i_max) push_edge({i, j}, {i + 1, j}, 1.0);
                if (j + 1 <= spec_.j_max) push_edge({i, j}, {i, j + 1}, 1.0);
                if (i + 1 <= spec_.i_max && j + 1 <= spec_.j_max) {
                    push_edge({i, j}, {i + 1, j + 1}, kDiag);
                    push_edge({i + 1, j}, {i, j + 1}, kDiag);
                }
            }
        }
        const int nv = vertex_count();
        std::vector<int> degree(nv, 0);
        for (const Edge& e : edges_) {
            ++degree[e.a];
            ++degree[e.b];
        }
        offsets_.assign(nv + 1, 0);
        for (int v = 0; v < nv; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
        adj_.resize(offsets_[nv]);
        std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
            adj_[cursor[edges_[e].a]++] = Adj{edges_[e].b, e};
            adj_[cursor[edges_[e].b]++] = Adj{edges_[e].a, e};
        }
        for (int v = 0; v < nv; ++v) {
            std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1],
                      [](const Adj& x, const Adj& y) { return x.nbr < y.nbr; });
        }
    }
};

// Per-query weights; a blocked edge is absent from the graph (never assigned
// an infinite weight).
struct WeightMap {
    std::vector<double> weight;
    std::vector<std::uint8_t> blocked;

    explicit WeightMap(const LatticeGraph& g) : blocked(g.edge_count(), 0) {
        weight.reserve(g.edge_count());
        for (const auto& e : g.edges()) weight.push_back(e.len);
    }
};

struct WeightedPath {
    std::vector<int> vertices;  // s..t inclusive; {s} when s == t
    double total_weight = 0.0;
};

struct ShortestResult {
    bool reachable = false;
    WeightedPath path;
};

// All-targets distances to `target` over non-blocked edges.
inline std::vector<double> dijkstra_to(const LatticeGraph& g, const WeightMap& wm, int target) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.vertex_count(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[target] = 0.0;
    pq.emplace(0.0, target);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d != dist[v]) continue;
        for (const auto* a = g.adj_begin(v); a != g.adj_end(v); ++a) {
            if (wm.blocked[a->edge]) continue;
            const double nd = d + wm.weight[a->edge];
            if (nd < dist[a->nbr]) {
                dist[a->nbr] = nd;
                pq.emplace(nd, a->nbr);
            }
        }
    }
    return dist;
}

// Minimum-total-weight s-t path. Ties are broken by returning the
// lexicographically smallest vertex sequence (in vertex-id order): the path
// is rebuilt greedily from s, always stepping to the smallest neighbor that
// stays on a shortest path. Weight comparisons are exact.
inline ShortestResult shortest_walk(const LatticeGraph& g, const WeightMap& wm, GridPoint s,
                                    GridPoint t) {
    const int sv = g.vertex_id(s);
    const int tv = g.vertex_id(t);
    ShortestResult res;
    if (sv == tv) {
        res.reachable = true;
        res.path.vertices = {sv};
        res.path.total_weight = 0.0;
        return res;
    }
    const std::vector<double> dist = dijkstra_to(g, wm, tv);
    if (!std::isfinite(dist[sv])) return res;
    res.reachable = true;
    res.path.vertices.push_back(sv);
    int v = sv;
    double total = 0.0;
    int guard = g.vertex_count() + 1;
    while (v != tv) {
        bool stepped = false;
        for (const auto* a = g.adj_begin(v); a != g.adj_end(v); ++a) {
            if (wm.blocked[a->edge]) continue;
            if (dist[v] == wm.weight[a->edge] + dist[a->nbr]) {
                total += wm.weight[a->edge];
                v = a->nbr;
                res.path.vertices.push_back(v);
                stepped = true;
                break;
            }
        }
        if (!stepped || --guard < 0)
            throw std::logic_error("shortest_walk: path reconstruction failed");
    }
    res.path.total_weight = total;
    return res;
}

}  // namespace cnav
