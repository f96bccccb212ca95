#pragma once
// Samplers for the six clutter point processes: homogeneous Poisson (CSR),
// inhomogeneous Poisson (by thinning), Matern and Thomas cluster processes,
// and hardcore / Strauss Gibbs processes via Metropolis-Hastings birth/death/
// shift chains. Count parameters (lambda, kappa, beta) are expected counts in
// the sampling window; the inhomogeneous intensity is per unit area.

#include <cmath>
#include <functional>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cnav/geometry.hpp"
#include "cnav/rng.hpp"
#include "cnav/scene.hpp"

namespace cnav {

struct Window {
    double x_lo = 10.0, x_hi = 90.0;
    double y_lo = 10.0, y_hi = 90.0;

    void validate() const {
        if (!(x_lo < x_hi && y_lo < y_hi)) throw std::invalid_argument("Window: empty extent");
    }
    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    double area() const { return width() * height(); }
    bool contains(Vec2 p) const {
        return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi;
    }
    Window dilated(double pad) const { return {x_lo - pad, x_hi + pad, y_lo - pad, y_hi + pad}; }
};

struct PointPattern {
    std::vector<Vec2> points;
    Window window;
};

struct CsrSpec {
    double expected_count = 100.0;
};
struct InhomPoissonSpec {
    std::function<double(double, double)> intensity;  // per unit area
    double intensity_bound = 0.0;                     // sup over the window
};
struct MaternSpec {
    double parent_count = 10.0;    // expected parents in the window
    double mean_children = 10.0;   // Poisson mean per cluster
    double cluster_radius = 10.0;  // children uniform in this disk
};
struct ThomasSpec {
    double parent_count = 10.0;
    double mean_children = 10.0;
    double sigma = 5.0;  // isotropic Gaussian displacement
};
struct HardcoreSpec {
    double expected_count = 100.0;  // Poisson reference count in the window
    double hardcore_dist = 5.0;
};
struct StraussSpec {
    double expected_count = 100.0;
    double hardcore_dist = 5.0;
    double gamma = 0.5;  // 0 = hardcore, 1 = CSR
};

using ProcessSpec =
    std::variant<CsrSpec, InhomPoissonSpec, MaternSpec, ThomasSpec, HardcoreSpec, StraussSpec>;

// 0.037 * exp((10 - y) / 40): clutter density rising toward the bottom of the
// field; integrates to roughly 100 over the default window.
inline double inhom_intensity_default(double x, double y) {
    (void)x;
    return 0.037 * std::exp((10.0 - y) / 40.0);
}

// The default intensity is monotone decreasing in y, so its sup over any
// window sits on the lower edge.
inline InhomPoissonSpec inhom_default_spec(const Window& w = Window{}) {
    return InhomPoissonSpec{[](double x, double y) { return inhom_intensity_default(x, y); },
                            inhom_intensity_default(w.x_lo, w.y_lo)};
}

inline std::string process_name(const ProcessSpec& spec) {
    struct V {
        std::string operator()(const CsrSpec&) const { return "CSR"; }
        std::string operator()(const InhomPoissonSpec&) const { return "InhomPoisson"; }
        std::string operator()(const MaternSpec&) const { return "Matern"; }
        std::string operator()(const ThomasSpec&) const { return "Thomas"; }
        std::string operator()(const HardcoreSpec&) const { return "Hardcore"; }
        std::string operator()(const StraussSpec&) const { return "Strauss"; }
    };
    return std::visit(V{}, spec);
}

constexpr int kDefaultMhIterations = 100000;
constexpr int kDefaultMaxAttempts = 10000;

namespace detail {

inline Vec2 uniform_in(const Window& w, Rng& rng) {
    return {rng.uniform(w.x_lo, w.x_hi), rng.uniform(w.y_lo, w.y_hi)};
}

// Uniform in a disk of the given radius around the origin.
inline Vec2 uniform_in_disk(double radius, Rng& rng) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * M_PI * rng.uniform();
    return {r * std::cos(a), r * std::sin(a)};
}

// Bucketed neighbor counting for the Gibbs chains; cell size equals the
// interaction distance so only a 3x3 block ever needs scanning.
class NeighborGrid {
  public:
    NeighborGrid(const Window& w, double d)
        : w_(w), d_(d), nx_(std::max(1, static_cast<int>(std::ceil(w.width() / d)))),
          ny_(std::max(1, static_cast<int>(std::ceil(w.height() / d)))),
          cells_(static_cast<std::size_t>(nx_) * ny_) {}

    void insert(int idx, Vec2 p) { cells_[cell_of(p)].push_back(idx); }

    void remove(int idx, Vec2 p) {
        auto& c = cells_[cell_of(p)];
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] == idx) {
                c[k] = c.back();
                c.pop_back();
                return;
            }
        }
        throw std::logic_error("NeighborGrid: point not found");
    }

    // Number of points strictly closer than d to p, skipping index `skip`.
    int close_count(Vec2 p, const std::vector<Vec2>& pts, int skip = -1) const {
        const int cx = clampi(static_cast<int>((p.x - w_.x_lo) / d_), 0, nx_ - 1);
        const int cy = clampi(static_cast<int>((p.y - w_.y_lo) / d_), 0, ny_ - 1);
        int n = 0;
        for (int ix = std::max(0, cx - 1); ix <= std::min(nx_ - 1, cx + 1); ++ix) {
            for (int iy = std::max(0, cy - 1); iy <= std::min(ny_ - 1, cy + 1); ++iy) {
                for (int idx : cells_[static_cast<std::size_t>(ix) * ny_ + iy]) {
                    if (idx == skip) continue;
                    if (dist(p, pts[idx]) < d_) ++n;
                }
            }
        }
        return n;
    }

  private:
    Window w_;
    double d_;
    int nx_, ny_;
    std::vector<std::vector<int>> cells_;

    static int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

    std::size_t cell_of(Vec2 p) const {
        const int cx = clampi(static_cast<int>((p.x - w_.x_lo) / d_), 0, nx_ - 1);
        const int cy = clampi(static_cast<int>((p.y - w_.y_lo) / d_), 0, ny_ - 1);
        return static_cast<std::size_t>(cx) * ny_ + cy;
    }
};

struct GibbsParams {
    double beta_count;  // beta * |W|, i.e. expected count under the Poisson reference
    double d;
    double gamma;  // 0 for hardcore
};

inline double interaction_factor(double gamma, int t) {
    if (t == 0) return 1.0;
    if (gamma == 0.0) return 0.0;
    return std::pow(gamma, t);
}

// Unconditioned birth/death/shift chain targeting the Gibbs density
// beta^n(x) * gamma^{s_d(x)} relative to the unit-rate Poisson on the window.
// Acceptance ratios follow the Papangelou conditional intensity.
inline std::vector<Vec2> gibbs_chain(const GibbsParams& gp, const Window& w, Rng& rng,
                                     int iterations) {
    std::vector<Vec2> pts;
    NeighborGrid grid(w, gp.d);
    constexpr double kShiftRadius = 2.0;
    for (int it = 0; it < iterations; ++it) {
        const double move = rng.uniform();
        const int n = static_cast<int>(pts.size());
        if (move < 0.35) {  // birth
            const Vec2 u = uniform_in(w, rng);
            const int t = grid.close_count(u, pts);
            const double ratio = gp.beta_count * interaction_factor(gp.gamma, t) / (n + 1);
            if (rng.uniform() < ratio) {
                pts.push_back(u);
                grid.insert(n, u);
            }
        } else if (move < 0.70) {  // death
            if (n == 0) continue;
            const int idx = static_cast<int>(rng.uniform_int(n));
            const int t = grid.close_count(pts[idx], pts, idx);
            const double denom = gp.beta_count * interaction_factor(gp.gamma, t);
            // A zero conditional intensity cannot occur at a live point of a
            // feasible hardcore state; accept the death outright if it does.
            const double ratio = denom > 0.0 ? n / denom : 1.0;
            if (rng.uniform() < ratio) {
                grid.remove(idx, pts[idx]);
                const int last = n - 1;
                if (idx != last) {
                    grid.remove(last, pts[last]);
                    pts[idx] = pts[last];
                    grid.insert(idx, pts[idx]);
                }
                pts.pop_back();
            }
        } else {  // shift
            if (n == 0) continue;
            const int idx = static_cast<int>(rng.uniform_int(n));
            const Vec2 prop = pts[idx] + uniform_in_disk(kShiftRadius, rng);
            if (!w.contains(prop)) continue;
            const int t_old = grid.close_count(pts[idx], pts, idx);
            const int t_new = grid.close_count(prop, pts, idx);
            double ratio;
            if (gp.gamma == 0.0)
                ratio = t_new == 0 ? 1.0 : 0.0;
            else
                ratio = std::pow(gp.gamma, t_new - t_old);
            if (rng.uniform() < ratio) {
                grid.remove(idx, pts[idx]);
                pts[idx] = prop;
                grid.insert(idx, prop);
            }
        }
    }
    return pts;
}

// Count-conditioned Gibbs simulation: given n, beta^n is constant, so the
// conditional law depends only on the interaction term and a shift-only chain
// targets it directly. Rejecting unconditioned realizations until the count
// hits n is hopeless here (the hardcore process at the defaults centers far
// below 100 points), so this is the only practical route to exact-n samples.
inline std::vector<Vec2> gibbs_chain_fixed_n(const GibbsParams& gp, const Window& w, int n,
                                             Rng& rng, int iterations,
                                             const std::string& name) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    NeighborGrid grid(w, gp.d);
    if (gp.gamma == 0.0) {
        // Feasible start by dart throwing.
        long attempts = 0;
        const long max_attempts = 4000L * std::max(1, n);
        while (static_cast<int>(pts.size()) < n) {
            if (++attempts > max_attempts)
                throw InfeasibleError("sample_conditioned: cannot seat " + std::to_string(n) +
                                      " points with hardcore distance " + std::to_string(gp.d) +
                                      " (" + name + ")");
            const Vec2 u = uniform_in(w, rng);
            if (grid.close_count(u, pts) == 0) {
                grid.insert(static_cast<int>(pts.size()), u);
                pts.push_back(u);
            }
        }
    } else {
        for (int k = 0; k < n; ++k) {
            const Vec2 u = uniform_in(w, rng);
            grid.insert(k, u);
            pts.push_back(u);
        }
    }
    constexpr double kShiftRadius = 2.0;
    for (int it = 0; it < iterations; ++it) {
        if (n == 0) break;
        const int idx = static_cast<int>(rng.uniform_int(n));
        const Vec2 prop = pts[idx] + uniform_in_disk(kShiftRadius, rng);
        if (!w.contains(prop)) continue;
        const int t_new = grid.close_count(prop, pts, idx);
        double ratio;
        if (gp.gamma == 0.0) {
            ratio = t_new == 0 ? 1.0 : 0.0;
        } else {
            const int t_old = grid.close_count(pts[idx], pts, idx);
            ratio = std::pow(gp.gamma, t_new - t_old);
        }
        if (rng.uniform() < ratio) {
            grid.remove(idx, pts[idx]);
            pts[idx] = prop;
            grid.insert(idx, prop);
        }
    }
    return pts;
}

inline std::vector<Vec2> sample_csr_count(int n, const Window& w, Rng& rng) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) pts.push_back(uniform_in(w, rng));
    return pts;
}

inline std::vector<Vec2> sample_inhom(const InhomPoissonSpec& s, const Window& w, Rng& rng) {
    if (!(s.intensity_bound > 0.0))
        throw std::invalid_argument("InhomPoisson: intensity_bound must be positive");
    // Thinning of a dominating homogeneous process.
    const int n = rng.poisson(s.intensity_bound * w.area());
    std::vector<Vec2> pts;
    for (int k = 0; k < n; ++k) {
        const Vec2 p = uniform_in(w, rng);
        const double lam = s.intensity(p.x, p.y);
        if (lam > s.intensity_bound * (1.0 + 1e-12))
            throw std::invalid_argument("InhomPoisson: intensity exceeds its stated bound");
        if (rng.uniform() < lam / s.intensity_bound) pts.push_back(p);
    }
    return pts;
}

// Parents are sown in the window dilated by the cluster reach so the child
// process is (near-)stationary inside the window; children landing outside
// are discarded.
template <class Displace>
inline std::vector<Vec2> sample_cluster(double parent_count, double mean_children, double reach,
                                        const Window& w, Rng& rng, Displace displace) {
    const Window parent_w = w.dilated(reach);
    const double parent_mean = parent_count * parent_w.area() / w.area();
    const int n_parents = rng.poisson(parent_mean);
    std::vector<Vec2> pts;
    for (int p = 0; p < n_parents; ++p) {
        const Vec2 parent = uniform_in(parent_w, rng);
        const int kids = rng.poisson(mean_children);
        for (int c = 0; c < kids; ++c) {
            const Vec2 child = parent + displace(rng);
            if (w.contains(child)) pts.push_back(child);
        }
    }
    return pts;
}

}  // namespace detail

// One realization of the process in the window.
inline PointPattern sample(const ProcessSpec& spec, const Window& window, Rng& rng,
                           int mh_iterations = kDefaultMhIterations) {
    window.validate();
    PointPattern pat;
    pat.window = window;
    if (const auto* csr = std::get_if<CsrSpec>(&spec)) {
        pat.points = detail::sample_csr_count(rng.poisson(csr->expected_count), window, rng);
    } else if (const auto* ip = std::get_if<InhomPoissonSpec>(&spec)) {
        pat.points = detail::sample_inhom(*ip, window, rng);
    } else if (const auto* m = std::get_if<MaternSpec>(&spec)) {
        const double r = m->cluster_radius;
        pat.points = detail::sample_cluster(
            m->parent_count, m->mean_children, r, window, rng,
            [r](Rng& g) { return detail::uniform_in_disk(r, g); });
    } else if (const auto* th = std::get_if<ThomasSpec>(&spec)) {
        const double sig = th->sigma;
        pat.points = detail::sample_cluster(
            th->parent_count, th->mean_children, 4.0 * sig, window, rng,
            [sig](Rng& g) { return Vec2{sig * g.normal(), sig * g.normal()}; });
    } else if (const auto* hc = std::get_if<HardcoreSpec>(&spec)) {
        pat.points = detail::gibbs_chain({hc->expected_count, hc->hardcore_dist, 0.0}, window,
                                         rng, mh_iterations);
    } else if (const auto* st = std::get_if<StraussSpec>(&spec)) {
        if (st->gamma < 0.0 || st->gamma > 1.0)
            throw std::invalid_argument("Strauss: gamma must be in [0,1]");
        if (st->gamma == 1.0) {  // exact CSR limit
            pat.points =
                detail::sample_csr_count(rng.poisson(st->expected_count), window, rng);
        } else {
            pat.points =
                detail::gibbs_chain({st->expected_count, st->hardcore_dist, st->gamma}, window,
                                    rng, mh_iterations);
        }
    }
    return pat;
}

// A realization with exactly n points. CSR conditioned on its count is a
// uniform sample, so it is drawn directly; the other Poisson-type processes
// are rejection-conditioned; the Gibbs processes run a count-preserving
// chain (see gibbs_chain_fixed_n).
inline PointPattern sample_conditioned(const ProcessSpec& spec, const Window& window, int n,
                                       Rng& rng, int max_attempts = kDefaultMaxAttempts,
                                       int mh_iterations = kDefaultMhIterations) {
    window.validate();
    if (n < 0) throw std::invalid_argument("sample_conditioned: n must be >= 0");
    PointPattern pat;
    pat.window = window;
    if (n == 0) return pat;

    if (std::holds_alternative<CsrSpec>(spec)) {
        pat.points = detail::sample_csr_count(n, window, rng);
        return pat;
    }
    if (const auto* st = std::get_if<StraussSpec>(&spec)) {
        if (st->gamma < 0.0 || st->gamma > 1.0)
            throw std::invalid_argument("Strauss: gamma must be in [0,1]");
        if (st->gamma == 1.0) {  // exact CSR limit
            pat.points = detail::sample_csr_count(n, window, rng);
            return pat;
        }
    }
    if (const auto* hc = std::get_if<HardcoreSpec>(&spec)) {
        pat.points = detail::gibbs_chain_fixed_n({hc->expected_count, hc->hardcore_dist, 0.0},
                                                 window, n, rng, mh_iterations, "Hardcore");
        return pat;
    }
    if (const auto* st = std::get_if<StraussSpec>(&spec)) {
        pat.points = detail::gibbs_chain_fixed_n(
            {st->expected_count, st->hardcore_dist, st->gamma}, window, n, rng, mh_iterations,
            "Strauss");
        return pat;
    }
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        PointPattern trial = sample(spec, window, rng, mh_iterations);
        if (static_cast<int>(trial.points.size()) == n) return trial;
    }
    throw InfeasibleError("sample_conditioned: " + process_name(spec) + " did not reach n = " +
                          std::to_string(n) + " in " + std::to_string(max_attempts) +
                          " attempts");
}

inline double mean_nn_distance(const PointPattern& pat) {
    const auto& p = pat.points;
    if (p.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (i == j) continue;
            best = std::fmin(best, dist(p[i], p[j]));
        }
        total += best;
    }
    return total / static_cast<double>(p.size());
}

inline double min_pairwise_distance(const PointPattern& pat) {
    const auto& p = pat.points;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) best = std::fmin(best, dist(p[i], p[j]));
    return best;
}

// Pattern files: `x,y` rows under a window header comment; an optional label
// comment carries the generating window code or process name.
inline void save_pattern(const PointPattern& pat, std::ostream& os,
                         const std::string& label = "") {
    os << "# window " << detail::fmt_double(pat.window.x_lo) << ' '
       << detail::fmt_double(pat.window.x_hi) << ' ' << detail::fmt_double(pat.window.y_lo)
       << ' ' << detail::fmt_double(pat.window.y_hi) << '\n';
    if (!label.empty()) os << "# label " << label << '\n';
    for (const Vec2& p : pat.points)
        os << detail::fmt_double(p.x) << ',' << detail::fmt_double(p.y) << '\n';
}

inline void save_pattern(const PointPattern& pat, const std::string& path,
                         const std::string& label = "") {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_pattern: cannot write " + path);
    save_pattern(pat, os, label);
}

inline PointPattern load_pattern(std::istream& is) {
    PointPattern pat;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "window")
                ss >> pat.window.x_lo >> pat.window.x_hi >> pat.window.y_lo >> pat.window.y_hi;
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected x,y");
        pat.points.push_back(Vec2{detail::parse_double(f[0], line_no, "x"),
                                  detail::parse_double(f[1], line_no, "y")});
    }
    return pat;
}

inline PointPattern load_pattern(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_pattern: cannot open " + path);
    return load_pattern(is);
}

}  // namespace cnav
