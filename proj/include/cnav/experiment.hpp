#pragma once
// Monte Carlo factorial harness: clutter type x obstacle window x obstacle
// count, with a repeated-measures protocol that samples ONE clutter
// realization per (clutter type, replicate) and reuses it for every
// (window, count) combination of that replicate. Obstacles and marks are
// freshly sampled per record from their own derived seeds, so any record can
// be replayed bit-exactly and parallel runs equal serial runs as sets.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cnav/navigator.hpp"
#include "cnav/placement.hpp"
#include "cnav/pointproc.hpp"
#include "cnav/rng.hpp"
#include "cnav/scene.hpp"

namespace cnav {

// Clutter types in the fixed factor order CSR, IP, M, T, HC, S (1..6).
inline const std::vector<std::string>& clutter_type_names() {
    static const std::vector<std::string> names = {"CSR", "IP", "M", "T", "HC", "S"};
    return names;
}

inline int clutter_type_from_name(const std::string& name) {
    const auto& names = clutter_type_names();
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return static_cast<int>(k) + 1;
    throw ParseError("unknown clutter type '" + name + "'");
}

// The process parameters used throughout: CSR(100), IP(0.037 e^{(10-y)/40}),
// M(10,10,10), T(10,10,5), HC(100,5), S(100,5,0.5).
inline ProcessSpec clutter_process(int clutter_type, const Window& w = Window{}) {
    switch (clutter_type) {
        case 1: return CsrSpec{100.0};
        case 2: return inhom_default_spec(w);
        case 3: return MaternSpec{10.0, 10.0, 10.0};
        case 4: return ThomasSpec{10.0, 10.0, 5.0};
        case 5: return HardcoreSpec{100.0, 5.0};
        case 6: return StraussSpec{100.0, 5.0, 0.5};
    }
    throw std::invalid_argument("clutter_process: type must be 1..6");
}

inline const std::vector<int>& obstacle_count_levels() {
    static const std::vector<int> levels = {20, 30, 40, 50, 60};
    return levels;
}

struct TreatmentCombo {
    int clutter_type = 1;     // 1..6
    int window_index = 1;     // 1..19
    int n_obstacles_level = 1;  // 1..5 -> counts 20,30,40,50,60

    void validate() const {
        if (clutter_type < 1 || clutter_type > 6 || window_index < 1 || window_index > 19 ||
            n_obstacles_level < 1 || n_obstacles_level > 5)
            throw std::invalid_argument("TreatmentCombo: index out of range");
    }
    int n_obstacles() const { return obstacle_count_levels()[n_obstacles_level - 1]; }
};

struct ExperimentConfig {
    LatticeSpec lattice{100, 100};
    GridPoint s{50, 100};
    GridPoint t{50, 1};
    double radius = 4.5;
    double cost = 5.0;
    int n_clutter = 100;
    int replications = 100;
    std::uint64_t root_seed = 1;
    std::vector<TreatmentCombo> combos;
    MarkModel marks;
    Window clutter_window;  // [10,90]^2
    int mh_iterations = kDefaultMhIterations;
    int max_attempts = kDefaultMaxAttempts;

    void validate() const {
        lattice.validate();
        if (replications < 1) throw std::invalid_argument("ExperimentConfig: replications >= 1");
        if (combos.empty()) throw std::invalid_argument("ExperimentConfig: no combos");
        for (const auto& c : combos) c.validate();
    }

    std::uint64_t clutter_seed(int i, int l) const {
        return derive_seed(root_seed, "clutter", {static_cast<std::uint64_t>(i),
                                                  static_cast<std::uint64_t>(l)});
    }
    std::uint64_t obstacle_seed(const TreatmentCombo& c, int l) const {
        return derive_seed(root_seed, "obst",
                           {static_cast<std::uint64_t>(c.clutter_type),
                            static_cast<std::uint64_t>(c.window_index),
                            static_cast<std::uint64_t>(c.n_obstacles_level),
                            static_cast<std::uint64_t>(l)});
    }
    std::uint64_t mark_seed(const TreatmentCombo& c, int l) const {
        return derive_seed(root_seed, "mark",
                           {static_cast<std::uint64_t>(c.clutter_type),
                            static_cast<std::uint64_t>(c.window_index),
                            static_cast<std::uint64_t>(c.n_obstacles_level),
                            static_cast<std::uint64_t>(l)});
    }
};

struct ExperimentRecord {
    TreatmentCombo combo;
    int replicate = 1;  // l, 1-based
    double length = 0.0;
    int n_disamb = 0;
    std::uint64_t clutter_seed = 0;
    std::uint64_t obstacle_seed = 0;
    std::uint64_t mark_seed = 0;
};

inline constexpr const char* kRecordsHeader =
    "clutter_type,window,n_obstacles,replicate,length,n_disamb,clutter_seed,obstacle_seed,"
    "mark_seed";

inline std::string format_record(const ExperimentRecord& r) {
    std::ostringstream os;
    os << clutter_type_names()[r.combo.clutter_type - 1] << ','
       << all_window_codes()[r.combo.window_index - 1] << ',' << r.combo.n_obstacles() << ','
       << r.replicate << ',' << detail::fmt_double(r.length) << ',' << r.n_disamb << ','
       << r.clutter_seed << ',' << r.obstacle_seed << ',' << r.mark_seed;
    return os.str();
}

inline ExperimentRecord parse_record(const std::string& line, int line_no) {
    const auto f = detail::split_csv(line);
    if (f.size() != 9)
        throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields");
    ExperimentRecord r;
    r.combo.clutter_type = clutter_type_from_name(f[0]);
    const auto& codes = all_window_codes();
    r.combo.window_index = 0;
    for (std::size_t k = 0; k < codes.size(); ++k)
        if (codes[k] == f[1]) r.combo.window_index = static_cast<int>(k) + 1;
    if (r.combo.window_index == 0)
        throw ParseError("line " + std::to_string(line_no) + ": unknown window '" + f[1] + "'");
    const int count = static_cast<int>(detail::parse_long(f[2], line_no, "n_obstacles"));
    r.combo.n_obstacles_level = 0;
    const auto& levels = obstacle_count_levels();
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k] == count) r.combo.n_obstacles_level = static_cast<int>(k) + 1;
    if (r.combo.n_obstacles_level == 0)
        throw ParseError("line " + std::to_string(line_no) + ": unsupported count " + f[2]);
    r.replicate = static_cast<int>(detail::parse_long(f[3], line_no, "replicate"));
    r.length = detail::parse_double(f[4], line_no, "length");
    r.n_disamb = static_cast<int>(detail::parse_long(f[5], line_no, "n_disamb"));
    auto parse_seed = [line_no](const std::string& s, const char* what) -> std::uint64_t {
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s +
                             "'");
        }
    };
    r.clutter_seed = parse_seed(f[6], "clutter_seed");
    r.obstacle_seed = parse_seed(f[7], "obstacle_seed");
    r.mark_seed = parse_seed(f[8], "mark_seed");
    return r;
}

inline std::vector<ExperimentRecord> load_records(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_records: cannot open " + path);
    std::vector<ExperimentRecord> out;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != kRecordsHeader)
                throw ParseError("line " + std::to_string(line_no) + ": bad records header");
            saw_header = true;
            continue;
        }
        out.push_back(parse_record(line, line_no));
    }
    return out;
}

namespace detail {

struct ComboKey {
    int i, j, k, l;
    bool operator<(const ComboKey& o) const {
        if (i != o.i) return i < o.i;
        if (j != o.j) return j < o.j;
        if (k != o.k) return k < o.k;
        return l < o.l;
    }
};

inline ComboKey key_of(const ExperimentRecord& r) {
    return {r.combo.clutter_type, r.combo.window_index, r.combo.n_obstacles_level, r.replicate};
}

}  // namespace detail

// Builds the scene for one record from its derived seeds.
inline Scene build_scene(const ExperimentConfig& cfg, const TreatmentCombo& combo,
                         std::uint64_t clutter_seed, std::uint64_t obstacle_seed,
                         std::uint64_t mark_seed) {
    Rng clutter_rng(clutter_seed);
    const PointPattern clutter =
        sample_conditioned(clutter_process(combo.clutter_type, cfg.clutter_window),
                           cfg.clutter_window, cfg.n_clutter, clutter_rng, cfg.max_attempts,
                           cfg.mh_iterations);
    Rng obstacle_rng(obstacle_seed);
    const ObstacleWindow w = make_window(all_window_codes()[combo.window_index - 1]);
    const PointPattern obstacles =
        sample_obstacles(PlacementSpec{w, combo.n_obstacles()}, obstacle_rng);
    Rng mark_rng(mark_seed);
    Scene scene;
    scene.lattice = cfg.lattice;
    scene.s = cfg.s;
    scene.t = cfg.t;
    scene.disambiguation_cost = cfg.cost;
    scene.disks = assign_marks(clutter.points, obstacles.points, cfg.marks, mark_rng, cfg.radius);
    return scene;
}

// Runs the configured combos x replications. Records stream to `sink` (if
// given) as each (clutter type, replicate) task finishes, so a crashed run
// can resume by passing the keys already on disk via `skip`.
inline std::vector<ExperimentRecord> run_experiment(
    const ExperimentConfig& cfg, int jobs = 1,
    const std::function<void(const std::vector<ExperimentRecord>&)>& sink = nullptr,
    const std::set<std::tuple<int, int, int, int>>& skip = {},
    const std::function<void(const std::string&)>& on_error = nullptr) {
    cfg.validate();
    // Group requested combos by clutter type; each (type, replicate) task
    // samples its clutter once and reuses it across the combos.
    std::map<int, std::vector<TreatmentCombo>> by_type;
    for (const auto& c : cfg.combos) by_type[c.clutter_type].push_back(c);
    struct Task {
        int clutter_type;
        int replicate;
        const std::vector<TreatmentCombo>* combos;
    };
    std::vector<Task> tasks;
    for (const auto& [i, combos] : by_type)
        for (int l = 1; l <= cfg.replications; ++l) tasks.push_back({i, l, &combos});

    std::vector<ExperimentRecord> all;
    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    const LatticeGraph graph(cfg.lattice);

    auto worker = [&]() {
        for (;;) {
            const std::size_t ti = next.fetch_add(1);
            if (ti >= tasks.size()) return;
            const Task& task = tasks[ti];
            const std::uint64_t cseed = cfg.clutter_seed(task.clutter_type, task.replicate);
            std::vector<ExperimentRecord> batch;
            std::optional<PointPattern> clutter;
            for (const TreatmentCombo& combo : *task.combos) {
                if (skip.count({combo.clutter_type, combo.window_index, combo.n_obstacles_level,
                                task.replicate}))
                    continue;
                try {
                    if (!clutter) {
                        Rng rng(cseed);
                        clutter = sample_conditioned(
                            clutter_process(task.clutter_type, cfg.clutter_window),
                            cfg.clutter_window, cfg.n_clutter, rng, cfg.max_attempts,
                            cfg.mh_iterations);
                    }
                    ExperimentRecord rec;
                    rec.combo = combo;
                    rec.replicate = task.replicate;
                    rec.clutter_seed = cseed;
                    rec.obstacle_seed = cfg.obstacle_seed(combo, task.replicate);
                    rec.mark_seed = cfg.mark_seed(combo, task.replicate);

                    Rng obstacle_rng(rec.obstacle_seed);
                    const ObstacleWindow w =
                        make_window(all_window_codes()[combo.window_index - 1]);
                    const PointPattern obstacles =
                        sample_obstacles(PlacementSpec{w, combo.n_obstacles()}, obstacle_rng);
                    Rng mark_rng(rec.mark_seed);
                    Scene scene;
                    scene.lattice = cfg.lattice;
                    scene.s = cfg.s;
                    scene.t = cfg.t;
                    scene.disambiguation_cost = cfg.cost;
                    scene.disks = assign_marks(clutter->points, obstacles.points, cfg.marks,
                                               mark_rng, cfg.radius);
                    const TraversalResult tr = navigate(graph, scene);
                    rec.length = tr.total_length;
                    rec.n_disamb = static_cast<int>(tr.disambiguations.size());
                    batch.push_back(rec);
                } catch (const InfeasibleError& e) {
                    // Record-level failure (e.g. conditioning); the run goes on.
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    if (on_error) on_error(e.what());
                }
            }
            std::lock_guard<std::mutex> lock(sink_mutex);
            for (const auto& r : batch) all.push_back(r);
            if (sink && !batch.empty()) sink(batch);
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return all;
}

// Convenience wrapper writing the durable records CSV, resumable.
inline std::vector<ExperimentRecord> run_experiment_to_file(
    const ExperimentConfig& cfg, const std::string& path, int jobs = 1, bool resume = false,
    const std::function<void(const std::string&)>& on_error = nullptr) {
    std::set<std::tuple<int, int, int, int>> skip;
    bool append = false;
    if (resume) {
        std::ifstream probe(path);
        if (probe.good()) {
            for (const auto& r : load_records(path))
                skip.insert({r.combo.clutter_type, r.combo.window_index,
                             r.combo.n_obstacles_level, r.replicate});
            append = true;
        }
    }
    std::ofstream os(path, append ? std::ios::app : std::ios::trunc);
    if (!os) throw std::runtime_error("run_experiment: cannot write " + path);
    if (!append) {
        os << "# root_seed " << cfg.root_seed << " replications " << cfg.replications
           << " n_clutter " << cfg.n_clutter << " combos " << cfg.combos.size() << '\n';
        os << kRecordsHeader << '\n';
    }
    auto sink = [&os](const std::vector<ExperimentRecord>& batch) {
        for (const auto& r : batch) os << format_record(r) << '\n';
        os.flush();
    };
    auto log_error = [&os, &on_error](const std::string& msg) {
        os << "# error " << msg << '\n';
        os.flush();
        if (on_error) on_error(msg);
    };
    return run_experiment(cfg, jobs, sink, skip, log_error);
}

// Regenerates the record's scene from its seeds and re-navigates. Seeds must
// match what the config derives for the record's cell; bit-identical results
// are the contract.
inline TraversalResult replay(const ExperimentRecord& rec, const ExperimentConfig& cfg) {
    if (cfg.clutter_seed(rec.combo.clutter_type, rec.replicate) != rec.clutter_seed ||
        cfg.obstacle_seed(rec.combo, rec.replicate) != rec.obstacle_seed ||
        cfg.mark_seed(rec.combo, rec.replicate) != rec.mark_seed)
        throw std::runtime_error(
            "replay: recorded seeds do not match the config's derivation (different root seed "
            "or layout?)");
    const Scene scene =
        build_scene(cfg, rec.combo, rec.clutter_seed, rec.obstacle_seed, rec.mark_seed);
    return navigate(scene);
}

}  // namespace cnav
