#pragma once
// The obstacle field as the navigator sees and mutates it: disks carrying a
// mark rho (sensor-estimated probability of being a true obstacle), a hidden
// truth, and a disambiguation state, plus the line-oriented scene file format.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnav/geometry.hpp"
#include "cnav/lattice.hpp"
#include "cnav/rng.hpp"

namespace cnav {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Truth { clutter, obstacle };
enum class DiskState { ambiguous, known_clutter, known_obstacle };

inline const char* to_string(Truth t) { return t == Truth::clutter ? "clutter" : "obstacle"; }

// Marks are kept strictly inside (0,1) when sampled so that the planning
// penalty c/(1-rho) stays finite for ambiguous disks; rho = 1 is reserved for
// revealed obstacles.
constexpr double kMarkFloor = 1e-9;
constexpr double kMarkCeil = 1.0 - 1e-9;

struct SceneDisk {
    int id = 0;
    Vec2 center;
    double radius = 4.5;
    double mark = 0.5;                       // rho in (0,1]
    Truth truth = Truth::clutter;            // hidden from the navigator
    DiskState state = DiskState::ambiguous;

    Disk disk() const { return Disk(center, radius); }
};

struct Scene {
    LatticeSpec lattice{100, 100};
    GridPoint s{50, 100};
    GridPoint t{50, 1};
    std::vector<SceneDisk> disks;
    double disambiguation_cost = 5.0;

    void validate() const {
        lattice.validate();
        if (s == t) throw std::invalid_argument("Scene: s and t must differ");
        if (s.i < 1 || s.i > lattice.i_max || s.j < 1 || s.j > lattice.j_max ||
            t.i < 1 || t.i > lattice.i_max || t.j < 1 || t.j > lattice.j_max)
            throw std::invalid_argument("Scene: s and t must lie in the lattice");
        if (!(disambiguation_cost > 0.0))
            throw std::invalid_argument("Scene: disambiguation cost must be > 0");
        std::set<int> ids;
        const Vec2 sp{static_cast<double>(s.i), static_cast<double>(s.j)};
        const Vec2 tp{static_cast<double>(t.i), static_cast<double>(t.j)};
        for (const SceneDisk& d : disks) {
            if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y))
                throw std::invalid_argument("Scene: disk center must be finite");
            if (!(d.radius > 0.0) || !std::isfinite(d.radius))
                throw std::invalid_argument("Scene: disk radius must be > 0");
            if (!(d.mark > 0.0 && d.mark <= 1.0))
                throw std::invalid_argument("Scene: disk mark must be in (0,1]");
            if (!ids.insert(d.id).second)
                throw std::invalid_argument("Scene: duplicate disk id " + std::to_string(d.id));
            if (d.disk().contains(sp) || d.disk().contains(tp))
                throw std::invalid_argument("Scene: s/t must not lie strictly inside a disk");
        }
    }

    int clutter_count() const {
        int n = 0;
        for (const auto& d : disks) n += d.truth == Truth::clutter;
        return n;
    }
    int obstacle_count() const { return static_cast<int>(disks.size()) - clutter_count(); }
};

struct MarkModel {
    double clutter_alpha = 2.0;   // mean 0.25
    double clutter_beta = 6.0;
    double obstacle_alpha = 6.0;  // mean 0.75
    double obstacle_beta = 2.0;

    double clutter_mean() const { return clutter_alpha / (clutter_alpha + clutter_beta); }
    double obstacle_mean() const { return obstacle_alpha / (obstacle_alpha + obstacle_beta); }

    // Clutter has to look less threatening than true obstacles for the
    // scenario to make sense.
    void validate() const {
        if (!(clutter_alpha > 0 && clutter_beta > 0 && obstacle_alpha > 0 && obstacle_beta > 0))
            throw std::invalid_argument("MarkModel: Beta parameters must be positive");
        if (!(clutter_mean() < obstacle_mean()))
            throw std::invalid_argument("MarkModel: clutter mark mean must be below obstacle mean");
    }

    // Alternate convention with the Beta parameter pairs swapped (clutter
    // Beta(6,2), obstacle Beta(2,6)). Deliberately skips the mean ordering
    // check; selectable from the run config.
    static MarkModel swapped() { return MarkModel{6.0, 2.0, 2.0, 6.0}; }
};

inline double clamp_mark(double m) {
    return std::fmax(kMarkFloor, std::fmin(kMarkCeil, m));
}

// Every clutter point draws its mark from the clutter distribution and every
// obstacle point from the obstacle distribution; truths are set accordingly
// and all disks start ambiguous. Ids are assigned in input order, clutter
// first.
inline std::vector<SceneDisk> assign_marks(const std::vector<Vec2>& clutter_points,
                                           const std::vector<Vec2>& obstacle_points,
                                           const MarkModel& model, Rng& rng,
                                           double radius = 4.5) {
    std::vector<SceneDisk> out;
    out.reserve(clutter_points.size() + obstacle_points.size());
    int id = 0;
    for (const Vec2& p : clutter_points) {
        SceneDisk d;
        d.id = id++;
        d.center = p;
        d.radius = radius;
        d.mark = clamp_mark(rng.beta(model.clutter_alpha, model.clutter_beta));
        d.truth = Truth::clutter;
        out.push_back(d);
    }
    for (const Vec2& p : obstacle_points) {
        SceneDisk d;
        d.id = id++;
        d.center = p;
        d.radius = radius;
        d.mark = clamp_mark(rng.beta(model.obstacle_alpha, model.obstacle_beta));
        d.truth = Truth::obstacle;
        out.push_back(d);
    }
    return out;
}

// Reveals the disk's truth. A revealed clutter disk no longer blocks
// anything; a revealed obstacle blocks its edges permanently.
inline Truth disambiguate(Scene& scene, int disk_id) {
    for (SceneDisk& d : scene.disks) {
        if (d.id != disk_id) continue;
        if (d.state != DiskState::ambiguous)
            throw ContractError("disambiguate: disk " + std::to_string(disk_id) +
                                " is not ambiguous");
        d.state = d.truth == Truth::obstacle ? DiskState::known_obstacle
                                             : DiskState::known_clutter;
        return d.truth;
    }
    throw ContractError("disambiguate: no disk with id " + std::to_string(disk_id));
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    return out;
}

inline double parse_double(const std::string& s, int line_no, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}

inline long parse_long(const std::string& s, int line_no, const char* what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}

}  // namespace detail

// Scene file format: '#'-prefixed comment lines (scene-level parameters ride
// in recognized comment directives), then the header `id,x,y,radius,rho,truth`
// and one disk per row. Files describe the field before any traversal, so
// every disk loads as ambiguous.
inline void save_scene(const Scene& scene, std::ostream& os) {
    os << "# clutternav scene\n";
    os << "# lattice " << scene.lattice.i_max << ' ' << scene.lattice.j_max << '\n';
    os << "# s " << scene.s.i << ' ' << scene.s.j << '\n';
    os << "# t " << scene.t.i << ' ' << scene.t.j << '\n';
    os << "# cost " << detail::fmt_double(scene.disambiguation_cost) << '\n';
    os << "id,x,y,radius,rho,truth\n";
    for (const SceneDisk& d : scene.disks) {
        os << d.id << ',' << detail::fmt_double(d.center.x) << ','
           << detail::fmt_double(d.center.y) << ',' << detail::fmt_double(d.radius) << ','
           << detail::fmt_double(d.mark) << ',' << to_string(d.truth) << '\n';
    }
}

inline void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_scene: cannot write " + path);
    save_scene(scene, os);
}

inline Scene load_scene(std::istream& is) {
    Scene scene;
    scene.disks.clear();
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    std::set<int> ids;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "lattice")
                ss >> scene.lattice.i_max >> scene.lattice.j_max;
            else if (key == "s")
                ss >> scene.s.i >> scene.s.j;
            else if (key == "t")
                ss >> scene.t.i >> scene.t.j;
            else if (key == "cost")
                ss >> scene.disambiguation_cost;
            continue;  // unrecognized comments are ignored
        }
        if (!saw_header) {
            if (line != "id,x,y,radius,rho,truth")
                throw ParseError("line " + std::to_string(line_no) +
                                 ": expected header 'id,x,y,radius,rho,truth'");
            saw_header = true;
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() != 6)
            throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                             std::to_string(f.size()));
        SceneDisk d;
        d.id = static_cast<int>(detail::parse_long(f[0], line_no, "id"));
        d.center.x = detail::parse_double(f[1], line_no, "x");
        d.center.y = detail::parse_double(f[2], line_no, "y");
        d.radius = detail::parse_double(f[3], line_no, "radius");
        d.mark = detail::parse_double(f[4], line_no, "rho");
        if (!(d.mark > 0.0 && d.mark <= 1.0))
            throw ParseError("line " + std::to_string(line_no) + ": rho " + f[4] +
                             " outside (0,1]");
        if (!(d.radius > 0.0))
            throw ParseError("line " + std::to_string(line_no) + ": radius must be > 0");
        if (f[5] == "clutter")
            d.truth = Truth::clutter;
        else if (f[5] == "obstacle")
            d.truth = Truth::obstacle;
        else
            throw ParseError("line " + std::to_string(line_no) + ": truth must be " +
                             "'clutter' or 'obstacle', got '" + f[5] + "'");
        if (!ids.insert(d.id).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate id " + f[0]);
        scene.disks.push_back(d);
    }
    if (!saw_header) throw ParseError("scene file has no header line");
    try {
        scene.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid scene: ") + e.what());
    }
    return scene;
}

inline Scene load_scene(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_scene: cannot open " + path);
    return load_scene(is);
}

}  // namespace cnav
