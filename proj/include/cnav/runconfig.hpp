#pragma once
// Flat key=value run configuration with sectioned lists, e.g.
//
//   root_seed = 42
//   replications = 100
//   out = records.csv
//
//   [combos]
//   clutter_types = CSR,HC
//   windows = P,V80
//   counts = 20,40
//
//   [marks]
//   convention = means
//
// Unknown keys are rejected with their line number. Empty/absent combo lists
// mean "all levels of that factor"; the combo set is the cartesian product.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cnav/experiment.hpp"

namespace cnav {

struct RunConfig {
    ExperimentConfig exp;
    std::string out = "records.csv";
    int jobs = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& is) {
    RunConfig rc;
    std::string section;
    std::vector<std::string> clutter_list, window_list, count_list;
    bool custom_marks = false;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("config line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "combos" && section != "marks") fail("unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        try {
            if (section.empty()) {
                if (key == "root_seed")
                    rc.exp.root_seed = std::stoull(val);
                else if (key == "replications")
                    rc.exp.replications = std::stoi(val);
                else if (key == "n_clutter")
                    rc.exp.n_clutter = std::stoi(val);
                else if (key == "radius")
                    rc.exp.radius = std::stod(val);
                else if (key == "cost")
                    rc.exp.cost = std::stod(val);
                else if (key == "mh_iterations")
                    rc.exp.mh_iterations = std::stoi(val);
                else if (key == "max_attempts")
                    rc.exp.max_attempts = std::stoi(val);
                else if (key == "jobs")
                    rc.jobs = std::stoi(val);
                else if (key == "out")
                    rc.out = val;
                else if (key == "lattice") {
                    std::istringstream ss(val);
                    if (!(ss >> rc.exp.lattice.i_max >> rc.exp.lattice.j_max))
                        fail("lattice wants 'i_max j_max'");
                } else if (key == "s") {
                    std::istringstream ss(val);
                    if (!(ss >> rc.exp.s.i >> rc.exp.s.j)) fail("s wants 'i j'");
                } else if (key == "t") {
                    std::istringstream ss(val);
                    if (!(ss >> rc.exp.t.i >> rc.exp.t.j)) fail("t wants 'i j'");
                } else {
                    fail("unknown key '" + key + "'");
                }
            } else if (section == "combos") {
                if (key == "clutter_types")
                    clutter_list = detail::split_list(val);
                else if (key == "windows")
                    window_list = detail::split_list(val);
                else if (key == "counts")
                    count_list = detail::split_list(val);
                else
                    fail("unknown key '" + key + "' in [combos]");
            } else {  // marks
                if (key == "convention") {
                    if (val == "means")
                        rc.exp.marks = MarkModel{};
                    else if (val == "literal")
                        rc.exp.marks = MarkModel::swapped();
                    else
                        fail("convention must be 'means' or 'literal'");
                } else if (key == "clutter_alpha") {
                    rc.exp.marks.clutter_alpha = std::stod(val);
                    custom_marks = true;
                } else if (key == "clutter_beta") {
                    rc.exp.marks.clutter_beta = std::stod(val);
                    custom_marks = true;
                } else if (key == "obstacle_alpha") {
                    rc.exp.marks.obstacle_alpha = std::stod(val);
                    custom_marks = true;
                } else if (key == "obstacle_beta") {
                    rc.exp.marks.obstacle_beta = std::stod(val);
                    custom_marks = true;
                } else {
                    fail("unknown key '" + key + "' in [marks]");
                }
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            fail("bad value '" + val + "' for key '" + key + "'");
        }
    }

    // Hand-set Beta parameters must keep clutter looking less threatening
    // than obstacles; the named conventions manage themselves.
    if (custom_marks) {
        try {
            rc.exp.marks.validate();
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("[marks] ") + e.what());
        }
    }

    std::vector<int> types;
    if (clutter_list.empty())
        for (int i = 1; i <= 6; ++i) types.push_back(i);
    else
        for (const auto& n : clutter_list) types.push_back(clutter_type_from_name(n));
    std::vector<int> windows;
    if (window_list.empty())
        for (int j = 1; j <= 19; ++j) windows.push_back(j);
    else
        for (const auto& n : window_list) windows.push_back(make_window(n).index);
    std::vector<int> levels;
    if (count_list.empty())
        for (int k = 1; k <= 5; ++k) levels.push_back(k);
    else {
        for (const auto& n : count_list) {
            int level = 0;
            try {
                const int count = std::stoi(n);
                const auto& all = obstacle_count_levels();
                for (std::size_t k = 0; k < all.size(); ++k)
                    if (all[k] == count) level = static_cast<int>(k) + 1;
            } catch (const std::exception&) {
            }
            if (level == 0) throw ParseError("unsupported obstacle count '" + n + "'");
            levels.push_back(level);
        }
    }
    for (int i : types)
        for (int j : windows)
            for (int k : levels) rc.exp.combos.push_back(TreatmentCombo{i, j, k});
    return rc;
}

inline RunConfig parse_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("parse_run_config: cannot open " + path);
    return parse_run_config(is);
}

// CLUTTERNAV_ROOT_SEED and CLUTTERNAV_JOBS override the config file.
inline void apply_env_overrides(RunConfig& rc) {
    if (const char* s = std::getenv("CLUTTERNAV_ROOT_SEED")) rc.exp.root_seed = std::stoull(s);
    if (const char* s = std::getenv("CLUTTERNAV_JOBS")) rc.jobs = std::stoi(s);
}

}  // namespace cnav
