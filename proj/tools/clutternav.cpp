// Command-line front end: clutter sampling, obstacle placement, navigation on
// scene files, the factorial Monte Carlo experiment, record replay, and
// analysis of the records CSV.
//
// Exit codes: 0 success, 2 usage, 3 data/parse, 4 infeasible
// (unreachable target / conditioning failure), 5 internal invariant.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnav/experiment.hpp"
#include "cnav/navigator.hpp"
#include "cnav/placement.hpp"
#include "cnav/pointproc.hpp"
#include "cnav/runconfig.hpp"
#include "cnav/scene.hpp"
#include "cnav/stats.hpp"

namespace {

using namespace cnav;

ProcessSpec spec_from_type(const std::string& type) {
    if (type == "csr") return CsrSpec{100.0};
    if (type == "ip") return inhom_default_spec();
    if (type == "matern") return MaternSpec{10.0, 10.0, 10.0};
    if (type == "thomas") return ThomasSpec{10.0, 10.0, 5.0};
    if (type == "hardcore") return HardcoreSpec{100.0, 5.0};
    if (type == "strauss") return StraussSpec{100.0, 5.0, 0.5};
    throw CLI::ValidationError("--type", "expected csr|ip|matern|thomas|hardcore|strauss");
}

int cmd_sample_clutter(const std::string& type, int n, std::uint64_t seed,
                       const std::string& out) {
    Rng rng(seed);
    const PointPattern pat = sample_conditioned(spec_from_type(type), Window{}, n, rng);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << "# type " << type << " n " << n << " seed " << seed << '\n';
    save_pattern(pat, os, type);
    std::cout << "wrote " << pat.points.size() << " points to " << out << '\n';
    return 0;
}

int cmd_place_obstacles(const std::string& window, int n, std::uint64_t seed,
                        const std::string& out) {
    Rng rng(seed);
    const ObstacleWindow w = make_window(window);
    const PointPattern pat = sample_obstacles(PlacementSpec{w, n}, rng);
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << "# n " << n << " seed " << seed << '\n';
    save_pattern(pat, os, w.code);
    std::cout << "wrote " << pat.points.size() << " points to " << out << '\n';
    return 0;
}

int cmd_navigate(const std::string& scene_path, const std::string& trace_path,
                 const std::string& out_path) {
    const Scene scene = load_scene(scene_path);
    const TraversalResult res = navigate(scene);
    char line[128];
    std::snprintf(line, sizeof(line), "length=%.2f disamb=%d", res.total_length,
                  static_cast<int>(res.disambiguations.size()));
    std::cout << line << '\n';
    std::cout << "# disks=" << scene.disks.size() << " clutter=" << scene.clutter_count()
              << " obstacles=" << scene.obstacle_count() << " replans=" << res.replans << '\n';
    if (!trace_path.empty()) {
        std::ofstream ts(trace_path);
        if (!ts) throw std::runtime_error("cannot write " + trace_path);
        write_trace(res, ts);
    }
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot write " + out_path);
        os << line << '\n';
        os << "# disks=" << scene.disks.size() << " clutter=" << scene.clutter_count()
           << " obstacles=" << scene.obstacle_count() << " replans=" << res.replans << '\n';
    }
    return 0;
}

int cmd_run_experiment(const std::string& config_path, int jobs_flag, bool resume,
                       const std::string& out_flag) {
    RunConfig rc = parse_run_config(config_path);
    apply_env_overrides(rc);
    if (jobs_flag > 0) rc.jobs = jobs_flag;
    if (!out_flag.empty()) rc.out = out_flag;
    int errors = 0;
    const auto records = run_experiment_to_file(rc.exp, rc.out, rc.jobs, resume,
                                                [&errors](const std::string& msg) {
                                                    ++errors;
                                                    std::cerr << "record error: " << msg << '\n';
                                                });
    std::cout << "wrote " << records.size() << " records to " << rc.out;
    if (errors) std::cout << " (" << errors << " record errors)";
    std::cout << '\n';
    return 0;
}

int cmd_replay(const std::string& records_path, const std::string& config_path, int row) {
    RunConfig rc = parse_run_config(config_path);
    apply_env_overrides(rc);
    const auto records = load_records(records_path);
    if (records.empty()) throw ParseError("no records in " + records_path);
    int mismatches = 0;
    const auto check = [&](std::size_t idx) {
        const auto& rec = records[idx];
        const TraversalResult res = replay(rec, rc.exp);
        const bool ok = res.total_length == rec.length &&
                        static_cast<int>(res.disambiguations.size()) == rec.n_disamb;
        std::cout << "row " << idx + 1 << ": " << (ok ? "ok" : "MISMATCH") << " length="
                  << detail::fmt_double(res.total_length) << " recorded="
                  << detail::fmt_double(rec.length) << '\n';
        if (!ok) ++mismatches;
    };
    if (row > 0) {
        if (row > static_cast<int>(records.size()))
            throw ParseError("row " + std::to_string(row) + " out of range");
        check(row - 1);
    } else {
        for (std::size_t i = 0; i < records.size(); ++i) check(i);
    }
    if (mismatches) throw std::runtime_error(std::to_string(mismatches) + " replay mismatches");
    return 0;
}

// ------------------------------------------------------------------ analyze

struct RecordField {
    std::string name;
    std::function<std::string(const ExperimentRecord&)> get;
    std::function<int(const ExperimentRecord&)> level;
};

const std::vector<RecordField>& record_fields() {
    static const std::vector<RecordField> fields = {
        {"clutter",
         [](const ExperimentRecord& r) { return clutter_type_names()[r.combo.clutter_type - 1]; },
         [](const ExperimentRecord& r) { return r.combo.clutter_type; }},
        {"window",
         [](const ExperimentRecord& r) { return all_window_codes()[r.combo.window_index - 1]; },
         [](const ExperimentRecord& r) { return r.combo.window_index; }},
        {"count",
         [](const ExperimentRecord& r) { return std::to_string(r.combo.n_obstacles()); },
         [](const ExperimentRecord& r) { return r.combo.n_obstacles_level; }},
    };
    return fields;
}

std::vector<const RecordField*> resolve_fields(const std::string& group_by) {
    std::vector<const RecordField*> out;
    for (const auto& name : detail::split_list(group_by)) {
        bool found = false;
        for (const auto& f : record_fields()) {
            if (f.name == name) {
                out.push_back(&f);
                found = true;
            }
        }
        if (!found) throw ParseError("unknown group-by field '" + name + "'");
    }
    if (out.empty()) throw ParseError("--group-by needs at least one of clutter,window,count");
    return out;
}

GroupedSample group_records(const std::vector<ExperimentRecord>& records,
                            const std::vector<const RecordField*>& fields) {
    std::map<std::string, std::vector<double>> acc;
    for (const auto& r : records) {
        std::string key;
        for (const auto* f : fields) {
            if (!key.empty()) key += ':';
            key += f->get(r);
        }
        acc[key].push_back(r.length);
    }
    GroupedSample gs;
    for (auto& [k, v] : acc) gs.groups.emplace_back(k, std::move(v));
    return gs;
}

char form_of(const std::string& window_code) { return window_code[0]; }

void print_best_performers(const std::vector<ExperimentRecord>& records) {
    // Mean length per (clutter, window, count); best per obstacle form and
    // overall, for each clutter type.
    std::map<int, std::map<std::pair<int, int>, std::pair<double, int>>> acc;
    for (const auto& r : records) {
        auto& cell = acc[r.combo.clutter_type][{r.combo.window_index, r.combo.n_obstacles_level}];
        cell.first += r.length;
        cell.second += 1;
    }
    std::cout << "clutter,form,best_combo,mean_length\n";
    for (const auto& [ct, cells] : acc) {
        std::map<char, std::pair<std::string, double>> best_by_form;
        std::pair<std::string, double> best_overall{"", -1.0};
        for (const auto& [jk, sumn] : cells) {
            const std::string code = all_window_codes()[jk.first - 1];
            const int count = obstacle_count_levels()[jk.second - 1];
            const double mean = sumn.first / sumn.second;
            const std::string label = code + ":" + std::to_string(count);
            auto& slot = best_by_form[form_of(code)];
            if (slot.first.empty() || mean > slot.second) slot = {label, mean};
            if (mean > best_overall.second) best_overall = {label, mean};
        }
        const std::string cname = clutter_type_names()[ct - 1];
        for (const auto& [form, slot] : best_by_form) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%c,%s,%.2f", cname.c_str(), form,
                          slot.first.c_str(), slot.second);
            std::cout << buf << '\n';
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,overall,%s,%.2f", cname.c_str(),
                      best_overall.first.c_str(), best_overall.second);
        std::cout << buf << '\n';
    }
}

int cmd_analyze(const std::string& records_path, const std::string& group_by, bool summary,
                bool anova, bool interactions, bool hsd, double alpha, bool trend, bool best) {
    const auto records = load_records(records_path);
    if (records.empty()) throw ParseError("no records in " + records_path);
    const auto fields = resolve_fields(group_by);

    if (summary) {
        std::cout << "group,n,mean,sd,se\n";
        for (const auto& g : summarize(group_records(records, fields))) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s,%d,%.4f,%.4f,%.4f", g.label.c_str(), g.n, g.mean,
                          g.sd, g.se);
            std::cout << buf << '\n';
        }
    }
    if (anova) {
        if (fields.size() == 1) {
            print_anova(oneway_anova(group_records(records, fields)), std::cout);
        } else {
            std::vector<FactorialObservation> obs;
            std::vector<std::string> names;
            for (const auto* f : fields) names.push_back(f->name);
            for (const auto& r : records) {
                FactorialObservation o;
                for (const auto* f : fields) o.levels.push_back(f->level(r));
                o.y = r.length;
                obs.push_back(o);
            }
            print_anova(factorial_anova(obs, names, interactions), std::cout);
        }
    }
    if (hsd) {
        const auto res = tukey_hsd(group_records(records, fields), alpha);
        std::cout << "group_a,group_b,diff,lo,hi,p_adj\n";
        for (const auto& p : res.pairs) {
            char buf[200];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%.4f,%.4f,%.6g", p.a.c_str(), p.b.c_str(),
                          p.diff, p.lo, p.hi, p.p_adj);
            std::cout << buf << '\n';
        }
    }
    if (trend) {
        // Classify the mean-vs-count profile within each (clutter, window).
        std::map<std::pair<int, int>, std::map<int, std::vector<double>>> cells;
        for (const auto& r : records)
            cells[{r.combo.clutter_type, r.combo.window_index}][r.combo.n_obstacles_level]
                .push_back(r.length);
        std::cout << "clutter,window,trend,peak_count\n";
        for (const auto& [cw, by_level] : cells) {
            if (by_level.size() < 3) continue;
            std::vector<double> means;
            double pooled_var = 0.0;
            int pooled_df = 0, n_min = 1 << 30;
            for (const auto& [lvl, xs] : by_level) {
                const double m = vec_mean(xs);
                means.push_back(m);
                n_min = std::min(n_min, static_cast<int>(xs.size()));
                for (double x : xs) pooled_var += (x - m) * (x - m);
                pooled_df += static_cast<int>(xs.size()) - 1;
            }
            const double se = pooled_df > 0 ? std::sqrt(pooled_var / pooled_df / n_min) : 0.0;
            const TrendResult tr = trend_check(means, se);
            int idx = 0;
            int peak_count = 0;
            for (const auto& [lvl, xs] : by_level)
                if (idx++ == tr.peak_index) peak_count = obstacle_count_levels()[lvl - 1];
            std::cout << clutter_type_names()[cw.first - 1] << ','
                      << all_window_codes()[cw.second - 1] << ',' << to_string(tr.cls) << ','
                      << peak_count << '\n';
        }
    }
    if (best) print_best_performers(records);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Navigation experiments in stochastic obstacle fields"};
    app.require_subcommand(1);

    std::string type = "csr", out, window, scene_path, trace_path, config_path, records_path;
    std::string group_by = "clutter,window,count";
    std::uint64_t seed = 1;
    int n = 100, jobs = 0, row = 0;
    bool resume = false, summary = false, anova = false, interactions = false, hsd = false,
         trend = false, best = false;
    double alpha = 0.05;

    auto* sc = app.add_subcommand("sample-clutter", "Sample a clutter pattern with exactly n points");
    sc->add_option("--type", type, "csr|ip|matern|thomas|hardcore|strauss")->required();
    sc->add_option("--n", n, "number of points")->required();
    sc->add_option("--seed", seed, "RNG seed");
    sc->add_option("--out", out, "output pattern file")->required();

    auto* po = app.add_subcommand("place-obstacles", "Sample obstacle centers in a window polygon");
    po->add_option("--window", window, "P, L90..L20, V90..V50, W90..W50")->required();
    po->add_option("--n", n, "number of obstacles")->required();
    po->add_option("--seed", seed, "RNG seed");
    po->add_option("--out", out, "output pattern file")->required();

    auto* nv = app.add_subcommand("navigate", "Run the navigator on a scene file");
    nv->add_option("--scene", scene_path, "scene file")->required();
    nv->add_option("--trace", trace_path, "write per-step trace here");
    nv->add_option("--out", out, "write the summary here");

    auto* re = app.add_subcommand("run-experiment", "Run the configured Monte Carlo experiment");
    re->add_option("--config", config_path, "run configuration file")->required();
    re->add_option("--jobs", jobs, "worker threads (overrides config)");
    re->add_flag("--resume", resume, "skip records already in the output file");
    re->add_option("--out", out, "records CSV (overrides config)");

    auto* rp = app.add_subcommand("replay", "Re-derive records from their seeds and verify");
    rp->add_option("--records", records_path, "records CSV")->required();
    rp->add_option("--config", config_path, "run configuration file")->required();
    rp->add_option("--row", row, "verify a single 1-based row (default: all)");

    auto* an = app.add_subcommand("analyze", "Summaries, ANOVA, HSD, trends, best performers");
    an->add_option("--records", records_path, "records CSV")->required();
    an->add_option("--group-by", group_by, "comma list of clutter,window,count");
    an->add_flag("--summary", summary, "per-group n/mean/sd/se");
    an->add_flag("--anova", anova, "fixed-effects ANOVA over the group-by factors");
    an->add_flag("--interactions", interactions, "include two-way interactions");
    an->add_flag("--hsd", hsd, "Tukey HSD pair table");
    an->add_option("--alpha", alpha, "family-wise level for --hsd");
    an->add_flag("--trend", trend, "classify mean-vs-count trends per clutter/window");
    an->add_flag("--best", best, "best performer report per clutter type");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sc->parsed()) return cmd_sample_clutter(type, n, seed, out);
        if (po->parsed()) return cmd_place_obstacles(window, n, seed, out);
        if (nv->parsed()) return cmd_navigate(scene_path, trace_path, out);
        if (re->parsed()) return cmd_run_experiment(config_path, jobs, resume, out);
        if (rp->parsed()) return cmd_replay(records_path, config_path, row);
        if (an->parsed())
            return cmd_analyze(records_path, group_by, summary, anova, interactions, hsd, alpha,
                               trend, best);
    } catch (const cnav::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const cnav::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const cnav::ContractError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    } catch (const std::invalid_argument& e) {
        // Validation of user-supplied values (window codes, scene fields).
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
