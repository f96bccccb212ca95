// End-to-end checks of the command-line binary (path injected by the build)
// and of the run-configuration parser.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cnav/pointproc.hpp"
#include "cnav/runconfig.hpp"
#include "cnav/scene.hpp"
#include "support/common.hpp"

using namespace cnav;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const std::filesystem::path& stdout_to = {}) {
    std::string cmd = std::string(CLUTTERNAV_BIN) + " " + args;
    if (!stdout_to.empty()) cmd += " > " + stdout_to.string() + " 2>&1";
    else cmd += " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("sample-clutter writes conditioned patterns reproducibly") {
    const auto dir = testsup::fresh_dir("cli_sample");
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    REQUIRE(run_cli("sample-clutter --type hardcore --n 100 --seed 7 --out " + a.string()) == 0);
    const PointPattern pat = load_pattern(a.string());
    CHECK(pat.points.size() == 100);
    CHECK(min_pairwise_distance(pat) >= 5.0);
    for (const auto& p : pat.points) CHECK(Window{}.contains(p));

    REQUIRE(run_cli("sample-clutter --type hardcore --n 100 --seed 7 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));  // same seed, identical bytes

    const auto empty = dir / "empty.csv";
    REQUIRE(run_cli("sample-clutter --type csr --n 0 --seed 1 --out " + empty.string()) == 0);
    CHECK(load_pattern(empty.string()).points.empty());

    // Conditioning failure exits with the infeasible code.
    CHECK(run_cli("sample-clutter --type hardcore --n 2000 --seed 1 --out " + b.string()) == 4);
}

TEST_CASE("place-obstacles respects the window polygon") {
    const auto dir = testsup::fresh_dir("cli_place");
    const auto out = dir / "v70.csv";
    REQUIRE(run_cli("place-obstacles --window V70 --n 40 --seed 3 --out " + out.string()) == 0);
    const PointPattern pat = load_pattern(out.string());
    REQUIRE(pat.points.size() == 40);
    for (const auto& p : pat.points) CHECK(point_in_polygon(p, make_window("V70").polygon));
    CHECK(run_cli("place-obstacles --window X90 --n 5 --seed 1 --out " + out.string()) == 3);
}

TEST_CASE("navigate reports the worked example and exit codes") {
    const auto dir = testsup::fresh_dir("cli_navigate");
    const auto scene_path = dir / "three.scene";
    save_scene(testsup::three_disk_scene(), scene_path.string());
    const auto out = dir / "navigate.txt";
    const auto trace = dir / "trace.csv";
    REQUIRE(run_cli("navigate --scene " + scene_path.string() + " --trace " + trace.string(),
                    out) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("length=29.49 disamb=2") != std::string::npos);
    CHECK(text.find("clutter=2") != std::string::npos);
    CHECK(text.find("obstacles=1") != std::string::npos);
    const std::string trace_text = slurp(trace);
    CHECK(trace_text.find("summary,29.485281,2,2") != std::string::npos);

    // Unreachable target: distinct exit code.
    Scene walled;
    walled.lattice = {3, 9};
    walled.s = {2, 9};
    walled.t = {2, 1};
    walled.disks = {{0, {2.0, 5.0}, 1.2, 0.5, Truth::obstacle, DiskState::ambiguous}};
    const auto walled_path = dir / "walled.scene";
    save_scene(walled, walled_path.string());
    CHECK(run_cli("navigate --scene " + walled_path.string()) == 4);

    // Parse errors and usage errors.
    std::ofstream bad(dir / "bad.scene");
    bad << "id,x,y,radius,rho,truth\n1,50,50,4.5,1.2,clutter\n";
    bad.close();
    CHECK(run_cli("navigate --scene " + (dir / "bad.scene").string()) == 3);
    CHECK(run_cli("navigate --nonsense") == 2);
    CHECK(run_cli("no-such-command") == 2);
}

TEST_CASE("navigate handles a 39-disk minefield-style scene file") {
    // 27 clutter disks and 12 potential mines on the default 100x100 field,
    // in the same scene-file workflow used for externally supplied data.
    const auto dir = testsup::fresh_dir("cli_minefield");
    Scene scene;
    Rng rng(3939);
    const MarkModel model;
    std::vector<Vec2> clutter, mines;
    for (int k = 0; k < 27; ++k) clutter.push_back({rng.uniform(10, 90), rng.uniform(10, 90)});
    for (int k = 0; k < 12; ++k) mines.push_back({rng.uniform(10, 90), rng.uniform(10, 90)});
    scene.disks = assign_marks(clutter, mines, model, rng);
    const auto path = dir / "minefield.scene";
    save_scene(scene, path.string());

    const auto out = dir / "navigate.txt";
    REQUIRE(run_cli("navigate --scene " + path.string(), out) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("length=") != std::string::npos);
    CHECK(text.find("disks=39 clutter=27 obstacles=12") != std::string::npos);
}

TEST_CASE("run config parsing") {
    std::istringstream good(
        "root_seed = 99\n"
        "replications = 7\n"
        "out = r.csv\n"
        "jobs = 2\n"
        "\n"
        "[combos]\n"
        "clutter_types = CSR, HC\n"
        "windows = P, V80\n"
        "counts = 20, 40\n"
        "\n"
        "[marks]\n"
        "convention = literal\n");
    const RunConfig rc = parse_run_config(good);
    CHECK(rc.exp.root_seed == 99);
    CHECK(rc.exp.replications == 7);
    CHECK(rc.out == "r.csv");
    CHECK(rc.jobs == 2);
    CHECK(rc.exp.combos.size() == 2 * 2 * 2);
    CHECK(rc.exp.marks.clutter_mean() == Catch::Approx(0.75));  // the swapped reading

    std::istringstream unknown("root_seed = 1\nbogus_key = 3\n");
    CHECK_THROWS_WITH(parse_run_config(unknown),
                      Catch::Matchers::ContainsSubstring("line 2") &&
                          Catch::Matchers::ContainsSubstring("bogus_key"));

    std::istringstream allc("replications = 1\n");
    CHECK(parse_run_config(allc).exp.combos.size() == 570);  // full factorial by default

    std::istringstream badwin("[combos]\nwindows = Z10\n");
    CHECK_THROWS_AS(parse_run_config(badwin), std::invalid_argument);

    std::istringstream badcount("[combos]\ncounts = 25\n");
    CHECK_THROWS_AS(parse_run_config(badcount), ParseError);

    // Hand-set mark parameters are checked for the mean ordering.
    std::istringstream badmarks("[marks]\nclutter_alpha = 9\nclutter_beta = 1\n");
    CHECK_THROWS_WITH(parse_run_config(badmarks),
                      Catch::Matchers::ContainsSubstring("mean"));
}

TEST_CASE("experiment, replay and analyze round trip through the CLI") {
    const auto dir = testsup::fresh_dir("cli_experiment");
    const auto cfg_path = dir / "run.cfg";
    const auto rec_path = dir / "records.csv";
    {
        std::ofstream cfg(cfg_path);
        cfg << "root_seed = 4242\n"
            << "replications = 3\n"
            << "mh_iterations = 20000\n"
            << "out = " << rec_path.string() << "\n"
            << "[combos]\n"
            << "clutter_types = CSR\n"
            << "windows = P, V80\n"
            << "counts = 20, 40, 60\n";
    }
    REQUIRE(run_cli("run-experiment --config " + cfg_path.string()) == 0);
    const auto records = load_records(rec_path.string());
    CHECK(records.size() == 18);

    REQUIRE(run_cli("replay --records " + rec_path.string() + " --config " + cfg_path.string() +
                    " --row 1") == 0);

    const auto summary = dir / "summary.txt";
    REQUIRE(run_cli("analyze --records " + rec_path.string() +
                        " --group-by window --summary --anova --hsd",
                    summary) == 0);
    const std::string text = slurp(summary);
    CHECK(text.find("group,n,mean,sd,se") != std::string::npos);
    CHECK(text.find("P,9,") != std::string::npos);
    CHECK(text.find("source,ss,df,ms,F,p") != std::string::npos);
    CHECK(text.find("group_a,group_b,diff,lo,hi,p_adj") != std::string::npos);
    CHECK(text.find("P,V80,") != std::string::npos);

    const auto trends = dir / "trends.txt";
    REQUIRE(run_cli("analyze --records " + rec_path.string() + " --trend --best", trends) == 0);
    const std::string trend_text = slurp(trends);
    CHECK(trend_text.find("clutter,window,trend,peak_count") != std::string::npos);
    CHECK(trend_text.find("CSR,P,") != std::string::npos);
    CHECK(trend_text.find("CSR,V80,") != std::string::npos);
    CHECK(trend_text.find("clutter,form,best_combo,mean_length") != std::string::npos);
    CHECK(trend_text.find("CSR,overall,") != std::string::npos);
}

TEST_CASE("environment overrides take precedence over the config file") {
    std::istringstream cfg("root_seed = 1\njobs = 1\nreplications = 1\n");
    RunConfig rc = parse_run_config(cfg);
    setenv("CLUTTERNAV_ROOT_SEED", "777", 1);
    setenv("CLUTTERNAV_JOBS", "3", 1);
    apply_env_overrides(rc);
    unsetenv("CLUTTERNAV_ROOT_SEED");
    unsetenv("CLUTTERNAV_JOBS");
    CHECK(rc.exp.root_seed == 777);
    CHECK(rc.jobs == 3);
}
