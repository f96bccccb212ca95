#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "cnav/rng.hpp"
#include "cnav/scene.hpp"
#include "support/common.hpp"

using namespace cnav;

TEST_CASE("assign_marks hits the configured Beta means") {
    const MarkModel model;  // clutter mean 0.25, obstacle mean 0.75
    std::vector<Vec2> pts(100000, Vec2{50, 50});
    Rng rng(42);
    const auto clutter = assign_marks(pts, {}, model, rng);
    double m = 0;
    for (const auto& d : clutter) m += d.mark;
    CHECK(m / clutter.size() == Catch::Approx(0.25).margin(0.01));

    Rng rng2(43);
    const auto obstacles = assign_marks({}, pts, model, rng2);
    m = 0;
    for (const auto& d : obstacles) m += d.mark;
    CHECK(m / obstacles.size() == Catch::Approx(0.75).margin(0.01));

    Rng rng3(44);
    CHECK(assign_marks({}, {}, model, rng3).empty());
}

TEST_CASE("assign_marks sets truths, states and stays inside (0,1)") {
    Rng rng(1);
    const auto disks = assign_marks({{1, 1}, {2, 2}}, {{3, 3}}, MarkModel{}, rng);
    REQUIRE(disks.size() == 3);
    CHECK(disks[0].truth == Truth::clutter);
    CHECK(disks[2].truth == Truth::obstacle);
    for (const auto& d : disks) {
        CHECK(d.state == DiskState::ambiguous);
        CHECK(d.mark >= kMarkFloor);
        CHECK(d.mark <= kMarkCeil);
    }
    // Same seed, same marks, bit for bit.
    Rng rng_a(9), rng_b(9);
    const auto a = assign_marks({{1, 1}, {2, 2}}, {{3, 3}}, MarkModel{}, rng_a);
    const auto b = assign_marks({{1, 1}, {2, 2}}, {{3, 3}}, MarkModel{}, rng_b);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].mark == b[k].mark);
}

TEST_CASE("mark model validation") {
    CHECK_NOTHROW(MarkModel{}.validate());
    CHECK_THROWS_AS(MarkModel::swapped().validate(), std::invalid_argument);  // deliberate
    CHECK(MarkModel::swapped().clutter_mean() == Catch::Approx(0.75));
}

TEST_CASE("disambiguate reveals the truth exactly once") {
    Scene scene = testsup::three_disk_scene();
    CHECK(disambiguate(scene, 3) == Truth::obstacle);
    CHECK(scene.disks[2].state == DiskState::known_obstacle);
    CHECK(disambiguate(scene, 1) == Truth::clutter);
    CHECK(scene.disks[0].state == DiskState::known_clutter);
    CHECK_THROWS_AS(disambiguate(scene, 3), ContractError);
    CHECK_THROWS_AS(disambiguate(scene, 99), ContractError);
    // Only the disambiguated disks are revealed.
    CHECK(scene.disks[1].state == DiskState::ambiguous);
}

TEST_CASE("random disambiguation sequences keep states consistent with truths") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        Scene scene;
        scene.lattice = {20, 20};
        scene.s = {1, 20};
        scene.t = {20, 1};
        const int n = 1 + static_cast<int>(rng.uniform_int(6));
        for (int k = 0; k < n; ++k) {
            SceneDisk d;
            d.id = k;
            d.center = {rng.uniform(5, 15), rng.uniform(5, 15)};
            d.radius = 1.0;
            d.mark = clamp_mark(rng.uniform());
            d.truth = rng.uniform() < 0.5 ? Truth::clutter : Truth::obstacle;
            scene.disks.push_back(d);
        }
        std::vector<int> order;
        for (int k = 0; k < n; ++k)
            if (rng.uniform() < 0.7) order.push_back(k);
        for (int id : order) CHECK(disambiguate(scene, id) == scene.disks[id].truth);
        for (const auto& d : scene.disks) {
            const bool revealed =
                std::find(order.begin(), order.end(), d.id) != order.end();
            if (!revealed) {
                CHECK(d.state == DiskState::ambiguous);
            } else if (d.truth == Truth::obstacle) {
                CHECK(d.state == DiskState::known_obstacle);
            } else {
                CHECK(d.state == DiskState::known_clutter);
            }
        }
    }
}

TEST_CASE("scene round trip is lossless") {
    const Scene scene = testsup::three_disk_scene();
    std::ostringstream os;
    save_scene(scene, os);
    std::istringstream is(os.str());
    const Scene back = load_scene(is);
    CHECK(back.lattice.i_max == scene.lattice.i_max);
    CHECK(back.lattice.j_max == scene.lattice.j_max);
    CHECK(back.s == scene.s);
    CHECK(back.t == scene.t);
    CHECK(back.disambiguation_cost == scene.disambiguation_cost);
    REQUIRE(back.disks.size() == scene.disks.size());
    for (std::size_t k = 0; k < scene.disks.size(); ++k) {
        CHECK(back.disks[k].id == scene.disks[k].id);
        CHECK(back.disks[k].center.x == scene.disks[k].center.x);
        CHECK(back.disks[k].center.y == scene.disks[k].center.y);
        CHECK(back.disks[k].radius == scene.disks[k].radius);
        CHECK(back.disks[k].mark == scene.disks[k].mark);
        CHECK(back.disks[k].truth == scene.disks[k].truth);
        CHECK(back.disks[k].state == DiskState::ambiguous);
    }
}

TEST_CASE("random scene round trips preserve every double exactly") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        Scene scene;
        scene.lattice = {40, 40};
        scene.s = {1, 40};
        scene.t = {40, 1};
        scene.disambiguation_cost = rng.uniform(0.5, 10.0);
        const int n = static_cast<int>(rng.uniform_int(12));
        for (int k = 0; k < n; ++k) {
            SceneDisk d;
            d.id = k;
            d.center = {rng.uniform(5, 35), rng.uniform(5, 35)};
            d.radius = rng.uniform(0.5, 3.5);
            d.mark = clamp_mark(rng.uniform());
            d.truth = rng.uniform() < 0.5 ? Truth::clutter : Truth::obstacle;
            scene.disks.push_back(d);
        }
        std::ostringstream os;
        save_scene(scene, os);
        std::istringstream is(os.str());
        const Scene back = load_scene(is);
        REQUIRE(back.disks.size() == scene.disks.size());
        for (std::size_t k = 0; k < scene.disks.size(); ++k) {
            CHECK(back.disks[k].center.x == scene.disks[k].center.x);
            CHECK(back.disks[k].center.y == scene.disks[k].center.y);
            CHECK(back.disks[k].radius == scene.disks[k].radius);
            CHECK(back.disks[k].mark == scene.disks[k].mark);
        }
        CHECK(back.disambiguation_cost == scene.disambiguation_cost);
    }
}

namespace {

Scene parse_scene_text(const std::string& text) {
    std::istringstream is(text);
    return load_scene(is);
}

}  // namespace

TEST_CASE("scene file errors carry line numbers") {
    const std::string header = "id,x,y,radius,rho,truth\n";
    CHECK_THROWS_WITH(parse_scene_text(header + "1,50,50,4.5,1.2,clutter\n"),
                      Catch::Matchers::ContainsSubstring("line 2") &&
                          Catch::Matchers::ContainsSubstring("(0,1]"));
    CHECK_THROWS_WITH(parse_scene_text(header + "1,50,50,4.5,0.5,clutter\n"
                                                "1,60,60,4.5,0.5,clutter\n"),
                      Catch::Matchers::ContainsSubstring("line 3") &&
                          Catch::Matchers::ContainsSubstring("duplicate id"));
    CHECK_THROWS_WITH(parse_scene_text(header + "1,50,abc,4.5,0.5,clutter\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_scene_text(header + "1,50,50,4.5,0.5,mine\n"),
                      Catch::Matchers::ContainsSubstring("truth"));
    CHECK_THROWS_AS(parse_scene_text("x,y\n1,2\n"), ParseError);
    // rho = 1 is legal input (the revealed-obstacle convention).
    CHECK_NOTHROW(parse_scene_text(header + "1,50,50,4.5,1,clutter\n"));
}

TEST_CASE("clutter and obstacle counts are reported") {
    std::ostringstream os;
    os << "# lattice 100 100\n# s 50 100\n# t 50 1\n# cost 5\n";
    os << "id,x,y,radius,rho,truth\n";
    int id = 0;
    for (int k = 0; k < 27; ++k)
        os << id++ << ',' << 10 + k * 2.5 << ",20,4.5,0.3,clutter\n";
    for (int k = 0; k < 12; ++k)
        os << id++ << ',' << 15 + k * 5.0 << ",60,4.5,0.7,obstacle\n";
    const Scene scene = parse_scene_text(os.str());
    CHECK(scene.disks.size() == 39);
    CHECK(scene.clutter_count() == 27);
    CHECK(scene.obstacle_count() == 12);
}

TEST_CASE("scenes with s or t inside a disk are rejected") {
    Scene scene = testsup::three_disk_scene();
    scene.disks[0].center = {11.0, 13.5};  // start (11,14) is now strictly inside
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
}
