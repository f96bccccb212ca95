#pragma once
// Shared fixtures and independent checkers for the test suites. Everything
// here re-derives geometry straight from first principles so it can serve as
// an oracle for the library's own indexing.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "cnav/navigator.hpp"
#include "cnav/scene.hpp"

namespace testsup {

// The worked three-disk example: 22x14 lattice, start (11,14), target (11,1),
// side clutter disks at (6,9) and (17,9), a true obstacle at (11,6), marks
// 0.4 / 0.5 / 0.6, radius 4.5, disambiguation cost 5.
inline cnav::Scene three_disk_scene() {
    cnav::Scene s;
    s.lattice = {22, 14};
    s.s = {11, 14};
    s.t = {11, 1};
    s.disambiguation_cost = 5.0;
    s.disks = {
        {1, {6.0, 9.0}, 4.5, 0.4, cnav::Truth::clutter, cnav::DiskState::ambiguous},
        {2, {17.0, 9.0}, 4.5, 0.5, cnav::Truth::clutter, cnav::DiskState::ambiguous},
        {3, {11.0, 6.0}, 4.5, 0.6, cnav::Truth::obstacle, cnav::DiskState::ambiguous},
    };
    return s;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path("cnav_test_tmp") / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Step-by-step replay of a traversal against a fresh copy of the scene,
// independent of the navigator's internals. Verifies that every move uses a
// legal lattice edge that intersects no ambiguous or revealed-obstacle disk
// at the time it is crossed, that disambiguations are performed once, from a
// vertex outside the disk and facing an edge that meets it, and that the
// bookkeeping (walk, totals, final vertex) is consistent.
inline void check_traversal(const cnav::Scene& original, const cnav::TraversalResult& res) {
    using namespace cnav;
    Scene scene = original;  // states reset to the originals
    GridPoint pos = scene.s;
    double movement = 0.0;
    std::size_t walk_idx = 0;
    if (res.walk.empty() || !(res.walk[0] == scene.s)) throw std::logic_error("walk must start at s");
    for (const TraversalStep& st : res.steps) {
        if (st.kind == TraversalStep::Kind::move) {
            if (!(st.from == pos)) throw std::logic_error("move does not start at current vertex");
            const int di = std::abs(st.to.i - st.from.i);
            const int dj = std::abs(st.to.j - st.from.j);
            if (di > 1 || dj > 1 || (di == 0 && dj == 0))
                throw std::logic_error("move is not a lattice edge");
            const double expect_len = (di + dj == 2) ? std::sqrt(2.0) : 1.0;
            if (st.length != expect_len) throw std::logic_error("move length wrong");
            const Vec2 a = to_vec(st.from), b = to_vec(st.to);
            for (const SceneDisk& d : scene.disks) {
                if (d.state == DiskState::known_clutter) continue;
                if (segment_intersects_disk(a, b, d.disk()))
                    throw std::logic_error("move crosses an ambiguous or obstacle disk");
            }
            movement += expect_len;
            pos = st.to;
            ++walk_idx;
            if (walk_idx >= res.walk.size() || !(res.walk[walk_idx] == pos))
                throw std::logic_error("walk does not match move sequence");
        } else {
            SceneDisk* disk = nullptr;
            for (SceneDisk& d : scene.disks)
                if (d.id == st.disk_id) disk = &d;
            if (!disk) throw std::logic_error("disambiguation of unknown disk");
            if (disk->state != DiskState::ambiguous)
                throw std::logic_error("disk disambiguated twice");
            if (!(st.from == pos)) throw std::logic_error("disambiguation away from position");
            if (dist(to_vec(pos), disk->center) < disk->radius)
                throw std::logic_error("disambiguation vertex inside the disk");
            bool faces = false;
            const GridPoint p = pos;
            for (int di = -1; di <= 1 && !faces; ++di) {
                for (int dj = -1; dj <= 1 && !faces; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const GridPoint q{p.i + di, p.j + dj};
                    if (q.i < 1 || q.i > scene.lattice.i_max || q.j < 1 ||
                        q.j > scene.lattice.j_max)
                        continue;
                    if (segment_intersects_disk(to_vec(p), to_vec(q), disk->disk())) faces = true;
                }
            }
            if (!faces) throw std::logic_error("no incident edge meets the disambiguated disk");
            if (st.revealed != disk->truth) throw std::logic_error("revealed status wrong");
            disk->state = disk->truth == Truth::obstacle ? DiskState::known_obstacle
                                                         : DiskState::known_clutter;
        }
    }
    if (!(pos == scene.t)) throw std::logic_error("traversal does not end at t");
    const double expected =
        movement + original.disambiguation_cost * static_cast<double>(res.disambiguations.size());
    if (std::fabs(expected - res.total_length) > 1e-9)
        throw std::logic_error("total_length does not equal movement plus disambiguation costs");
    if (walk_idx + 1 != res.walk.size()) throw std::logic_error("walk has extra vertices");
}

}  // namespace testsup
