#pragma once
// The 19 obstacle placement windows: the full square P plus 80-unit-long,
// 10-unit-wide linear (L), V- and W-shaped polygon bands indexed by the
// y-coordinate of their top-left corner, with uniform sampling of obstacle
// centers inside each polygon.

#include <string>
#include <vector>

#include "cnav/geometry.hpp"
#include "cnav/pointproc.hpp"
#include "cnav/rng.hpp"

namespace cnav {

struct ObstacleWindow {
    std::string code;  // P, L90..L20, V90..V50, W90..W50
    int index = 0;     // 1..19, in the order P, L90..L20, V90..V50, W90..W50
    Polygon polygon;
};

inline const std::vector<std::string>& all_window_codes() {
    static const std::vector<std::string> codes = {
        "P",   "L90", "L80", "L70", "L60", "L50", "L40", "L30", "L20", "V90",
        "V80", "V70", "V60", "V50", "W90", "W80", "W70", "W60", "W50"};
    return codes;
}

inline ObstacleWindow make_window(const std::string& code) {
    const auto& codes = all_window_codes();
    int index = 0;
    for (std::size_t k = 0; k < codes.size(); ++k) {
        if (codes[k] == code) {
            index = static_cast<int>(k) + 1;
            break;
        }
    }
    if (index == 0) throw std::invalid_argument("make_window: unknown window code '" + code + "'");

    if (code == "P") {
        return ObstacleWindow{code, index,
                              Polygon({{10, 10}, {90, 10}, {90, 90}, {10, 90}})};
    }
    const double y = std::stod(code.substr(1));
    std::vector<Vec2> corners;
    switch (code[0]) {
        case 'L':
            corners = {{10, y}, {90, y}, {90, y - 10}, {10, y - 10}};
            break;
        case 'V':
            corners = {{10, y},      {50, y - 30}, {90, y},
                       {90, y - 10}, {50, y - 40}, {10, y - 10}};
            break;
        case 'W':
            corners = {{10, y},      {30, y - 30}, {50, y},      {70, y - 30}, {90, y},
                       {90, y - 10}, {70, y - 40}, {50, y - 10}, {30, y - 40}, {10, y - 10}};
            break;
    }
    return ObstacleWindow{code, index, Polygon(std::move(corners))};
}

inline std::vector<ObstacleWindow> all_windows() {
    std::vector<ObstacleWindow> out;
    for (const auto& c : all_window_codes()) out.push_back(make_window(c));
    return out;
}

struct PlacementSpec {
    ObstacleWindow window;
    int n_obstacles = 0;

    void validate() const {
        if (n_obstacles < 1) throw std::invalid_argument("PlacementSpec: need n_obstacles >= 1");
    }
};

// Exactly n i.i.d. uniform points in the polygon, by rejection from its
// bounding box.
inline PointPattern sample_obstacles(const PlacementSpec& spec, Rng& rng) {
    spec.validate();
    Vec2 lo, hi;
    spec.window.polygon.bounding_box(lo, hi);
    PointPattern pat;
    pat.window = Window{lo.x, hi.x, lo.y, hi.y};
    pat.points.reserve(spec.n_obstacles);
    while (static_cast<int>(pat.points.size()) < spec.n_obstacles) {
        const Vec2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
        if (point_in_polygon(p, spec.window.polygon)) pat.points.push_back(p);
    }
    return pat;
}

}  // namespace cnav
