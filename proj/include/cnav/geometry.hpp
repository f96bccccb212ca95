#pragma once
// Planar primitives used by the obstacle-field simulator: open disks,
// simple polygons, segment/disk proximity tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cnav {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// An open disk: interior only, the boundary circle is not part of the region.
struct Disk {
    Vec2 center;
    double radius = 0.0;

    Disk() = default;
    Disk(Vec2 c, double r) : center(c), radius(r) {
        if (!(r > 0.0)) throw std::invalid_argument("Disk: radius must be > 0");
    }

    bool contains(Vec2 p) const { return dist(p, center) < radius; }
};

// Distance from p to the closest point of segment [a,b]; a == b degenerates
// to a point test.
inline double min_distance_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::fmax(0.0, std::fmin(1.0, t));
    return dist(p, a + t * ab);
}

// True iff segment [a,b] meets the open disk (strict inequality, so a segment
// tangent to the boundary does not intersect).
inline bool segment_intersects_disk(Vec2 a, Vec2 b, const Disk& d) {
    return min_distance_point_segment(d.center, a, b) < d.radius;
}

// True iff segment [a,b] crosses the boundary circle of d, i.e. it dips into
// the open disk while not lying entirely inside it. A segment fully interior
// to the disk does not cross; neither does a tangent one.
inline bool segment_crosses_disk_boundary(Vec2 a, Vec2 b, const Disk& d) {
    const double lo = min_distance_point_segment(d.center, a, b);
    const double hi = std::fmax(dist(a, d.center), dist(b, d.center));
    return lo < d.radius && hi >= d.radius;
}

namespace detail {

inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::fmin(a.x, b.x) <= p.x && p.x <= std::fmax(a.x, b.x) &&
           std::fmin(a.y, b.y) <= p.y && p.y <= std::fmax(a.y, b.y);
}

// Closed segment intersection test (shared endpoints count).
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double o1 = orient(p1, p2, q1);
    const double o2 = orient(p1, p2, q2);
    const double o3 = orient(q1, q2, p1);
    const double o4 = orient(q1, q2, p2);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
        o4 != 0)
        return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace detail

// A simple polygon. Vertex order is normalized to counter-clockwise on
// construction; self-intersecting input is rejected.
class Polygon {
  public:
    explicit Polygon(std::vector<Vec2> vertices) : v_(std::move(vertices)) {
        if (v_.size() < 3) throw std::invalid_argument("Polygon: need at least 3 vertices");
        validate_simple();
        if (signed_area() < 0.0) std::reverse(v_.begin(), v_.end());
    }

    const std::vector<Vec2>& vertices() const { return v_; }
    std::size_t size() const { return v_.size(); }

    double signed_area() const {
        double s = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const Vec2& a = v_[i];
            const Vec2& b = v_[(i + 1) % v_.size()];
            s += cross(a, b);
        }
        return 0.5 * s;
    }

    double area() const { return std::fabs(signed_area()); }

    void bounding_box(Vec2& lo, Vec2& hi) const {
        lo = hi = v_[0];
        for (const Vec2& p : v_) {
            lo.x = std::fmin(lo.x, p.x);
            lo.y = std::fmin(lo.y, p.y);
            hi.x = std::fmax(hi.x, p.x);
            hi.y = std::fmax(hi.y, p.y);
        }
    }

  private:
    std::vector<Vec2> v_;

    void validate_simple() const {
        const std::size_t n = v_.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
                if (adjacent) continue;
                if (detail::segments_intersect(v_[i], v_[(i + 1) % n], v_[j], v_[(j + 1) % n]))
                    throw std::invalid_argument("Polygon: edges self-intersect");
            }
        }
    }
};

// Membership test with boundary points counting as inside. Interior points
// are classified by even-odd ray casting with the half-open vertex rule
// ((ay > py) != (by > py)), which acts as an implicit downward perturbation
// of rays that would pass through a vertex.
inline bool point_in_polygon(Vec2 p, const Polygon& poly) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (min_distance_point_segment(p, v[i], v[(i + 1) % n]) < 1e-9) return true;
    }
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_hit = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_hit) inside = !inside;
        }
    }
    return inside;
}

}  // namespace cnav
