#include "uwnav/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace uwnav {

Quadrilateral::Quadrilateral(std::array<Vec2, 4> vertices) : vertices_(vertices) {
    for (const auto& v : vertices_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            throw std::invalid_argument("quadrilateral vertex is not finite");
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 e0 = vertex(i + 1) - vertex(i);
        const Vec2 e1 = vertex(i + 2) - vertex(i + 1);
        if (cross(e0, e1) <= 0.0) {
            throw std::invalid_argument("quadrilateral must be convex and counterclockwise");
        }
    }
    if (area() <= 0.0) throw std::invalid_argument("quadrilateral has no area");
}

Quadrilateral Quadrilateral::axis_aligned(double width, double height) {
    return Quadrilateral({Vec2{0, 0}, Vec2{width, 0}, Vec2{width, height}, Vec2{0, height}});
}

double Quadrilateral::area() const {
    double twice = 0.0;
    for (std::size_t i = 0; i < 4; ++i) twice += cross(vertex(i), vertex(i + 1));
    return 0.5 * twice;
}

Vec2 Quadrilateral::centroid() const {
    // Area-weighted centroid of the two triangles (v0 v1 v2) and (v0 v2 v3).
    const Vec2 v0 = vertex(0), v1 = vertex(1), v2 = vertex(2), v3 = vertex(3);
    const double a1 = 0.5 * cross(v1 - v0, v2 - v0);
    const double a2 = 0.5 * cross(v2 - v0, v3 - v0);
    const Vec2 c1 = (v0 + v1 + v2) * (1.0 / 3.0);
    const Vec2 c2 = (v0 + v2 + v3) * (1.0 / 3.0);
    return (c1 * a1 + c2 * a2) * (1.0 / (a1 + a2));
}

double Quadrilateral::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) best = std::max(best, distance(vertex(i), vertex(j)));
    return best;
}

std::optional<std::size_t> gate_edge(const Gate& gate, const Quadrilateral& q) {
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 a = q.vertex(i), b = q.vertex(i + 1);
        if (point_segment_distance(gate.a, a, b) <= kGeomEps &&
            point_segment_distance(gate.b, a, b) <= kGeomEps) {
            return i;
        }
    }
    return std::nullopt;
}

double wrap_angle(double a) {
    if (a >= -kPi && a < kPi) return a;
    double r = std::fmod(a + kPi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    double out = r - kPi;
    // Rounding in the shift can land exactly on +pi.
    if (out >= kPi) out -= kTwoPi;
    if (out < -kPi) out = -kPi;
    return out;
}

bool point_in_quad(Vec2 p, const Quadrilateral& q) {
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 a = q.vertex(i), b = q.vertex(i + 1);
        const Vec2 edge = b - a;
        // Signed distance to the edge line, positive on the interior side.
        const double signed_dist = cross(edge, p - a) / norm(edge);
        if (signed_dist < -kGeomEps) return false;
    }
    return true;
}

std::optional<double> ray_quad_intersect(Vec2 origin, Vec2 direction, const Quadrilateral& q) {
    if (!point_in_quad(origin, q)) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 a = q.vertex(i), b = q.vertex(i + 1);
        const Vec2 edge = b - a;
        const double len = norm(edge);
        const Vec2 outward{edge.y / len, -edge.x / len};
        const double approach = dot(direction, outward);
        if (approach <= 0.0) continue;
        const double gap = std::max(0.0, dot(a - origin, outward));
        best = std::min(best, gap / approach);
    }
    return best;
}

double min_clearance(Vec2 p, std::span<const CircleObstacle> obstacles, double r_robot,
                     double margin) {
    double best = kNoObstacleClearance;
    for (const auto& o : obstacles) {
        best = std::min(best, distance(p, o.center) - o.radius - r_robot - margin);
    }
    return best;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

bool segment_hits_circle(Vec2 a, Vec2 b, const CircleObstacle& c, double inflation) {
    return point_segment_distance(c.center, a, b) <= c.radius + inflation;
}

namespace {

int orientation_sign(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const int d1 = orientation_sign(q1, q2, p1);
    const int d2 = orientation_sign(q1, q2, p2);
    const int d3 = orientation_sign(p1, p2, q1);
    const int d4 = orientation_sign(p1, p2, q2);
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace uwnav
