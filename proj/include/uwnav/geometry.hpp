#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>

namespace uwnav {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Clearance reported when there are no obstacles at all.
inline constexpr double kNoObstacleClearance = 1e9;

/// Tolerance used where exact comparison is impossible (meters).
inline constexpr double kGeomEps = 1e-9;

struct Vec2 {
    double x{};
    double y{};

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Planar pose in the image frame. Heading is measured from +x, counterclockwise,
/// and kept wrapped to [-pi, pi).
struct Pose2D {
    Vec2 position;
    double heading{};
};

struct CircleObstacle {
    Vec2 center;
    double radius{};
};

/// Convex workspace polygon with four counterclockwise vertices.
class Quadrilateral {
public:
    /// Throws std::invalid_argument unless the vertices form a convex,
    /// counterclockwise quadrilateral with positive area.
    explicit Quadrilateral(std::array<Vec2, 4> vertices);

    static Quadrilateral axis_aligned(double width, double height);

    const std::array<Vec2, 4>& vertices() const { return vertices_; }
    Vec2 vertex(std::size_t i) const { return vertices_[i % 4]; }
    double area() const;
    Vec2 centroid() const;
    /// Largest distance between any two vertices.
    double diameter() const;

private:
    std::array<Vec2, 4> vertices_;
};

/// Segment on the workspace boundary; its midpoint is the navigation target
/// (exit) or the start pose (entry).
struct Gate {
    Vec2 a;
    Vec2 b;

    Vec2 center() const { return (a + b) * 0.5; }
    double width() const { return distance(a, b); }
};

/// Index of the workspace edge containing the gate, or nullopt.
std::optional<std::size_t> gate_edge(const Gate& gate, const Quadrilateral& q);

/// NED (north, east) -> image frame: (x_img, y_img) = (y_ned, -x_ned).
constexpr Vec2 ned_to_img(Vec2 ned) { return {ned.y, -ned.x}; }
constexpr Vec2 img_to_ned(Vec2 img) { return {-img.y, img.x}; }

/// Wraps to [-pi, pi). Values already in range are returned unchanged.
double wrap_angle(double a);

/// Boundary counts as inside (within kGeomEps).
bool point_in_quad(Vec2 p, const Quadrilateral& q);

/// Distance along a unit direction to the first boundary hit of q.
/// nullopt iff origin lies outside q.
std::optional<double> ray_quad_intersect(Vec2 origin, Vec2 direction, const Quadrilateral& q);

/// min_i(|p - o_i| - r_i - r_robot - margin); kNoObstacleClearance for an empty set.
double min_clearance(Vec2 p, std::span<const CircleObstacle> obstacles, double r_robot,
                     double margin);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// True iff segment ab comes within radius + inflation of the circle center.
bool segment_hits_circle(Vec2 a, Vec2 b, const CircleObstacle& c, double inflation);

/// Closed-segment intersection test (touching counts).
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

}  // namespace uwnav
