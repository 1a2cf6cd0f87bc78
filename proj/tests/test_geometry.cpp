#include <gtest/gtest.h>

#include <cmath>

#include "uwnav/geometry.hpp"
#include "uwnav/rng.hpp"

using namespace uwnav;

namespace {

Quadrilateral skewed() { return Quadrilateral({Vec2{0, 0}, Vec2{10, -2}, Vec2{12, 7}, Vec2{-1, 5}}); }

}  // namespace

TEST(Frames, RoundTripIsExact) {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
        EXPECT_EQ(img_to_ned(ned_to_img(p)), p);
        EXPECT_EQ(ned_to_img(img_to_ned(p)), p);
    }
}

TEST(Frames, NorthMapsToMinusY) {
    EXPECT_EQ(ned_to_img({1, 0}), (Vec2{0, -1}));
    EXPECT_EQ(ned_to_img({0, 1}), (Vec2{1, 0}));
}

TEST(WrapAngle, StaysInHalfOpenRange) {
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), -kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), -kPi);
    EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
    EXPECT_EQ(wrap_angle(0.25), 0.25);
    Rng rng(4);
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(-50, 50);
        const double w = wrap_angle(a);
        EXPECT_GE(w, -kPi);
        EXPECT_LT(w, kPi);
        EXPECT_NEAR(std::remainder(a - w, kTwoPi), 0.0, 1e-12);
    }
}

TEST(Quadrilateral, RejectsBadShapes) {
    EXPECT_THROW(Quadrilateral({Vec2{0, 0}, Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}}), std::invalid_argument);  // clockwise
    EXPECT_THROW(Quadrilateral({Vec2{0, 0}, Vec2{2, 0}, Vec2{0.5, 0.5}, Vec2{0, 2}}), std::invalid_argument);
    EXPECT_THROW(Quadrilateral({Vec2{0, 0}, Vec2{1, 0}, Vec2{2, 0}, Vec2{3, 0}}), std::invalid_argument);
    EXPECT_THROW(Quadrilateral({Vec2{0, 0}, Vec2{1, 0}, Vec2{1, NAN}, Vec2{0, 1}}), std::invalid_argument);
    EXPECT_NO_THROW(skewed());
}

TEST(Quadrilateral, AreaAndDiameter) {
    const auto q = Quadrilateral::axis_aligned(100, 50);
    EXPECT_DOUBLE_EQ(q.area(), 5000.0);
    EXPECT_DOUBLE_EQ(q.diameter(), std::hypot(100.0, 50.0));
    EXPECT_EQ(q.centroid(), (Vec2{50, 25}));
}

TEST(PointInQuad, BoundaryCountsAsInside) {
    const auto q = Quadrilateral::axis_aligned(10, 5);
    EXPECT_TRUE(point_in_quad({0, 0}, q));
    EXPECT_TRUE(point_in_quad({10, 2.5}, q));
    EXPECT_TRUE(point_in_quad({5, 5}, q));
    EXPECT_FALSE(point_in_quad({10.001, 2.5}, q));
    EXPECT_FALSE(point_in_quad({-1e-6, 1}, q));
}

TEST(PointInQuad, MatchesTriangleSplit) {
    // Independent oracle: a convex quad is the union of triangles (v0,v1,v2) and (v0,v2,v3).
    const auto q = skewed();
    const auto& v = q.vertices();
    auto in_tri = [](Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
        return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
    };
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 p{rng.uniform(-3, 14), rng.uniform(-4, 9)};
        const bool oracle = in_tri(p, v[0], v[1], v[2]) || in_tri(p, v[0], v[2], v[3]);
        EXPECT_EQ(point_in_quad(p, q), oracle) << p.x << ' ' << p.y;
    }
}

TEST(RayQuad, AxisAlignedDistances) {
    const auto q = Quadrilateral::axis_aligned(100, 50);
    EXPECT_DOUBLE_EQ(*ray_quad_intersect({10, 25}, {1, 0}, q), 90.0);
    EXPECT_DOUBLE_EQ(*ray_quad_intersect({10, 25}, {-1, 0}, q), 10.0);
    EXPECT_DOUBLE_EQ(*ray_quad_intersect({10, 25}, {0, 1}, q), 25.0);
    EXPECT_FALSE(ray_quad_intersect({-5, 25}, {1, 0}, q).has_value());
}

TEST(RayQuad, MatchesBisection) {
    const auto q = skewed();
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 o{rng.uniform(0, 10), rng.uniform(0, 5)};
        if (!point_in_quad(o, q)) continue;
        const Vec2 d = unit_from_angle(rng.uniform(-kPi, kPi));
        double lo = 0, hi = 100;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (point_in_quad(o + d * mid, q) ? lo : hi) = mid;
        }
        const auto t = ray_quad_intersect(o, d, q);
        ASSERT_TRUE(t.has_value());
        EXPECT_NEAR(*t, lo, 1e-6);
    }
}

TEST(Clearance, EmptyObstacleListIsSentinel) {
    EXPECT_EQ(min_clearance({1, 2}, {}, 0.5, 0.5), kNoObstacleClearance);
}

TEST(Clearance, SubtractsRadiusRobotAndMargin) {
    const std::vector<CircleObstacle> obs{{{10, 0}, 2}, {{0, 5}, 1}};
    EXPECT_DOUBLE_EQ(min_clearance({0, 0}, obs, 0.5, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(min_clearance({10, 0}, obs, 0.5, 0.5), -3.0);
}

TEST(Segments, PointSegmentDistance) {
    EXPECT_DOUBLE_EQ(point_segment_distance({5, 3}, {0, 0}, {10, 0}), 3.0);
    EXPECT_DOUBLE_EQ(point_segment_distance({-3, 4}, {0, 0}, {10, 0}), 5.0);
    EXPECT_DOUBLE_EQ(point_segment_distance({1, 1}, {2, 2}, {2, 2}), std::sqrt(2.0));
}

TEST(Segments, SweptCircleHit) {
    const CircleObstacle c{{5, 1.5}, 0.5};
    EXPECT_TRUE(segment_hits_circle({0, 0}, {10, 0}, c, 1.0));
    EXPECT_FALSE(segment_hits_circle({0, 0}, {10, 0}, c, 0.9));
    // Endpoints short of the circle, but the segment passes through it.
    EXPECT_TRUE(segment_hits_circle({4, 1.5}, {6, 1.5}, {{5, 1.5}, 0.1}, 0.0));
}

TEST(Segments, Intersection) {
    EXPECT_TRUE(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    EXPECT_FALSE(segments_intersect({0, 0}, {1, 1}, {2, 0}, {3, -1}));
    EXPECT_TRUE(segments_intersect({0, 0}, {1, 0}, {1, 0}, {1, 5}));  // touching endpoint
    EXPECT_TRUE(segments_intersect({0, 0}, {4, 0}, {2, 0}, {6, 0}));  // collinear overlap
    EXPECT_FALSE(segments_intersect({0, 0}, {1, 0}, {2, 0}, {3, 0}));
}

TEST(Gate, EdgeLookup) {
    const auto q = Quadrilateral::axis_aligned(100, 50);
    EXPECT_EQ(gate_edge({{100, 20}, {100, 30}}, q), std::optional<std::size_t>(1));
    EXPECT_EQ(gate_edge({{0, 30}, {0, 20}}, q), std::optional<std::size_t>(3));
    EXPECT_FALSE(gate_edge({{50, 20}, {50, 30}}, q).has_value());
}
