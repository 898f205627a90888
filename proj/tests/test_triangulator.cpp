#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/triangulator.hpp"

using namespace eigenlocal;

namespace {

double area_of(const PieceMesh& m) {
    double a = 0.0;
    for (const auto& t : m.triangles) a += 0.5 * orient(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    return a;
}

PieceInput square_piece(double te) {
    PieceInput in;
    in.chains = {{{0, 0}, {1, 0}}, {{1, 0}, {1, 1}}, {{1, 1}, {0, 1}}, {{0, 1}, {0, 0}}};
    in.target_edge = te;
    return in;
}

}  // namespace

TEST(MinAngle, KnownTriangles) {
    EXPECT_NEAR(min_angle_deg({0, 0}, {1, 0}, {0, 1}), 45.0, 1e-12);
    EXPECT_NEAR(min_angle_deg({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}), 60.0, 1e-12);
}

TEST(MeshPiece, SquareQualityAndArea) {
    const PieceMesh m = mesh_piece(square_piece(0.1));
    EXPECT_NEAR(area_of(m), 1.0, 1e-12);
    for (const auto& t : m.triangles) {
        EXPECT_GT(orient(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]), 0.0);
        EXPECT_GE(min_angle_deg(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]), 20.0);
    }
    ASSERT_EQ(m.chains.size(), 4u);
    for (const auto& c : m.chains) {
        EXPECT_GE(c.size(), 2u);
        for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(distance(c[i - 1], c[i]), 0.1 * 1.5);
    }
}

TEST(MeshPiece, NonConvexPiece) {
    PieceInput in;
    // L-shape.
    in.chains = {{{0, 0}, {2, 0}}, {{2, 0}, {2, 1}}, {{2, 1}, {1, 1}}, {{1, 1}, {1, 2}}, {{1, 2}, {0, 2}},
                 {{0, 2}, {0, 0}}};
    in.target_edge = 0.15;
    const PieceMesh m = mesh_piece(in);
    EXPECT_NEAR(area_of(m), 3.0, 1e-12);
}

TEST(MeshPiece, AcuteCornerIsHandled) {
    PieceInput in;
    // 30 degree wedge.
    const double a = std::numbers::pi / 6.0;
    in.chains = {{{0, 0}, {1, 0}}, {{1, 0}, {std::cos(a), std::sin(a)}}, {{std::cos(a), std::sin(a)}, {0, 0}}};
    in.target_edge = 0.08;
    const PieceMesh m = mesh_piece(in);
    EXPECT_NEAR(area_of(m), 0.5 * std::sin(a) * (1.0), 1e-12);
    double worst = 180.0;
    for (const auto& t : m.triangles)
        worst = std::min(worst, min_angle_deg(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
    EXPECT_GE(worst, 20.0);
}

TEST(MeshPiece, PresetChainPointsAreKept) {
    PieceInput in = square_piece(0.2);
    in.chains[0] = {{0, 0}, {0.13, 0}, {0.5, 0}, {1, 0}};
    const PieceMesh m = mesh_piece(in);
    for (Point2 p : {Point2{0.13, 0}, Point2{0.5, 0}}) {
        bool found = false;
        for (Point2 q : m.vertices) found = found || distance(p, q) < 1e-15;
        EXPECT_TRUE(found);
    }
}

TEST(MeshPiece, DeterministicForFixedSeed) {
    const PieceMesh a = mesh_piece(square_piece(0.07));
    const PieceMesh b = mesh_piece(square_piece(0.07));
    EXPECT_EQ(a.vertices, b.vertices);
    EXPECT_EQ(a.triangles, b.triangles);
}

TEST(MeshPiece, BrokenLoopRejected) {
    PieceInput in = square_piece(0.1);
    in.chains[1] = {{1, 0.1}, {1, 1}};
    EXPECT_ANY_THROW(mesh_piece(in));
}
