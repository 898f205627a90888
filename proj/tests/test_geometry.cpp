#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/geometry.hpp"

using namespace eigenlocal;

namespace {

const std::vector<DomainFamily> kFamilies{DomainFamily::DiamondBox, DomainFamily::DiscBox,
                                          DomainFamily::RoomsAndPassage};

PolygonRegion unit_square() { return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, RegionTag::Omega1}; }

}  // namespace

TEST(Reflect, SwapsCoordinatesAcrossDiagonal) {
    const auto line = ReflectionLine::through({0, 0}, {1, 1});
    const Point2 r = reflect_point({0.2, 0.7}, line);
    EXPECT_NEAR(r.x, 0.7, 1e-15);
    EXPECT_NEAR(r.y, 0.2, 1e-15);
    const Point2 f = reflect_point({0.5, 0.5}, line);
    EXPECT_NEAR(f.x, 0.5, 1e-15);
    EXPECT_NEAR(f.y, 0.5, 1e-15);
}

TEST(Reflect, IsAnInvolutionOnRandomPoints) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto line = ReflectionLine::through({U(rng), U(rng)}, {U(rng), U(rng) + 7.0});
        const Point2 q{U(rng), U(rng)};
        const Point2 back = reflect_point(reflect_point(q, line), line);
        EXPECT_NEAR(back.x, q.x, 1e-12);
        EXPECT_NEAR(back.y, q.y, 1e-12);
    }
}

TEST(Reflect, ZeroDirectionRejected) { EXPECT_THROW(ReflectionLine::through({0, 0}, {0, 0}), ParameterError); }

TEST(PolygonArea, Basics) {
    EXPECT_DOUBLE_EQ(polygon_area(unit_square()), 1.0);
    EXPECT_DOUBLE_EQ(polygon_area({{{0, 0}, {1, 0}, {0, 1}}, RegionTag::Omega1}), 0.5);
}

TEST(PolygonArea, RegularPolygonMatchesClosedForm) {
    const auto p = regular_polygon(64, 1.0, {0, 0}, RegionTag::Omega1);
    EXPECT_NEAR(polygon_area(p), 32.0 * std::sin(2.0 * std::numbers::pi / 64.0), 1e-13);
    EXPECT_NEAR(polygon_area(p), 3.1365484905459, 1e-12);
}

TEST(PolygonArea, InvariantUnderCyclicRotation) {
    auto p = regular_polygon(9, 1.3, {0.2, -0.1}, RegionTag::Omega1);
    p.vertices[3] = {p.vertices[3].x * 0.7, p.vertices[3].y * 0.7};
    const double a0 = polygon_area(p);
    for (int r = 0; r < 9; ++r) {
        std::rotate(p.vertices.begin(), p.vertices.begin() + 1, p.vertices.end());
        EXPECT_NEAR(polygon_area(p), a0, 1e-14);
    }
}

TEST(PolygonArea, DegenerateAndClockwiseRejected) {
    EXPECT_THROW(polygon_area({{{0, 0}, {1, 0}}, RegionTag::Omega1}), ValidationError);
    EXPECT_THROW(polygon_area({{{0, 0}, {1, 0}, {2, 0}}, RegionTag::Omega1}), ValidationError);
    EXPECT_THROW(polygon_area({{{0, 0}, {0, 1}, {1, 1}, {1, 0}}, RegionTag::Omega1}), ValidationError);
    EXPECT_THROW(polygon_area({{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, RegionTag::Omega1}), ValidationError);
}

TEST(BuildDomain, DiamondBoxAperture) {
    const DomainSpec s = build_two_room_domain(DomainFamily::DiamondBox, 0.1);
    const Segment ap = s.aperture();
    EXPECT_NEAR(ap.length(), 0.1, 1e-12);
    EXPECT_NEAR(s.symmetry_line.signed_distance(s.corner_point), 0.0, 1e-12);
    EXPECT_NEAR(s.symmetry_line.signed_distance(ap.midpoint()), 0.0, 1e-12);
    // The aperture is vertical.
    EXPECT_NEAR(ap.a.x, ap.b.x, 1e-15);
}

TEST(BuildDomain, RoomsAndPassageHasThreeRegions) {
    const DomainSpec s = build_two_room_domain(DomainFamily::RoomsAndPassage, 0.05);
    ASSERT_TRUE(s.passage.has_value());
    EXPECT_NEAR(polygon_area(*s.passage), 0.0025, 1e-15);
    EXPECT_NEAR(s.area(), 2.0025, 1e-14);
}

TEST(BuildDomain, OutOfRangeNamesTheBound) {
    try {
        build_two_room_domain(DomainFamily::DiamondBox, 2.0);
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("0.7071"), std::string::npos) << e.what();
    }
    EXPECT_THROW(build_two_room_domain(DomainFamily::DiscBox, 1.0), ParameterError);
    EXPECT_THROW(build_two_room_domain(DomainFamily::RoomsAndPassage, 0.5), ParameterError);
    EXPECT_THROW(build_two_room_domain(DomainFamily::RoomsAndPassage, 0.0), ParameterError);
    EXPECT_THROW(build_two_room_domain(DomainFamily::RoomsAndPassage, -0.1), ParameterError);
}

TEST(BuildDomain, EveryFamilyAndAdmissibleHPassesInvariants) {
    for (DomainFamily f : kFamilies) {
        const double hmax = max_aperture(f);
        for (double frac : {0.01, 0.1, 0.25, 0.5, 0.9, 0.99}) {
            const double h = frac * hmax;
            const DomainSpec s = build_two_room_domain(f, h);
            EXPECT_NO_THROW(s.validate(true)) << to_string(f) << " h=" << h;
            EXPECT_NEAR(s.aperture().length(), h, 1e-9);
            EXPECT_TRUE(s.omega1_is_symmetric());
        }
    }
}

TEST(BuildDomain, DiscBoxApproximatesUnitDisc) {
    const DomainSpec s = build_two_room_domain(DomainFamily::DiscBox, 0.05);
    // Truncating the 64-gon near x = 1 removes a sliver only.
    const double full = 32.0 * std::sin(2.0 * std::numbers::pi / 64.0);
    EXPECT_LT(polygon_area(s.omega1), full);
    EXPECT_GT(polygon_area(s.omega1), full - 1e-3);
}

TEST(ClassifyPoint, Examples) {
    const DomainSpec s = build_two_room_domain(DomainFamily::DiamondBox, 0.1);
    Point2 c{0, 0};
    for (Point2 p : s.omega1.vertices) c = c + p;
    c = (1.0 / s.omega1.vertices.size()) * c;
    EXPECT_EQ(classify_point(c, s), Location::InOmega1);
    EXPECT_EQ(classify_point({20.0, 20.0}, s), Location::Outside);
    EXPECT_EQ(classify_point(s.aperture().midpoint(), s), Location::InOmega1);
    EXPECT_EQ(classify_point({0.3, 0.0}, s), Location::InOmega2);

    const DomainSpec r = build_two_room_domain(DomainFamily::RoomsAndPassage, 0.1);
    EXPECT_EQ(classify_point({1.025, 0.5}, r), Location::InPassage);
    EXPECT_EQ(classify_point({1.0, 0.5}, r), Location::InOmega1);
    EXPECT_EQ(classify_point({1.5, 0.5}, r), Location::InOmega2);
}

TEST(ClassifyPoint, GridPointsLandInExactlyOneRegion) {
    for (DomainFamily f : kFamilies) {
        const DomainSpec s = build_two_room_domain(f, 0.3 * max_aperture(f));
        for (int i = 0; i <= 120; ++i) {
            for (int j = 0; j <= 120; ++j) {
                const Point2 p{-2.0 + 4.5 * i / 120.0, -1.2 + 2.4 * j / 120.0};
                const bool in1 = contains_closed(s.omega1, p);
                const bool in2 = contains_closed(s.omega2, p);
                const bool in3 = s.passage && contains_closed(*s.passage, p);
                switch (classify_point(p, s)) {
                    case Location::InOmega1: EXPECT_TRUE(in1); break;
                    case Location::InPassage: EXPECT_TRUE(in3 && !in1); break;
                    case Location::InOmega2: EXPECT_TRUE(in2 && !in1 && !in3); break;
                    case Location::Outside: EXPECT_FALSE(in1 || in2 || in3); break;
                }
            }
        }
    }
}

TEST(PerturbSymmetry, ZeroIsIdentity) {
    const DomainSpec s = build_two_room_domain(DomainFamily::DiamondBox, 0.1);
    const DomainSpec p = perturb_symmetry(s, 0.0);
    EXPECT_EQ(p.omega1.vertices, s.omega1.vertices);
    EXPECT_EQ(p.omega2.vertices, s.omega2.vertices);
}

TEST(PerturbSymmetry, MovesOneVertexByDelta) {
    const DomainSpec s = build_two_room_domain(DomainFamily::DiamondBox, 0.1);
    for (double delta : {0.05, -0.05}) {
        const DomainSpec p = perturb_symmetry(s, delta);
        int moved = 0;
        for (std::size_t i = 0; i < s.omega1.vertices.size(); ++i) {
            const double d = distance(s.omega1.vertices[i], p.omega1.vertices[i]);
            if (d > 0.0) {
                ++moved;
                EXPECT_NEAR(d, 0.05, 1e-14);
                // Outward for positive delta: area grows.
                const double da = polygon_area(p.omega1) - polygon_area(s.omega1);
                EXPECT_EQ(da > 0, delta > 0);
            }
        }
        EXPECT_EQ(moved, 1);
        EXPECT_FALSE(p.omega1_is_symmetric());
        // Reflected vertex set is off by at least delta somewhere.
        double worst = 0.0;
        for (Point2 v : p.omega1.vertices) {
            const Point2 r = reflect_point(v, p.symmetry_line);
            double best = 1e9;
            for (Point2 q : p.omega1.vertices) best = std::min(best, distance(q, r));
            worst = std::max(worst, best);
        }
        EXPECT_GE(worst, 0.05 - 1e-12);
        EXPECT_NO_THROW(p.validate(false));
    }
}

TEST(DomainJson, HasDocumentedKeys) {
    const DomainSpec s = build_two_room_domain(DomainFamily::RoomsAndPassage, 0.2);
    const auto j = nlohmann::json::parse(domain_to_json(s));
    EXPECT_EQ(j.at("family"), "RoomsAndPassage");
    EXPECT_DOUBLE_EQ(j.at("h").get<double>(), 0.2);
    EXPECT_EQ(j.at("omega1").size(), 4u);
    EXPECT_EQ(j.at("passage").size(), 4u);
    EXPECT_TRUE(j.at("axis").contains("point"));
    EXPECT_TRUE(j.at("axis").contains("direction"));
    const auto d = nlohmann::json::parse(domain_to_json(build_two_room_domain(DomainFamily::DiamondBox, 0.2)));
    EXPECT_TRUE(d.at("passage").is_null());
}

TEST(SharedBoundary, FindsCollinearOverlap) {
    const PolygonRegion a = unit_square();
    const PolygonRegion b{{{1, 0.25}, {2, 0.25}, {2, 0.75}, {1, 0.75}}, RegionTag::Omega2};
    const auto seg = shared_boundary(a, b);
    ASSERT_EQ(seg.size(), 1u);
    EXPECT_NEAR(seg[0].length(), 0.5, 1e-15);
}
