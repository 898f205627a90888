#include <cmath>
#include <cstdio>

#include <gtest/gtest.h>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/fem.hpp"
#include "eigenlocal/localization.hpp"
#include "eigenlocal/pipeline.hpp"
#include "test_support.hpp"

using namespace eigenlocal;

namespace {

// Two unit squares side by side: left tagged Omega1, right Omega2.
Mesh two_squares(int n) {
    Mesh m = testsupport::structured_square(n);
    for (auto& p : m.vertices) p.x *= 2.0;
    for (std::size_t t = 0; t < m.n_triangles(); ++t) {
        const auto& tri = m.triangles[t];
        const double cx = (m.vertices[tri[0]].x + m.vertices[tri[1]].x + m.vertices[tri[2]].x) / 3.0;
        m.region_tag[t] = cx < 1.0 ? RegionTag::Omega1 : RegionTag::Omega2;
    }
    return m;
}

}  // namespace

TEST(Normalize, Examples) {
    const Mesh m = testsupport::structured_square(4);
    const FemSystem s = assemble(m);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(25);
    const Eigen::VectorXd c = normalize(-3.0 * one, s.M);
    EXPECT_LT((c - one).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(25, -1.0, 2.0);
    const Eigen::VectorXd a = normalize(u, s.M);
    EXPECT_NEAR(a.dot(s.M * a), 1.0, 1e-12);
    const Eigen::VectorXd b = normalize(7.0 * u, s.M);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
    const Eigen::VectorXd again = normalize(a, s.M);
    EXPECT_LT((again - a).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(normalize(0.0 * one, s.M), ValidationError);
}

TEST(Measure, UniformMassSplit) {
    const Mesh m = two_squares(4);
    const FemSystem s = assemble(m);
    const Eigen::VectorXd u = normalize(Eigen::VectorXd::Ones(25), s.M);
    const LocalizationReport r = measure(u, s.M, m, 0.1);
    EXPECT_NEAR(r.l2_outside, std::sqrt(0.5), 1e-14);
    EXPECT_NEAR(r.l2_inside * r.l2_inside + r.l2_outside * r.l2_outside, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.h, 0.1);
}

TEST(Measure, ZeroOutsideGivesZeroLinf) {
    const Mesh m = two_squares(4);
    const FemSystem s = assemble(m);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(25);
    for (std::size_t v = 0; v < 25; ++v)
        if (m.vertices[v].x < 0.9) u[static_cast<Eigen::Index>(v)] = 1.0 + m.vertices[v].y;
    const LocalizationReport r = measure(normalize(u, s.M), s.M, m, 0.1);
    EXPECT_EQ(r.linf_outside, 0.0);
    EXPECT_EQ(r.l2_outside, 0.0);
    EXPECT_NEAR(r.l2_inside, 1.0, 1e-12);
}

TEST(Measure, UnnormalizedRejected) {
    const Mesh m = two_squares(2);
    const FemSystem s = assemble(m);
    EXPECT_THROW(measure(Eigen::VectorXd::Ones(9) * 2.0, s.M, m, 0.1), ContractError);
}

TEST(Measure, SingleRoomHasNothingOutside) {
    const Mesh m = testsupport::structured_square(3);
    const FemSystem s = assemble(m);
    const LocalizationReport r = measure(normalize(Eigen::VectorXd::Ones(16), s.M), s.M, m, 0.0);
    EXPECT_EQ(r.l2_outside, 0.0);
    EXPECT_NEAR(r.l2_inside, 1.0, 1e-14);
}

TEST(RankLocalized, OrderingAndClamp) {
    const DomainSpec spec = build_two_room_domain(DomainFamily::DiamondBox, 0.1);
    SolveOptions o;
    o.target_edge = 0.04;
    o.k = 8;
    const DomainSolution sol = solve_domain(spec, o);
    const auto all = rank_localized(sol.basis, sol.basis.eigenvectors, sol.system.M, sol.mesh, 0.1, 100,
                                    sol.perm ? &*sol.perm : nullptr);
    ASSERT_EQ(all.size(), 8u);
    for (std::size_t i = 1; i < all.size(); ++i) {
        EXPECT_LE(all[i - 1].l2_outside, all[i].l2_outside);
        if (all[i - 1].l2_outside == all[i].l2_outside) EXPECT_LT(all[i - 1].mode_index, all[i].mode_index);
    }
    const auto top = rank_localized(sol.basis, sol.basis.eigenvectors, sol.system.M, sol.mesh, 0.1, 1);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].mode_index, all[0].mode_index);
    // A localized skew mode exists, so the constant does not rank first.
    const double threshold = std::sqrt(polygon_area(spec.omega2) / spec.area());
    bool skew_below = false;
    for (const auto& r : all) skew_below |= r.parity == Parity::Skew && r.l2_outside < threshold;
    ASSERT_TRUE(skew_below);
    EXPECT_NE(all[0].mode_index, 1u);
    EXPECT_EQ(all[0].parity, Parity::Skew);
}

TEST(Pipeline, PythagoreanIdentityEveryMode) {
    for (DomainFamily f : {DomainFamily::DiamondBox, DomainFamily::DiscBox, DomainFamily::RoomsAndPassage}) {
        SolveOptions o;
        o.target_edge = 0.05;
        o.k = 8;
        const DomainSolution sol = solve_domain(build_two_room_domain(f, 0.15), o);
        for (const auto& r : sol.reports) {
            EXPECT_NEAR(r.l2_inside * r.l2_inside + r.l2_outside * r.l2_outside, 1.0, 1e-10);
            EXPECT_GE(r.l2_outside, 0.0);
            EXPECT_LE(r.l2_outside, 1.0);
            EXPECT_LE(r.linf_outside,
                      sol.basis.eigenvectors.col(static_cast<Eigen::Index>(r.mode_index - 1)).cwiseAbs().maxCoeff());
            EXPECT_NE(r.parity, Parity::Unknown);
        }
    }
}

TEST(Pipeline, SkewModeLocalizesAsApertureCloses) {
    SolveOptions o;
    o.target_edge = 0.03;
    o.k = 8;
    auto first_skew = [&](double h) {
        const DomainSolution sol = solve_domain(build_two_room_domain(DomainFamily::DiamondBox, h), o);
        for (const auto& r : sol.reports)
            if (r.parity == Parity::Skew) return r;
        ADD_FAILURE() << "no skew mode at h=" << h;
        return LocalizationReport{};
    };
    const LocalizationReport wide = first_skew(0.2), narrow = first_skew(0.1);
    // Same mode: the eigenvalue barely moves.
    EXPECT_NEAR(narrow.eigenvalue, wide.eigenvalue, 0.05 * wide.eigenvalue);
    EXPECT_LT(narrow.l2_outside, wide.l2_outside);
}

TEST(Pipeline, DirichletRoomsAndPassage) {
    SolveOptions o;
    o.target_edge = 0.04;
    o.k = 4;
    o.boundary = Boundary::Dirichlet;
    const DomainSolution sol = solve_domain(build_two_room_domain(DomainFamily::RoomsAndPassage, 0.2), o);
    for (std::size_t v : boundary_vertices(sol.mesh))
        for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(sol.basis.eigenvectors(static_cast<Eigen::Index>(v), j), 0.0);
    // Two nearly decoupled unit squares: the lowest pair sits just above 2 pi^2.
    const double ground = 2.0 * M_PI * M_PI;
    EXPECT_GT(sol.basis.eigenvalues[0], ground * 0.98);
    EXPECT_LT(sol.basis.eigenvalues[1], ground * 1.05);
    EXPECT_EQ(parse_boundary("Dirichlet"), Boundary::Dirichlet);
    EXPECT_THROW(parse_boundary("Robin"), ParameterError);
}

TEST(Csv, RowFormat) {
    LocalizationReport r;
    r.mode_index = 5;
    r.h = 0.1;
    r.eigenvalue = 9.5;
    r.parity = Parity::Skew;
    r.l2_outside = 0.25;
    r.linf_outside = 1.0 / 3.0;
    EXPECT_EQ(csv_row(r), "5,0.10000000000000001,9.5,Skew,0.25,0.33333333333333331");
    EXPECT_STREQ(kCsvHeader, "mode,h,lambda,parity,l2_outside,linf_outside");
}
