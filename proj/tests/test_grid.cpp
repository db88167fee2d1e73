#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vekua/grid.hpp"
#include "vekua/kernels.hpp"
#include "vekua/rng.hpp"

using namespace vekua;

namespace {

const Complex i1{0.0, 1.0};

GridPtr unit_box(int n) { return build_grid(DomainSpec::box({0, 0, 0}, {1, 1, 1}), n); }

BiquatField random_field(const GridPtr& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    BiquatField u(g);
    for (std::size_t c = 0; c < u.size(); ++c) u[c] = rng.biquaternion();
    return u;
}

// interior max-norm of a - b over cells at distance >= margin
double interior_diff(const BiquatField& a, const BiquatField& b, double margin) {
    const auto cells = a.grid().interior(margin);
    return max_norm(a - b, cells);
}

}  // namespace

TEST(DomainSpec, Diameters) {
    EXPECT_DOUBLE_EQ(DomainSpec::ball({1, 2, 3}, 0.5).diameter(), 1.0);
    EXPECT_DOUBLE_EQ(DomainSpec::box({0, 0, 0}, {1, 2, 2}).diameter(), 3.0);
}

TEST(DomainSpec, RejectsDegenerateShapes) {
    EXPECT_THROW(DomainSpec::ball({0, 0, 0}, 0.0), DomainError);
    EXPECT_THROW(DomainSpec::box({0, 0, 0}, {1, 0, 1}), DomainError);
}

TEST(BuildGrid, BallVolumeAtN32) {
    const auto g = build_grid(DomainSpec::unit_ball(), 32);
    const double vol = 4.0 / 3.0 * std::numbers::pi;
    EXPECT_LE(std::abs(g->total_weight() - vol) / vol, 0.05);
}

TEST(BuildGrid, BoxWeightsSumToOne) {
    const auto g = unit_box(16);
    EXPECT_EQ(g->size(), 16u * 16u * 16u);
    EXPECT_NEAR(g->total_weight(), 1.0, 1e-14);
}

TEST(BuildGrid, CoarseBallHasEnoughCells) {
    // cell centres (i+1/2)/4 - 1 with |c| < 1, counted independently
    int count = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int k = 0; k < 8; ++k) {
                const double x = (i + 0.5) / 4 - 1, y = (j + 0.5) / 4 - 1, z = (k + 0.5) / 4 - 1;
                if (x * x + y * y + z * z < 1.0) ++count;
            }
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    EXPECT_EQ(static_cast<int>(g->size()), count);
    EXPECT_GE(g->size(), 200u);
}

TEST(BuildGrid, RejectsSmallN) { EXPECT_THROW(build_grid(DomainSpec::unit_ball(), 7), DomainError); }

TEST(BuildGrid, VolumeErrorShrinks) {
    const double vol = 4.0 / 3.0 * std::numbers::pi;
    const double e16 = std::abs(build_grid(DomainSpec::unit_ball(), 16)->total_weight() - vol);
    const double e48 = std::abs(build_grid(DomainSpec::unit_ball(), 48)->total_weight() - vol);
    EXPECT_LT(e48, e16);
}

TEST(BuildGrid, SpacingIsEdgeOverN) {
    const auto g = build_grid(DomainSpec::box({0, 0, 0}, {1, 2, 4}), 8);
    EXPECT_DOUBLE_EQ(g->h()[0], 0.125);
    EXPECT_DOUBLE_EQ(g->h()[1], 0.25);
    EXPECT_DOUBLE_EQ(g->h()[2], 0.5);
}

TEST(BuildGrid, LocateFindsContainingCell) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const auto c = g->locate({0.1, -0.2, 0.3});
    ASSERT_NE(c, DomainGrid::outside);
    const Vec3 ctr = g->center(static_cast<std::size_t>(c));
    for (int a = 0; a < 3; ++a) EXPECT_LE(std::abs(ctr[a] - Vec3{0.1, -0.2, 0.3}[a]), 0.5 * g->h()[a] + 1e-15);
    EXPECT_EQ(g->locate({2, 0, 0}), DomainGrid::outside);
}

TEST(ApplyD, GradientOfLinearScalar) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const auto u = sample([](const Vec3& x) { return Biquaternion(x[0]); }, g);
    const auto d = apply_D(u);
    for (std::size_t c = 0; c < d.size(); ++c) EXPECT_LE(oracle::max_diff(d[c], e1), 1e-12);
}

TEST(ApplyD, MinusDivergenceOfPositionVector) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const auto u = sample([](const Vec3& x) { return as_vector(x); }, g);
    const auto d = apply_D(u);
    for (std::size_t c = 0; c < d.size(); ++c) EXPECT_LE(oracle::max_diff(d[c], Biquaternion(-3.0)), 1e-12);
}

TEST(ApplyD, StencilOrderFlagsBoundaryCells) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    int one_sided = 0;
    for (std::size_t c = 0; c < g->size(); ++c) {
        if (g->boundary_distance(c) > 2.0 * g->h_max()) {
            EXPECT_EQ(g->stencil_order(c), 2);
        }
        if (g->stencil_order(c) < 2) ++one_sided;
    }
    EXPECT_GT(one_sided, 0);
}

TEST(ApplyD, MatchesPointwiseOracleInInterior) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    auto f = [](const Vec3& x) { return Biquaternion{x[0] * x[1], Complex(0, x[2]), x[0] * x[0], 1.0}; };
    const auto d = apply_D(sample(f, g));
    for (auto c : g->interior(2 * g->h_max()))
        EXPECT_LE(oracle::max_diff(d[c], oracle::fd_D(f, g->center(c), g->h()[0])), 1e-12);
}

TEST(ApplyD, CauchyKernelResidualIsSecondOrder) {
    const Vec3 q{1.6, 0.4, -0.3};
    auto f = [&](const Vec3& x) { return cauchy_kernel(x - q); };
    std::vector<double> hs, rs;
    for (int n : {16, 32}) {
        const auto g = build_grid(DomainSpec::unit_ball(), n);
        const auto u = sample(f, g);
        const auto cells = g->interior(0.25);
        rs.push_back(max_norm(apply_D(u), cells) / max_norm(u, cells));
        hs.push_back(g->h_max());
    }
    EXPECT_GE(oracle::observed_order(hs[0], rs[0], hs[1], rs[1]), 1.8);
}

TEST(ApplyD, ConjugationRule) {
    // bar(D u) = -(bar u) D on identical stencils
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto u = random_field(g, 3);
    const auto lhs = map(apply_D(u), [](const Biquaternion& p) { return conj_bar(p); });
    const auto rhs = apply_D_right(map(u, [](const Biquaternion& p) { return conj_bar(p); }));
    for (std::size_t c = 0; c < u.size(); ++c) EXPECT_LE(oracle::max_diff(lhs[c], -rhs[c]), 1e-12);
}

TEST(ApplyD, RightActionSigns) {
    // u D = -div u + grad u0 - curl u for u = (0, -x2, x1, 0): curl = 2 e3
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto u = sample([](const Vec3& x) { return Biquaternion(0.0, -x[1], x[0], 0.0); }, g);
    const auto l = apply_D(u), r = apply_D_right(u);
    for (auto c : g->interior(2 * g->h_max())) {
        EXPECT_LE(oracle::max_diff(l[c], 2.0 * e3), 1e-12);
        EXPECT_LE(oracle::max_diff(r[c], -2.0 * e3), 1e-12);
    }
}

TEST(ApplyD, LeibnizRule) {
    // D(uv) = (Du) v + bar(u) (Dv) - 2 sum_k u_k dv/dx_k, FD residual O(h^2)
    auto uf = [](const Vec3& x) { return Biquaternion{std::sin(x[0]), x[1] * x[2], Complex(0, x[0] * x[1]), std::cos(x[2])}; };
    auto vf = [](const Vec3& x) { return Biquaternion{x[2], std::exp(0.5 * x[0]), 1.0, Complex(x[1], x[0])}; };
    std::vector<double> rs;
    for (int n : {16, 32}) {
        const auto g = unit_box(n);
        const auto u = sample(uf, g), v = sample(vf, g);
        BiquatField rhs = pointwise_mul(apply_D(u), v) +
                          pointwise_mul(map(u, [](const Biquaternion& p) { return conj_bar(p); }), apply_D(v));
        for (int k = 0; k < 3; ++k) {
            const auto dv = partial(v, k);
            BiquatField t(g);
            for (std::size_t c = 0; c < t.size(); ++c) t[c] = dv[c] * (u[c][static_cast<std::size_t>(k + 1)] * -2.0);
            rhs += t;
        }
        rs.push_back(interior_diff(apply_D(pointwise_mul(u, v)), rhs, 0.2));
    }
    EXPECT_LT(rs[1], 1e-3);
    EXPECT_GT(rs[0] / rs[1], 3.5);
}

TEST(Laplacian, Quadratics) {
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto sq = laplacian(sample([](const Vec3& x) { return Biquaternion(x[0] * x[0]); }, g));
    const auto harm = laplacian(sample([](const Vec3& x) { return Biquaternion(x[0] * x[0] - x[1] * x[1]); }, g));
    for (auto c : g->interior(2 * g->h_max())) {
        EXPECT_LE(oracle::max_diff(sq[c], Biquaternion(2.0)), 1e-11);
        EXPECT_LE(norm(harm[c]), 1e-11);
    }
}

TEST(Laplacian, AgreesWithMinusDSquared) {
    auto f = [](const Vec3& x) { return Biquaternion{std::sin(x[0] + x[1]), x[2] * x[2] * x[0], std::cos(x[1]), 0.0}; };
    std::vector<double> rs;
    for (int n : {16, 32}) {
        const auto g = unit_box(n);
        const auto u = sample(f, g);
        rs.push_back(interior_diff(laplacian(u), BiquatField(g) - apply_D(apply_D(u)), 0.2));
    }
    EXPECT_GT(rs[0] / rs[1], 3.5);
}

TEST(Laplacian, ScalarFields) {
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto s = laplacian(sample_scalar([](const Vec3& x) { return Complex(x[1] * x[1], x[2] * x[2]); }, g));
    for (auto c : g->interior(2 * g->h_max())) EXPECT_LE(std::abs(s[c] - Complex(2.0, 2.0)), 1e-11);
}

TEST(L2Inner, UnitVectorsOnBox) {
    const auto g = unit_box(8);
    const BiquatField a(g, e1), b(g, e2);
    EXPECT_NEAR(std::abs(l2_inner(a, a) - 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(l2_inner(a, b)), 0.0, 1e-15);
}

TEST(L2Inner, ConjugateSymmetryAndLinearity) {
    const auto g = build_grid(DomainSpec::unit_ball(), 10);
    const auto u = random_field(g, 5), v = random_field(g, 6);
    EXPECT_LE(std::abs(l2_inner(u, v) - std::conj(l2_inner(v, u))), 1e-12);
    const Complex s{0.3, -1.2};
    EXPECT_LE(std::abs(l2_inner(s * u, v) - std::conj(s) * l2_inner(u, v)), 1e-12);
    EXPECT_LE(std::abs(l2_inner(u, s * v) - s * l2_inner(u, v)), 1e-12);
}

TEST(L2Inner, GridMismatch) {
    const BiquatField a(unit_box(8), e1), b(unit_box(10), e1);
    EXPECT_THROW(l2_inner(a, b), GridMismatch);
}

TEST(HcInner, OneOnBox) {
    const auto g = unit_box(8);
    const BiquatField one(g, e0);
    EXPECT_LE(oracle::max_diff(hc_inner(one, one), e0), 1e-13);
}

TEST(HcInner, RightLinearityAndLeftDagger) {
    const auto g = build_grid(DomainSpec::unit_ball(), 10);
    const auto u = random_field(g, 7), v = random_field(g, 8);
    const Biquaternion a{0.2, Complex(0.5, -1.0), -0.7, Complex(0.0, 0.3)};
    const Biquaternion h = hc_inner(u, v);
    EXPECT_LE(oracle::max_diff(hc_inner(u, right_mul(v, a)), oracle::mul(h, a)), 1e-11);
    EXPECT_LE(oracle::max_diff(hc_inner(right_mul(u, a), v), oracle::mul(conj_dagger(a), h)), 1e-11);
    EXPECT_LE(std::abs(h.sc() - l2_inner(u, v)), 1e-12);
}

TEST(SphereMesh, AreasNormalsGauss) {
    const auto m = sphere_mesh(DomainSpec::unit_ball(), 2000);
    EXPECT_NEAR(m.total_area(), 4.0 * std::numbers::pi, 1e-12);
    Vec3 s{};
    for (std::size_t j = 0; j < m.size(); ++j) {
        EXPECT_NEAR(length(m.normals[j]), 1.0, 1e-12);
        EXPECT_NEAR(length(m.points[j]), 1.0, 1e-12);
        EXPECT_NEAR(dot(m.normals[j], m.points[j]), 1.0, 1e-12);
        s = s + m.areas[j] * m.normals[j];
    }
    EXPECT_LE(length(s), 1e-3 * 4.0 * std::numbers::pi);
}

TEST(SphereMesh, ScaledBall) {
    const auto spec = DomainSpec::ball({1, 0, -1}, 2.0);
    const auto m = sphere_mesh(spec, 500);
    EXPECT_NEAR(m.total_area(), 16.0 * std::numbers::pi, 1e-11);
    for (const auto& p : m.points) EXPECT_NEAR(length(p - Vec3{1, 0, -1}), 2.0, 1e-12);
}

TEST(SphereMesh, Errors) {
    EXPECT_THROW(sphere_mesh(DomainSpec::box({0, 0, 0}, {1, 1, 1}), 500), DomainError);
    EXPECT_THROW(sphere_mesh(DomainSpec::unit_ball(), 99), DomainError);
}

TEST(Sample, ConstantAndExteriorKernel) {
    const auto g = build_grid(DomainSpec::unit_ball(), 10);
    const auto c = sample([](const Vec3&) { return Biquaternion(1.0, 2.0, 3.0, 4.0); }, g);
    for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(c[k], Biquaternion(1.0, 2.0, 3.0, 4.0));
    const auto e = sample([](const Vec3& x) { return cauchy_kernel(x - Vec3{1.5, 0, 0}); }, g);
    for (std::size_t k = 0; k < e.size(); ++k) EXPECT_TRUE(std::isfinite(norm(e[k])));
}

TEST(Sample, BumpVanishesNearBoundary) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const auto u = sample([](const Vec3& x) {
        const double s = dot(x, x) / 0.25;
        return Biquaternion(s < 1.0 ? std::pow(1.0 - s, 3) : 0.0);
    }, g);
    for (std::size_t c = 0; c < g->size(); ++c)
        if (g->boundary_distance(c) < 0.5) {
            EXPECT_LE(norm(u[c]), 1e-12);
        }
}

TEST(IntegrationByParts, DiscreteGauss) {
    // pairing(u D, v) + pairing(u, D v) vanishes for v compactly supported
    std::vector<double> rs;
    for (int n : {16, 24, 32}) {
        const auto g = build_grid(DomainSpec::unit_ball(), n);
        const auto u = sample([](const Vec3& x) { return Biquaternion{std::cos(x[0]), x[1] * x[2], Complex(0, x[0]), 1.0}; }, g);
        const auto v = sample([](const Vec3& x) {
            const double s = dot(x, x) / 0.36;
            const double b = s < 1.0 ? std::pow(1.0 - s, 3) : 0.0;
            return Biquaternion{b, Complex(0, b * x[0]), b * x[1], 0.5 * b};
        }, g);
        const double d = std::abs(sc_pairing(apply_D_right(u), v) + sc_pairing(u, apply_D(v)));
        rs.push_back(d / (l2_norm(u) * l2_norm(v)));
    }
    for (double r : rs) EXPECT_LE(r, 1e-12);
}
