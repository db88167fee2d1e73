#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vekua/bergman.hpp"
#include "vekua/decomposition.hpp"
#include "vekua/rng.hpp"

using namespace vekua;

namespace {

const Complex i1{0.0, 1.0};
const double pi = std::numbers::pi;

BiquatField random_field(const GridPtr& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    BiquatField u(g);
    for (std::size_t c = 0; c < u.size(); ++c) u[c] = rng.biquaternion();
    return u;
}

Biquaternion coefficient_value(const Coefficient& c) { return std::get<Biquaternion>(c); }

AnalyticScalar main_f() { return quadratic_scalar(1.0, {0.0, 0.0, 0.0}, CHess{{{0.1, 0, 0}, {0, 0, 0}, {0, 0, 0}}}); }

std::vector<BiquatField> monogenic_members(const GridPtr& g, int m) {
    return gram_schmidt(monogenic_basis(g, exterior_points(g->spec(), m, 1.5))).members;
}

}  // namespace

// --- transpose and adjoint coefficients ----------------------------------------------------------

TEST(Coefficients, TransposeAndAdjointExamples) {
    const CoefficientTuple A{e1, e2, i1 * e3, Biquaternion(2.0)};
    const auto T = transpose_coeffs(A);
    EXPECT_EQ(coefficient_value(T[0]), -1.0 * e1);
    EXPECT_EQ(coefficient_value(T[1]), Biquaternion(2.0));
    EXPECT_EQ(coefficient_value(T[2]), -i1 * e3);
    EXPECT_EQ(coefficient_value(T[3]), e2);
    const auto H = adjoint_coeffs(A);
    EXPECT_EQ(coefficient_value(H[0]), -1.0 * e1);
    EXPECT_EQ(coefficient_value(H[1]), Biquaternion(2.0));
    EXPECT_EQ(coefficient_value(H[2]), i1 * e3);
    EXPECT_EQ(coefficient_value(H[3]), e2);
}

TEST(Coefficients, Involutions) {
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    SplitMix64 rng(3);
    const CoefficientTuple A{rng.biquaternion(), random_field(g, 4), rng.biquaternion(), random_field(g, 5)};
    const auto TT = transpose_coeffs(transpose_coeffs(A));
    const auto HH = adjoint_coeffs(adjoint_coeffs(A));
    const auto u = random_field(g, 6);
    EXPECT_EQ(max_norm(q_a_apply(TT, u) - q_a_apply(A, u)), 0.0);
    EXPECT_EQ(max_norm(q_a_apply(HH, u) - q_a_apply(A, u)), 0.0);
}

TEST(Coefficients, TransposeUnderDualityAndAdjointUnderL2) {
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    SplitMix64 rng(7);
    const CoefficientTuple A{random_field(g, 8), rng.biquaternion(), random_field(g, 9), rng.biquaternion()};
    const auto u = random_field(g, 10), v = random_field(g, 11);
    const double scale = l2_norm(u) * l2_norm(v) * 10.0;
    EXPECT_LE(std::abs(duality_pairing(v, q_a_apply(A, u)) - duality_pairing(q_a_apply(transpose_coeffs(A), v), u)),
              1e-13 * scale);
    EXPECT_LE(std::abs(l2_inner(v, q_a_apply(A, u)) - l2_inner(q_a_apply(adjoint_coeffs(A), v), u)), 1e-13 * scale);
    // the two dualities are genuinely different
    EXPECT_GT(std::abs(l2_inner(v, q_a_apply(A, u)) - l2_inner(q_a_apply(transpose_coeffs(A), v), u)), 1e-3);
}

// --- duality pairing ---------------------------------------------------------------------------

TEST(Duality, Examples) {
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    const double W = g->total_weight();
    EXPECT_NEAR(std::abs(duality_pairing(BiquatField(g, e0), BiquatField(g, e0)) - W), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(duality_pairing(BiquatField(g, e1), BiquatField(g, e1)) - W), 0.0, 1e-13);
    EXPECT_EQ(duality_pairing(BiquatField(g, e1), BiquatField(g, e2)), Complex{});
    // bilinear, not sesquilinear
    EXPECT_NEAR(std::abs(duality_pairing(BiquatField(g, i1 * e0), BiquatField(g, i1 * e0)) + W), 0.0, 1e-13);
}

TEST(Duality, SymmetricAndBilinear) {
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    const auto u = random_field(g, 1), v = random_field(g, 2), w = random_field(g, 3);
    EXPECT_LE(std::abs(duality_pairing(u, v) - duality_pairing(v, u)), 1e-13);
    const Complex s{0.3, -1.1};
    EXPECT_LE(std::abs(duality_pairing(u, v + s * w) - duality_pairing(u, v) - s * duality_pairing(u, w)), 1e-12);
    EXPECT_THROW(duality_pairing(u, BiquatField(build_grid(DomainSpec::unit_ball(), 10))), GridMismatch);
}

TEST(Duality, TheodorescuIsSymmetric) {
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto u = random_field(g, 12), v = random_field(g, 13);
    const Complex l = duality_pairing(v, theodorescu(u));
    EXPECT_LE(std::abs(l - duality_pairing(theodorescu(v), u)), 1e-12 * l2_norm(u) * l2_norm(v));
}

TEST(Duality, DerivativeIsSymmetricOnCompactSupport) {
    // (v | D u) = (D v | u) when u vanishes near the boundary; exact for central differences
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const auto u = bump_test_function(g, {0.05, 0, -0.05}, 0.4, linear_field(e0 + 0.3 * e2, {e1, i1 * e3, e0}));
    const auto v = random_field(g, 20);
    const Complex l = duality_pairing(v, apply_D(u.field));
    const Complex r = duality_pairing(apply_D(v), u.field);
    EXPECT_LE(std::abs(l - r), 1e-12 * std::abs(l));
}

// --- test functions --------------------------------------------------------------------------

TEST(TestFunctions, ValidateRejectsBadSupport) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    EXPECT_THROW(bump_test_function(g, {0, 0, 0}, 0.95, linear_field(e0, {})), DomainError);
    EXPECT_THROW(sample_test_function(g, scalar_times(constant_scalar(1.0), e0), 0.5), DomainError);
    EXPECT_THROW(sample_test_function(g, scalar_times(radial_scalar(bump_profile(0.3)), e0), 0.1), DomainError);
    EXPECT_NO_THROW(sample_test_function(g, scalar_times(radial_scalar(bump_profile(0.3)), e0), 0.6));
}

TEST(TestFunctions, BatteryStaysInside) {
    const auto spec = DomainSpec::box({0, 0, 0}, {2, 1, 1});
    EXPECT_DOUBLE_EQ(inradius(spec), 0.5);
    const auto g = build_grid(spec, 32);
    for (const auto& f : bump_battery(spec, 6, 9)) EXPECT_NO_THROW(sample_test_function(g, f, 0.26));
}

TEST(Annihilator, PairsToZeroWithVekuaSolutions) {
    // (D u - Q_{A*} u | w) = (u | D w - Q_A w), which vanishes for an exact solution
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const CoefficientTuple A{Biquaternion(0.2), Biquaternion{}, 0.1 * e2, Biquaternion{}};
    const auto u = bump_test_function(g, {0, 0, 0}, 0.45, linear_field(e1, {e0, e2, i1 * e0}));
    const auto w = random_field(g, 30);
    const Complex l = duality_pairing(annihilator_element(A, u), w);
    const Complex r = duality_pairing(u.field, apply_D(w) - q_a_apply(A, w));
    EXPECT_LE(std::abs(l - r), 1e-12 * std::abs(l));
}

TEST(Orthogonality, HodgeCaseImprovesUnderRefinement) {
    std::vector<double> e;
    for (int n : {16, 20, 24}) {
        const auto g = build_grid(DomainSpec::unit_ball(), n);
        const auto members = monogenic_members(g, 4);
        double worst = 0.0;
        for (const auto& f : bump_battery(g->spec(), 3, 2))
            worst = std::max(worst, orthogonality_check(CoefficientTuple::zero(), members, sample_test_function(g, f, 0.5)));
        e.push_back(worst);
    }
    EXPECT_LT(e[1], e[0]);
    EXPECT_LT(e[2], e[1]);
    EXPECT_LE(e[2], 0.05);
}

TEST(Orthogonality, NeedsTheHilbertAdjoint) {
    // a1 = 0.1i has a1^dagger = -0.1i but bar(a1) = 0.1i, so (D - Q_{A*}) u misses the complement
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const CoefficientTuple A{Biquaternion(Complex(0.0, 0.1)), Biquaternion{}, Biquaternion{}, Biquaternion{}};
    const auto members = vekua_basis(A, monogenic_basis(g, exterior_points(g->spec(), 4, 1.5)), 1e-9, 200).members;
    const auto u = sample_test_function(g, bump_battery(g->spec(), 1, 5, 0.45).front(), 0.5);
    const double right = orthogonality_check(A, members, u);
    const auto v = annihilator_element(A, u);
    double wrong = 0.0;
    for (const auto& phi : members) wrong = std::max(wrong, std::abs(l2_inner(phi, v)) / (l2_norm(phi) * l2_norm(v)));
    EXPECT_LE(right, 1e-3);
    EXPECT_GT(wrong, 5.0 * right);
}

// --- closed-form Vekua residual -----------------------------------------------------------------

TEST(VekuaClosedForm, CauchyFieldsAreMonogenic) {
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    EXPECT_LE(vekua_residual_analytic(CoefficientTuple::zero(), cauchy_field({0, 2, 0}, e3), *g), 1e-14);
    const CoefficientTuple A{e0, Biquaternion{}, Biquaternion{}, Biquaternion{}};
    EXPECT_GT(vekua_residual_analytic(A, cauchy_field({0, 2, 0}, e3), *g), 0.1);
    EXPECT_THROW(q_a_point({random_field(g, 1), Biquaternion{}, Biquaternion{}, Biquaternion{}}, e0), DomainError);
}

// --- Schrodinger factorization ---------------------------------------------------------------

TEST(Schrodinger, DataAgainstClosedForms) {
    // f = exp(k.x): q_f = |k|^2, q_{1/f} = |k|^2, R = 0
    const Vec3 k{0.3, -0.2, 0.5};
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    const auto d = make_schrodinger_data(exp_linear(k), g);
    const double k2 = dot(k, k);
    for (std::size_t c = 0; c < g->size(); ++c) {
        EXPECT_NEAR(std::abs(d.q_f[c] - k2), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(d.q_inv_f[c] - k2), 0.0, 1e-14);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t l = 0; l < 3; ++l) EXPECT_LE(std::abs(d.R[j][l][c]), 1e-15);
    }
    EXPECT_THROW(make_schrodinger_data(constant_scalar(0.0), g), DomainError);
}

TEST(Schrodinger, DarbouxIdentity) {
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    EXPECT_LE(darboux_defect(make_schrodinger_data(main_f(), g)), 1e-12);
    EXPECT_LE(darboux_defect(make_schrodinger_data(exp_linear({0.1, 0.4, -0.3}, Complex(1, 1)), g)), 1e-12);
    // the quotient-rule value against an independent central difference of f Lap(1/f)
    const auto f = main_f();
    const Vec3 x{0.3, 0.2, -0.4};
    const double h = 1e-3;
    auto inv = [&](const Vec3& p) { return 1.0 / f.value(p); };
    Complex lap{};
    for (std::size_t a = 0; a < 3; ++a) {
        Vec3 p = x, m = x;
        p[a] += h;
        m[a] -= h;
        lap += (inv(p) - 2.0 * inv(x) + inv(m)) / (h * h);
    }
    EXPECT_NEAR(std::abs(detail::q_inverse_quotient_rule(f, x) - f.value(x) * lap), 0.0, 1e-6);
}

TEST(Schrodinger, CompositionAgainstNestedFiniteDifferences) {
    const auto f = main_f();
    const auto w = scalar_product(exp_linear({0.2, 0.1, -0.3}), linear_field(e0 + e2, {e1, i1 * e3, e0}));
    auto g = [&](const Vec3& x) { return detail::log_gradient(f, x); };
    auto v = [&](const Vec3& x) { return oracle::fd_D(w.value, x, 1e-3) - w.value(x) * g(x); };
    const Vec3 x{0.2, -0.1, 0.3};
    const Biquaternion ref = oracle::fd_D(v, x, 1e-3) + v(x) * g(x);
    EXPECT_LE(norm(schrodinger_lhs(f, w, x) - ref) / norm(ref), 1e-5);
}

TEST(Schrodinger, FactorizationHolds) {
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto d = make_schrodinger_data(main_f(), g);
    const auto r1 = schrodinger_factorization_check(d, cauchy_field({0, 0, 2}, e1 + i1 * e2));
    const auto r2 = schrodinger_factorization_check(d, scalar_product(exp_linear({0.2, 0.1, -0.3}), linear_field(e0, {e3, e1, e2})));
    for (const auto& r : {r1, r2}) {
        EXPECT_LE(r.scalar, 1e-10);
        EXPECT_LE(r.vector, 1e-10);
    }
}

TEST(Schrodinger, VectorPartNeedsCurvatureTerm) {
    // dropping 2 R vec w breaks the vector identity when R != 0
    const auto g = build_grid(DomainSpec::unit_ball(), 8);
    auto d = make_schrodinger_data(main_f(), g);
    for (auto& row : d.R)
        for (auto& r : row) r = ScalarField(g);
    const auto r = schrodinger_factorization_check(d, linear_field(e1, {e0, e2, e3}));
    EXPECT_GT(r.vector, 1e-3);
    EXPECT_LE(r.scalar, 1e-10);
}

// --- f D (1/f) factorization --------------------------------------------------------------------

TEST(DfFactorization, ScalarFunctions) {
    const auto g = build_grid(DomainSpec::unit_ball(), 12);
    const auto u = scalar_times(quadratic_scalar(0.5, {0.1, -0.2, 0.3}, CHess{{{1, 0.2, 0}, {0.2, -0.5, 0.1}, {0, 0.1, 0.4}}}), e0);
    EXPECT_LE(df_factorization_check(main_f(), u, *g), 1e-12);
    EXPECT_LE(df_factorization_check(exp_linear({0.3, 0.1, 0.2}), scalar_times(exp_linear({-0.1, 0.5, 0.2}), e0), *g), 1e-12);
}

TEST(DfFactorization, CrossTermIsCurl) {
    // sum_{k != j} e_k e_j f_k u_j is the vector grad f x grad u
    const auto f = main_f();
    const auto s = quadratic_scalar(0.0, {0.4, -0.1, 0.7}, CHess{});
    const Vec3 x{0.4, 0.3, 0.1};
    const auto fg = f.grad(x), ug = s.grad(x);
    const Biquaternion curl{0.0, fg[1] * ug[2] - fg[2] * ug[1], fg[2] * ug[0] - fg[0] * ug[2],
                            fg[0] * ug[1] - fg[1] * ug[0]};
    const auto u = scalar_times(s, e0);
    const Biquaternion expected = -u.laplacian(x) + u.value(x) * detail::q_inverse_quotient_rule(f, x) - curl * (2.0 / f.value(x));
    EXPECT_LE(norm(df_rhs(f, u, x) - expected), 1e-15);
}

TEST(DfFactorization, RepeatedIndexVariantFails) {
    // (2/f) sum_{k != j} e_k e_j f_k u_k does not reproduce the composition
    const auto f = main_f();
    const auto s = quadratic_scalar(0.0, {0.4, -0.1, 0.7}, CHess{});
    const auto u = scalar_times(s, e0);
    const Vec3 x{0.4, 0.3, 0.1};
    const auto fg = f.grad(x), ug = s.grad(x);
    const std::array<Biquaternion, 3> E{e1, e2, e3};
    Biquaternion cross;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t j = 0; j < 3; ++j)
            if (k != j) cross += E[k] * E[j] * fg[k] * ug[k];
    const Biquaternion printed = -u.laplacian(x) + u.value(x) * detail::q_inverse_quotient_rule(f, x) - cross * (2.0 / f.value(x));
    const Biquaternion lhs = df_lhs(f, u, x);
    EXPECT_LE(norm(lhs - df_rhs(f, u, x)), 1e-15);
    EXPECT_GT(norm(lhs - printed), 1e-3);
}

TEST(DfFactorization, Linear) {
    const auto f = main_f();
    const auto a = scalar_times(exp_linear({0.1, 0.2, 0.3}), e0);
    const auto b = scalar_times(quadratic_scalar(1.0, {0, 1, 0}, CHess{}), e0);
    const Vec3 x{-0.2, 0.5, 0.1};
    const Complex s{2.0, -0.5};
    AnalyticField ab{[&](const Vec3& p) { return a.value(p) + s * b.value(p); },
                     [&](const Vec3& p) {
                         auto ga = a.grad(p);
                         const auto gb = b.grad(p);
                         for (std::size_t k = 0; k < 3; ++k) ga[k] += s * gb[k];
                         return ga;
                     },
                     [&](const Vec3& p) {
                         auto ha = a.hess(p);
                         const auto hb = b.hess(p);
                         for (std::size_t j = 0; j < 3; ++j)
                             for (std::size_t k = 0; k < 3; ++k) ha[j][k] += s * hb[j][k];
                         return ha;
                     }};
    EXPECT_LE(norm(df_lhs(f, ab, x) - df_lhs(f, a, x) - s * df_lhs(f, b, x)), 1e-14);
}

// --- Bessel example -------------------------------------------------------------------------

TEST(Bessel, RootAndProfileAgainstElementaryForms) {
    // J_{1/2}(z) = sqrt(2 / (pi z)) sin z
    for (double z : {0.7, 1.3, 2.9}) EXPECT_NEAR(std::cyl_bessel_j(0.5, z), std::sqrt(2.0 / (pi * z)) * std::sin(z), 1e-14);
    EXPECT_NEAR(first_root_j_half(), pi, 1e-12);
    // u(x) = sin(pi |x|) / |x| = pi J_{1/2}(pi |x|) / sqrt(2 |x|)
    const auto u = bessel_u();
    for (const Vec3& x : {Vec3{0.3, 0, 0}, Vec3{0.2, -0.5, 0.1}, Vec3{0, 0, 0.9}, Vec3{1.0, 0, 0}}) {
        const double r = length(x);
        EXPECT_NEAR(std::abs(u.value(x) - std::sin(pi * r) / r), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(u.value(x) - pi / std::sqrt(2.0 * r) * std::cyl_bessel_j(0.5, pi * r)), 0.0, 1e-13);
    }
    EXPECT_NEAR(std::abs(u.value({0, 0, 0}) - pi), 0.0, 1e-14);
}

TEST(Bessel, Report) {
    const auto g = build_grid(DomainSpec::unit_ball(), 16);
    const auto rep = bessel_example(g);
    EXPECT_LE(rep.root_error, 1e-12);
    EXPECT_LE(rep.boundary_max, 1e-12);
    EXPECT_LE(rep.eigen_residual, 1e-10);
    EXPECT_LE(rep.vekua_residual, 1e-8);
    EXPECT_LE(rep.vekua_residual_grid, 0.1);
    EXPECT_GT(rep.w_norm, 0.1);
    EXPECT_GT(rep.transpose_image_norm, 0.0);
}

TEST(Bessel, GridResidualIsSecondOrder) {
    const double r16 = bessel_example(build_grid(DomainSpec::unit_ball(), 16)).vekua_residual_grid;
    const double r32 = bessel_example(build_grid(DomainSpec::unit_ball(), 32)).vekua_residual_grid;
    EXPECT_GE(std::log(r16 / r32) / std::log(2.0), 1.8);
}

TEST(Bessel, OnlyOnTheUnitBall) {
    EXPECT_THROW(bessel_example(build_grid(DomainSpec::box({0, 0, 0}, {1, 1, 1}), 8)), DomainError);
    EXPECT_THROW(bessel_example(build_grid(DomainSpec::ball({0, 0, 0}, 2.0), 8)), DomainError);
}
