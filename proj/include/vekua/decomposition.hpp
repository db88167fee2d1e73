// decomposition.hpp
// Transpose and adjoint coefficient maps, compactly supported test functions, the
// annihilator (D - Q_{A*}) W_0 and its orthogonality to Vekua solutions, and the
// closed-form factorization identities (Schrodinger, f D (1/f), Darboux, Bessel).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "vekua/analytic.hpp"
#include "vekua/bergman.hpp"
#include "vekua/biquaternion.hpp"
#include "vekua/errors.hpp"
#include "vekua/grid.hpp"
#include "vekua/integral_ops.hpp"
#include "vekua/rng.hpp"

namespace vekua {

namespace detail {

template <class F>
Coefficient map_coefficient(const Coefficient& c, F&& f) {
    if (std::holds_alternative<Biquaternion>(c)) return f(std::get<Biquaternion>(c));
    return map(std::get<BiquatField>(c), f);
}

inline Biquaternion bar_fn(const Biquaternion& p) { return conj_bar(p); }
inline Biquaternion dagger_fn(const Biquaternion& p) { return conj_dagger(p); }
inline Biquaternion star_fn(const Biquaternion& p) { return complex_conj(p); }

}  // namespace detail

/// A* = (bar a1, a4, bar a3, a2), so that Q_A^T = Q_{A*} for the pairing Sc int bar(v) u.
inline CoefficientTuple transpose_coeffs(const CoefficientTuple& A) {
    return {detail::map_coefficient(A[0], detail::bar_fn), A[3], detail::map_coefficient(A[2], detail::bar_fn), A[1]};
}

/// A^dagger = (a1^dagger, a4^*, a3^dagger, a2^*), the Hilbert adjoint for l2_inner.
inline CoefficientTuple adjoint_coeffs(const CoefficientTuple& A) {
    return {detail::map_coefficient(A[0], detail::dagger_fn), detail::map_coefficient(A[3], detail::star_fn),
            detail::map_coefficient(A[2], detail::dagger_fn), detail::map_coefficient(A[1], detail::star_fn)};
}

/// (v|u) = sum_cells weight Sc(bar(v) u)
inline Complex duality_pairing(const BiquatField& v, const BiquatField& u) {
    v.check_same(u);
    Complex s{};
    for (std::size_t c = 0; c < u.size(); ++c) s += (conj_bar(v[c]) * u[c]).sc();
    return s * u.grid().weight();
}

// --- compactly supported test functions ------------------------------------------------

struct TestFunctionW0 {
    BiquatField field;
    double support_margin = 0.0;  // distance from the support to Gamma
};

/// Checks |field| <= 1e-12 within support_margin of Gamma and support_margin >= 4h.
inline void validate(const TestFunctionW0& u) {
    const auto& g = u.field.grid();
    if (u.support_margin < 4.0 * g.h_max()) throw DomainError("test function support comes closer than 4h to the boundary");
    for (std::size_t c = 0; c < g.size(); ++c)
        if (g.boundary_distance(c) < u.support_margin && norm(u.field[c]) > 1e-12)
            throw DomainError("test function does not vanish near the boundary");
}

/// bump(|x - c| / rho) p(x) with the (1 - s^2)^3 profile; the support is the ball B(c, rho).
inline TestFunctionW0 bump_test_function(const GridPtr& grid, Vec3 center, double rho, const AnalyticField& p) {
    const AnalyticField f = scalar_product(radial_scalar(bump_profile(rho), center), p);
    TestFunctionW0 u{sample(f, grid), grid->spec().distance_to_boundary(center) - rho};
    validate(u);
    return u;
}

/// Largest radius r such that B(center(G), r) lies in G.
inline double inradius(const DomainSpec& spec) {
    return spec.distance_to_boundary(spec.center());
}

/// `count` seeded bumps: centres within offset r of the domain centre, radius rho r
/// (r = inradius), times a linear polynomial with random biquaternion coefficients.
/// The defaults leave a support margin of at least 0.52 r.
inline std::vector<AnalyticField> bump_battery(const DomainSpec& spec, int count, std::uint64_t seed,
                                               double rho = 0.4, double offset = 0.08) {
    SplitMix64 rng(seed);
    const double r = inradius(spec);
    std::vector<AnalyticField> out;
    for (int i = 0; i < count; ++i) {
        Vec3 dir{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double len = length(dir);
        const Vec3 c = spec.center() + (offset * r * rng.uniform() / (len > 0.0 ? len : 1.0)) * dir;
        const Biquaternion a0 = rng.biquaternion();
        const std::array<Biquaternion, 3> b{rng.biquaternion(), rng.biquaternion(), rng.biquaternion()};
        const Vec3 cc = c;
        // polynomial centred at the bump centre keeps magnitudes balanced
        AnalyticField p = linear_field(a0 - b[0] * cc[0] - b[1] * cc[1] - b[2] * cc[2], b);
        out.push_back(scalar_product(radial_scalar(bump_profile(rho * r), c), p));
    }
    return out;
}

inline TestFunctionW0 sample_test_function(const GridPtr& grid, const AnalyticField& f, double support_margin) {
    TestFunctionW0 u{sample(f, grid), support_margin};
    validate(u);
    return u;
}

// --- annihilator and orthogonality ------------------------------------------------------

/// (D - Q_{A*}) u
inline BiquatField annihilator_element(const CoefficientTuple& A, const TestFunctionW0& u) {
    validate(u);
    return apply_D(u.field) - q_a_apply(transpose_coeffs(A), u.field);
}

/// (D - Q_{A^dagger}) u, the l2-orthogonal complement element
inline BiquatField orthogonal_complement_element(const CoefficientTuple& A, const TestFunctionW0& u) {
    validate(u);
    return apply_D(u.field) - q_a_apply(adjoint_coeffs(A), u.field);
}

/// max_n |<phi_n, v>| / (|phi_n| |v|) for v = (D - Q_{A^dagger}) u
inline double orthogonality_check(const CoefficientTuple& A, std::span<const BiquatField> members,
                                  const TestFunctionW0& u) {
    const BiquatField v = orthogonal_complement_element(A, u);
    const double nv = l2_norm(v);
    if (nv == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& phi : members) worst = std::max(worst, std::abs(l2_inner(phi, v)) / (l2_norm(phi) * nv));
    return worst;
}

inline double orthogonality_check(const CoefficientTuple& A, const OrthonormalBasis& basis, const TestFunctionW0& u) {
    return orthogonality_check(A, std::span<const BiquatField>(basis.members), u);
}

// --- closed-form Vekua residual ----------------------------------------------------------

/// Q_A at one point for constant coefficients.
inline Biquaternion q_a_point(const CoefficientTuple& A, const Biquaternion& w) {
    for (std::size_t j = 0; j < 4; ++j)
        if (!A.is_constant(j)) throw DomainError("pointwise Q_A needs constant coefficients");
    const Biquaternion wb = conj_bar(w);
    return w * A.constant(0) + wb * A.constant(1) + A.constant(2) * w + A.constant(3) * wb;
}

/// max over cell centres |D w - Q_A w| / max |w| with D w from the exact gradient.
inline double vekua_residual_analytic(const CoefficientTuple& A, const AnalyticField& w, const DomainGrid& g) {
    double num = 0.0, den = 0.0;
    for (const auto& x : g.centers()) {
        const Biquaternion v = w.value(x);
        num = std::max(num, norm(w.D(x) - q_a_point(A, v)));
        den = std::max(den, norm(v));
    }
    return den > 0.0 ? num / den : num;
}

// --- Schrodinger factorization --------------------------------------------------------------

/// f with q_f = Lap f / f, q_{1/f} = f Lap(1/f) and R_jk = f_jk / f - f_j f_k / f^2, on grid cells.
struct SchrodingerData {
    AnalyticScalar f;
    GridPtr grid;
    ScalarField f_values;
    ScalarField q_f;
    ScalarField q_inv_f;
    std::array<std::array<ScalarField, 3>, 3> R;
};

namespace detail {

inline void require_nonvanishing(const AnalyticScalar& f, const DomainGrid& g) {
    for (const auto& x : g.centers())
        if (std::abs(f.value(x)) < 1e-12) throw DomainError("f vanishes on a grid cell");
}

/// f Lap(1/f) by the quotient rule: d_jk(1/f) = -f_jk/f^2 + 2 f_j f_k / f^3.
inline Complex q_inverse_quotient_rule(const AnalyticScalar& f, const Vec3& x) {
    const Complex v = f.value(x);
    const auto g = f.grad(x);
    const auto H = f.hess(x);
    Complex lap{};
    for (std::size_t k = 0; k < 3; ++k) lap += -H[k][k] / (v * v) + 2.0 * g[k] * g[k] / (v * v * v);
    return v * lap;
}

inline Biquaternion log_gradient(const AnalyticScalar& f, const Vec3& x) {
    const auto g = f.grad(x);
    const Complex v = f.value(x);
    return {0.0, g[0] / v, g[1] / v, g[2] / v};
}

}  // namespace detail

inline SchrodingerData make_schrodinger_data(const AnalyticScalar& f, const GridPtr& grid) {
    detail::require_nonvanishing(f, *grid);
    SchrodingerData d{f, grid, ScalarField(grid), ScalarField(grid), ScalarField(grid), {}};
    for (auto& row : d.R)
        for (auto& r : row) r = ScalarField(grid);
    for (std::size_t c = 0; c < grid->size(); ++c) {
        const Vec3& x = grid->center(c);
        const Complex v = f.value(x);
        const auto g = f.grad(x);
        const auto H = f.hess(x);
        d.f_values[c] = v;
        d.q_f[c] = (H[0][0] + H[1][1] + H[2][2]) / v;
        d.q_inv_f[c] = detail::q_inverse_quotient_rule(f, x);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) d.R[j][k][c] = H[k][j] / v - g[k] * g[j] / (v * v);
    }
    return d;
}

/// max |q_{1/f} - (-2 (grad f / f)^2 - Lap f / f)|, the square taken in H_C.
inline double darboux_defect(const SchrodingerData& d) {
    double worst = 0.0;
    for (std::size_t c = 0; c < d.grid->size(); ++c) {
        const Biquaternion g = detail::log_gradient(d.f, d.grid->center(c));
        const Complex printed = -2.0 * (g * g).sc() - d.q_f[c];
        worst = std::max(worst, std::abs(d.q_inv_f[c] - printed) / std::max(1.0, std::abs(d.q_inv_f[c])));
    }
    return worst;
}

/// D_f D_{1/f} w with D_f = D + M^g, D_{1/f} = D - M^g, g = grad f / f, composed directly:
///   D(D w - w g) + (D w - w g) g
/// from exact derivatives of w and f.
inline Biquaternion schrodinger_lhs(const AnalyticScalar& f, const AnalyticField& w, const Vec3& x) {
    const Complex fv = f.value(x);
    const auto fg = f.grad(x);
    const auto fh = f.hess(x);
    const Biquaternion g{0.0, fg[0] / fv, fg[1] / fv, fg[2] / fv};
    std::array<Biquaternion, 3> dg;  // d g / d x_k
    for (std::size_t k = 0; k < 3; ++k)
        dg[k] = Biquaternion{0.0, fh[k][0] / fv - fg[0] * fg[k] / (fv * fv), fh[k][1] / fv - fg[1] * fg[k] / (fv * fv),
                             fh[k][2] / fv - fg[2] * fg[k] / (fv * fv)};
    const Biquaternion wv = w.value(x);
    const auto wg = w.grad(x);
    const auto wh = w.hess(x);
    const std::array<Biquaternion, 3> E{e1, e2, e3};

    Biquaternion DDw, Dwg, Dw;
    for (std::size_t k = 0; k < 3; ++k) {
        Dw += E[k] * wg[k];
        Dwg += E[k] * (wg[k] * g + wv * dg[k]);
        for (std::size_t j = 0; j < 3; ++j) DDw += E[k] * E[j] * wh[k][j];
    }
    const Biquaternion inner_v = Dw - wv * g;
    return DDw - Dwg + inner_v * g;
}

struct FactorizationResiduals {
    double scalar = 0.0;
    double vector = 0.0;
};

/// Compares the composition with (-Lap + q_f) Sc w and (-Lap + q_{1/f}) vec w + 2 R vec w
/// at every cell; residuals are relative to the largest magnitude involved.
inline FactorizationResiduals schrodinger_factorization_check(const SchrodingerData& d, const AnalyticField& w) {
    double sc_num = 0.0, vec_num = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < d.grid->size(); ++c) {
        const Vec3& x = d.grid->center(c);
        const Biquaternion lhs = schrodinger_lhs(d.f, w, x);
        const Biquaternion wv = w.value(x);
        const Biquaternion lap = w.laplacian(x);
        const Complex rhs_sc = -lap[0] + d.q_f[c] * wv[0];
        std::array<Complex, 3> rhs_vec;
        for (std::size_t k = 0; k < 3; ++k) {
            Complex rw{};
            for (std::size_t j = 0; j < 3; ++j) rw += d.R[k][j][c] * wv[j + 1];
            rhs_vec[k] = -lap[k + 1] + d.q_inv_f[c] * wv[k + 1] + 2.0 * rw;
        }
        sc_num = std::max(sc_num, std::abs(lhs[0] - rhs_sc));
        double vd = 0.0;
        for (std::size_t k = 0; k < 3; ++k) vd = std::max(vd, std::abs(lhs[k + 1] - rhs_vec[k]));
        vec_num = std::max(vec_num, vd);
        scale = std::max({scale, norm(lhs), norm(wv), norm(lap)});
    }
    if (scale == 0.0) scale = 1.0;
    return {sc_num / scale, vec_num / scale};
}

// --- f D (1/f) factorization --------------------------------------------------------------

/// (f D (1/f)) ((1/f) D f) u composed directly: with g = grad f / f and v = g u + D u,
/// the product is D v - g v.
inline Biquaternion df_lhs(const AnalyticScalar& f, const AnalyticField& u, const Vec3& x) {
    const Complex fv = f.value(x);
    const auto fg = f.grad(x);
    const auto fh = f.hess(x);
    const Biquaternion g{0.0, fg[0] / fv, fg[1] / fv, fg[2] / fv};
    const Biquaternion uv = u.value(x);
    const auto ug = u.grad(x);
    const auto uh = u.hess(x);
    const std::array<Biquaternion, 3> E{e1, e2, e3};
    Biquaternion Du, Dv;
    for (std::size_t k = 0; k < 3; ++k) {
        Du += E[k] * ug[k];
        const Biquaternion dgk{0.0, fh[k][0] / fv - fg[0] * fg[k] / (fv * fv), fh[k][1] / fv - fg[1] * fg[k] / (fv * fv),
                               fh[k][2] / fv - fg[2] * fg[k] / (fv * fv)};
        Biquaternion dDu;  // d/dx_k of D u
        for (std::size_t j = 0; j < 3; ++j) dDu += E[j] * uh[k][j];
        Dv += E[k] * (dgk * uv + g * ug[k] + dDu);
    }
    const Biquaternion v = g * uv + Du;
    return Dv - g * v;
}

/// (-Lap + q_{1/f}) u - (2/f) sum_{k != j} e_k e_j (df/dx_k)(du/dx_j)
inline Biquaternion df_rhs(const AnalyticScalar& f, const AnalyticField& u, const Vec3& x) {
    const Complex fv = f.value(x);
    const auto fg = f.grad(x);
    const auto ug = u.grad(x);
    const std::array<Biquaternion, 3> E{e1, e2, e3};
    Biquaternion cross;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t j = 0; j < 3; ++j)
            if (k != j) cross += E[k] * E[j] * ug[j] * fg[k];
    const Complex q_inv = detail::q_inverse_quotient_rule(f, x);
    return -u.laplacian(x) + u.value(x) * q_inv - cross * (2.0 / fv);
}

/// max |lhs - rhs| / max(|lhs|, |u|, |Lap u|) over cell centres
inline double df_factorization_check(const AnalyticScalar& f, const AnalyticField& u, const DomainGrid& g) {
    detail::require_nonvanishing(f, g);
    double num = 0.0, scale = 0.0;
    for (const auto& x : g.centers()) {
        const Biquaternion l = df_lhs(f, u, x);
        num = std::max(num, norm(l - df_rhs(f, u, x)));
        scale = std::max({scale, norm(l), norm(u.value(x)), norm(u.laplacian(x))});
    }
    return scale > 0.0 ? num / scale : num;
}

// --- Bessel example ---------------------------------------------------------------------

/// First positive zero of J_{1/2}, bracketed in [2, 4] and bisected to machine precision.
inline double first_root_j_half() {
    double lo = 2.0, hi = 4.0;
    double flo = std::cyl_bessel_j(0.5, lo);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = std::cyl_bessel_j(0.5, mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct BesselReport {
    double sqrt_lambda = 0.0;          // first root of J_{1/2}
    double root_error = 0.0;           // |sqrt_lambda - pi|
    double boundary_max = 0.0;         // max |u| on a sphere mesh of Gamma
    double eigen_residual = 0.0;       // max |(-Lap - pi^2) u| / max |u|, closed form
    double vekua_residual = 0.0;       // w = grad u + i pi u e1 with A = (i pi e1, 0, 0, 0), closed form
    double vekua_residual_grid = 0.0;  // same with finite differences on the grid
    double w_norm = 0.0;               // |w|_L2
    double w_projection_norm = 0.0;    // |P w| on a Vekua basis, if one is given
    double transpose_image_norm = 0.0; // |(D + M^alpha) u|_L2 from finite differences
};

inline CoefficientTuple bessel_coefficients() {
    return {Biquaternion{0.0, Complex(0.0, std::numbers::pi), 0.0, 0.0}, Biquaternion{}, Biquaternion{}, Biquaternion{}};
}

inline AnalyticScalar bessel_u() { return radial_scalar(sinc_pi_profile()); }

inline AnalyticField bessel_w() {
    return gradient_plus(bessel_u(), Biquaternion{0.0, Complex(0.0, std::numbers::pi), 0.0, 0.0});
}

inline BesselReport bessel_example(const GridPtr& grid, const OrthonormalBasis* basis = nullptr) {
    const auto& spec = grid->spec();
    if (!spec.is_ball() || !(spec == DomainSpec::unit_ball())) throw DomainError("the Bessel example lives on the unit ball");
    BesselReport rep;
    rep.sqrt_lambda = first_root_j_half();
    rep.root_error = std::abs(rep.sqrt_lambda - std::numbers::pi);

    const AnalyticScalar u = bessel_u();
    const auto mesh = sphere_mesh(spec, 1000);
    for (const auto& p : mesh.points) rep.boundary_max = std::max(rep.boundary_max, std::abs(u.value(p)));

    double num = 0.0, den = 0.0;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (const auto& x : grid->centers()) {
        num = std::max(num, std::abs(-u.laplacian(x) - pi2 * u.value(x)));
        den = std::max(den, std::abs(u.value(x)));
    }
    rep.eigen_residual = num / den;

    const CoefficientTuple A = bessel_coefficients();
    const AnalyticField w = bessel_w();
    rep.vekua_residual = vekua_residual_analytic(A, w, *grid);
    const BiquatField wf = sample(w, grid);
    rep.vekua_residual_grid = vekua_residual(A, wf);
    rep.w_norm = l2_norm(wf);
    if (basis) rep.w_projection_norm = l2_norm(bergman_project(*basis, wf));
    const BiquatField uf = sample([&](const Vec3& x) { return Biquaternion(u.value(x)); }, grid);
    rep.transpose_image_norm = l2_norm(apply_D_alpha(A.constant(0), uf));
    return rep;
}

}  // namespace vekua
