// checks.hpp
// Residual batteries shared by the CLI and the acceptance runner: algebra identities,
// Helmholtz fundamental solutions, right inverses, projections.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vekua/bergman.hpp"
#include "vekua/biquaternion.hpp"
#include "vekua/decomposition.hpp"
#include "vekua/grid.hpp"
#include "vekua/integral_ops.hpp"
#include "vekua/kernels.hpp"
#include "vekua/rng.hpp"

namespace vekua {

// --- algebra ----------------------------------------------------------------------------

struct AlgebraDefects {
    std::map<std::string, double> defects;  // identity name -> max defect
    double sqrt2_witness = 0.0;             // | |pq| / (|p||q|) - sqrt 2 | at p = q = 1 + i e1
};

/// Max defects of the algebra identities over `count` seeded triples (p, q, r).
inline AlgebraDefects algebra_suite(std::uint64_t seed, int count = 10000) {
    SplitMix64 rng(seed);
    double anti = 0.0, cyc = 0.0, cyc_bar = 0.0, sandwich = 0.0, sqrt2 = 0.0, assoc = 0.0, herm = 0.0, dag = 0.0;
    const double s2 = std::numbers::sqrt2;
    for (int i = 0; i < count; ++i) {
        const Biquaternion p = rng.biquaternion(), q = rng.biquaternion(), r = rng.biquaternion();
        const Biquaternion pq = p * q;
        anti = std::max(anti, max_abs_diff(conj_bar(pq), conj_bar(q) * conj_bar(p)));
        cyc = std::max(cyc, std::abs(pq.sc() - (q * p).sc()));
        cyc_bar = std::max(cyc_bar, std::abs(pq.sc() - conj_bar(pq).sc()));
        sandwich = std::max(sandwich, max_abs_diff(e1 * p * e1 + e2 * p * e2 + e3 * p * e3, p - 4.0 * Biquaternion(p.sc())));
        sqrt2 = std::max(sqrt2, norm(pq) - s2 * norm(p) * norm(q));
        const double scale = norm(p) * norm(q) * norm(r);
        assoc = std::max(assoc, norm((p * q) * r - p * (q * r)) / scale);
        herm = std::max(herm, std::abs(inner(p, q) - std::conj(inner(q, p))));
        dag = std::max(dag, max_abs_diff(conj_dagger(p), conj_bar(complex_conj(p))));
    }
    AlgebraDefects out;
    out.defects = {{"bar_antihomomorphism", anti},
                   {"sc_cyclicity", cyc},
                   {"sc_bar_invariance", cyc_bar},
                   {"unit_sandwich", sandwich},
                   {"sqrt2_inequality", std::max(0.0, sqrt2)},
                   {"associativity", assoc},
                   {"inner_hermitian", herm},
                   {"dagger_composition", dag}};
    const Biquaternion w{1.0, I_unit, 0.0, 0.0};
    out.sqrt2_witness = std::abs(norm(w * w) / (norm(w) * norm(w)) - s2);
    return out;
}

// --- Helmholtz fundamental solutions ----------------------------------------------------

/// |(D -/+ alpha) K_{-/+alpha}(x)| / |K(x)| with D by central differences of step h
/// (minus sign: D - alpha; plus sign: D + alpha).
inline double helmholtz_fd_residual(Complex alpha, KernelSign sign, const Vec3& x, double h) {
    Biquaternion D;
    const std::array<Biquaternion, 3> E{e1, e2, e3};
    for (std::size_t k = 0; k < 3; ++k) {
        Vec3 xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        D += E[k] * ((helmholtz_kernel(alpha, sign, xp) - helmholtz_kernel(alpha, sign, xm)) * (0.5 / h));
    }
    const Biquaternion K = helmholtz_kernel(alpha, sign, x);
    const Complex s = sign == KernelSign::minus ? -alpha : alpha;
    return norm(D + K * s) / norm(K);
}

/// Max residual over `points` seeded points with |x| in [0.5, 1], both signs and each alpha.
inline double helmholtz_fd_battery(std::span<const Complex> alphas, int points, double h, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double worst = 0.0;
    for (int p = 0; p < points; ++p) {
        Vec3 d{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        while (length(d) < 1e-3) d = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Vec3 x = (rng.uniform(0.5, 1.0) / length(d)) * d;
        for (const Complex a : alphas)
            for (const KernelSign s : {KernelSign::minus, KernelSign::plus})
                worst = std::max(worst, helmholtz_fd_residual(a, s, x, h));
    }
    return worst;
}

// --- refinement studies -------------------------------------------------------------------

/// log(r_coarse / r_fine) / log(h_coarse / h_fine)
inline double observed_order(double r_coarse, double r_fine, double h_coarse, double h_fine) {
    return std::log(r_coarse / r_fine) / std::log(h_coarse / h_fine);
}

/// Smooth fields supported well inside G (radius 0.8 of the inradius), for right-inverse studies.
inline std::vector<AnalyticField> smooth_battery(const DomainSpec& spec, int count, std::uint64_t seed) {
    return bump_battery(spec, count, seed, 0.8, 0.08);
}

/// max over fields of |D T u - u|_{inf, interior} / |u|_inf, interior = distance >= 2h.
inline double right_inverse_residual(const GridPtr& grid, std::span<const AnalyticField> fields) {
    std::vector<BiquatField> us;
    for (const auto& f : fields) us.push_back(sample(f, grid));
    const auto tus = make_theodorescu(grid).apply_batch(us);
    const auto cells = grid->interior(2.0 * grid->h_max());
    double worst = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i)
        worst = std::max(worst, max_norm(apply_D(tus[i]) - us[i], cells) / max_norm(us[i]));
    return worst;
}

/// |-Lap L u - u|_{inf, interior} / |u|_inf
inline double newtonian_inverse_residual(const BiquatField& u) {
    const auto& g = u.grid();
    const auto cells = g.interior(2.0 * g.h_max());
    return max_norm(laplacian(newtonian_potential(u)) + u, cells) / max_norm(u);
}

/// |T^alpha D_alpha u - u|_{inf, interior} / |u|_inf for compactly supported u
inline double t_alpha_reconstruction_residual(const AlphaParam& ap, const BiquatField& u) {
    const auto& g = u.grid();
    const auto cells = g.interior(2.0 * g.h_max());
    return max_norm(t_g_alpha(ap, apply_D_alpha(ap.alpha, u)) - u, cells) / max_norm(u);
}

/// Representative alpha for each T^alpha branch.
inline std::vector<Biquaternion> representative_alphas() {
    return {Biquaternion(Complex(1.5, 0.3)),                // scalar
            Biquaternion(0.0, 1.0, 0.5, 0.0),               // nonzero vector square
            Biquaternion(0.3, 1.0, Complex(0.0, 1.0), 0.0), // null vector square
            Biquaternion(1.0, Complex(0.0, 1.0), 0.0, 0.0), // zero divisor, nonzero scalar part
            Biquaternion(0.0, 1.0, Complex(0.0, 1.0), 0.0)};// zero divisor, zero scalar part
}

// --- projection ---------------------------------------------------------------------------

struct ProjectionDefects {
    double idempotence = 0.0;     // max |P P u - P u| / |u|
    double self_adjointness = 0.0;// max |<P u, v> - <u, P v>| / (|u||v|)
    double fixes_span = 0.0;      // max |P phi - phi| over members
    double norm_estimate = 0.0;   // power-iteration estimate of |P|
};

inline BiquatField random_field(const GridPtr& grid, SplitMix64& rng) {
    BiquatField u(grid);
    for (std::size_t c = 0; c < u.size(); ++c) u[c] = rng.biquaternion();
    return u;
}

inline ProjectionDefects projection_defects(const OrthonormalBasis& basis, int samples, std::uint64_t seed) {
    ProjectionDefects d;
    if (basis.members.empty()) return d;
    const GridPtr& grid = basis.members.front().grid_ptr();
    SplitMix64 rng(seed);
    for (int s = 0; s < samples; ++s) {
        const BiquatField u = random_field(grid, rng);
        const BiquatField v = random_field(grid, rng);
        const BiquatField pu = bergman_project(basis, u);
        const double nu = l2_norm(u), nv = l2_norm(v);
        d.idempotence = std::max(d.idempotence, l2_norm(bergman_project(basis, pu) - pu) / nu);
        d.self_adjointness =
            std::max(d.self_adjointness, std::abs(l2_inner(pu, v) - l2_inner(u, bergman_project(basis, v))) / (nu * nv));
    }
    for (const auto& phi : basis.members) d.fixes_span = std::max(d.fixes_span, l2_norm(bergman_project(basis, phi) - phi));
    BiquatField x = random_field(grid, rng);
    for (int it = 0; it < 20; ++it) {
        const double nx = l2_norm(x);
        BiquatField y = bergman_project(basis, x);
        d.norm_estimate = l2_norm(y) / nx;
        x = std::move(y);
        if (l2_norm(x) == 0.0) break;
    }
    return d;
}

}  // namespace vekua
