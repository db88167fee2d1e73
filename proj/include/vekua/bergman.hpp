// bergman.hpp
// Finite-dimensional model of the Vekua-Bergman space: Cauchy-kernel monogenic families
// from exterior points, transport by (S_G^A)^{-1}, Gram-Schmidt over the complex L2
// product, reproducing kernels K_x^k, the kernel K(x, t; a), the projection P, and the
// right-module kernel.
//
// Point evaluation of a grid field at x means the value at the cell containing x.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vekua/biquaternion.hpp"
#include "vekua/errors.hpp"
#include "vekua/grid.hpp"
#include "vekua/integral_ops.hpp"
#include "vekua/kernels.hpp"
#include "vekua/snapshot.hpp"

namespace vekua {

/// m Fibonacci points on the sphere of radius scale * circumradius(G) about its centre.
inline std::vector<Vec3> exterior_points(const DomainSpec& spec, int m, double scale) {
    if (m < 1) throw DomainError("exterior_points requires m >= 1");
    if (!(scale > 1.0)) throw DomainError("exterior point scale must exceed 1");
    const double R = scale * spec.circumradius();
    std::vector<Vec3> out;
    for (const auto& u : fibonacci_sphere(m)) out.push_back(spec.center() + R * u);
    return out;
}

/// E(. - q_n) e_j for every point q_n and j = 0..3, point-major.
inline std::vector<BiquatField> monogenic_basis(const GridPtr& grid, std::span<const Vec3> points) {
    std::vector<BiquatField> out;
    out.reserve(4 * points.size());
    for (const auto& q : points) {
        if (grid->spec().distance_to_boundary(q) >= 0.0) throw DomainError("basis point lies in the closure of G");
        for (int j = 0; j < 4; ++j) {
            const Biquaternion ej = Biquaternion::unit(j);
            out.push_back(sample([&](const Vec3& x) { return cauchy_kernel(x - q) * ej; }, grid));
        }
    }
    return out;
}

struct VekuaBasisResult {
    std::vector<BiquatField> members;
    std::vector<double> vekua_residuals;
    std::vector<int> iterations;
    double kappa = 0.0;
};

/// w_n = (S_G^A)^{-1} h_n for each monogenic h_n (all right-hand sides iterated together).
inline VekuaBasisResult vekua_basis(const CoefficientTuple& A, std::span<const BiquatField> mono, double tol = 1e-10,
                                    int max_iter = 200) {
    VekuaBasisResult out;
    if (mono.empty()) return out;
    out.kappa = contraction_constant(A, mono.front().grid().spec());
    if (A.is_zero()) {
        out.members.assign(mono.begin(), mono.end());
        out.iterations.assign(mono.size(), 0);
    } else {
        auto inv = s_g_a_inverse_batch(A, mono, tol, max_iter);
        for (auto& r : inv) {
            out.members.push_back(std::move(r.w));
            out.iterations.push_back(r.iterations);
        }
    }
    for (const auto& w : out.members) out.vekua_residuals.push_back(vekua_residual(A, w));
    return out;
}

/// Relative discretization tolerance for Vekua residuals: 10 (h + |sum weights - vol| / vol).
inline double vekua_tolerance(const DomainGrid& g) {
    const double vol = g.spec().volume();
    return 10.0 * (g.h_max() + std::abs(g.total_weight() - vol) / vol);
}

/// Smallest eigenvalue of the Gram matrix of the l2-normalized fields.
inline double gram_min_eigenvalue(std::span<const BiquatField> fields) {
    const auto m = static_cast<Eigen::Index>(fields.size());
    if (m == 0) return 0.0;
    std::vector<double> nrm(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) nrm[i] = l2_norm(fields[i]);
    Eigen::MatrixXcd G(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
            const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
            const Complex g = l2_inner(fields[a], fields[b]) / (nrm[a] * nrm[b]);
            G(i, j) = g;
            G(j, i) = std::conj(g);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

struct OrthonormalBasis {
    std::vector<BiquatField> members;
    double gram_residual = 0.0;
    std::vector<std::size_t> dropped;  // input indices removed as numerically dependent
    json source = json::object();      // generating points, coefficients, tolerances

    std::size_t size() const { return members.size(); }
    const DomainGrid& grid() const { return members.front().grid(); }
    const GridPtr& grid_ptr() const { return members.front().grid_ptr(); }
};

/// max |<phi_m, phi_n> - delta_mn|
inline double gram_residual(std::span<const BiquatField> phi) {
    double r = 0.0;
    for (std::size_t m = 0; m < phi.size(); ++m)
        for (std::size_t n = m; n < phi.size(); ++n) {
            const Complex g = l2_inner(phi[m], phi[n]);
            r = std::max(r, std::abs(g - Complex(m == n ? 1.0 : 0.0)));
        }
    return r;
}

inline constexpr double rank_drop_threshold = 1e-10;

/// Modified Gram-Schmidt with one reorthogonalization pass; a field whose remainder falls
/// below 1e-10 of its original norm is dropped.
inline OrthonormalBasis gram_schmidt(std::span<const BiquatField> fields) {
    if (fields.empty()) throw VekuaError("gram_schmidt needs at least one field");
    OrthonormalBasis out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        BiquatField v = fields[i];
        const double n0 = l2_norm(v);
        if (n0 > 0.0) {
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& phi : out.members) v -= Complex(l2_inner(phi, v)) * phi;
        }
        const double n1 = l2_norm(v);
        if (n0 == 0.0 || n1 < rank_drop_threshold * n0) {
            out.dropped.push_back(i);
            continue;
        }
        v *= Complex(1.0 / n1);
        out.members.push_back(std::move(v));
    }
    if (out.members.empty()) throw VekuaError("all fields are numerically zero");
    out.gram_residual = gram_residual(out.members);
    return out;
}

// --- kernels ---------------------------------------------------------------------

/// Cell used for point evaluation at x; x must lie at least 2h inside G.
inline std::size_t evaluation_cell(const DomainGrid& g, const Vec3& x) {
    const auto cell = g.locate(x);
    if (cell == DomainGrid::outside) throw DomainError("evaluation point is not in an inside cell");
    if (g.boundary_distance(static_cast<std::size_t>(cell)) < 2.0 * g.h_max())
        throw DomainError("evaluation point lies within 2h of the boundary");
    return static_cast<std::size_t>(cell);
}

/// K_x^k = sum_n phi_n conj(phi_{n,k}(x)); <K_x^k, w> = w_k(x) on the span.
inline BiquatField kernel_component(const OrthonormalBasis& basis, const Vec3& x, int k) {
    if (k < 0 || k > 3) throw DomainError("component index must be 0..3");
    const auto cx = evaluation_cell(basis.grid(), x);
    BiquatField out(basis.grid_ptr());
    for (const auto& phi : basis.members) out += std::conj(phi[cx][static_cast<std::size_t>(k)]) * phi;
    return out;
}

using KernelMatrix = std::array<std::array<Complex, 4>, 4>;

/// entries[k][j] = K_x^{k,j}(t) = j-th component of K_x^k at t
inline KernelMatrix kernel_matrix(const OrthonormalBasis& basis, const Vec3& x, const Vec3& t) {
    const auto cx = evaluation_cell(basis.grid(), x);
    const auto ct = evaluation_cell(basis.grid(), t);
    KernelMatrix K{};
    for (const auto& phi : basis.members)
        for (std::size_t k = 0; k < 4; ++k)
            for (std::size_t j = 0; j < 4; ++j) K[k][j] += phi[ct][j] * std::conj(phi[cx][k]);
    return K;
}

/// max |K_x^{k,j}(t) - conj(K_t^{j,k}(x))|
inline double kernel_hermitian_defect(const KernelMatrix& kxt, const KernelMatrix& ktx) {
    double d = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 4; ++j) d = std::max(d, std::abs(kxt[k][j] - std::conj(ktx[j][k])));
    return d;
}

/// K(x, t; a) = sum_n phi_n(x) <phi_n(t), a>
inline Biquaternion bergman_kernel(const OrthonormalBasis& basis, const Vec3& x, const Vec3& t, const Biquaternion& a) {
    const auto cx = evaluation_cell(basis.grid(), x);
    const auto ct = evaluation_cell(basis.grid(), t);
    Biquaternion s;
    for (const auto& phi : basis.members) s += phi[cx] * inner(phi[ct], a);
    return s;
}

/// P u = sum_n phi_n <phi_n, u>
inline BiquatField bergman_project(const OrthonormalBasis& basis, const BiquatField& u) {
    check_same_grid(basis.grid(), u.grid());
    BiquatField out(u.grid_ptr());
    for (const auto& phi : basis.members) out += l2_inner(phi, u) * phi;
    return out;
}

/// |u - P u| / |u|
inline double reproduction_error(const OrthonormalBasis& basis, const BiquatField& u) {
    return l2_norm(u - bergman_project(basis, u)) / l2_norm(u);
}

// --- right-module kernel -------------------------------------------------------------

/// Right-module type: a2 = a4 = 0 and a1 scalar-valued, so w a solves the equation
/// whenever w does.
inline bool is_right_module_type(const CoefficientTuple& A, double tol = 1e-14) {
    if (A.sup_bounds()[1] > tol || A.sup_bounds()[3] > tol) return false;
    if (A.is_constant(0)) return norm(A.constant(0).vector_part()) <= tol;
    for (const auto& v : A.field(0).values())
        if (norm(v.vector_part()) > tol) return false;
    return true;
}

/// Empirical module test: right multiplication by e1, e2, e3, i e0 must not increase the
/// Vekua residual of the first members (|w a| = |w| pointwise for these units).
inline bool module_test_passes(const CoefficientTuple& A, std::span<const BiquatField> members, std::size_t count = 3) {
    const std::array<Biquaternion, 4> units{e1, e2, e3, Biquaternion(I_unit)};
    for (std::size_t i = 0; i < std::min(count, members.size()); ++i) {
        const double base = vekua_residual(A, members[i]);
        for (const auto& a : units)
            if (vekua_residual(A, right_mul(members[i], a)) > base * (1.0 + 1e-6) + 1e-12) return false;
    }
    return true;
}

/// K(x, t) = (K_x^0(t))^dagger, reproducing w(x) = sum_t weight K(x, t) w(t) on right modules.
inline Biquaternion module_kernel(const OrthonormalBasis& basis, const CoefficientTuple& A, const Vec3& x, const Vec3& t) {
    if (!is_right_module_type(A) || !module_test_passes(A, basis.members))
        throw ModuleStructureAbsent("coefficients do not define a right H_C-module");
    const auto cx = evaluation_cell(basis.grid(), x);
    const auto ct = evaluation_cell(basis.grid(), t);
    Biquaternion k0;
    for (const auto& phi : basis.members) k0 += phi[ct] * std::conj(phi[cx][0]);
    return conj_dagger(k0);
}

/// sum_t weight K(x, t) w(t) with K the module kernel, evaluated for all t at once.
inline Biquaternion module_reproduce(const OrthonormalBasis& basis, const CoefficientTuple& A, const Vec3& x,
                                     const BiquatField& w) {
    if (!is_right_module_type(A) || !module_test_passes(A, basis.members))
        throw ModuleStructureAbsent("coefficients do not define a right H_C-module");
    const auto cx = evaluation_cell(basis.grid(), x);
    // sum_t (sum_n phi_n(t) conj(phi_n0(x)))^dagger w(t) = sum_n phi_n0(x) <<phi_n | w>>
    Biquaternion s;
    for (const auto& phi : basis.members) s += hc_inner(phi, w) * phi[cx][0];
    return s;
}

// --- persistence -----------------------------------------------------------------------

/// VKB1 manifest ({"kind": "basis", "count", ...source}) followed by one snapshot per member.
inline void save_basis(std::ostream& os, const OrthonormalBasis& basis) {
    json manifest = basis.source;
    manifest["kind"] = "basis";
    manifest["count"] = basis.size();
    manifest["gram_residual"] = basis.gram_residual;
    manifest["dropped"] = basis.dropped;
    write_vkb1_header(os, manifest);
    for (const auto& phi : basis.members) write_snapshot(os, phi);
}

inline OrthonormalBasis load_basis(std::istream& is) {
    const json manifest = read_vkb1_header(is);
    if (manifest.value("kind", "") != "basis") throw VekuaError("VKB1 stream is not a basis container");
    OrthonormalBasis basis;
    const auto count = manifest.at("count").get<std::size_t>();
    GridPtr grid;
    for (std::size_t i = 0; i < count; ++i) {
        basis.members.push_back(read_snapshot(is, grid));
        grid = basis.members.back().grid_ptr();
    }
    basis.gram_residual = manifest.at("gram_residual").get<double>();
    basis.dropped = manifest.at("dropped").get<std::vector<std::size_t>>();
    basis.source = manifest;
    basis.source.erase("kind");
    basis.source.erase("count");
    basis.source.erase("gram_residual");
    basis.source.erase("dropped");
    return basis;
}

}  // namespace vekua
