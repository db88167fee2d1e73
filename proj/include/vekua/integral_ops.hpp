// integral_ops.hpp
// Theodorescu transform T_G, boundary Cauchy operator C_Gamma, Borel-Pompeiu residual,
// Q_A and S_G^A = I - T_G Q_A with its Neumann-series inverse, the Helmholtz-type
// transforms T^beta, the biquaternionic T^alpha, and the Newtonian potential L_G.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vekua/biquaternion.hpp"
#include "vekua/convolution.hpp"
#include "vekua/errors.hpp"
#include "vekua/grid.hpp"
#include "vekua/kernels.hpp"
#include "vekua/rng.hpp"

namespace vekua {

// --- T_G ---------------------------------------------------------------------

/// T_G u(x) = sum_{y != x} weight * E(x - y) u(y); zero self-cell (E is odd).
inline ConvolutionOperator make_theodorescu(const GridPtr& grid) {
    return ConvolutionOperator(grid, [](const Vec3& d) { return cauchy_kernel(d); }, Biquaternion{},
                               KernelShape::real_vector);
}

inline BiquatField theodorescu(const BiquatField& u) { return make_theodorescu(u.grid_ptr()).apply(u); }

inline std::vector<BiquatField> theodorescu_batch(std::span<const BiquatField> us) {
    if (us.empty()) return {};
    return make_theodorescu(us.front().grid_ptr()).apply_batch(us);
}

/// Power iteration for the discrete operator norm of T_G (T_G is Hermitian for l2_inner,
/// so the iteration runs on T_G^2 and returns the square root of the Rayleigh quotient).
inline double theodorescu_norm_estimate(const GridPtr& grid, int iterations, std::uint64_t seed) {
    const auto T = make_theodorescu(grid);
    SplitMix64 rng(seed);
    BiquatField v(grid);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = rng.biquaternion();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const double nv = l2_norm(v);
        v *= Complex(1.0 / nv);
        BiquatField w = T.apply(T.apply(v));
        est = std::sqrt(std::max(0.0, l2_inner(v, w).real()));
        v = std::move(w);
    }
    return est;
}

// --- C_Gamma and Borel-Pompeiu -----------------------------------------------

struct CauchyValue {
    Biquaternion value;
    bool near_singular = false;
};

template <class Fn>
std::vector<Biquaternion> boundary_trace(const SurfaceMesh& mesh, Fn&& fn) {
    std::vector<Biquaternion> out;
    out.reserve(mesh.size());
    for (const auto& p : mesh.points) out.push_back(fn(p));
    return out;
}

/// C_Gamma psi(x) = sum_y area * E(y - x) nu(y) psi(y). `near_tol` (typically h/2) sets
/// the distance to Gamma below which the result is flagged.
inline CauchyValue cauchy_boundary(const SurfaceMesh& mesh, std::span<const Biquaternion> psi, const Vec3& x,
                                   double near_tol = 0.0) {
    if (psi.size() != mesh.size()) throw DomainError("boundary data length does not match the mesh");
    CauchyValue out;
    double dist = std::numeric_limits<double>::infinity();
    if (mesh.surface_of) {
        dist = std::abs(mesh.surface_of->distance_to_boundary(x));
    } else {
        for (const auto& p : mesh.points) dist = std::min(dist, length(p - x));
    }
    out.near_singular = dist < near_tol;
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        const Vec3 d = mesh.points[j] - x;
        if (length(d) == 0.0) throw DomainError("Cauchy integral evaluated on a quadrature node");
        out.value += cauchy_kernel(d) * as_vector(mesh.normals[j]) * psi[j] * mesh.areas[j];
    }
    return out;
}

/// Interior probe cells: every cell at distance >= margin from Gamma, thinned to at most
/// `max_probes` by a fixed stride.
inline std::vector<std::size_t> probe_cells(const DomainGrid& grid, double margin, std::size_t max_probes) {
    auto cells = grid.interior(margin);
    if (cells.size() <= max_probes || max_probes == 0) return cells;
    std::vector<std::size_t> out;
    const double stride = static_cast<double>(cells.size()) / static_cast<double>(max_probes);
    for (std::size_t p = 0; p < max_probes; ++p) out.push_back(cells[static_cast<std::size_t>(p * stride)]);
    return out;
}

/// max over probes |C_Gamma[u|Gamma] + T_G[D u] - u| / max_G |u| for an analytic u.
template <class Fn>
double borel_pompeiu_residual(const GridPtr& grid, const SurfaceMesh& mesh, Fn&& u_fn,
                              std::span<const std::size_t> probes) {
    if (!grid->spec().is_ball()) throw DomainError("Borel-Pompeiu residual requires a ball domain");
    const BiquatField u = sample(u_fn, grid);
    const BiquatField du = apply_D(u);
    const auto tdu = make_theodorescu(grid).apply_at(du, probes);
    const auto trace = boundary_trace(mesh, u_fn);
    const double scale = max_norm(u);
    double worst = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const Vec3& x = grid->center(probes[p]);
        const Biquaternion c = cauchy_boundary(mesh, trace, x).value;
        worst = std::max(worst, norm(c + tdu[p] - u[probes[p]]));
    }
    return scale > 0.0 ? worst / scale : worst;
}

// --- coefficients, Q_A and S_G^A ---------------------------------------------

using Coefficient = std::variant<Biquaternion, BiquatField>;

/// A = (a1, a2, a3, a4) with sup-norm bounds over the grid.
class CoefficientTuple {
public:
    CoefficientTuple() : a_{Biquaternion{}, Biquaternion{}, Biquaternion{}, Biquaternion{}} { refresh(); }
    CoefficientTuple(Coefficient a1, Coefficient a2, Coefficient a3, Coefficient a4)
        : a_{std::move(a1), std::move(a2), std::move(a3), std::move(a4)} {
        refresh();
    }

    static CoefficientTuple zero() { return {}; }

    const Coefficient& operator[](std::size_t j) const { return a_[j]; }
    bool is_constant(std::size_t j) const { return std::holds_alternative<Biquaternion>(a_[j]); }
    const Biquaternion& constant(std::size_t j) const { return std::get<Biquaternion>(a_[j]); }
    const BiquatField& field(std::size_t j) const { return std::get<BiquatField>(a_[j]); }

    Biquaternion at(std::size_t j, std::size_t cell) const {
        return is_constant(j) ? constant(j) : field(j)[cell];
    }

    const std::array<double, 4>& sup_bounds() const { return sup_; }
    double sup_sum() const { return sup_[0] + sup_[1] + sup_[2] + sup_[3]; }
    bool is_zero() const { return sup_sum() == 0.0; }

    /// Applies f to every coefficient (constant or field) pointwise.
    template <class F>
    CoefficientTuple transform(F&& f) const {
        std::array<Coefficient, 4> out;
        for (std::size_t j = 0; j < 4; ++j) {
            if (is_constant(j)) {
                out[j] = f(constant(j));
            } else {
                out[j] = map(field(j), f);
            }
        }
        return {out[0], out[1], out[2], out[3]};
    }

    void check_grid(const DomainGrid& g) const {
        for (std::size_t j = 0; j < 4; ++j)
            if (!is_constant(j)) check_same_grid(field(j).grid(), g);
    }

private:
    void refresh() {
        for (std::size_t j = 0; j < 4; ++j) sup_[j] = is_constant(j) ? norm(constant(j)) : max_norm(field(j));
    }

    std::array<Coefficient, 4> a_;
    std::array<double, 4> sup_{};
};

/// Q_A w = w a1 + bar(w) a2 + a3 w + a4 bar(w)
inline BiquatField q_a_apply(const CoefficientTuple& A, const BiquatField& w) {
    A.check_grid(w.grid());
    BiquatField out(w.grid_ptr());
    for (std::size_t c = 0; c < w.size(); ++c) {
        const Biquaternion wb = conj_bar(w[c]);
        out[c] = w[c] * A.at(0, c) + wb * A.at(1, c) + A.at(2, c) * w[c] + A.at(3, c) * wb;
    }
    return out;
}

/// S_G^A w = w - T_G Q_A w
inline BiquatField s_g_a_apply(const CoefficientTuple& A, const BiquatField& w) {
    return w - theodorescu(q_a_apply(A, w));
}

/// kappa = (sqrt2 diam G) * (sqrt2 sum_j sup|a_j|), the certified bound on |T_G Q_A|.
inline double contraction_constant(const CoefficientTuple& A, const DomainSpec& spec) {
    return 2.0 * spec.diameter() * A.sup_sum();
}

struct NeumannResult {
    BiquatField w;
    int iterations = 0;
    std::vector<double> residuals;  // |S w_k - h| / |h| for k = 0, 1, ...
    double kappa = 0.0;
};

/// (S_G^A)^{-1} h for several right-hand sides at once, by w_{k+1} = h + T_G Q_A w_k.
/// Since S w_k - h = w_k - w_{k+1}, the residual is known exactly at every step; each
/// w_k is returned as soon as its relative residual is <= tol.
inline std::vector<NeumannResult> s_g_a_inverse_batch(const CoefficientTuple& A, std::span<const BiquatField> hs,
                                                      double tol, int max_iter) {
    std::vector<NeumannResult> out(hs.size());
    if (hs.empty()) return out;
    const GridPtr& grid = hs.front().grid_ptr();
    const double kappa = contraction_constant(A, grid->spec());
    if (kappa >= 1.0) throw ContractionViolated(kappa);
    const auto T = make_theodorescu(grid);

    std::vector<double> hnorm(hs.size());
    std::vector<std::size_t> active;
    for (std::size_t f = 0; f < hs.size(); ++f) {
        out[f].w = hs[f];
        out[f].kappa = kappa;
        hnorm[f] = l2_norm(hs[f]);
        if (hnorm[f] == 0.0) continue;
        active.push_back(f);
    }
    for (int it = 0; !active.empty(); ++it) {
        if (it >= max_iter) {
            const auto& r = out[active.front()].residuals;
            throw NoConvergence(max_iter, r.empty() ? 0.0 : r.back());
        }
        std::vector<BiquatField> q;
        q.reserve(active.size());
        for (auto f : active) q.push_back(q_a_apply(A, out[f].w));
        const auto tq = T.apply_batch(q);
        std::vector<std::size_t> still;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const auto f = active[a];
            BiquatField next = hs[f] + tq[a];
            const double r = l2_norm(next - out[f].w) / hnorm[f];
            out[f].residuals.push_back(r);
            out[f].iterations = it + 1;
            if (r <= tol) continue;
            out[f].w = std::move(next);
            still.push_back(f);
        }
        active = std::move(still);
    }
    return out;
}

inline NeumannResult s_g_a_inverse(const CoefficientTuple& A, const BiquatField& h, double tol, int max_iter) {
    std::vector<BiquatField> hs{h};
    return std::move(s_g_a_inverse_batch(A, hs, tol, max_iter).front());
}

/// Interior max |D w - Q_A w| / max |w| over cells at distance >= margin from Gamma
/// (margin <= 0 selects 2h).
inline double vekua_residual(const CoefficientTuple& A, const BiquatField& w, double margin = 0.0) {
    const auto& g = w.grid();
    if (margin <= 0.0) margin = 2.0 * g.h_max();
    const auto cells = g.interior(margin);
    const BiquatField r = apply_D(w) - q_a_apply(A, w);
    const double scale = max_norm(w);
    const double m = max_norm(r, cells);
    return scale > 0.0 ? m / scale : m;
}

// --- Newtonian potential ------------------------------------------------------

/// L_G u(x) = sum_y weight u(y) / (4 pi |x - y|), with the exact cell integral on the diagonal.
inline ConvolutionOperator make_newtonian(const GridPtr& grid) {
    return ConvolutionOperator(grid, [](const Vec3& d) { return Biquaternion(newtonian_kernel(d)); },
                               Biquaternion(newtonian_self_cell(grid->h())), KernelShape::scalar);
}

inline BiquatField newtonian_potential(const BiquatField& u) { return make_newtonian(u.grid_ptr()).apply(u); }

// --- Helmholtz-type transforms -----------------------------------------------

/// T^beta u(x) = sum_y weight K_{+beta}(x - y) u(y), a right inverse of D + beta.
/// Self-cell: the even part of K_{+beta} near 0 is -beta/(4 pi r) - i beta^2/(4 pi).
inline ConvolutionOperator make_helmholtz_transform(const GridPtr& grid, Complex beta) {
    if (beta == Complex{}) return make_theodorescu(grid);
    const Complex self = -beta * newtonian_self_cell(grid->h()) - I_unit * beta * beta * grid->weight() * inv_4pi;
    return ConvolutionOperator(
        grid, [beta](const Vec3& d) { return helmholtz_kernel_unchecked(beta, KernelSign::plus, d); },
        Biquaternion(self), KernelShape::general);
}

/// d/d(beta) T^beta, using the closed-form kernel derivative.
inline ConvolutionOperator make_helmholtz_transform_dbeta(const GridPtr& grid, Complex beta) {
    const Complex self = -newtonian_self_cell(grid->h()) - I_unit * beta * grid->weight() * inv_4pi;
    return ConvolutionOperator(grid, [beta](const Vec3& d) { return helmholtz_kernel_dbeta(beta, d); },
                               Biquaternion(self), KernelShape::general);
}

enum class AlphaBranch { scalar, nonzero_vec_square, null_vec_square, divisor_nonzero_sc, divisor_zero_sc };

inline const char* to_string(AlphaBranch b) {
    switch (b) {
        case AlphaBranch::scalar: return "scalar";
        case AlphaBranch::nonzero_vec_square: return "nonzero_vec_square";
        case AlphaBranch::null_vec_square: return "null_vec_square";
        case AlphaBranch::divisor_nonzero_sc: return "divisor_nonzero_sc";
        case AlphaBranch::divisor_zero_sc: return "divisor_zero_sc";
    }
    return "?";
}

/// Parameter of D_alpha = D + M^alpha (right multiplication by alpha).
struct AlphaParam {
    Biquaternion alpha;
    AlphaBranch branch = AlphaBranch::scalar;
    Complex lambda;  // sqrt of vec(alpha)^2 with Im >= 0
    Complex xi_plus;
    Complex xi_minus;
};

inline AlphaBranch classify_alpha(const Biquaternion& alpha, double tol = default_zero_divisor_tol) {
    const double scale = std::max(1.0, norm(alpha));
    if (norm(alpha.vector_part()) <= tol * scale) return AlphaBranch::scalar;
    if (classify_zero_divisor(alpha, tol) == ZeroDivisorClass::zero_divisor)
        return std::abs(alpha[0]) <= tol * scale ? AlphaBranch::divisor_zero_sc : AlphaBranch::divisor_nonzero_sc;
    if (std::abs(vector_square(alpha)) <= tol * scale * scale) return AlphaBranch::null_vec_square;
    return AlphaBranch::nonzero_vec_square;
}

inline AlphaParam make_alpha_param(const Biquaternion& alpha, double tol = default_zero_divisor_tol) {
    AlphaParam p;
    p.alpha = alpha;
    p.branch = classify_alpha(alpha, tol);
    p.lambda = std::sqrt(vector_square(alpha));
    if (p.lambda.imag() < 0.0) p.lambda = -p.lambda;
    p.xi_plus = alpha[0] + p.lambda;
    p.xi_minus = alpha[0] - p.lambda;
    return p;
}

/// Right inverse of D_alpha = D + M^alpha, by branch:
///   scalar               T^{alpha0}
///   nonzero_vec_square,
///   divisor_nonzero_sc   (T^{xi+} u) (lambda + vec a)/(2 lambda) + (T^{xi-} u) (lambda - vec a)/(2 lambda)
///   null_vec_square      T^{alpha0} u + (d/d alpha0 T^{alpha0} u) vec a
///   divisor_zero_sc      T_G u - (L_G u) alpha
inline BiquatField t_g_alpha(const AlphaParam& ap, const BiquatField& u) {
    if (classify_alpha(ap.alpha) != ap.branch) throw DomainError("alpha parameter does not match its branch tag");
    const auto& grid = u.grid_ptr();
    const Complex a0 = ap.alpha[0];
    const Biquaternion av = ap.alpha.vector_part();
    switch (ap.branch) {
        case AlphaBranch::scalar: return make_helmholtz_transform(grid, a0).apply(u);
        case AlphaBranch::nonzero_vec_square:
        case AlphaBranch::divisor_nonzero_sc: {
            const Biquaternion pp = (Biquaternion(ap.lambda) + av) / (2.0 * ap.lambda);
            const Biquaternion pm = (Biquaternion(ap.lambda) - av) / (2.0 * ap.lambda);
            return right_mul(make_helmholtz_transform(grid, ap.xi_plus).apply(u), pp) +
                   right_mul(make_helmholtz_transform(grid, ap.xi_minus).apply(u), pm);
        }
        case AlphaBranch::null_vec_square:
            return make_helmholtz_transform(grid, a0).apply(u) +
                   right_mul(make_helmholtz_transform_dbeta(grid, a0).apply(u), av);
        case AlphaBranch::divisor_zero_sc:
            return theodorescu(u) - right_mul(newtonian_potential(u), ap.alpha);
    }
    throw DomainError("unknown alpha branch");
}

/// D_alpha u = D u + u alpha
inline BiquatField apply_D_alpha(const Biquaternion& alpha, const BiquatField& u) {
    return apply_D(u) + right_mul(u, alpha);
}

}  // namespace vekua
