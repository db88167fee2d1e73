// convolution.hpp
// Discrete volume potentials  (K u)(x) = sum_y weight * k(x - y) u(y)  on a uniform grid.
//
// The kernel depends only on the lattice offset between target and source, so it is
// tabulated once over (2n-1)^3 offsets with the quadrature weight folded in; the
// singular offset 0 holds the caller's self-cell value. The table is stored as eight
// real planes (re/im of each component). Targets are swept in runs of consecutive
// cells along one lattice line: for a fixed source the run reads a contiguous slice of
// every plane, which keeps the inner loop vectorizable. Every target sums its sources
// in ascending order, so results do not depend on the number of threads.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vekua/biquaternion.hpp"
#include "vekua/grid.hpp"

namespace vekua {

enum class KernelShape : std::uint8_t {
    general,      // full biquaternion
    real_vector,  // k0 = 0 and k1..k3 real (Cauchy kernel)
    scalar,       // k = k0 e0 (Newtonian kernel)
};

namespace detail {

// Run kernels: acc[p][t] += (k(t) * u)[p] for t < len, where k(t) lives in the table
// planes at offset t and p = 2*component + (0 re | 1 im).
using Planes = std::array<const double*, 8>;
using AccPlanes = std::array<double*, 8>;

inline void run_general(const Planes& k, const double* u, const AccPlanes& acc, std::size_t len) {
    // (c, a, b, sign): c += sign * k_a * u_b
    static constexpr int terms[16][4] = {{0, 0, 0, 1}, {0, 1, 1, -1}, {0, 2, 2, -1}, {0, 3, 3, -1},
                                         {1, 0, 1, 1}, {1, 1, 0, 1},  {1, 2, 3, 1},  {1, 3, 2, -1},
                                         {2, 0, 2, 1}, {2, 2, 0, 1},  {2, 3, 1, 1},  {2, 1, 3, -1},
                                         {3, 0, 3, 1}, {3, 3, 0, 1},  {3, 1, 2, 1},  {3, 2, 1, -1}};
    for (const auto& tm : terms) {
        const auto c = static_cast<std::size_t>(tm[0]);
        const auto a = static_cast<std::size_t>(tm[1]);
        const auto b = static_cast<std::size_t>(tm[2]);
        const double s = tm[3];
        const double br = s * u[2 * b], bi = s * u[2 * b + 1];
        const double* __restrict kr = k[2 * a];
        const double* __restrict ki = k[2 * a + 1];
        double* __restrict ar = acc[2 * c];
        double* __restrict ai = acc[2 * c + 1];
        for (std::size_t t = 0; t < len; ++t) {
            ar[t] += kr[t] * br - ki[t] * bi;
            ai[t] += kr[t] * bi + ki[t] * br;
        }
    }
}

inline void run_real_vector(const Planes& k, const double* u, const AccPlanes& acc, std::size_t len) {
    const double* __restrict a1 = k[2];
    const double* __restrict a2 = k[4];
    const double* __restrict a3 = k[6];
    for (std::size_t p = 0; p < 2; ++p) {
        const double b0 = u[p], b1 = u[2 + p], b2 = u[4 + p], b3 = u[6 + p];
        double* __restrict c0 = acc[p];
        double* __restrict c1 = acc[2 + p];
        double* __restrict c2 = acc[4 + p];
        double* __restrict c3 = acc[6 + p];
        for (std::size_t t = 0; t < len; ++t) {
            c0[t] -= a1[t] * b1 + a2[t] * b2 + a3[t] * b3;
            c1[t] += a1[t] * b0 + a2[t] * b3 - a3[t] * b2;
            c2[t] += a2[t] * b0 + a3[t] * b1 - a1[t] * b3;
            c3[t] += a3[t] * b0 + a1[t] * b2 - a2[t] * b1;
        }
    }
}

inline void run_scalar(const Planes& k, const double* u, const AccPlanes& acc, std::size_t len) {
    const double* __restrict kr = k[0];
    const double* __restrict ki = k[1];
    for (std::size_t c = 0; c < 4; ++c) {
        const double br = u[2 * c], bi = u[2 * c + 1];
        double* __restrict ar = acc[2 * c];
        double* __restrict ai = acc[2 * c + 1];
        for (std::size_t t = 0; t < len; ++t) {
            ar[t] += kr[t] * br - ki[t] * bi;
            ai[t] += kr[t] * bi + ki[t] * br;
        }
    }
}

inline Biquaternion load(const double* p) {
    return {Complex{p[0], p[1]}, Complex{p[2], p[3]}, Complex{p[4], p[5]}, Complex{p[6], p[7]}};
}

}  // namespace detail

class ConvolutionOperator {
public:
    /// kernel(d) is evaluated at every nonzero lattice offset d = x - y; `self` is the
    /// already-integrated contribution of the target's own cell (per unit density).
    template <class KernelFn>
    ConvolutionOperator(GridPtr grid, KernelFn&& kernel, Biquaternion self, KernelShape shape)
        : grid_(std::move(grid)), shape_(shape) {
        const int n = grid_->n();
        const long span = 2L * n - 1;
        stride_j_ = span;
        stride_i_ = span * span;
        center_ = (n - 1) * (stride_i_ + stride_j_ + 1);
        plane_size_ = static_cast<std::size_t>(span * span * span);
        table_.assign(plane_size_ * 8, 0.0);
        const Vec3& h = grid_->h();
        const double w = grid_->weight();
        for (int di = -(n - 1); di < n; ++di)
            for (int dj = -(n - 1); dj < n; ++dj)
                for (int dk = -(n - 1); dk < n; ++dk) {
                    const auto idx = static_cast<std::size_t>(center_ + di * stride_i_ + dj * stride_j_ + dk);
                    const Biquaternion v = (di == 0 && dj == 0 && dk == 0)
                                               ? self
                                               : kernel(Vec3{di * h[0], dj * h[1], dk * h[2]}) * w;
                    for (std::size_t c = 0; c < 4; ++c) {
                        table_[(2 * c) * plane_size_ + idx] = v[c].real();
                        table_[(2 * c + 1) * plane_size_ + idx] = v[c].imag();
                    }
                }
        base_.resize(grid_->size());
        for (std::size_t c = 0; c < grid_->size(); ++c) {
            const auto& q = grid_->ijk(c);
            base_[c] = q[0] * stride_i_ + q[1] * stride_j_ + q[2];
        }
    }

    const GridPtr& grid_ptr() const { return grid_; }
    KernelShape shape() const { return shape_; }

    /// Weighted kernel value stored for lattice offset (di, dj, dk).
    Biquaternion table_entry(int di, int dj, int dk) const {
        const auto idx = static_cast<std::size_t>(center_ + di * stride_i_ + dj * stride_j_ + dk);
        Biquaternion v;
        for (std::size_t c = 0; c < 4; ++c)
            v[c] = {table_[(2 * c) * plane_size_ + idx], table_[(2 * c + 1) * plane_size_ + idx]};
        return v;
    }

    BiquatField apply(const BiquatField& u) const {
        std::vector<BiquatField> in{u};
        return std::move(apply_batch(in).front());
    }

    /// Applies the operator to several fields in one sweep over the kernel table.
    std::vector<BiquatField> apply_batch(std::span<const BiquatField> us) const {
        const std::size_t F = us.size();
        const std::size_t N = grid_->size();
        std::vector<BiquatField> out;
        if (F == 0) return out;
        for (const auto& u : us) check_same_grid(u.grid(), *grid_);
        const auto res = run(pack(us), F, {});
        out.reserve(F);
        for (std::size_t f = 0; f < F; ++f) {
            BiquatField o(grid_);
            for (std::size_t t = 0; t < N; ++t) o[t] = detail::load(&res[(t * F + f) * 8]);
            out.push_back(std::move(o));
        }
        return out;
    }

    /// Values of the potential at selected target cells only.
    std::vector<Biquaternion> apply_at(const BiquatField& u, std::span<const std::size_t> targets) const {
        check_same_grid(u.grid(), *grid_);
        if (targets.empty()) return {};
        std::vector<BiquatField> us{u};
        const auto res = run(pack(us), 1, targets);
        std::vector<Biquaternion> out(targets.size());
        for (std::size_t t = 0; t < targets.size(); ++t) out[t] = detail::load(&res[t * 8]);
        return out;
    }

private:
    // [source][field][8]
    std::vector<double> pack(std::span<const BiquatField> us) const {
        const std::size_t F = us.size();
        const std::size_t N = grid_->size();
        std::vector<double> in(N * F * 8);
        for (std::size_t s = 0; s < N; ++s)
            for (std::size_t f = 0; f < F; ++f)
                for (std::size_t c = 0; c < 4; ++c) {
                    in[(s * F + f) * 8 + 2 * c] = us[f][s][c].real();
                    in[(s * F + f) * 8 + 2 * c + 1] = us[f][s][c].imag();
                }
        return in;
    }

    // Returns [target][field][8]; an empty target list means every cell in order.
    std::vector<double> run(const std::vector<double>& in, std::size_t F, std::span<const std::size_t> targets) const {
        switch (shape_) {
            case KernelShape::general: return sweep<detail::run_general>(in, F, targets);
            case KernelShape::real_vector: return sweep<detail::run_real_vector>(in, F, targets);
            case KernelShape::scalar: return sweep<detail::run_scalar>(in, F, targets);
        }
        return {};
    }

    template <void (*Run)(const detail::Planes&, const double*, const detail::AccPlanes&, std::size_t)>
    std::vector<double> sweep(const std::vector<double>& in, std::size_t F, std::span<const std::size_t> targets) const {
        const std::size_t N = grid_->size();
        const std::size_t T = targets.empty() ? N : targets.size();
        auto cell_of = [&](std::size_t t) { return targets.empty() ? t : targets[t]; };

        // runs of targets with equal (i, j) and consecutive k
        std::vector<std::size_t> runs{0};
        for (std::size_t t = 1; t < T; ++t) {
            const auto& a = grid_->ijk(cell_of(t - 1));
            const auto& b = grid_->ijk(cell_of(t));
            if (a[0] != b[0] || a[1] != b[1] || b[2] != a[2] + 1) runs.push_back(t);
        }
        runs.push_back(T);

        std::vector<double> res(T * F * 8, 0.0);
        const double* table = table_.data();
        const std::size_t P = plane_size_;
        const long* base = base_.data();
        const double* src = in.data();
        const auto nruns = static_cast<std::ptrdiff_t>(runs.size()) - 1;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::ptrdiff_t r = 0; r < nruns; ++r) {
            const std::size_t t0 = runs[static_cast<std::size_t>(r)];
            const std::size_t len = runs[static_cast<std::size_t>(r) + 1] - t0;
            const auto& first = grid_->ijk(cell_of(t0));
            const long line = center_ + first[0] * stride_i_ + first[1] * stride_j_ + first[2];
            // acc layout: [field][plane][len]
            std::vector<double> acc(F * 8 * len, 0.0);
            for (std::size_t s = 0; s < N; ++s) {
                const auto off = static_cast<std::size_t>(line - base[s]);
                const detail::Planes k{table + off,         table + P + off,     table + 2 * P + off,
                                       table + 3 * P + off, table + 4 * P + off, table + 5 * P + off,
                                       table + 6 * P + off, table + 7 * P + off};
                for (std::size_t f = 0; f < F; ++f) {
                    double* a = &acc[f * 8 * len];
                    const detail::AccPlanes ap{a,           a + len,     a + 2 * len, a + 3 * len,
                                               a + 4 * len, a + 5 * len, a + 6 * len, a + 7 * len};
                    Run(k, src + (s * F + f) * 8, ap, len);
                }
            }
            for (std::size_t t = 0; t < len; ++t)
                for (std::size_t f = 0; f < F; ++f)
                    for (std::size_t p = 0; p < 8; ++p) res[((t0 + t) * F + f) * 8 + p] = acc[(f * 8 + p) * len + t];
        }
        return res;
    }

    GridPtr grid_;
    KernelShape shape_;
    long stride_i_ = 0, stride_j_ = 0, center_ = 0;
    std::size_t plane_size_ = 0;
    std::vector<double> table_;
    std::vector<long> base_;
};

}  // namespace vekua
