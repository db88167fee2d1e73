// grid.hpp
// Voxel discretization of a bounded domain G (ball or axis-aligned box):
// cell-centre quadrature, finite-difference Moisil-Theodorescu operator,
// discrete L2 products and a Fibonacci surface mesh for spheres.
//
// Cells are indexed row-major over the full n^3 lattice, flat = (i*n + j)*n + k,
// with i, j, k the x1, x2, x3 indices. Fields store inside cells only, in that order.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vekua/biquaternion.hpp"
#include "vekua/errors.hpp"

namespace vekua {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Embeds a real 3-vector as the purely vectorial biquaternion x1 e1 + x2 e2 + x3 e3.
inline Biquaternion as_vector(const Vec3& x) { return {0.0, x[0], x[1], x[2]}; }

struct Ball {
    Vec3 center{};
    double radius = 1.0;
    friend bool operator==(const Ball&, const Ball&) = default;
};

struct Box {
    Vec3 min{};
    Vec3 max{1.0, 1.0, 1.0};
    friend bool operator==(const Box&, const Box&) = default;
};

class DomainSpec {
public:
    static DomainSpec ball(Vec3 center, double radius) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ball radius must be positive");
        return DomainSpec(Ball{center, radius});
    }
    static DomainSpec unit_ball() { return ball({0.0, 0.0, 0.0}, 1.0); }
    static DomainSpec box(Vec3 lo, Vec3 hi) {
        for (int a = 0; a < 3; ++a)
            if (!(lo[a] < hi[a])) throw DomainError("box requires min < max on every axis");
        return DomainSpec(Box{lo, hi});
    }

    bool is_ball() const { return std::holds_alternative<Ball>(kind_); }
    bool is_box() const { return std::holds_alternative<Box>(kind_); }
    const Ball& as_ball() const { return std::get<Ball>(kind_); }
    const Box& as_box() const { return std::get<Box>(kind_); }

    double diameter() const {
        if (is_ball()) return 2.0 * as_ball().radius;
        const auto& b = as_box();
        return length(b.max - b.min);
    }

    double volume() const {
        if (is_ball()) return 4.0 / 3.0 * std::numbers::pi * std::pow(as_ball().radius, 3);
        const auto& b = as_box();
        return (b.max[0] - b.min[0]) * (b.max[1] - b.min[1]) * (b.max[2] - b.min[2]);
    }

    Vec3 center() const {
        if (is_ball()) return as_ball().center;
        const auto& b = as_box();
        return 0.5 * (b.min + b.max);
    }

    /// Radius of the smallest ball about center() containing the closure of G.
    double circumradius() const { return is_ball() ? as_ball().radius : 0.5 * diameter(); }

    Vec3 bbox_min() const {
        if (is_box()) return as_box().min;
        const auto& b = as_ball();
        return b.center - Vec3{b.radius, b.radius, b.radius};
    }
    Vec3 bbox_max() const {
        if (is_box()) return as_box().max;
        const auto& b = as_ball();
        return b.center + Vec3{b.radius, b.radius, b.radius};
    }

    /// Signed distance to the boundary, positive inside.
    double distance_to_boundary(const Vec3& x) const {
        if (is_ball()) {
            const auto& b = as_ball();
            return b.radius - length(x - b.center);
        }
        const auto& b = as_box();
        double d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 3; ++a) d = std::min({d, x[a] - b.min[a], b.max[a] - x[a]});
        return d;
    }

    bool contains(const Vec3& x) const { return distance_to_boundary(x) > 0.0; }

    std::string kind_name() const { return is_ball() ? "ball" : "box"; }

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

private:
    explicit DomainSpec(std::variant<Ball, Box> k) : kind_(k) {}
    std::variant<Ball, Box> kind_;
};

class DomainGrid;
using GridPtr = std::shared_ptr<const DomainGrid>;

class DomainGrid {
public:
    static constexpr std::int32_t outside = -1;

    const DomainSpec& spec() const { return spec_; }
    int n() const { return n_; }
    const Vec3& h() const { return h_; }
    double h_max() const { return std::max({h_[0], h_[1], h_[2]}); }
    const Vec3& origin() const { return origin_; }
    std::size_t size() const { return centers_.size(); }
    double weight() const { return weight_; }
    double weight(std::size_t) const { return weight_; }
    double total_weight() const { return weight_ * static_cast<double>(size()); }

    const Vec3& center(std::size_t cell) const { return centers_[cell]; }
    std::span<const Vec3> centers() const { return centers_; }
    const std::array<int, 3>& ijk(std::size_t cell) const { return ijk_[cell]; }

    bool inside_flat(std::size_t flat) const { return index_[flat] != outside; }
    std::int32_t compact_index(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_) return outside;
        return index_[flat(i, j, k)];
    }
    std::size_t flat(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(k);
    }

    /// Neighbour of `cell` along `axis` in direction dir (+1/-1), or outside.
    std::int32_t neighbor(std::size_t cell, int axis, int dir) const {
        return neighbors_[cell][static_cast<std::size_t>(2 * axis + (dir > 0 ? 1 : 0))];
    }

    /// 2 where every axis has a central stencil, 1 if some axis falls back to a
    /// one-sided difference, 0 if some axis has no neighbour at all.
    int stencil_order(std::size_t cell) const { return stencil_order_[cell]; }

    double boundary_distance(std::size_t cell) const { return boundary_distance_[cell]; }

    /// Cells whose centre lies at least `margin` inside G.
    std::vector<std::size_t> interior(double margin) const {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < size(); ++c)
            if (boundary_distance_[c] >= margin) out.push_back(c);
        return out;
    }

    /// Inside cell containing x, if any.
    std::int32_t locate(const Vec3& x) const {
        std::array<int, 3> idx{};
        for (int a = 0; a < 3; ++a) {
            idx[a] = static_cast<int>(std::floor((x[a] - origin_[a]) / h_[a]));
        }
        return compact_index(idx[0], idx[1], idx[2]);
    }

    friend GridPtr build_grid(const DomainSpec& spec, int n);

private:
    DomainGrid(DomainSpec spec, int n) : spec_(std::move(spec)), n_(n) {}

    DomainSpec spec_;
    int n_;
    Vec3 h_{};
    Vec3 origin_{};
    double weight_ = 0.0;
    std::vector<std::int32_t> index_;
    std::vector<Vec3> centers_;
    std::vector<std::array<int, 3>> ijk_;
    std::vector<std::array<std::int32_t, 6>> neighbors_;
    std::vector<std::uint8_t> stencil_order_;
    std::vector<double> boundary_distance_;
};

/// Voxelizes the bounding box of G into n^3 cells and keeps those whose centre is in G.
inline GridPtr build_grid(const DomainSpec& spec, int n) {
    if (n < 8) throw DomainError("grid resolution must be at least 8 cells per axis");
    auto g = std::shared_ptr<DomainGrid>(new DomainGrid(spec, n));
    const Vec3 lo = spec.bbox_min();
    const Vec3 hi = spec.bbox_max();
    g->origin_ = lo;
    for (int a = 0; a < 3; ++a) g->h_[a] = (hi[a] - lo[a]) / n;
    g->weight_ = g->h_[0] * g->h_[1] * g->h_[2];

    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    g->index_.assign(total, DomainGrid::outside);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 c{lo[0] + (i + 0.5) * g->h_[0], lo[1] + (j + 0.5) * g->h_[1],
                             lo[2] + (k + 0.5) * g->h_[2]};
                if (!spec.contains(c)) continue;
                g->index_[g->flat(i, j, k)] = static_cast<std::int32_t>(g->centers_.size());
                g->centers_.push_back(c);
                g->ijk_.push_back({i, j, k});
                g->boundary_distance_.push_back(spec.distance_to_boundary(c));
            }
    if (g->centers_.empty()) throw DomainError("no grid cell centre lies inside the domain");

    g->neighbors_.resize(g->size());
    g->stencil_order_.resize(g->size());
    for (std::size_t c = 0; c < g->size(); ++c) {
        const auto [i, j, k] = g->ijk_[c];
        int order = 2;
        for (int a = 0; a < 3; ++a) {
            std::array<int, 3> m{i, j, k}, p{i, j, k};
            --m[a];
            ++p[a];
            const auto lo_n = g->compact_index(m[0], m[1], m[2]);
            const auto hi_n = g->compact_index(p[0], p[1], p[2]);
            g->neighbors_[c][static_cast<std::size_t>(2 * a)] = lo_n;
            g->neighbors_[c][static_cast<std::size_t>(2 * a + 1)] = hi_n;
            const int avail = (lo_n != DomainGrid::outside) + (hi_n != DomainGrid::outside);
            order = std::min(order, avail);
        }
        g->stencil_order_[c] = static_cast<std::uint8_t>(order);
    }
    return g;
}

/// Values sampled at the inside cells of one grid.
template <class V>
class GridField {
public:
    using value_type = V;

    GridField() = default;
    explicit GridField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}
    GridField(GridPtr grid, V fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}
    GridField(GridPtr grid, std::vector<V> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_->size()) throw DomainError("field length does not match the grid");
    }

    const GridPtr& grid_ptr() const { return grid_; }
    const DomainGrid& grid() const { return *grid_; }
    std::size_t size() const { return values_.size(); }
    V& operator[](std::size_t c) { return values_[c]; }
    const V& operator[](std::size_t c) const { return values_[c]; }
    std::span<V> values() { return values_; }
    std::span<const V> values() const { return values_; }

    GridField& operator+=(const GridField& o) {
        check_same(o);
        for (std::size_t c = 0; c < size(); ++c) values_[c] += o.values_[c];
        return *this;
    }
    GridField& operator-=(const GridField& o) {
        check_same(o);
        for (std::size_t c = 0; c < size(); ++c) values_[c] -= o.values_[c];
        return *this;
    }
    GridField& operator*=(Complex s) {
        for (auto& v : values_) v *= s;
        return *this;
    }

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(Complex s, GridField a) { return a *= s; }
    friend GridField operator*(GridField a, Complex s) { return a *= s; }

    bool same_grid(const GridField& o) const { return same_grid(*o.grid_); }
    bool same_grid(const DomainGrid& g) const {
        return grid_.get() == &g || (grid_->n() == g.n() && grid_->spec() == g.spec());
    }
    void check_same(const GridField& o) const {
        if (!same_grid(o)) throw GridMismatch();
    }

private:
    GridPtr grid_;
    std::vector<V> values_;
};

using BiquatField = GridField<Biquaternion>;
using ScalarField = GridField<Complex>;

inline void check_same_grid(const DomainGrid& a, const DomainGrid& b) {
    if (&a != &b && !(a.n() == b.n() && a.spec() == b.spec())) throw GridMismatch();
}

template <class Fn>
    requires std::invocable<Fn&, const Vec3&>
BiquatField sample(Fn&& fn, const GridPtr& grid) {
    BiquatField out(grid);
    for (std::size_t c = 0; c < grid->size(); ++c) out[c] = fn(grid->center(c));
    return out;
}

template <class Fn>
ScalarField sample_scalar(Fn&& fn, const GridPtr& grid) {
    ScalarField out(grid);
    for (std::size_t c = 0; c < grid->size(); ++c) out[c] = fn(grid->center(c));
    return out;
}

/// w a (right multiplication by a constant)
inline BiquatField right_mul(const BiquatField& w, const Biquaternion& a) {
    BiquatField out(w.grid_ptr());
    for (std::size_t c = 0; c < w.size(); ++c) out[c] = w[c] * a;
    return out;
}

/// a w (left multiplication by a constant)
inline BiquatField left_mul(const Biquaternion& a, const BiquatField& w) {
    BiquatField out(w.grid_ptr());
    for (std::size_t c = 0; c < w.size(); ++c) out[c] = a * w[c];
    return out;
}

inline BiquatField scale(const ScalarField& s, const BiquatField& w) {
    check_same_grid(s.grid(), w.grid());
    BiquatField out(w.grid_ptr());
    for (std::size_t c = 0; c < w.size(); ++c) out[c] = w[c] * s[c];
    return out;
}

inline BiquatField pointwise_mul(const BiquatField& u, const BiquatField& v) {
    u.check_same(v);
    BiquatField out(u.grid_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) out[c] = u[c] * v[c];
    return out;
}

template <class F>
BiquatField map(const BiquatField& u, F&& f) {
    BiquatField out(u.grid_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) out[c] = f(u[c]);
    return out;
}

inline double max_norm(const BiquatField& u) {
    double m = 0.0;
    for (const auto& v : u.values()) m = std::max(m, norm(v));
    return m;
}

inline double max_norm(const BiquatField& u, std::span<const std::size_t> cells) {
    double m = 0.0;
    for (auto c : cells) m = std::max(m, norm(u[c]));
    return m;
}

// --- finite differences --------------------------------------------------

namespace detail {

template <class V>
V first_difference(const GridField<V>& u, std::size_t c, int axis) {
    const auto& g = u.grid();
    const auto lo = g.neighbor(c, axis, -1);
    const auto hi = g.neighbor(c, axis, +1);
    const double h = g.h()[static_cast<std::size_t>(axis)];
    if (lo != DomainGrid::outside && hi != DomainGrid::outside)
        return (u[static_cast<std::size_t>(hi)] - u[static_cast<std::size_t>(lo)]) * (0.5 / h);
    if (hi != DomainGrid::outside) return (u[static_cast<std::size_t>(hi)] - u[c]) * (1.0 / h);
    if (lo != DomainGrid::outside) return (u[c] - u[static_cast<std::size_t>(lo)]) * (1.0 / h);
    return V{};
}

template <class V>
V second_difference(const GridField<V>& u, std::size_t c, int axis) {
    const auto& g = u.grid();
    const auto lo = g.neighbor(c, axis, -1);
    const auto hi = g.neighbor(c, axis, +1);
    const double h = g.h()[static_cast<std::size_t>(axis)];
    const double ih2 = 1.0 / (h * h);
    if (lo != DomainGrid::outside && hi != DomainGrid::outside)
        return (u[static_cast<std::size_t>(hi)] - u[c] * 2.0 + u[static_cast<std::size_t>(lo)]) * ih2;
    // one-sided three-point fallback
    for (int dir : {+1, -1}) {
        const auto n1 = g.neighbor(c, axis, dir);
        if (n1 == DomainGrid::outside) continue;
        const auto n2 = g.neighbor(static_cast<std::size_t>(n1), axis, dir);
        if (n2 == DomainGrid::outside) continue;
        return (u[c] - u[static_cast<std::size_t>(n1)] * 2.0 + u[static_cast<std::size_t>(n2)]) * ih2;
    }
    return V{};
}

}  // namespace detail

/// Partial derivative along `axis`: central differences where both neighbours are
/// inside, first-order one-sided differences otherwise.
template <class V>
GridField<V> partial(const GridField<V>& u, int axis) {
    GridField<V> out(u.grid_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) out[c] = detail::first_difference(u, c, axis);
    return out;
}

/// D u = e1 du/dx1 + e2 du/dx2 + e3 du/dx3  (= -div u_vec + grad u0 + curl u_vec)
inline BiquatField apply_D(const BiquatField& u) {
    BiquatField out(u.grid_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) {
        const Biquaternion d1 = detail::first_difference(u, c, 0);
        const Biquaternion d2 = detail::first_difference(u, c, 1);
        const Biquaternion d3 = detail::first_difference(u, c, 2);
        out[c] = e1 * d1 + e2 * d2 + e3 * d3;
    }
    return out;
}

/// u D = du/dx1 e1 + du/dx2 e2 + du/dx3 e3  (= -div u_vec + grad u0 - curl u_vec)
inline BiquatField apply_D_right(const BiquatField& u) {
    BiquatField out(u.grid_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) {
        const Biquaternion d1 = detail::first_difference(u, c, 0);
        const Biquaternion d2 = detail::first_difference(u, c, 1);
        const Biquaternion d3 = detail::first_difference(u, c, 2);
        out[c] = d1 * e1 + d2 * e2 + d3 * e3;
    }
    return out;
}

/// 7-point Laplacian; boundary cells fall back to one-sided second differences.
template <class V>
GridField<V> laplacian(const GridField<V>& u) {
    GridField<V> out(u.grid_ptr());
    for (std::size_t c = 0; c < u.size(); ++c) {
        out[c] = detail::second_difference(u, c, 0) + detail::second_difference(u, c, 1) +
                 detail::second_difference(u, c, 2);
    }
    return out;
}

// --- inner products ------------------------------------------------------

/// <u, v> = sum_cells weight * Sc(u^dagger v); conjugate-linear in u.
inline Complex l2_inner(const BiquatField& u, const BiquatField& v) {
    u.check_same(v);
    Complex s{};
    for (std::size_t c = 0; c < u.size(); ++c) s += inner(u[c], v[c]);
    return s * u.grid().weight();
}

inline double l2_norm(const BiquatField& u) { return std::sqrt(std::max(0.0, l2_inner(u, u).real())); }

/// <<u|v>> = sum_cells weight * u^dagger v; right-linear in v over the biquaternions.
inline Biquaternion hc_inner(const BiquatField& u, const BiquatField& v) {
    u.check_same(v);
    Biquaternion s;
    for (std::size_t c = 0; c < u.size(); ++c) s += conj_dagger(u[c]) * v[c];
    return s * u.grid().weight();
}

/// sum_cells weight * Sc(u v), the bilinear pairing used in the Gauss identity.
inline Complex sc_pairing(const BiquatField& u, const BiquatField& v) {
    u.check_same(v);
    Complex s{};
    for (std::size_t c = 0; c < u.size(); ++c) s += (u[c] * v[c]).sc();
    return s * u.grid().weight();
}

// --- boundary mesh -------------------------------------------------------

struct SurfaceMesh {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<double> areas;
    std::optional<DomainSpec> surface_of;  // set when the mesh is the boundary of a known domain

    std::size_t size() const { return points.size(); }
    double total_area() const {
        double s = 0.0;
        for (double a : areas) s += a;
        return s;
    }
};

/// Unit-sphere Fibonacci lattice with m points: z_i = 1 - (2i+1)/m, azimuth i * golden angle.
inline std::vector<Vec3> fibonacci_sphere(int m) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / m;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return pts;
}

/// Equal-area Fibonacci mesh of the boundary sphere of a ball domain.
inline SurfaceMesh sphere_mesh(const DomainSpec& spec, int m) {
    if (!spec.is_ball()) throw DomainError("sphere_mesh requires a ball domain");
    if (m < 100) throw DomainError("sphere_mesh requires at least 100 points");
    const auto& b = spec.as_ball();
    SurfaceMesh mesh;
    mesh.surface_of = spec;
    const double area = 4.0 * std::numbers::pi * b.radius * b.radius / m;
    for (const auto& u : fibonacci_sphere(m)) {
        mesh.points.push_back(b.center + b.radius * u);
        mesh.normals.push_back(u);
        mesh.areas.push_back(area);
    }
    return mesh;
}

}  // namespace vekua
