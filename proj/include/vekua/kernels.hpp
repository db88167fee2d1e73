// kernels.hpp
// Point kernels: Cauchy kernel of D, Helmholtz-type kernels K_{-a}, K_{+a},
// the a-derivative of K_{+a}, the Newtonian kernel, and the exact integral of
// 1/|y| over a centred cuboid (singular self-cell of volume potentials).

#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "vekua/biquaternion.hpp"
#include "vekua/errors.hpp"
#include "vekua/grid.hpp"

namespace vekua {

inline constexpr double inv_4pi = 1.0 / (4.0 * std::numbers::pi);

inline double checked_radius(const Vec3& x) {
    const double r = length(x);
    if (!(r > 0.0)) throw DomainError("kernel evaluated at its singularity x = 0");
    return r;
}

/// E(x) = -x / (4 pi |x|^3)
inline Biquaternion cauchy_kernel(const Vec3& x) {
    const double r = checked_radius(x);
    const double s = -inv_4pi / (r * r * r);
    return {0.0, s * x[0], s * x[1], s * x[2]};
}

enum class KernelSign { minus, plus };

/// K_{-a} (sign = minus, fundamental solution of D - a) or K_{+a} (sign = plus,
/// fundamental solution of D + a):
///   K_{-+a}(x) = -exp(i a r)/(4 pi) * (-+a/r + x/r^3 - i a x/r^2).
/// No restriction on Im a; see helmholtz_kernel for the checked version.
inline Biquaternion helmholtz_kernel_unchecked(Complex alpha, KernelSign sign, const Vec3& x) {
    const double r = checked_radius(x);
    const Complex pre = -std::exp(I_unit * alpha * r) * inv_4pi;
    const Complex scalar = (sign == KernelSign::minus ? -alpha : alpha) / r;
    const Complex vec = 1.0 / (r * r * r) - I_unit * alpha / (r * r);
    return {pre * scalar, pre * vec * x[0], pre * vec * x[1], pre * vec * x[2]};
}

inline Biquaternion helmholtz_kernel(Complex alpha, KernelSign sign, const Vec3& x) {
    if (alpha.imag() < 0.0) throw DomainError("helmholtz kernel requires Im(alpha) >= 0");
    return helmholtz_kernel_unchecked(alpha, sign, x);
}

/// d/d(beta) of K_{+beta}(x) = -exp(i beta r)/(4 pi) * (1/r + i beta + beta x/r).
inline Biquaternion helmholtz_kernel_dbeta(Complex beta, const Vec3& x) {
    const double r = checked_radius(x);
    const Complex pre = -std::exp(I_unit * beta * r) * inv_4pi;
    const Complex vec = pre * beta / r;
    return {pre * (1.0 / r + I_unit * beta), vec * x[0], vec * x[1], vec * x[2]};
}

/// 1 / (4 pi |x|)
inline double newtonian_kernel(const Vec3& x) { return inv_4pi / checked_radius(x); }

/// Integral of 1/|y| over [-a,a] x [-b,b] x [-c,c].
inline double cuboid_inverse_distance_integral(double a, double b, double c) {
    auto face = [](double p, double q, double s) {
        const double R = std::sqrt(p * p + q * q + s * s);
        return p * std::log((q + R) / std::sqrt(p * p + s * s)) + q * std::log((p + R) / std::sqrt(q * q + s * s)) -
               s * std::atan(p * q / (s * R));
    };
    return 4.0 * (c * face(a, b, c) + a * face(b, c, a) + b * face(a, c, b));
}

/// Integral of 1/(4 pi |y|) over one grid cell centred at the origin
/// (0.18940... h^2 for a cube of edge h).
inline double newtonian_self_cell(const Vec3& h) {
    return inv_4pi * cuboid_inverse_distance_integral(0.5 * h[0], 0.5 * h[1], 0.5 * h[2]);
}

}  // namespace vekua
