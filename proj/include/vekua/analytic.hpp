// analytic.hpp
// Closed-form functions with exact first and second derivatives: scalar profiles
// (exponentials, quadratics, the radial sin(pi r)/r, compact bumps) and biquaternion
// fields built from them. Identities checked with these never touch finite differences.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "vekua/biquaternion.hpp"
#include "vekua/grid.hpp"
#include "vekua/kernels.hpp"

namespace vekua {

using CGrad = std::array<Complex, 3>;
using CHess = std::array<std::array<Complex, 3>, 3>;
using QGrad = std::array<Biquaternion, 3>;
using QHess = std::array<std::array<Biquaternion, 3>, 3>;

struct AnalyticScalar {
    std::function<Complex(const Vec3&)> value;
    std::function<CGrad(const Vec3&)> grad;
    std::function<CHess(const Vec3&)> hess;

    Complex laplacian(const Vec3& x) const {
        const auto H = hess(x);
        return H[0][0] + H[1][1] + H[2][2];
    }
};

struct AnalyticField {
    std::function<Biquaternion(const Vec3&)> value;
    std::function<QGrad(const Vec3&)> grad;  // grad[k] = dw/dx_k
    std::function<QHess(const Vec3&)> hess;  // hess[j][k] = d2w/dx_j dx_k

    /// D w = sum_k e_k dw/dx_k
    Biquaternion D(const Vec3& x) const {
        const auto g = grad(x);
        return e1 * g[0] + e2 * g[1] + e3 * g[2];
    }

    Biquaternion laplacian(const Vec3& x) const {
        const auto H = hess(x);
        return H[0][0] + H[1][1] + H[2][2];
    }
};

inline BiquatField sample(const AnalyticField& f, const GridPtr& grid) { return sample(f.value, grid); }
inline ScalarField sample(const AnalyticScalar& f, const GridPtr& grid) { return sample_scalar(f.value, grid); }

// --- scalar profiles -----------------------------------------------------------

inline AnalyticScalar constant_scalar(Complex c) {
    return {[c](const Vec3&) { return c; }, [](const Vec3&) { return CGrad{}; }, [](const Vec3&) { return CHess{}; }};
}

/// c0 * exp(k . x)
inline AnalyticScalar exp_linear(Vec3 k, Complex c0 = 1.0) {
    return {[=](const Vec3& x) { return c0 * std::exp(dot(k, x)); },
            [=](const Vec3& x) {
                const Complex v = c0 * std::exp(dot(k, x));
                return CGrad{v * k[0], v * k[1], v * k[2]};
            },
            [=](const Vec3& x) {
                const Complex v = c0 * std::exp(dot(k, x));
                CHess H;
                for (std::size_t j = 0; j < 3; ++j)
                    for (std::size_t l = 0; l < 3; ++l) H[j][l] = v * k[j] * k[l];
                return H;
            }};
}

/// c + b . x + x^T Q x / 2 with Q symmetric
inline AnalyticScalar quadratic_scalar(Complex c, std::array<Complex, 3> b, CHess Q) {
    return {[=](const Vec3& x) {
                Complex v = c;
                for (std::size_t j = 0; j < 3; ++j) {
                    v += b[j] * x[j];
                    for (std::size_t l = 0; l < 3; ++l) v += 0.5 * Q[j][l] * x[j] * x[l];
                }
                return v;
            },
            [=](const Vec3& x) {
                CGrad g;
                for (std::size_t j = 0; j < 3; ++j) {
                    g[j] = b[j];
                    for (std::size_t l = 0; l < 3; ++l) g[j] += Q[j][l] * x[l];
                }
                return g;
            },
            [=](const Vec3&) { return Q; }};
}

/// Radial profile p(r) given through p(r), p'(r)/r and (p'' - p'/r)/r^2, which are the
/// smooth quantities at r = 0 for an even profile:
///   grad p = (p'/r) x,   hess p = (p'/r) I + ((p'' - p'/r)/r^2) x x^T.
struct RadialProfile {
    std::function<double(double)> p;
    std::function<double(double)> dp_over_r;
    std::function<double(double)> curvature;  // (p'' - p'/r) / r^2
};

inline AnalyticScalar radial_scalar(RadialProfile prof, Vec3 center = {0.0, 0.0, 0.0}) {
    return {[=](const Vec3& x) { return Complex(prof.p(length(x - center))); },
            [=](const Vec3& x) {
                const Vec3 d = x - center;
                const double a = prof.dp_over_r(length(d));
                return CGrad{a * d[0], a * d[1], a * d[2]};
            },
            [=](const Vec3& x) {
                const Vec3 d = x - center;
                const double r = length(d);
                const double a = prof.dp_over_r(r), b = prof.curvature(r);
                CHess H;
                for (std::size_t j = 0; j < 3; ++j)
                    for (std::size_t l = 0; l < 3; ++l) H[j][l] = (j == l ? a : 0.0) + b * d[j] * d[l];
                return H;
            }};
}

/// sin(pi r)/r (value pi at the origin): the first radial Dirichlet eigenfunction of the
/// unit ball, -Lap u = pi^2 u. Series in r^2 below r = 1.5, closed forms above.
inline RadialProfile sinc_pi_profile() {
    constexpr double pi = std::numbers::pi;
    constexpr int terms = 40;
    // u = sum_n a_n r^{2n}, a_n = (-1)^n pi^{2n+1} / (2n+1)!
    auto coef = [](int n) {
        double a = pi;
        for (int k = 1; k <= n; ++k) a *= -pi * pi / ((2.0 * k) * (2.0 * k + 1.0));
        return a;
    };
    static const std::array<double, terms> a = [&] {
        std::array<double, terms> c{};
        for (int n = 0; n < terms; ++n) c[static_cast<std::size_t>(n)] = coef(n);
        return c;
    }();
    constexpr double series_limit = 1.5;
    RadialProfile prof;
    prof.p = [](double r) {
        if (r < series_limit) {
            double s = 0.0, rp = 1.0;
            for (int n = 0; n < terms; ++n, rp *= r * r) s += a[static_cast<std::size_t>(n)] * rp;
            return s;
        }
        return std::sin(pi * r) / r;
    };
    prof.dp_over_r = [](double r) {
        if (r < series_limit) {
            double s = 0.0, rp = 1.0;
            for (int n = 1; n < terms; ++n, rp *= r * r) s += 2.0 * n * a[static_cast<std::size_t>(n)] * rp;
            return s;
        }
        return (pi * r * std::cos(pi * r) - std::sin(pi * r)) / (r * r * r);
    };
    prof.curvature = [](double r) {
        if (r < series_limit) {
            double s = 0.0, rp = 1.0;
            for (int n = 2; n < terms; ++n, rp *= r * r)
                s += 2.0 * n * (2.0 * n - 2.0) * a[static_cast<std::size_t>(n)] * rp;
            return s;
        }
        const double c = std::cos(pi * r), sn = std::sin(pi * r);
        return (-pi * pi * sn / r - 3.0 * pi * c / (r * r) + 3.0 * sn / (r * r * r)) / (r * r);
    };
    return prof;
}

/// (1 - s)^3 for s = |x - c|^2 / rho^2 < 1, zero outside: C^2 with compact support.
inline RadialProfile bump_profile(double rho) {
    const double r2 = rho * rho;
    RadialProfile prof;
    prof.p = [=](double r) {
        const double s = r * r / r2;
        return s < 1.0 ? std::pow(1.0 - s, 3) : 0.0;
    };
    prof.dp_over_r = [=](double r) {
        const double s = r * r / r2;
        return s < 1.0 ? -6.0 * (1.0 - s) * (1.0 - s) / r2 : 0.0;
    };
    prof.curvature = [=](double r) {
        const double s = r * r / r2;
        return s < 1.0 ? 24.0 * (1.0 - s) / (r2 * r2) : 0.0;
    };
    return prof;
}

// --- biquaternion fields ---------------------------------------------------------

/// s(x) a for a scalar profile s and constant a
inline AnalyticField scalar_times(AnalyticScalar s, Biquaternion a) {
    return {[=](const Vec3& x) { return a * s.value(x); },
            [=](const Vec3& x) {
                const auto g = s.grad(x);
                return QGrad{a * g[0], a * g[1], a * g[2]};
            },
            [=](const Vec3& x) {
                const auto H = s.hess(x);
                QHess out;
                for (std::size_t j = 0; j < 3; ++j)
                    for (std::size_t l = 0; l < 3; ++l) out[j][l] = a * H[j][l];
                return out;
            }};
}

/// c + sum_k x_k b_k
inline AnalyticField linear_field(Biquaternion c, std::array<Biquaternion, 3> b) {
    return {[=](const Vec3& x) { return c + b[0] * x[0] + b[1] * x[1] + b[2] * x[2]; },
            [=](const Vec3&) { return QGrad{b[0], b[1], b[2]}; }, [](const Vec3&) { return QHess{}; }};
}

/// s(x) p(x) for a scalar s and a field p (product rule)
inline AnalyticField scalar_product(AnalyticScalar s, AnalyticField p) {
    return {[=](const Vec3& x) { return p.value(x) * s.value(x); },
            [=](const Vec3& x) {
                const auto gs = s.grad(x);
                const auto gp = p.grad(x);
                const Complex v = s.value(x);
                const Biquaternion pv = p.value(x);
                return QGrad{gp[0] * v + pv * gs[0], gp[1] * v + pv * gs[1], gp[2] * v + pv * gs[2]};
            },
            [=](const Vec3& x) {
                const auto gs = s.grad(x);
                const auto hs = s.hess(x);
                const auto gp = p.grad(x);
                const auto hp = p.hess(x);
                const Complex v = s.value(x);
                const Biquaternion pv = p.value(x);
                QHess out;
                for (std::size_t j = 0; j < 3; ++j)
                    for (std::size_t l = 0; l < 3; ++l)
                        out[j][l] = hp[j][l] * v + gp[j] * gs[l] + gp[l] * gs[j] + pv * hs[j][l];
                return out;
            }};
}

/// E(x - q) a, monogenic away from q
inline AnalyticField cauchy_field(Vec3 q, Biquaternion a = e0) {
    return {[=](const Vec3& x) { return cauchy_kernel(x - q) * a; },
            [=](const Vec3& x) {
                const Vec3 d = x - q;
                const double r = checked_radius(d);
                QGrad g;
                // d/dx_j (-d_k / (4 pi r^3)) = -(delta_jk - 3 d_j d_k / r^2) / (4 pi r^3)
                for (std::size_t j = 0; j < 3; ++j) {
                    Biquaternion v;
                    for (std::size_t k = 0; k < 3; ++k)
                        v[k + 1] = -inv_4pi * ((j == k ? 1.0 : 0.0) - 3.0 * d[j] * d[k] / (r * r)) / (r * r * r);
                    g[j] = v * a;
                }
                return g;
            },
            [=](const Vec3& x) {
                const Vec3 d = x - q;
                const double r = checked_radius(d);
                const double r2 = r * r, r5 = r2 * r2 * r;
                QHess H;
                // d2/dx_j dx_l (-d_k/(4 pi r^3))
                //   = (3/(4 pi r^5)) (delta_jk d_l + delta_lk d_j + delta_jl d_k - 5 d_j d_k d_l / r^2)
                for (std::size_t j = 0; j < 3; ++j)
                    for (std::size_t l = 0; l < 3; ++l) {
                        Biquaternion v;
                        for (std::size_t k = 0; k < 3; ++k) {
                            const double t = (j == k ? d[l] : 0.0) + (l == k ? d[j] : 0.0) + (j == l ? d[k] : 0.0) -
                                             5.0 * d[j] * d[k] * d[l] / r2;
                            v[k + 1] = 3.0 * inv_4pi * t / r5;
                        }
                        H[j][l] = v * a;
                    }
                return H;
            }};
}

/// grad s + c s a (the Bessel-example construction w = (D + M^{c a}) s for scalar s when a
/// is a vector unit: D s = grad s)
inline AnalyticField gradient_plus(AnalyticScalar s, Biquaternion ca) {
    return {[=](const Vec3& x) {
                const auto g = s.grad(x);
                return Biquaternion{0.0, g[0], g[1], g[2]} + ca * s.value(x);
            },
            [=](const Vec3& x) {
                const auto H = s.hess(x);
                const auto g = s.grad(x);
                QGrad out;
                for (std::size_t j = 0; j < 3; ++j) out[j] = Biquaternion{0.0, H[j][0], H[j][1], H[j][2]} + ca * g[j];
                return out;
            },
            nullptr};
}

}  // namespace vekua
