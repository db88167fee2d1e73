// biquaternion.hpp
// Complex quaternions p = p0 + p1 e1 + p2 e2 + p3 e3 with p_k complex.
//
// Units follow the Hamilton product: e_j e_j = -1, e1 e2 = e3 (cyclic),
// and the complex unit i commutes with every e_k.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <ostream>

namespace vekua {

template <std::floating_point T>
class basic_biquaternion {
public:
    using value_type = std::complex<T>;
    using vector_type = std::array<value_type, 3>;

    constexpr basic_biquaternion() = default;
    constexpr basic_biquaternion(value_type c0, value_type c1, value_type c2, value_type c3)
        : c_{c0, c1, c2, c3} {}
    // NOLINTNEXTLINE(google-explicit-constructor): scalars embed as c0 e0
    constexpr basic_biquaternion(value_type scalar) : c_{scalar, {}, {}, {}} {}
    constexpr basic_biquaternion(T scalar) : c_{value_type(scalar), {}, {}, {}} {}
    constexpr basic_biquaternion(value_type scalar, const vector_type& v)
        : c_{scalar, v[0], v[1], v[2]} {}

    static constexpr basic_biquaternion unit(int k) {
        basic_biquaternion q;
        q.c_[static_cast<std::size_t>(k)] = value_type(1);
        return q;
    }

    constexpr value_type& operator[](std::size_t k) { return c_[k]; }
    constexpr const value_type& operator[](std::size_t k) const { return c_[k]; }
    constexpr const std::array<value_type, 4>& components() const { return c_; }

    constexpr value_type sc() const { return c_[0]; }
    constexpr vector_type vec() const { return {c_[1], c_[2], c_[3]}; }
    constexpr basic_biquaternion vector_part() const { return {value_type{}, c_[1], c_[2], c_[3]}; }

    constexpr basic_biquaternion& operator+=(const basic_biquaternion& q) {
        for (std::size_t k = 0; k < 4; ++k) c_[k] += q.c_[k];
        return *this;
    }
    constexpr basic_biquaternion& operator-=(const basic_biquaternion& q) {
        for (std::size_t k = 0; k < 4; ++k) c_[k] -= q.c_[k];
        return *this;
    }
    constexpr basic_biquaternion& operator*=(value_type s) {
        for (auto& c : c_) c *= s;
        return *this;
    }
    constexpr basic_biquaternion& operator*=(T s) {
        for (auto& c : c_) c *= s;
        return *this;
    }
    constexpr basic_biquaternion& operator/=(value_type s) {
        for (auto& c : c_) c /= s;
        return *this;
    }

    friend constexpr basic_biquaternion operator+(basic_biquaternion p, const basic_biquaternion& q) { return p += q; }
    friend constexpr basic_biquaternion operator-(basic_biquaternion p, const basic_biquaternion& q) { return p -= q; }
    friend constexpr basic_biquaternion operator-(const basic_biquaternion& p) {
        return {-p.c_[0], -p.c_[1], -p.c_[2], -p.c_[3]};
    }
    friend constexpr basic_biquaternion operator*(basic_biquaternion p, value_type s) { return p *= s; }
    friend constexpr basic_biquaternion operator*(value_type s, basic_biquaternion p) { return p *= s; }
    friend constexpr basic_biquaternion operator*(basic_biquaternion p, T s) { return p *= s; }
    friend constexpr basic_biquaternion operator*(T s, basic_biquaternion p) { return p *= s; }
    friend constexpr basic_biquaternion operator/(basic_biquaternion p, value_type s) { return p /= s; }

    // pq = p0 q0 - <p,q> + p0 q + q0 p + p x q
    friend constexpr basic_biquaternion operator*(const basic_biquaternion& p, const basic_biquaternion& q) {
        const auto& a = p.c_;
        const auto& b = q.c_;
        return {
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] + a[2] * b[0] + a[3] * b[1] - a[1] * b[3],
            a[0] * b[3] + a[3] * b[0] + a[1] * b[2] - a[2] * b[1],
        };
    }

    friend constexpr bool operator==(const basic_biquaternion&, const basic_biquaternion&) = default;

    friend std::ostream& operator<<(std::ostream& os, const basic_biquaternion& q) {
        return os << '(' << q.c_[0] << ", " << q.c_[1] << ", " << q.c_[2] << ", " << q.c_[3] << ')';
    }

private:
    std::array<value_type, 4> c_{};
};

using Complex = std::complex<double>;
using Biquaternion = basic_biquaternion<double>;

inline constexpr Complex I_unit{0.0, 1.0};

inline constexpr Biquaternion e0 = Biquaternion::unit(0);
inline constexpr Biquaternion e1 = Biquaternion::unit(1);
inline constexpr Biquaternion e2 = Biquaternion::unit(2);
inline constexpr Biquaternion e3 = Biquaternion::unit(3);

template <std::floating_point T>
constexpr basic_biquaternion<T> mul(const basic_biquaternion<T>& p, const basic_biquaternion<T>& q) {
    return p * q;
}

/// Quaternionic conjugate: scalar part kept, vector part negated.
template <std::floating_point T>
constexpr basic_biquaternion<T> conj_bar(const basic_biquaternion<T>& p) {
    return {p[0], -p[1], -p[2], -p[3]};
}

/// Componentwise complex conjugate.
template <std::floating_point T>
constexpr basic_biquaternion<T> complex_conj(const basic_biquaternion<T>& p) {
    return {std::conj(p[0]), std::conj(p[1]), std::conj(p[2]), std::conj(p[3])};
}

/// p^dagger = p0* - vec(p)*, the composition of the two conjugations.
template <std::floating_point T>
constexpr basic_biquaternion<T> conj_dagger(const basic_biquaternion<T>& p) {
    return {std::conj(p[0]), -std::conj(p[1]), -std::conj(p[2]), -std::conj(p[3])};
}

/// Hermitian inner product Sc(p^dagger q) = sum_k conj(p_k) q_k.
template <std::floating_point T>
constexpr std::complex<T> inner(const basic_biquaternion<T>& p, const basic_biquaternion<T>& q) {
    std::complex<T> s{};
    for (std::size_t k = 0; k < 4; ++k) s += std::conj(p[k]) * q[k];
    return s;
}

template <std::floating_point T>
constexpr T norm_sq(const basic_biquaternion<T>& p) {
    T s = 0;
    for (std::size_t k = 0; k < 4; ++k) s += std::norm(p[k]);
    return s;
}

template <std::floating_point T>
T norm(const basic_biquaternion<T>& p) {
    return std::sqrt(norm_sq(p));
}

template <std::floating_point T>
constexpr std::complex<T> sc(const basic_biquaternion<T>& p) {
    return p[0];
}

/// The complex number vec(p)^2 taken as a quaternion product (= -(p1^2 + p2^2 + p3^2)).
template <std::floating_point T>
constexpr std::complex<T> vector_square(const basic_biquaternion<T>& p) {
    return -(p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
}

/// p pbar = p0^2 + p1^2 + p2^2 + p3^2 (a complex scalar; not |p|^2).
template <std::floating_point T>
constexpr std::complex<T> quadratic_form(const basic_biquaternion<T>& p) {
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
}

template <std::floating_point T>
bool is_finite(const basic_biquaternion<T>& p) {
    for (std::size_t k = 0; k < 4; ++k)
        if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag())) return false;
    return true;
}

enum class ZeroDivisorClass : std::uint8_t { invertible, zero, zero_divisor };

inline constexpr double default_zero_divisor_tol = 1e-10;

inline const char* to_string(ZeroDivisorClass c) {
    switch (c) {
        case ZeroDivisorClass::invertible: return "invertible";
        case ZeroDivisorClass::zero: return "zero";
        case ZeroDivisorClass::zero_divisor: return "zero_divisor";
    }
    return "?";
}

/// zero_divisor iff |p pbar| <= tol |p|^2 with |p| > tol.
template <std::floating_point T>
ZeroDivisorClass classify_zero_divisor(const basic_biquaternion<T>& p, T tol = T(default_zero_divisor_tol)) {
    const T n = norm(p);
    if (n <= tol) return ZeroDivisorClass::zero;
    if (std::abs(quadratic_form(p)) <= tol * n * n) return ZeroDivisorClass::zero_divisor;
    return ZeroDivisorClass::invertible;
}

/// Two-sided inverse pbar / (p pbar); only meaningful for invertible p.
template <std::floating_point T>
basic_biquaternion<T> inverse(const basic_biquaternion<T>& p) {
    return conj_bar(p) / quadratic_form(p);
}

/// Maximum componentwise distance, used by tests and reports.
template <std::floating_point T>
T max_abs_diff(const basic_biquaternion<T>& p, const basic_biquaternion<T>& q) {
    T m = 0;
    for (std::size_t k = 0; k < 4; ++k) m = std::max(m, std::abs(p[k] - q[k]));
    return m;
}

}  // namespace vekua
