#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

using Complex = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A point strictly inside the unit disk.
struct DiskPoint {
    double re = 0.0;
    double im = 0.0;

    DiskPoint() = default;
    DiskPoint(double re_, double im_) : re(re_), im(im_) {
        if (!(re * re + im * im < 1.0)) {
            throw InvariantError("DiskPoint: |z| must be < 1");
        }
    }
    explicit DiskPoint(Complex z) : DiskPoint(z.real(), z.imag()) {}

    [[nodiscard]] Complex value() const { return {re, im}; }
    [[nodiscard]] double abs() const { return std::hypot(re, im); }

    friend bool operator==(const DiskPoint& a, const DiskPoint& b) {
        return a.re == b.re && a.im == b.im;
    }
};

/// A point e^{i theta} on the unit circle, theta normalized into [0, 2pi).
struct BoundaryPoint {
    double theta = 0.0;

    BoundaryPoint() = default;
    explicit BoundaryPoint(double t) {
        theta = std::fmod(t, kTwoPi);
        if (theta < 0.0) theta += kTwoPi;
    }

    [[nodiscard]] Complex value() const { return {std::cos(theta), std::sin(theta)}; }
};

/// Ordered tuple of Blaschke zeros / interpolation nodes. Duplicates are
/// legal for evaluation (multiplicity); interpolation schemes validate
/// distinctness separately.
using ZeroTuple = std::vector<DiskPoint>;

/// Natural log of a modulus in [0, 1]; -infinity encodes an exact zero.
struct LogMagnitude {
    double value = 0.0;

    [[nodiscard]] bool is_zero() const { return std::isinf(value) && value < 0.0; }
    [[nodiscard]] double linear() const { return std::exp(value); }
};

/// Pseudo-hyperbolic distance |z - w| / |1 - conj(w) z|, in [0, 1).
[[nodiscard]] inline double pseudo_distance(const DiskPoint& z, const DiskPoint& w) {
    const Complex num = z.value() - w.value();
    const Complex den = 1.0 - std::conj(w.value()) * z.value();
    return std::abs(num) / std::abs(den);
}

/// Disk automorphism phi_a(z) = (z - a) / (1 - conj(a) z).
[[nodiscard]] inline DiskPoint mobius_shift(const DiskPoint& a, const DiskPoint& z) {
    const Complex w = (z.value() - a.value()) / (1.0 - std::conj(a.value()) * z.value());
    return DiskPoint(w);
}

/// log |B(Z_n, z)| = sum_j log d(z, z_j). Empty tuple gives 0 (B == 1).
[[nodiscard]] inline LogMagnitude blaschke_log_abs(std::span<const DiskPoint> zeros,
                                                   const DiskPoint& z) {
    double acc = 0.0;
    for (const DiskPoint& zj : zeros) {
        const double d = pseudo_distance(z, zj);
        if (d == 0.0) return LogMagnitude{kNegInf};
        acc += std::log(d);
    }
    return LogMagnitude{acc};
}

/// Complex value of the finite Blaschke product with the given zeros.
/// Intended for moderate n (interpolation-sized tuples); magnitudes of
/// long products should go through blaschke_log_abs instead.
[[nodiscard]] inline Complex blaschke_eval(std::span<const DiskPoint> zeros, Complex z) {
    Complex acc = 1.0;
    for (const DiskPoint& zj : zeros) {
        acc *= (z - zj.value()) / (1.0 - std::conj(zj.value()) * z);
    }
    return acc;
}

/// Upper bound of log |B(Z_n, z)|: -(1 - |z|^2)/4 * sum_j (1 - |z_j|).
[[nodiscard]] inline LogMagnitude prop22_bound(std::span<const DiskPoint> zeros,
                                               const DiskPoint& z) {
    double mass = 0.0;
    for (const DiskPoint& zj : zeros) mass += 1.0 - zj.abs();
    const double one_minus_z2 = 1.0 - z.abs() * z.abs();
    return LogMagnitude{-0.25 * one_minus_z2 * mass};
}

/// The largest exponent alpha for which max{R^alpha, r^alpha} >= (R + r)/(1 + R r)
/// holds for every r in [0, 1]:  alpha*(R) = ln(2R / (1 + R^2)) / ln R.
/// Both branches of the constraint meet exactly at this value, and
/// 0 < alpha*(R) < 1 for all R in (0, 1).
[[nodiscard]] inline double alpha_star(double R) {
    if (!(R > 0.0 && R < 1.0)) {
        throw std::invalid_argument("alpha_star: R must be in (0, 1)");
    }
    return std::log(2.0 * R / (1.0 + R * R)) / std::log(R);
}

}  // namespace hardy
