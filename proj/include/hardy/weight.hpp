#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hardy/detail/numeric.hpp"
#include "hardy/disk.hpp"

namespace hardy {

enum class WeightKind { Unit, BoundaryPoly };

/// The weight q: either q == 1, or a polynomial c_q * prod_j (z - a_j) with
/// all roots a_j on the unit circle, normalized so that sup_{|z|=1} |q| = 1.
/// q never vanishes inside the open disk.
class WeightFunction {
  public:
    WeightFunction() = default;

    static WeightFunction unit() { return WeightFunction(); }

    /// Builds the normalized boundary polynomial. The normalizing constant is
    /// found by maximizing sum_j log |e^{i t} - a_j| on a 4096-point angular
    /// grid with golden-section refinement around the best candidates.
    static WeightFunction boundary_poly(std::vector<BoundaryPoint> vertices) {
        if (vertices.empty()) {
            throw std::invalid_argument("boundary_poly: needs at least one vertex");
        }
        WeightFunction q;
        q.kind_ = WeightKind::BoundaryPoly;
        q.vertices_ = std::move(vertices);
        const auto raw = [&q](double t) { return q.raw_log_abs(Complex{std::cos(t), std::sin(t)}); };
        const std::size_t grid = std::max<std::size_t>(4096, 256 * q.vertices_.size());
        const auto best = detail::periodic_grid_max(raw, kTwoPi, grid, 8, 1e-12);
        q.log_norm_const_ = -best.value;
        return q;
    }

    [[nodiscard]] WeightKind kind() const { return kind_; }
    [[nodiscard]] const std::vector<BoundaryPoint>& vertices() const { return vertices_; }
    [[nodiscard]] double norm_const() const { return std::exp(log_norm_const_); }
    [[nodiscard]] double log_norm_const() const { return log_norm_const_; }
    [[nodiscard]] bool is_unit() const { return kind_ == WeightKind::Unit; }

    /// log |q(z)|; finite for |z| < 1 (all roots sit on the circle).
    [[nodiscard]] double log_abs(Complex z) const {
        if (kind_ == WeightKind::Unit) return 0.0;
        return log_norm_const_ + raw_log_abs(z);
    }
    [[nodiscard]] double log_abs(const DiskPoint& z) const { return log_abs(z.value()); }

    /// |q(0)| = c_q, since every root has modulus one.
    [[nodiscard]] double log_abs_at_origin() const {
        return kind_ == WeightKind::Unit ? 0.0 : log_norm_const_;
    }

    [[nodiscard]] Complex eval(Complex z) const {
        if (kind_ == WeightKind::Unit) return 1.0;
        Complex acc = norm_const();
        for (const BoundaryPoint& a : vertices_) acc *= z - a.value();
        return acc;
    }

    friend bool operator==(const WeightFunction& a, const WeightFunction& b) {
        if (a.kind_ != b.kind_) return false;
        if (a.vertices_.size() != b.vertices_.size()) return false;
        for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
            if (a.vertices_[i].theta != b.vertices_[i].theta) return false;
        }
        return true;
    }

  private:
    [[nodiscard]] double raw_log_abs(Complex z) const {
        double acc = 0.0;
        for (const BoundaryPoint& a : vertices_) acc += std::log(std::abs(z - a.value()));
        return acc;
    }

    WeightKind kind_ = WeightKind::Unit;
    std::vector<BoundaryPoint> vertices_;
    double log_norm_const_ = 0.0;
};

/// log |B_q(Z_n, z)| = log |q(z)| + sum_j log d(z, z_j).
[[nodiscard]] inline LogMagnitude weighted_blaschke_log_abs(const WeightFunction& q,
                                                            std::span<const DiskPoint> zeros,
                                                            const DiskPoint& z) {
    const LogMagnitude b = blaschke_log_abs(zeros, z);
    if (b.is_zero()) return b;
    return LogMagnitude{b.value + q.log_abs(z)};
}

struct CircleSup {
    LogMagnitude log_sup;
    DiskPoint witness;
};

/// sup_{|z| <= R} log |B_q(Z_n, z)|. By the maximum principle the sup over
/// the closed ball sits on |z| = R; it is located on an angular grid of
/// max(1024, 64 n) points scaled by a bound on the angular derivative, then
/// sharpened by golden-section refinement. Ties break to the smallest angle.
[[nodiscard]] inline CircleSup sup_on_circle(const WeightFunction& q,
                                             std::span<const DiskPoint> zeros, double R) {
    if (!(R > 0.0 && R < 1.0)) {
        throw std::invalid_argument("sup_on_circle: R must be in (0, 1)");
    }
    const auto f = [&](double t) {
        const DiskPoint z{R * std::cos(t), R * std::sin(t)};
        return weighted_blaschke_log_abs(q, zeros, z).value;
    };
    // Angular derivative of the log-magnitude away from its -inf dips is
    // bounded by sum_j 2/(1 - |z_j| R) plus 2/(1 - R) per weight vertex.
    double deriv = 0.0;
    for (const DiskPoint& zj : zeros) deriv += 2.0 / (1.0 - zj.abs() * R);
    deriv += 2.0 / (1.0 - R) * static_cast<double>(q.vertices().size());
    std::size_t grid = std::max<std::size_t>(1024, 64 * zeros.size());
    grid = std::max(grid, static_cast<std::size_t>(std::min(deriv * 4.0, 262144.0)));
    const auto best = detail::periodic_grid_max(f, kTwoPi, grid, 8, 1e-13);
    return CircleSup{LogMagnitude{best.value},
                     DiskPoint{R * std::cos(best.arg), R * std::sin(best.arg)}};
}

/// Jensen lower bound: sup_{|z| <= R} |B_q(Z_n, z)| >= |q(0)| prod_j max{R, |z_j|}.
[[nodiscard]] inline LogMagnitude jensen_lower(const WeightFunction& q,
                                               std::span<const DiskPoint> zeros, double R) {
    if (!(R > 0.0 && R < 1.0)) {
        throw std::invalid_argument("jensen_lower: R must be in (0, 1)");
    }
    double acc = q.log_abs_at_origin();
    for (const DiskPoint& zj : zeros) acc += std::log(std::max(R, zj.abs()));
    return LogMagnitude{acc};
}

}  // namespace hardy
