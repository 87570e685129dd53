#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hardy/detail/numeric.hpp"
#include "hardy/disk.hpp"
#include "hardy/interp.hpp"

namespace hardy {

/// A finite union of disjoint arcs on the unit circle.
struct ArcSet {
    struct Arc {
        double start = 0.0;   // normalized into [0, 2pi)
        double length = 0.0;  // in (0, 2pi]
    };

    std::vector<Arc> arcs;

    static ArcSet from_intervals(std::span<const std::pair<double, double>> intervals) {
        if (intervals.empty()) throw std::invalid_argument("ArcSet: no arcs");
        ArcSet set;
        for (const auto& [a, b] : intervals) {
            double len = b - a;
            if (!(len > 0.0)) throw std::invalid_argument("ArcSet: arc end must exceed start");
            len = std::min(len, kTwoPi);
            double start = std::fmod(a, kTwoPi);
            if (start < 0.0) start += kTwoPi;
            set.arcs.push_back({start, len});
        }
        double total = 0.0;
        for (const auto& arc : set.arcs) total += arc.length;
        if (total > kTwoPi + 1e-12) throw std::invalid_argument("ArcSet: arcs exceed the circle");
        if (set.arcs.size() > 1) {
            std::vector<Arc> sorted = set.arcs;
            std::sort(sorted.begin(), sorted.end(),
                      [](const Arc& x, const Arc& y) { return x.start < y.start; });
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                const Arc& cur = sorted[i];
                const Arc& next = sorted[(i + 1) % sorted.size()];
                const double gap = (i + 1 == sorted.size())
                                       ? next.start + kTwoPi - (cur.start + cur.length)
                                       : next.start - (cur.start + cur.length);
                if (gap < 0.0) throw std::invalid_argument("ArcSet: arcs overlap");
            }
        }
        return set;
    }

    [[nodiscard]] double total_measure() const {
        double total = 0.0;
        for (const auto& arc : arcs) total += arc.length;
        return total;
    }

    [[nodiscard]] bool full_circle() const {
        return arcs.size() == 1 && arcs.front().length >= kTwoPi;
    }
};

/// Harmonic measure of the arc set seen from z: the Poisson integral of the
/// arc indicator. Each arc contributes the closed-form antiderivative, the
/// argument of the Moebius-transported endpoint
///   F(theta) = arg((e^{i theta} - z) / (1 - conj(z) e^{i theta})),
/// so omega = sum over arcs of wrap(F(end) - F(start)) / 2pi. The full
/// circle short-circuits to omega == 1.
[[nodiscard]] inline double harmonic_omega(const ArcSet& set, const DiskPoint& z) {
    if (set.arcs.empty()) throw std::invalid_argument("harmonic_omega: empty arc set");
    if (set.full_circle()) return 1.0;
    const Complex zc = z.value();
    const auto transported = [&](double theta) {
        const Complex e{std::cos(theta), std::sin(theta)};
        return std::arg((e - zc) / (1.0 - std::conj(zc) * e));
    };
    double omega = 0.0;
    for (const auto& arc : set.arcs) {
        double delta = transported(arc.start + arc.length) - transported(arc.start);
        delta = std::fmod(delta, kTwoPi);
        if (delta < 0.0) delta += kTwoPi;
        omega += delta / kTwoPi;
    }
    return omega;
}

struct MeasureBound {
    double lower = 0.0;
    double upper = 0.0;
    double omega_min = 0.0;
    DiskPoint argmin;
};

/// Two-sided bound for positive-measure nontangential limit sets:
///   eps <= C_p <= 2^{1/p} (1 - R^2)^{-1/p} eps^{omega_min},
/// with omega_min the minimum of omega over |z| <= R. Omega is harmonic, so
/// the minimum sits on |z| = R; it is located by the same grid-plus-
/// refinement contract as the circle suprema.
[[nodiscard]] inline MeasureBound positive_measure_bound(const ArcSet& set, double eps, double R,
                                                         const PNorm& p) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("positive_measure_bound: eps must be in (0, 1)");
    }
    if (!(R >= 0.0 && R < 1.0)) {
        throw std::invalid_argument("positive_measure_bound: R must be in [0, 1)");
    }
    MeasureBound out;
    out.lower = eps;
    if (set.full_circle()) {
        out.omega_min = 1.0;
        out.argmin = DiskPoint{R, 0.0};
    } else if (R == 0.0) {
        out.omega_min = harmonic_omega(set, DiskPoint{});
        out.argmin = DiskPoint{};
    } else {
        const auto neg_omega = [&](double t) {
            return -harmonic_omega(set, DiskPoint{R * std::cos(t), R * std::sin(t)});
        };
        const std::size_t grid = std::max<std::size_t>(4096, 512 * set.arcs.size());
        const auto best = detail::periodic_grid_max(neg_omega, kTwoPi, grid, 8, 1e-13);
        out.omega_min = -best.value;
        out.argmin = DiskPoint{R * std::cos(best.arg), R * std::sin(best.arg)};
    }
    const double inv_p = p.inv();
    out.upper = std::pow(2.0, inv_p) * std::pow(1.0 - R * R, -inv_p) *
                std::exp(out.omega_min * std::log(eps));
    return out;
}

}  // namespace hardy
