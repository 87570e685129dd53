#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace hardy::detail {

/// Neumaier-compensated running sum. Keeps block-boundary comparisons on
/// partial sums of millions of terms stable well below one ulp of the total.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }
    void reset() { sum_ = comp_ = 0.0; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Shortest decimal form that round-trips a double exactly (17 significant
/// digits), used for all file output so reruns are byte-identical.
inline std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Golden-section maximization of f on [a, b]; assumes the bracket contains
/// a single interior maximum. Returns the abscissa of the best point seen.
inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         double tol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

struct GridMax {
    double arg = 0.0;
    double value = 0.0;
};

/// Maximize f over [0, period) by a uniform n-point grid followed by
/// golden-section refinement around the best `refine` local candidates.
/// Ties between equal grid values resolve to the smallest abscissa, and the
/// refined winner must beat the grid winner strictly to displace it, so the
/// result does not depend on evaluation order.
inline GridMax periodic_grid_max(const std::function<double(double)>& f, double period,
                                 std::size_t n, int refine = 8, double tol = 1e-12) {
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        vals[i] = f(period * static_cast<double>(i) / static_cast<double>(n));
    }
    // Rank local maxima by value; keep the top `refine`.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = vals[(i + n - 1) % n];
        const double next = vals[(i + 1) % n];
        if (vals[i] >= prev && vals[i] >= next) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (vals[a] != vals[b]) return vals[a] > vals[b];
        return a < b;
    });
    if (order.size() > static_cast<std::size_t>(refine)) order.resize(refine);

    GridMax best;
    best.arg = 0.0;
    best.value = vals[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (vals[i] > best.value) {
            best.value = vals[i];
            best.arg = period * static_cast<double>(i) / static_cast<double>(n);
        }
    }
    const double h = period / static_cast<double>(n);
    for (std::size_t idx : order) {
        const double c = period * static_cast<double>(idx) / static_cast<double>(n);
        const double x = golden_max(f, c - h, c + h, tol);
        const double v = f(x);
        if (v > best.value) {
            best.value = v;
            best.arg = x;
        }
    }
    if (best.arg < 0.0) best.arg += period;
    if (best.arg >= period) best.arg -= period;
    return best;
}

}  // namespace hardy::detail
