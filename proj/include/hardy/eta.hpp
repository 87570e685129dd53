#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hardy/detail/line_logsum.hpp"
#include "hardy/detail/numeric.hpp"
#include "hardy/errors.hpp"
#include "hardy/potential.hpp"

namespace hardy {

/// One block of the Danikas-Hayman construction: a run of consecutive points
/// whose masses 1 - |z_j| add up to at least the block counter k.
struct EtaBlock {
    int k = 0;
    std::size_t start = 0;  // 0-based, half-open [start, end)
    std::size_t end = 0;
    double mass = 0.0;
    double min_log_eta = 0.0;
    double max_log_eta = 0.0;
    double min_log_ratio = 0.0;  // log(|f(z_j)| / eta_j); NaN without a test function
    double max_log_ratio = 0.0;

    [[nodiscard]] std::size_t size() const { return end - start; }
};

/// eta_j = |B(Z_(k),j, z_j)| / m_k for j in block k, kept in log domain
/// (for deep blocks the linear values underflow doubles by hundreds of
/// orders of magnitude).
struct EtaSequence {
    std::vector<EtaBlock> blocks;
    std::vector<double> log_eta;  // aligned with seq[0 .. blocks.back().end)
};

namespace detail {

/// Signed hyperbolic coordinates when every point lies on one diameter of
/// the disk (then d(z_i, z_j) = tanh |t_i - t_j|); empty when the points are
/// genuinely two-dimensional.
inline std::vector<double> diameter_coordinates(std::span<const DiskPoint> pts) {
    std::size_t ref = pts.size();
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double a = pts[i].abs();
        if (a > best) {
            best = a;
            ref = i;
        }
    }
    std::vector<double> t(pts.size(), 0.0);
    if (ref == pts.size()) return t;  // all points at the origin
    const double vr = pts[ref].re;
    const double vi = pts[ref].im;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double cross = pts[i].re * vi - pts[i].im * vr;
        const double scale = std::abs(pts[i].re * vi) + std::abs(pts[i].im * vr);
        if (std::abs(cross) > 16.0 * std::numeric_limits<double>::epsilon() * scale) {
            return {};
        }
        const double dot = pts[i].re * vr + pts[i].im * vi;
        t[i] = std::copysign(std::atanh(pts[i].abs()), dot);
    }
    return t;
}

inline std::vector<double> deleted_log_blaschke_sums(std::span<const DiskPoint> block) {
    const std::size_t m = block.size();
    std::vector<double> t = diameter_coordinates(block);
    if (!t.empty()) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
        std::vector<double> sorted(m);
        for (std::size_t i = 0; i < m; ++i) sorted[i] = t[order[i]];
        const std::vector<double> s = deleted_logtanh_sums(sorted);
        std::vector<double> out(m);
        for (std::size_t i = 0; i < m; ++i) out[order[i]] = s[i];
        return out;
    }
    if (m > 65536) {
        throw BudgetError("eta_sequence: block of " + std::to_string(m) +
                          " points is not on one diameter; exact pairwise evaluation "
                          "at this size is out of budget");
    }
    std::vector<double> s(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = pseudo_distance(block[i], block[j]);
            const double lg = d == 0.0 ? kNegInf : std::log(d);
            s[i] += lg;
            s[j] += lg;
        }
    }
    return s;
}

}  // namespace detail

/// Greedy block boundaries (smallest end with block mass >= k), then the
/// eta values per block. An optional test function adds the per-block
/// extremes of log(|f(z_j)| / eta_j).
[[nodiscard]] inline EtaSequence eta_sequence(std::span<const DiskPoint> seq, int k_max,
                                              const std::function<Complex(Complex)>& test_fn = {}) {
    if (k_max < 1) throw std::invalid_argument("eta_sequence: k_max must be >= 1");
    EtaSequence out;
    std::size_t cursor = 0;
    for (int k = 1; k <= k_max; ++k) {
        EtaBlock block;
        block.k = k;
        block.start = cursor;
        detail::CompensatedSum mass;
        while (cursor < seq.size()) {
            mass.add(1.0 - seq[cursor].abs());
            ++cursor;
            if (mass.value() >= static_cast<double>(k)) break;
        }
        if (mass.value() < static_cast<double>(k)) {
            throw SupportError("eta_sequence: sequence mass exhausted inside block " +
                               std::to_string(k) + " (completed " + std::to_string(k - 1) +
                               " blocks)");
        }
        block.end = cursor;
        block.mass = mass.value();
        out.blocks.push_back(block);
    }

    out.log_eta.assign(out.blocks.back().end, 0.0);
    for (EtaBlock& block : out.blocks) {
        const std::span<const DiskPoint> pts = seq.subspan(block.start, block.size());
        const std::vector<double> sums = detail::deleted_log_blaschke_sums(pts);
        const double log_m = std::log(static_cast<double>(block.size()));
        block.min_log_eta = std::numeric_limits<double>::infinity();
        block.max_log_eta = -std::numeric_limits<double>::infinity();
        block.min_log_ratio = std::numeric_limits<double>::quiet_NaN();
        block.max_log_ratio = std::numeric_limits<double>::quiet_NaN();
        double min_ratio = std::numeric_limits<double>::infinity();
        double max_ratio = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double log_eta = sums[i] - log_m;
            out.log_eta[block.start + i] = log_eta;
            block.min_log_eta = std::min(block.min_log_eta, log_eta);
            block.max_log_eta = std::max(block.max_log_eta, log_eta);
            if (test_fn) {
                const double lf = std::log(std::abs(test_fn(pts[i].value())));
                min_ratio = std::min(min_ratio, lf - log_eta);
                max_ratio = std::max(max_ratio, lf - log_eta);
            }
        }
        if (test_fn) {
            block.min_log_ratio = min_ratio;
            block.max_log_ratio = max_ratio;
        }
    }
    return out;
}

}  // namespace hardy
