#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/weight.hpp"

namespace hardy {

/// A finite candidate set E with its weight. Points are pairwise distinct.
/// Singletons are allowed (the one-point and g machinery uses them); scans
/// and envelopes require at least two points.
struct CandidateSet {
    std::vector<DiskPoint> points;
    WeightFunction weight = WeightFunction::unit();
    std::string label;

    CandidateSet() = default;
    CandidateSet(std::vector<DiskPoint> pts, WeightFunction w, std::string lbl)
        : points(std::move(pts)), weight(std::move(w)), label(std::move(lbl)) {
        validate();
    }

    void validate() const {
        if (points.empty()) throw InvariantError("CandidateSet: needs at least one point");
        std::vector<std::size_t> order(points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (points[a].re != points[b].re) return points[a].re < points[b].re;
            return points[a].im < points[b].im;
        });
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            if (points[order[i]] == points[order[i + 1]]) {
                const auto a = std::min(order[i], order[i + 1]);
                const auto b = std::max(order[i], order[i + 1]);
                throw InvariantError("CandidateSet: duplicate points at indices " +
                                     std::to_string(a) + " and " + std::to_string(b));
            }
        }
    }

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

enum class FeketeMethod { Greedy, Exchange, BruteForce };

[[nodiscard]] inline const char* to_string(FeketeMethod m) {
    switch (m) {
        case FeketeMethod::Greedy: return "Greedy";
        case FeketeMethod::Exchange: return "Exchange";
        case FeketeMethod::BruteForce: return "BruteForce";
    }
    return "?";
}

/// One extremal tuple with its set-function values against E.
struct FeketeRecord {
    int n = 0;
    ZeroTuple tuple;
    double logV = 0.0;
    double mu = 0.0;
    double logM = 0.0;
    FeketeMethod method = FeketeMethod::Greedy;
};

/// log V(Z_n) = sum_j log |q(z_j)| + sum_{j<k} log d(z_j, z_k).
/// Order-independent; -inf if the tuple has duplicates.
[[nodiscard]] inline double v_of(const CandidateSet& E, std::span<const DiskPoint> tuple) {
    double acc = 0.0;
    for (std::size_t j = 0; j < tuple.size(); ++j) {
        acc += E.weight.log_abs(tuple[j]);
        for (std::size_t k = j + 1; k < tuple.size(); ++k) {
            const double d = pseudo_distance(tuple[j], tuple[k]);
            if (d == 0.0) return kNegInf;
            acc += std::log(d);
        }
    }
    return acc;
}

/// mu(Z_n) = sum_j 1 / |B_q(Z_{n,j}, z_j)| with weighted deleted products.
/// Overflows to +inf if any deleted product vanishes.
[[nodiscard]] inline double mu_of(const CandidateSet& E, std::span<const DiskPoint> tuple) {
    double acc = 0.0;
    for (std::size_t j = 0; j < tuple.size(); ++j) {
        double lb = E.weight.log_abs(tuple[j]);
        for (std::size_t k = 0; k < tuple.size(); ++k) {
            if (k == j) continue;
            const double d = pseudo_distance(tuple[j], tuple[k]);
            if (d == 0.0) return std::numeric_limits<double>::infinity();
            lb += std::log(d);
        }
        acc += std::exp(-lb);
    }
    return acc;
}

struct MEstimate {
    double logM = kNegInf;
    DiskPoint witness;
};

/// M(Z_n) = sup_{z in E} |B_q(Z_n, z)| with the attaining candidate.
/// -inf only when E is contained in the tuple. Ties break to the smallest
/// candidate index.
[[nodiscard]] inline MEstimate m_of(const CandidateSet& E, std::span<const DiskPoint> tuple) {
    MEstimate best;
    best.witness = E.points.front();
    for (const DiskPoint& z : E.points) {
        const double v = weighted_blaschke_log_abs(E.weight, tuple, z).value;
        if (v > best.logM) {
            best.logM = v;
            best.witness = z;
        }
    }
    return best;
}

namespace detail {

/// log |B_q(tuple, z)| restricted to tuple entries other than `skip`
/// (pass tuple.size() to use all entries).
[[nodiscard]] inline double deleted_log_bq(const WeightFunction& q,
                                           std::span<const DiskPoint> tuple, std::size_t skip,
                                           const DiskPoint& z) {
    double acc = q.log_abs(z);
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        if (k == skip) continue;
        const double d = pseudo_distance(z, tuple[k]);
        if (d == 0.0) return kNegInf;
        acc += std::log(d);
    }
    return acc;
}

[[nodiscard]] inline FeketeRecord make_record(const CandidateSet& E, ZeroTuple tuple,
                                              FeketeMethod method) {
    FeketeRecord rec;
    rec.n = static_cast<int>(tuple.size());
    rec.logV = v_of(E, tuple);
    rec.mu = mu_of(E, tuple);
    rec.logM = m_of(E, tuple).logM;
    rec.method = method;
    rec.tuple = std::move(tuple);
    return rec;
}

[[nodiscard]] inline std::uint64_t binomial_capped(std::uint64_t m, std::uint64_t n,
                                                   std::uint64_t cap) {
    if (n > m) return 0;
    n = std::min(n, m - n);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= n; ++i) {
        if (r > cap) return cap + 1;
        r = r * (m - n + i) / i;
    }
    return std::min(r, cap + 1);
}

}  // namespace detail

/// Leja-type greedy tuple: z_j maximizes |B_q(Z_{j-1}, .)| over E, ties by
/// smallest candidate index. Every prefix of the result is itself greedy.
[[nodiscard]] inline FeketeRecord fekete_greedy(const CandidateSet& E, int n) {
    if (n < 0 || static_cast<std::size_t>(n) > E.size()) {
        throw std::invalid_argument("fekete_greedy: n must be in [0, |E|]");
    }
    ZeroTuple tuple;
    tuple.reserve(n);
    for (int step = 0; step < n; ++step) {
        std::size_t arg = 0;
        double best = kNegInf;
        for (std::size_t i = 0; i < E.size(); ++i) {
            const double v = weighted_blaschke_log_abs(E.weight, tuple, E.points[i]).value;
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        tuple.push_back(E.points[arg]);
    }
    return detail::make_record(E, std::move(tuple), FeketeMethod::Greedy);
}

/// One-swap local search on log V: entries scanned in index order, candidates
/// in index order, first improvement taken; stops when no swap gains more
/// than 1e-12. At the fixed point every entry attains the deleted-product
/// maximum over E (the one-swap stationarity of V-maximizers).
[[nodiscard]] inline FeketeRecord fekete_exchange(const CandidateSet& E, FeketeRecord start) {
    ZeroTuple tuple = std::move(start.tuple);
    const std::size_t n = tuple.size();
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t j = 0; j < n && !improved; ++j) {
            const double cur = detail::deleted_log_bq(E.weight, tuple, j, tuple[j]);
            for (std::size_t i = 0; i < E.size(); ++i) {
                const double cand = detail::deleted_log_bq(E.weight, tuple, j, E.points[i]);
                if (cand > cur + 1e-12) {
                    tuple[j] = E.points[i];
                    improved = true;
                    break;
                }
            }
        }
    }
    return detail::make_record(E, std::move(tuple), FeketeMethod::Exchange);
}

/// Exact V_n(E), mu_n(E), M_n(E) by enumerating all n-subsets of E.
/// Among V-maximizing tuples (relative log V tolerance 1e-10), mu and M take
/// their minima; the reported tuple is the min-M maximizer, earliest in
/// lexicographic index order. Enumerations larger than max_enum are refused.
[[nodiscard]] inline FeketeRecord fekete_brute(const CandidateSet& E, int n,
                                               std::uint64_t max_enum = 10'000'000) {
    const std::size_t m = E.size();
    if (n < 0 || static_cast<std::size_t>(n) > m) {
        throw std::invalid_argument("fekete_brute: n must be in [0, |E|]");
    }
    const std::uint64_t cap = std::min<std::uint64_t>(max_enum, 10'000'000);
    if (detail::binomial_capped(m, n, cap) > cap) {
        throw BudgetError("fekete_brute: C(" + std::to_string(m) + ", " + std::to_string(n) +
                          ") exceeds the enumeration budget " + std::to_string(cap));
    }
    if (n == 0) return detail::make_record(E, {}, FeketeMethod::BruteForce);

    // Candidate-to-candidate log distances; log|q| per candidate.
    std::vector<double> logq(m);
    for (std::size_t i = 0; i < m; ++i) logq[i] = E.weight.log_abs(E.points[i]);
    std::vector<double> logd(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = pseudo_distance(E.points[i], E.points[j]);
            logd[i * m + j] = logd[j * m + i] = d == 0.0 ? kNegInf : std::log(d);
        }
    }

    std::vector<std::size_t> idx(n);
    std::vector<double> prefix(n + 1, 0.0);

    // Pass 1: the maximum of log V. Adding a point never increases log V
    // (log d <= 0 and log |q| <= 0), so branches whose partial value already
    // trails the incumbent are pruned.
    double best = kNegInf;
    auto dfs_max = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == static_cast<std::size_t>(n)) {
            best = std::max(best, prefix[depth]);
            return;
        }
        for (std::size_t i = start; i + (n - depth) <= m; ++i) {
            double val = prefix[depth] + logq[i];
            for (std::size_t d = 0; d < depth; ++d) val += logd[idx[d] * m + i];
            if (val <= best) continue;
            idx[depth] = i;
            prefix[depth + 1] = val;
            self(self, i + 1, depth + 1);
        }
    };
    dfs_max(dfs_max, 0, 0);

    // Pass 2: visit every tuple within the tie window and reduce mu / M.
    const double tol = 1e-10 * std::max(1.0, std::abs(best));
    FeketeRecord out;
    out.n = n;
    out.method = FeketeMethod::BruteForce;
    out.logV = best;
    out.mu = std::numeric_limits<double>::infinity();
    out.logM = std::numeric_limits<double>::infinity();
    auto dfs_collect = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == static_cast<std::size_t>(n)) {
            ZeroTuple tuple;
            tuple.reserve(n);
            for (std::size_t d = 0; d < static_cast<std::size_t>(n); ++d) {
                tuple.push_back(E.points[idx[d]]);
            }
            out.mu = std::min(out.mu, mu_of(E, tuple));
            const double logM = m_of(E, tuple).logM;
            if (logM < out.logM) {
                out.logM = logM;
                out.tuple = std::move(tuple);
            }
            return;
        }
        for (std::size_t i = start; i + (n - depth) <= m; ++i) {
            double val = prefix[depth] + logq[i];
            for (std::size_t d = 0; d < depth; ++d) val += logd[idx[d] * m + i];
            if (val < best - tol) continue;
            idx[depth] = i;
            prefix[depth + 1] = val;
            self(self, i + 1, depth + 1);
        }
    };
    dfs_collect(dfs_collect, 0, 0);
    return out;
}

enum class ScanMode { Heuristic, Exact };

/// Records for n = 1..n_max. Exact mode brute-forces each n and asserts the
/// in-record chain M_n <= V_n^{1/n}; heuristic mode polishes the greedy tuple
/// by exchange.
[[nodiscard]] inline std::vector<FeketeRecord> sequence_scan(const CandidateSet& E, int n_max,
                                                             ScanMode mode,
                                                             std::uint64_t max_enum = 10'000'000) {
    if (n_max < 1 || static_cast<std::size_t>(n_max) > E.size()) {
        throw std::invalid_argument("sequence_scan: n_max must be in [1, |E|]");
    }
    std::vector<FeketeRecord> records;
    records.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        FeketeRecord rec = mode == ScanMode::Exact
                               ? fekete_brute(E, n, max_enum)
                               : fekete_exchange(E, fekete_greedy(E, n));
        if (mode == ScanMode::Exact && rec.logM > rec.logV / n + 1e-9) {
            throw InvariantError("sequence_scan: M_n <= V_n^{1/n} failed at n = " +
                                 std::to_string(n));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

/// Nonincreasing positive envelope h(n) = sup_{k >= n} M_k, knots at the
/// integers 1..N, extended piecewise-linearly in between. Beyond the last
/// knot the envelope is undefined; queries there are refused rather than
/// extrapolated.
struct DecayEnvelope {
    std::vector<double> h;  // h[i] is the knot at n = i + 1

    [[nodiscard]] int max_n() const { return static_cast<int>(h.size()); }

    [[nodiscard]] double at(double x) const {
        if (!(x >= 1.0 && x <= static_cast<double>(h.size()))) {
            throw SupportError("DecayEnvelope: x outside [1, " + std::to_string(h.size()) + "]");
        }
        const std::size_t n = static_cast<std::size_t>(x);  // knot index, 1-based
        if (n >= h.size()) return h.back();
        const double frac = x - static_cast<double>(n);
        return h[n - 1] + frac * (h[n] - h[n - 1]);
    }
};

[[nodiscard]] inline DecayEnvelope envelope_h(std::span<const FeketeRecord> records) {
    if (records.empty()) throw std::invalid_argument("envelope_h: no records");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].n != static_cast<int>(i) + 1) {
            throw std::invalid_argument("envelope_h: records must cover n = 1..N contiguously");
        }
    }
    DecayEnvelope env;
    env.h.resize(records.size());
    double suffix = 0.0;
    for (std::size_t i = records.size(); i-- > 0;) {
        const double m_linear = std::exp(records[i].logM);
        if (m_linear <= 0.0) {
            throw InvariantError("envelope_h: M_n vanished at n = " + std::to_string(i + 1) +
                                 " (the scan must stop before E is exhausted)");
        }
        suffix = std::max(suffix, m_linear);
        env.h[i] = suffix;
    }
    return env;
}

/// The map phi: for eps < eps0 = h(1)/2, phi(eps) = h(x) where x solves
/// eps = h(x)/(x + 1). The right side is continuous and strictly decreasing,
/// so bisection resolves x to |h(x)/(x+1) - eps| <= 1e-12 eps.
struct PhiMap {
    DecayEnvelope envelope;
    double eps0 = 0.0;
};

[[nodiscard]] inline PhiMap make_phi_map(DecayEnvelope env) {
    PhiMap map;
    map.eps0 = env.h.front() / 2.0;
    map.envelope = std::move(env);
    return map;
}

[[nodiscard]] inline double phi_of_epsilon(const PhiMap& map, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("phi_of_epsilon: eps must be positive");
    if (eps >= map.eps0) {
        throw SupportError("phi_of_epsilon: eps >= eps0 = " + std::to_string(map.eps0));
    }
    const DecayEnvelope& env = map.envelope;
    const double N = static_cast<double>(env.max_n());
    const double floor_eps = env.h.back() / (N + 1.0);
    if (eps < floor_eps) {
        throw SupportError(
            "phi_of_epsilon: eps below the computed envelope support; extend the scan");
    }
    double lo = 1.0;
    double hi = N;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = env.at(mid) / (mid + 1.0);
        if (std::abs(g - eps) <= 1e-12 * eps) return env.at(mid);
        if (g > eps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return env.at(0.5 * (lo + hi));
}

}  // namespace hardy
