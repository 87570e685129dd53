#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/interp.hpp"
#include "hardy/potential.hpp"
#include "hardy/weight.hpp"

namespace hardy {

struct SearchBudget {
    std::uint64_t max_enum = 100000;
};

/// A certified lower estimate of g(E, eps, R, q): the best witness tuple
/// found whose weighted product stays below eps everywhere on E. `exact`
/// marks a full subset enumeration (then the value is g itself over the
/// finite E); `certified_feasible` is re-verified independently of the
/// search bookkeeping.
struct GEstimate {
    double eps = 0.0;
    double R = 0.0;
    double log_g = 0.0;
    ZeroTuple witness;
    bool certified_feasible = false;
    bool exact = false;
};

/// Two-sided stability estimate at one (eps, R, p).
struct StabilitySandwich {
    PNorm p = PNorm::infinity();
    double eps = 0.0;
    double R = 0.0;
    double alpha = 0.0;
    double K = 0.0;
    double lower_log = 0.0;
    double upper_log = 0.0;
    double upper_certified_log = 0.0;
    double phi_eps = 0.0;
    ZeroTuple witness_lower;
    ZeroTuple witness_upper;
    WeightFunction q;
    std::string method;
    std::uint64_t seed = 0;
};

namespace detail {

inline constexpr double kFeasSlack = 1e-12;

/// Objective for the g search: sup_{|z| <= R} log |B_q| for R > 0, the value
/// at the origin for R == 0.
[[nodiscard]] inline double g_objective(const CandidateSet& E, std::span<const DiskPoint> tuple,
                                        double R) {
    if (R == 0.0) return weighted_blaschke_log_abs(E.weight, tuple, DiskPoint{}).value;
    return sup_on_circle(E.weight, tuple, R).log_sup.value;
}

/// Per-point factor of the objective upper bound: the sup of one Moebius
/// factor over the R-ball ((R + r)/(1 + R r)), or the exact factor r at the
/// origin. Appending points only lowers the bound, which drives the pruning
/// in the exact subset search.
[[nodiscard]] inline double g_point_bound(const DiskPoint& z, double R) {
    const double r = z.abs();
    if (R == 0.0) return std::log(r);
    return std::log((R + r) / (1.0 + R * r));
}

/// Exhaustive search over all subsets of E (lexicographic index order,
/// branches pruned once their objective bound trails the incumbent).
[[nodiscard]] inline GEstimate g_brute(const CandidateSet& E, double eps, double R) {
    const std::size_t m = E.size();
    const double log_eps = std::log(eps);
    std::vector<double> logq(m), point_ub(m);
    for (std::size_t i = 0; i < m; ++i) {
        logq[i] = E.weight.log_abs(E.points[i]);
        point_ub[i] = g_point_bound(E.points[i], R);
    }
    const double ub_q = R == 0.0 ? E.weight.log_abs_at_origin()
                                 : sup_on_circle(E.weight, {}, R).log_sup.value;

    // log d between candidates, for incremental feasibility updates. The
    // diagonal is the -inf sentinel: a tuple member annihilates B at itself.
    std::vector<double> logd(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        logd[i * m + i] = kNegInf;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = pseudo_distance(E.points[i], E.points[j]);
            logd[i * m + j] = logd[j * m + i] = d == 0.0 ? kNegInf : std::log(d);
        }
    }

    GEstimate best;
    best.eps = eps;
    best.R = R;
    best.log_g = kNegInf;
    best.exact = true;
    bool found = false;

    std::vector<std::size_t> chosen;
    std::vector<double> dist_sum(m, 0.0);  // sum over chosen of log d(e, .); -inf via count
    std::vector<int> zero_cnt(m, 0);

    const auto feasible_now = [&]() {
        for (std::size_t e = 0; e < m; ++e) {
            if (zero_cnt[e] == 0 && logq[e] + dist_sum[e] > log_eps + kFeasSlack) return false;
        }
        return true;
    };
    const auto consider = [&](double ub) {
        if (found && ub <= best.log_g) return;
        if (!feasible_now()) return;
        ZeroTuple tuple;
        tuple.reserve(chosen.size());
        for (std::size_t i : chosen) tuple.push_back(E.points[i]);
        const double value = g_objective(E, tuple, R);
        if (!found || value > best.log_g) {
            best.log_g = value;
            best.witness = std::move(tuple);
            found = true;
        }
    };

    auto dfs = [&](auto&& self, std::size_t start, double ub) -> void {
        consider(ub);
        for (std::size_t i = start; i < m; ++i) {
            const double child_ub = ub + point_ub[i];
            if (found && child_ub <= best.log_g) continue;
            chosen.push_back(i);
            for (std::size_t e = 0; e < m; ++e) {
                const double ld = logd[e * m + i];
                if (ld == kNegInf) {
                    ++zero_cnt[e];
                } else {
                    dist_sum[e] += ld;
                }
            }
            self(self, i + 1, child_ub);
            chosen.pop_back();
            for (std::size_t e = 0; e < m; ++e) {
                const double ld = logd[e * m + i];
                if (ld == kNegInf) {
                    --zero_cnt[e];
                } else {
                    dist_sum[e] -= ld;
                }
            }
        }
    };
    dfs(dfs, 0, ub_q);

    if (!found) {  // every subset violated the constraint; report the empty tuple
        best.log_g = ub_q;
        best.witness.clear();
        best.certified_feasible = false;
        return best;
    }
    best.certified_feasible = m_of(E, best.witness).logM <= log_eps + kFeasSlack;
    return best;
}

/// Feasibility-constrained exchange polish toward larger log V: entries in
/// index order, candidates in index order, first improving swap that keeps
/// the tuple feasible. Deterministic for a fixed start.
inline void g_polish(const CandidateSet& E, double log_eps, std::vector<std::size_t>& idx) {
    const std::size_t m = E.size();
    const std::size_t n = idx.size();
    if (n == 0) return;
    std::vector<double> logq(m);
    for (std::size_t i = 0; i < m; ++i) logq[i] = E.weight.log_abs(E.points[i]);
    // dist_sum[e] / zero_cnt[e] describe log|B(tuple, e)| over candidates.
    std::vector<double> dist_sum(m, 0.0);
    std::vector<int> zero_cnt(m, 0);
    const auto logd = [&](std::size_t a, std::size_t b) {
        const double d = pseudo_distance(E.points[a], E.points[b]);
        return d == 0.0 ? kNegInf : std::log(d);
    };
    for (std::size_t e = 0; e < m; ++e) {
        for (std::size_t j : idx) {
            const double ld = logd(e, j);
            if (ld == kNegInf) {
                ++zero_cnt[e];
            } else {
                dist_sum[e] += ld;
            }
        }
    }
    const auto swap_feasible = [&](std::size_t out, std::size_t in) {
        for (std::size_t e = 0; e < m; ++e) {
            int zc = zero_cnt[e];
            double ds = dist_sum[e];
            const double ld_out = logd(e, out);
            if (ld_out == kNegInf) {
                --zc;
            } else {
                ds -= ld_out;
            }
            const double ld_in = logd(e, in);
            if (ld_in == kNegInf) {
                ++zc;
            } else {
                ds += ld_in;
            }
            if (zc == 0 && logq[e] + ds > log_eps + kFeasSlack) return false;
        }
        return true;
    };
    const auto delta_logV = [&](std::size_t pos, std::size_t in) {
        double delta = logq[in] - logq[idx[pos]];
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k == pos) continue;
            delta += logd(in, idx[k]) - logd(idx[pos], idx[k]);
        }
        return delta;
    };
    const auto apply_swap = [&](std::size_t pos, std::size_t in) {
        const std::size_t out = idx[pos];
        for (std::size_t e = 0; e < m; ++e) {
            const double ld_out = logd(e, out);
            if (ld_out == kNegInf) {
                --zero_cnt[e];
            } else {
                dist_sum[e] -= ld_out;
            }
            const double ld_in = logd(e, in);
            if (ld_in == kNegInf) {
                ++zero_cnt[e];
            } else {
                dist_sum[e] += ld_in;
            }
        }
        idx[pos] = in;
    };

    bool improved = true;
    int sweeps = 0;
    while (improved && sweeps++ < 64) {
        improved = false;
        for (std::size_t pos = 0; pos < n && !improved; ++pos) {
            for (std::size_t c = 0; c < m; ++c) {
                if (std::find(idx.begin(), idx.end(), c) != idx.end()) continue;
                if (delta_logV(pos, c) > 1e-12 && swap_feasible(idx[pos], c)) {
                    apply_swap(pos, c);
                    improved = true;
                    break;
                }
            }
        }
    }
}

}  // namespace detail

/// Certified lower estimate of
///   g(E, eps, R, q) = sup { sup_{|z| <= R} |B_q(Z_n, z)| :
///                           Z_n in E^n, |B_q(Z_n, .)| <= eps on E }.
/// When 2^|E| fits the budget the search enumerates every subset and the
/// estimate is exact over the finite E. Otherwise the candidate pool is the
/// empty tuple, the full set, the supplied Fekete records, greedy prefixes,
/// and seeded random subsets polished by a feasibility-constrained exchange.
/// R == 0 evaluates at the origin instead of a circle supremum.
[[nodiscard]] inline GEstimate g_estimate(const CandidateSet& E, double eps, double R,
                                          const SearchBudget& budget, std::uint64_t seed,
                                          std::span<const FeketeRecord> pool_records = {},
                                          std::span<const ZeroTuple> extra_tuples = {}) {
    if (!(eps > 0.0)) throw std::invalid_argument("g_estimate: eps must be positive");
    if (!(R >= 0.0 && R < 1.0)) throw std::invalid_argument("g_estimate: R must be in [0, 1)");
    const std::size_t m = E.size();
    if (m < 63 && (std::uint64_t{1} << m) <= budget.max_enum) {
        return detail::g_brute(E, eps, R);
    }

    const double log_eps = std::log(eps);
    GEstimate best;
    best.eps = eps;
    best.R = R;
    best.log_g = kNegInf;
    bool found = false;

    const auto consider = [&](const ZeroTuple& tuple) {
        if (m_of(E, tuple).logM > log_eps + detail::kFeasSlack) return;
        const double value = detail::g_objective(E, tuple, R);
        if (!found || value > best.log_g) {
            best.log_g = value;
            best.witness = tuple;
            found = true;
        }
    };

    consider({});                // empty tuple
    consider(E.points);          // the full set (always feasible: B_q vanishes on E)
    int first_feasible_n = -1;
    for (const FeketeRecord& rec : pool_records) {
        if (m_of(E, rec.tuple).logM <= log_eps + detail::kFeasSlack && first_feasible_n < 0) {
            first_feasible_n = rec.n;
        }
        consider(rec.tuple);
    }
    if (pool_records.empty()) {
        const int n_hi = static_cast<int>(std::min<std::size_t>(m - 1, 48));
        for (int n = 1; n <= n_hi; ++n) {
            const FeketeRecord rec = fekete_greedy(E, n);
            if (m_of(E, rec.tuple).logM <= log_eps + detail::kFeasSlack && first_feasible_n < 0) {
                first_feasible_n = rec.n;
            }
            consider(rec.tuple);
        }
    }
    for (const ZeroTuple& t : extra_tuples) consider(t);

    // Seeded random subsets around the smallest feasible size, polished
    // under the constraint.
    std::mt19937_64 rng(seed);
    const int lo = std::max(1, first_feasible_n < 0 ? 1 : first_feasible_n - 2);
    const int hi = static_cast<int>(
        std::min<std::size_t>(m, first_feasible_n < 0 ? 16 : first_feasible_n + 6));
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    for (int n = lo; n <= hi; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            std::shuffle(all.begin(), all.end(), rng);
            std::vector<std::size_t> idx(all.begin(), all.begin() + n);
            std::sort(idx.begin(), idx.end());
            detail::g_polish(E, log_eps, idx);
            ZeroTuple tuple;
            tuple.reserve(idx.size());
            for (std::size_t i : idx) tuple.push_back(E.points[i]);
            consider(tuple);
        }
    }

    if (!found) {
        best.log_g = detail::g_objective(E, {}, R);
        best.witness.clear();
        best.certified_feasible = false;
        return best;
    }
    best.certified_feasible = m_of(E, best.witness).logM <= log_eps + detail::kFeasSlack;
    return best;
}

/// Least-squares power-law fit of the M_n tail: if M_n ~ C n^{-sigma}, the
/// envelope machinery yields phi(eps) <= C_2 eps^{sigma/(1+sigma)}. A
/// diagnostic, never an assertion.
struct PowerDecayFit {
    double eps = 0.0;
    double R = 0.0;
    double sigma_fit = 0.0;
    double bound_exponent = 0.0;
};

[[nodiscard]] inline PowerDecayFit corollary_power_decay(std::span<const FeketeRecord> records,
                                                         double eps, double R) {
    const std::size_t n = records.size();
    const std::size_t from = n / 2;
    if (n - from < 4) {
        throw std::invalid_argument("corollary_power_decay: needs at least 4 tail records");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double cnt = static_cast<double>(n - from);
    for (std::size_t i = from; i < n; ++i) {
        const double x = std::log(static_cast<double>(records[i].n));
        const double y = records[i].logM;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    PowerDecayFit fit;
    fit.eps = eps;
    fit.R = R;
    fit.sigma_fit = -slope;
    fit.bound_exponent = fit.sigma_fit / (1.0 + fit.sigma_fit);
    return fit;
}

/// Scan-derived state shared by a sweep of sandwich evaluations at one R.
struct SandwichContext {
    std::vector<FeketeRecord> records;
    PhiMap phi;
    double R = 0.0;
    SearchBudget budget;
    std::uint64_t seed = 0;
    bool scan_exact = false;

    struct RecordSups {
        double log_sup_full = 0.0;  // sup_{|z| <= R} log |B(Z_n, .)| (unweighted)
        double log_max_del = 0.0;   // max_k sup_{|z| <= R} log |B(Z_{n,k}, .)|
        bool ready = false;
    };
    std::vector<RecordSups> sups;
};

namespace detail {

[[nodiscard]] inline SandwichContext::RecordSups record_sups(const ZeroTuple& tuple, double R) {
    const WeightFunction unit = WeightFunction::unit();
    SandwichContext::RecordSups out;
    out.ready = true;
    if (R == 0.0) {
        out.log_sup_full = blaschke_log_abs(tuple, DiskPoint{}).value;
        double best = kNegInf;
        for (std::size_t k = 0; k < tuple.size(); ++k) {
            ZeroTuple del;
            del.reserve(tuple.size() - 1);
            for (std::size_t j = 0; j < tuple.size(); ++j) {
                if (j != k) del.push_back(tuple[j]);
            }
            best = std::max(best, blaschke_log_abs(del, DiskPoint{}).value);
        }
        out.log_max_del = tuple.empty() ? 0.0 : best;
        return out;
    }
    out.log_sup_full = sup_on_circle(unit, tuple, R).log_sup.value;
    double best = kNegInf;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
        ZeroTuple del;
        del.reserve(tuple.size() - 1);
        for (std::size_t j = 0; j < tuple.size(); ++j) {
            if (j != k) del.push_back(tuple[j]);
        }
        best = std::max(best, sup_on_circle(unit, del, R).log_sup.value);
    }
    out.log_max_del = tuple.empty() ? 0.0 : best;
    return out;
}

}  // namespace detail

/// Runs the Fekete scan behind a sandwich sweep: per n, brute force when
/// C(|E|, n) fits the budget, exchange-polished greedy otherwise. The scan
/// extends until the phi support reaches min_eps (or E is nearly exhausted).
[[nodiscard]] inline SandwichContext make_sandwich_context(const CandidateSet& E, double R,
                                                           double min_eps,
                                                           const SearchBudget& budget,
                                                           std::uint64_t seed, int n_cap = 64) {
    if (E.size() < 2) {
        throw std::invalid_argument("make_sandwich_context: E must have at least 2 points");
    }
    SandwichContext ctx;
    ctx.R = R;
    ctx.budget = budget;
    ctx.seed = seed;
    ctx.scan_exact = true;
    const int n_limit = static_cast<int>(std::min<std::size_t>(
        E.size() - 1, static_cast<std::size_t>(std::max(2, n_cap))));
    const std::uint64_t scan_cap = std::min<std::uint64_t>(budget.max_enum, 10'000'000);
    for (int n = 1; n <= n_limit; ++n) {
        const bool exact = detail::binomial_capped(E.size(), n, scan_cap) <= scan_cap;
        ctx.scan_exact = ctx.scan_exact && exact;
        FeketeRecord rec = exact ? fekete_brute(E, n, scan_cap)
                                 : fekete_exchange(E, fekete_greedy(E, n));
        ctx.records.push_back(std::move(rec));
        if (n >= 2) {
            // Provisional support floor; stop extending once phi can resolve
            // every requested eps.
            const DecayEnvelope env = envelope_h(ctx.records);
            if (env.h.back() / (static_cast<double>(n) + 1.0) <= min_eps * 0.5) break;
        }
    }
    ctx.phi = make_phi_map(envelope_h(ctx.records));
    ctx.sups.assign(ctx.records.size(), {});
    return ctx;
}

/// One row of the stability sandwich at (eps, R, p):
///   lower = log g-estimate at eps (a feasible Blaschke witness);
///   upper = log K + alpha (log g-estimate at phi(eps) - log |q(0)|), the
///           headline bound with alpha = alpha*(R), K = 8 / ((1 - R^2) R);
///   upper_certified = the direct interpolation-chain bound
///           (4/(1-R^2)) (eps mu(Z) maxdel(Z) + supfull(Z)) minimized over
///           scan tuples Z with M(Z) <= phi(eps) — valid regardless of the
///           g search quality, so it is the number the acceptance gate uses.
[[nodiscard]] inline StabilitySandwich sandwich_at(const CandidateSet& E, SandwichContext& ctx,
                                                   double eps, const PNorm& p) {
    StabilitySandwich out;
    out.p = p;
    out.eps = eps;
    out.R = ctx.R;
    out.q = E.weight;
    out.seed = ctx.seed;
    out.phi_eps = phi_of_epsilon(ctx.phi, eps);

    GEstimate lo = g_estimate(E, eps, ctx.R, ctx.budget, ctx.seed, ctx.records);
    const ZeroTuple lower_witness[] = {lo.witness};
    GEstimate hi = g_estimate(E, out.phi_eps, ctx.R, ctx.budget, ctx.seed, ctx.records,
                              lower_witness);
    if (hi.log_g < lo.log_g) hi.log_g = lo.log_g;  // eps-feasible tuples are phi(eps)-feasible

    const double log_q0 = E.weight.log_abs_at_origin();
    out.alpha = alpha_star(ctx.R);
    out.K = 8.0 / ((1.0 - ctx.R * ctx.R) * ctx.R);
    out.lower_log = lo.log_g;
    out.witness_lower = lo.witness;
    out.upper_log = std::log(out.K) + out.alpha * (hi.log_g - log_q0);

    // Direct Eq-chain bound over qualifying scan records.
    const double K1 = 4.0 / (1.0 - ctx.R * ctx.R);
    double best_cert = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (std::size_t i = 0; i < ctx.records.size() && evaluated < 8; ++i) {
        const FeketeRecord& rec = ctx.records[i];
        if (std::exp(rec.logM) > out.phi_eps) continue;
        ++evaluated;
        if (!ctx.sups[i].ready) ctx.sups[i] = detail::record_sups(rec.tuple, ctx.R);
        const double value = std::log(K1) + std::log(eps * rec.mu * std::exp(ctx.sups[i].log_max_del) +
                                                     std::exp(ctx.sups[i].log_sup_full));
        if (value < best_cert) {
            best_cert = value;
            out.witness_upper = rec.tuple;
        }
    }
    if (!std::isfinite(best_cert)) {
        throw InvariantError("sandwich_at: no scan record satisfies M(Z_n) <= phi(eps)");
    }
    out.upper_certified_log = best_cert;

    out.method = std::string(lo.exact ? "g=brute" : "g=heuristic") +
                 (ctx.scan_exact ? ";scan=exact" : ";scan=heuristic") + ";mu=weighted;norm=leq1";
    if (out.lower_log > out.upper_log + 1e-9 || out.lower_log > out.upper_certified_log + 1e-9) {
        throw InvariantError("sandwich_at: sandwich inverted (lower exceeds upper)");
    }
    return out;
}

/// Single-shot convenience wrapper: scans, then evaluates one row.
[[nodiscard]] inline StabilitySandwich sandwich(const CandidateSet& E, double eps, double R,
                                                const PNorm& p, const SearchBudget& budget,
                                                std::uint64_t seed) {
    SandwichContext ctx = make_sandwich_context(E, R, eps, budget, seed);
    return sandwich_at(E, ctx, eps, p);
}

/// One-point estimate (R = 0). With the origin in E the value is exactly
/// eps. Otherwise the circle suprema collapse to evaluation at the origin,
/// alpha = alpha*(r_min) with r_min = min |z| over E, and the direct chain
/// bound runs with coefficient prefactor 1 (so K = 2 / r_min).
[[nodiscard]] inline StabilitySandwich one_point(const CandidateSet& E, double eps, const PNorm& p,
                                                 const SearchBudget& budget, std::uint64_t seed) {
    StabilitySandwich out;
    out.p = p;
    out.eps = eps;
    out.R = 0.0;
    out.q = E.weight;
    out.seed = seed;

    for (const DiskPoint& z : E.points) {
        if (z.abs() < kNodeCoincidenceTol) {
            out.alpha = 1.0;
            out.K = 1.0;
            out.phi_eps = eps;
            out.lower_log = std::log(eps);
            out.upper_log = std::log(eps);
            out.upper_certified_log = std::log(eps);
            out.witness_lower = {z};
            out.witness_upper = {z};
            out.method = "origin-in-E";
            return out;
        }
    }

    double r_min = 1.0;
    for (const DiskPoint& z : E.points) r_min = std::min(r_min, z.abs());
    out.alpha = alpha_star(r_min);
    out.K = 2.0 / r_min;

    SandwichContext ctx = make_sandwich_context(E, 0.0, eps, budget, seed);
    out.phi_eps = phi_of_epsilon(ctx.phi, eps);

    GEstimate lo = g_estimate(E, eps, 0.0, budget, seed, ctx.records);
    const ZeroTuple lower_witness[] = {lo.witness};
    GEstimate hi = g_estimate(E, out.phi_eps, 0.0, budget, seed, ctx.records, lower_witness);
    if (hi.log_g < lo.log_g) hi.log_g = lo.log_g;

    out.lower_log = lo.log_g;
    out.witness_lower = lo.witness;
    out.upper_log = std::log(out.K) + out.alpha * (hi.log_g - E.weight.log_abs_at_origin());

    double best_cert = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (std::size_t i = 0; i < ctx.records.size() && evaluated < 8; ++i) {
        const FeketeRecord& rec = ctx.records[i];
        if (std::exp(rec.logM) > out.phi_eps) continue;
        ++evaluated;
        if (!ctx.sups[i].ready) ctx.sups[i] = detail::record_sups(rec.tuple, 0.0);
        const double value = std::log(eps * rec.mu * std::exp(ctx.sups[i].log_max_del) +
                                      std::exp(ctx.sups[i].log_sup_full));
        if (value < best_cert) {
            best_cert = value;
            out.witness_upper = rec.tuple;
        }
    }
    if (!std::isfinite(best_cert)) {
        throw InvariantError("one_point: no scan record satisfies M(Z_n) <= phi(eps)");
    }
    out.upper_certified_log = best_cert;
    out.method = std::string(lo.exact ? "g=brute" : "g=heuristic") + ";R=0;mu=weighted;norm=leq1";
    if (out.lower_log > out.upper_log + 1e-9 || out.lower_log > out.upper_certified_log + 1e-9) {
        throw InvariantError("one_point: sandwich inverted (lower exceeds upper)");
    }
    return out;
}

}  // namespace hardy
