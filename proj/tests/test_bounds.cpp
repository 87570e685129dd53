#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hardy/bounds.hpp"
#include "hardy/scenarios.hpp"
#include "hardy/harmonic.hpp"
#include "hardy/serialize.hpp"

using namespace hardy;

namespace {

CandidateSet seeded_set(std::uint64_t seed, int count, double rmax) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.05, rmax);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<DiskPoint> pts;
    while (static_cast<int>(pts.size()) < count) {
        const double r = radius(rng);
        const double t = angle(rng);
        const DiskPoint z{r * std::cos(t), r * std::sin(t)};
        bool close = false;
        for (const DiskPoint& w : pts) close = close || pseudo_distance(z, w) < 1e-3;
        if (!close) pts.push_back(z);
    }
    return CandidateSet(std::move(pts), WeightFunction::unit(), "seeded");
}

// Test-local enumeration of g over all subsets, with a dense-scan objective.
double oracle_g(const CandidateSet& E, double eps, double R) {
    const std::size_t m = E.size();
    double best = kNegInf;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        ZeroTuple tuple;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) tuple.push_back(E.points[i]);
        }
        double worst = kNegInf;
        for (const DiskPoint& e : E.points) {
            worst = std::max(worst, weighted_blaschke_log_abs(E.weight, tuple, e).value);
        }
        if (worst > std::log(eps) + 1e-12) continue;
        double obj = kNegInf;
        for (int i = 0; i < 250000; ++i) {
            const double t = kTwoPi * i / 250000.0;
            const DiskPoint z{R * std::cos(t), R * std::sin(t)};
            obj = std::max(obj, weighted_blaschke_log_abs(E.weight, tuple, z).value);
        }
        best = std::max(best, obj);
    }
    return best;
}

}  // namespace

TEST_CASE("g_estimate on a singleton candidate set") {
    const CandidateSet E({{0.0, 0.0}}, WeightFunction::unit(), "origin");
    const SearchBudget budget;

    // eps = 0.5: {0} is feasible (B vanishes on E) and gives sup = R
    const GEstimate g = g_estimate(E, 0.5, 0.7, budget, 1);
    REQUIRE(g.exact);
    REQUIRE(g.certified_feasible);
    REQUIRE(g.witness.size() == 1);
    REQUIRE(g.log_g == Catch::Approx(std::log(0.7)).margin(1e-12));

    // eps >= 1: the empty tuple is feasible and optimal (|B_q| == 1)
    const GEstimate g1 = g_estimate(E, 1.5, 0.7, budget, 1);
    REQUIRE(g1.witness.empty());
    REQUIRE(g1.log_g == Catch::Approx(0.0).margin(1e-13));
    REQUIRE(g1.certified_feasible);
}

TEST_CASE("g_estimate matches the subset enumeration oracle") {
    const CandidateSet E({{0.0, 0.0}, {0.5, 0.0}, {-0.5, 0.0}}, WeightFunction::unit(), "three");
    const SearchBudget budget;
    const GEstimate g = g_estimate(E, 0.3, 0.6, budget, 7);
    REQUIRE(g.exact);
    REQUIRE(g.certified_feasible);
    const double oracle = oracle_g(E, 0.3, 0.6);
    REQUIRE(g.log_g == Catch::Approx(oracle).margin(1e-7));
    // the only feasible nonempty subsets contain both +-0.5
    REQUIRE(g.witness.size() >= 2);
}

TEST_CASE("brute g is monotone in eps") {
    const CandidateSet E = seeded_set(17, 8, 0.6);
    const SearchBudget budget;
    double prev = kNegInf;
    for (double eps = 0.02; eps < 0.9; eps *= 1.8) {
        const GEstimate g = g_estimate(E, eps, 0.5, budget, 3);
        REQUIRE(g.exact);
        REQUIRE(g.log_g >= prev - 1e-12);
        prev = g.log_g;
    }
}

TEST_CASE("heuristic g search stays feasible and below brute") {
    const CandidateSet E = seeded_set(23, 14, 0.7);
    SearchBudget small;
    small.max_enum = 64;  // forces the heuristic path (2^14 > 64)
    SearchBudget large;   // default allows full enumeration of 2^14 subsets
    const double eps = 0.05;
    const GEstimate heur = g_estimate(E, eps, 0.4, small, 11);
    const GEstimate exact = g_estimate(E, eps, 0.4, large, 11);
    REQUIRE(!heur.exact);
    REQUIRE(exact.exact);
    REQUIRE(heur.certified_feasible);
    REQUIRE(heur.log_g <= exact.log_g + 1e-10);
    // the heuristic pool contains the full set, so something feasible exists
    REQUIRE(std::isfinite(heur.log_g));
}

TEST_CASE("sandwich rows are ordered and deterministic") {
    const CandidateSet E = seeded_set(99, 9, 0.55);
    const SearchBudget budget;
    SandwichContext ctx = make_sandwich_context(E, 0.5, 1e-4, budget, 42);
    REQUIRE(ctx.phi.eps0 > 0.0);

    const PNorm p = PNorm::finite(2.0);
    double prev_lower = std::numeric_limits<double>::infinity();
    int rows = 0;
    for (double eps = ctx.phi.eps0 * 0.9; eps > ctx.phi.eps0 * 0.01; eps *= 0.5) {
        StabilitySandwich s;
        try {
            s = sandwich_at(E, ctx, eps, p);
        } catch (const SupportError&) {
            break;
        }
        ++rows;
        REQUIRE(s.lower_log <= s.upper_certified_log + 1e-9);
        REQUIRE(s.lower_log <= s.upper_log + 1e-9);
        REQUIRE(s.alpha > 0.0);
        REQUIRE(s.alpha < 1.0);
        REQUIRE(s.K >= 1.0);
        REQUIRE(s.phi_eps >= eps);
        // brute-certified g: decreasing eps shrinks the feasible set
        REQUIRE(s.lower_log <= prev_lower + 1e-12);
        prev_lower = s.lower_log;

        // the lower witness is re-verifiable independently
        REQUIRE(m_of(E, s.witness_lower).logM <= std::log(eps) + 1e-12);
    }
    REQUIRE(rows >= 3);

    // determinism: a fresh context and the same seed give identical rows
    SandwichContext ctx2 = make_sandwich_context(E, 0.5, 1e-4, budget, 42);
    const double eps = ctx.phi.eps0 * 0.3;
    const StabilitySandwich a = sandwich_at(E, ctx, eps, p);
    const StabilitySandwich b = sandwich_at(E, ctx2, eps, p);
    REQUIRE(sandwich_json(a).dump() == sandwich_json(b).dump());
}

TEST_CASE("the interpolation chain certifies the upper bound") {
    const CandidateSet E = seeded_set(314, 8, 0.6);
    const SearchBudget budget;
    SandwichContext ctx = make_sandwich_context(E, 0.5, 1e-3, budget, 5);
    const double eps = ctx.phi.eps0 * 0.4;

    for (const PNorm& p : {PNorm::infinity(), PNorm::finite(2.0)}) {
        const StabilitySandwich s = sandwich_at(E, ctx, eps, p);

        // f = B(W, .) with W the lower witness: ||f||_p <= 1 and |f| <= eps on E
        const ZeroTuple& W = s.witness_lower;
        const ZeroTuple& Z = s.witness_upper;
        REQUIRE(!Z.empty());
        const double mu = mu_of(E, Z);
        const double supfull = std::exp(sup_on_circle(WeightFunction::unit(), Z, s.R).log_sup.value);
        double maxdel = 0.0;
        for (std::size_t k = 0; k < Z.size(); ++k) {
            ZeroTuple del;
            for (std::size_t j = 0; j < Z.size(); ++j) {
                if (j != k) del.push_back(Z[j]);
            }
            maxdel = std::max(maxdel,
                              std::exp(sup_on_circle(WeightFunction::unit(), del, s.R).log_sup.value));
        }
        const double K1 = 4.0 / (1.0 - s.R * s.R);
        const double chain = K1 * (eps * mu * maxdel + supfull);

        const InterpScheme scheme(Z, p);
        SampleVector samples;
        for (const DiskPoint& zk : Z) samples.push_back(blaschke_eval(W, zk.value()));
        for (int i = 0; i < 40; ++i) {
            const double t = kTwoPi * i / 40.0;
            const DiskPoint z{s.R * std::cos(t), s.R * std::sin(t)};
            const Complex fz = blaschke_eval(W, z.value());

            // Theorem-level residual inequality
            const auto rep = reconstruct(scheme, samples, z, 1.0);
            REQUIRE(std::abs(fz - rep.estimate) <= rep.error_bound + 1e-9);

            // coefficient-sum inequality behind the K derivation
            double csum = 0.0;
            for (const Complex& c : rep.coefficients) csum += std::abs(c);
            REQUIRE(csum <= K1 * mu * maxdel * (1.0 + 1e-9));

            // assembled chain, and the certified bound reported by the row
            REQUIRE(std::abs(fz) <= chain + 1e-9);
            REQUIRE(std::abs(fz) <= std::exp(s.upper_certified_log) + 1e-9);
        }
        REQUIRE(std::exp(s.upper_certified_log) <= chain * (1.0 + 1e-9));

        // adversarial feasible functions: multiplying the witness product by
        // further unimodular-boundary factors keeps ||f||_p <= 1 and
        // |f| <= eps on E, so the certified bound must still dominate
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> unif(-0.6, 0.6);
        for (int variant = 0; variant < 5; ++variant) {
            const DiskPoint a{unif(rng), unif(rng)};
            const auto adversary = [&](Complex zc) {
                return blaschke_eval(W, zc) * (zc - a.value()) /
                       (1.0 - std::conj(a.value()) * zc);
            };
            for (int i = 0; i < 16; ++i) {
                const double t = kTwoPi * i / 16.0;
                const Complex zc{s.R * std::cos(t), s.R * std::sin(t)};
                REQUIRE(std::abs(adversary(zc)) <= std::exp(s.upper_certified_log) + 1e-9);
            }
        }
    }
}

TEST_CASE("coefficient prefactor bound behind K") {
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int it = 0; it < 2000; ++it) {
        const double R = 0.05 + 0.9 * unif(rng);
        const double rz = R * unif(rng);
        const double tz = kTwoPi * unif(rng);
        const DiskPoint z{rz * std::cos(tz), rz * std::sin(tz)};
        const double rk = 0.999 * unif(rng);
        const double tk = kTwoPi * unif(rng);
        const DiskPoint zk{rk * std::cos(tk), rk * std::sin(tk)};
        const double e = -1.0 + 2.0 * unif(rng);  // covers (2-p)/p for p in [1, inf]
        const Complex zc = z.value(), zkc = zk.value();
        const Complex first = (1.0 - std::norm(zkc)) / (1.0 - std::conj(zkc) * zc);
        const Complex base = (1.0 - std::conj(zc) * zkc) / (1.0 - std::norm(zc));
        const double pref = std::abs(first) * std::pow(std::abs(base), e);
        REQUIRE(pref <= 4.0 / (1.0 - R * R) + 1e-9);
    }
}

TEST_CASE("one_point with the origin in E") {
    const CandidateSet E({{0.0, 0.0}, {0.5, 0.0}, {0.3, 0.2}}, WeightFunction::unit(), "");
    const StabilitySandwich s = one_point(E, 0.07, PNorm::infinity(), SearchBudget{}, 1);
    REQUIRE(s.lower_log == Catch::Approx(std::log(0.07)).margin(1e-14));
    REQUIRE(s.upper_log == Catch::Approx(std::log(0.07)).margin(1e-14));
    REQUIRE(s.upper_certified_log == Catch::Approx(std::log(0.07)).margin(1e-14));
    REQUIRE(s.method == "origin-in-E");
}

TEST_CASE("one_point g component matches the enumeration example") {
    // E = {0.5}: the only feasible nonempty tuple is {0.5} and |B(0)| = 0.5
    const CandidateSet E({{0.5, 0.0}}, WeightFunction::unit(), "");
    const GEstimate g = g_estimate(E, 0.4, 0.0, SearchBudget{}, 1);
    REQUIRE(g.exact);
    REQUIRE(g.witness.size() == 1);
    REQUIRE(g.log_g == Catch::Approx(std::log(0.5)).margin(1e-14));

    // eps >= 1: the empty tuple is feasible; the value at the origin is |q(0)| = 1
    const GEstimate g1 = g_estimate(E, 1.2, 0.0, SearchBudget{}, 1);
    REQUIRE(g1.witness.empty());
    REQUIRE(g1.log_g == 0.0);
}

TEST_CASE("one_point full sandwich away from the origin") {
    std::vector<DiskPoint> pts;
    for (int j = 0; j < 8; ++j) pts.emplace_back(0.3 + 0.07 * j, 0.0);
    const CandidateSet E(std::move(pts), WeightFunction::unit(), "ray");
    SandwichContext probe = make_sandwich_context(E, 0.0, 1e-6, SearchBudget{}, 2);
    const double eps = probe.phi.eps0 * 0.3;
    const StabilitySandwich s = one_point(E, eps, PNorm::finite(2.0), SearchBudget{}, 2);
    REQUIRE(s.R == 0.0);
    REQUIRE(s.lower_log <= s.upper_certified_log + 1e-9);
    REQUIRE(s.lower_log <= s.upper_log + 1e-9);
    double r_min = 1.0;
    for (const DiskPoint& z : E.points) r_min = std::min(r_min, z.abs());
    REQUIRE(s.alpha == Catch::Approx(alpha_star(r_min)));
    REQUIRE(s.K == Catch::Approx(2.0 / r_min));
}

TEST_CASE("weighted sandwich on a small Stolz fan") {
    const StolzSpec spec{BoundaryPoint(0.0), 2.0, 8};
    const CandidateSet E = gen_stolz({&spec, 1});
    REQUIRE(!E.weight.is_unit());
    const SearchBudget budget;
    SandwichContext ctx = make_sandwich_context(E, 0.5, 1e-6, budget, 13);
    const PNorm p1 = PNorm::finite(1.0);
    int rows = 0;
    for (double eps = ctx.phi.eps0 * 0.8; eps > ctx.phi.eps0 * 0.05; eps *= 0.5) {
        StabilitySandwich s;
        try {
            s = sandwich_at(E, ctx, eps, p1);
        } catch (const SupportError&) {
            break;
        }
        ++rows;
        REQUIRE(s.lower_log <= s.upper_certified_log + 1e-9);
        REQUIRE(s.lower_log <= s.upper_log + 1e-9);
        // the weight enters the feasibility side: re-verify the witness
        REQUIRE(m_of(E, s.witness_lower).logM <= std::log(eps) + 1e-12);
        REQUIRE(s.q.norm_const() == Catch::Approx(E.weight.norm_const()));
    }
    REQUIRE(rows >= 3);
}

TEST_CASE("single-shot sandwich wrapper agrees with the context form") {
    const CandidateSet E = seeded_set(7, 8, 0.5);
    const SearchBudget budget;
    SandwichContext probe = make_sandwich_context(E, 0.4, 1e-4, budget, 3);
    const double eps = probe.phi.eps0 * 0.35;
    const StabilitySandwich one = sandwich(E, eps, 0.4, PNorm::infinity(), budget, 3);
    const StabilitySandwich two = sandwich_at(E, probe, eps, PNorm::infinity());
    REQUIRE(one.lower_log == Catch::Approx(two.lower_log).margin(1e-12));
    REQUIRE(one.upper_certified_log == Catch::Approx(two.upper_certified_log).margin(1e-12));
    REQUIRE(one.lower_log <= one.upper_certified_log + 1e-9);
}

TEST_CASE("corollary_power_decay recovers an exact power law") {
    std::vector<FeketeRecord> records;
    for (int i = 0; i < 24; ++i) {
        FeketeRecord rec;
        rec.n = i + 1;
        rec.logM = -2.0 * std::log(i + 1.0);
        records.push_back(rec);
    }
    const PowerDecayFit fit = corollary_power_decay(records, 0.01, 0.5);
    REQUIRE(fit.sigma_fit == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(fit.bound_exponent == Catch::Approx(2.0 / 3.0).margin(1e-9));

    records.resize(3);
    REQUIRE_THROWS_AS(corollary_power_decay(records, 0.01, 0.5), std::invalid_argument);
}

TEST_CASE("harmonic_omega hand values") {
    const std::pair<double, double> full[] = {{0.0, kTwoPi}};
    const std::pair<double, double> half[] = {{-kPi / 2.0, kPi / 2.0}};
    const std::pair<double, double> quarter[] = {{0.0, kPi / 2.0}};
    const ArcSet full_set = ArcSet::from_intervals(full);
    const ArcSet half_set = ArcSet::from_intervals(half);
    const ArcSet quarter_set = ArcSet::from_intervals(quarter);

    REQUIRE(harmonic_omega(full_set, {0.3, 0.2}) == 1.0);
    REQUIRE(harmonic_omega(half_set, {0.0, 0.0}) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(harmonic_omega(quarter_set, {0.0, 0.0}) == Catch::Approx(0.25).margin(1e-12));

    // strict interior values
    REQUIRE(harmonic_omega(half_set, {0.6, 0.1}) > 0.0);
    REQUIRE(harmonic_omega(half_set, {0.6, 0.1}) < 1.0);

    // frozen value at z = -1/2 for the half circle: 2 atan(3/4) / (2 pi)
    REQUIRE(harmonic_omega(half_set, {-0.5, 0.0}) ==
            Catch::Approx(2.0 * std::atan(0.75) / kTwoPi).margin(1e-13));
}

TEST_CASE("harmonic_omega matches Poisson quadrature") {
    const std::pair<double, double> arcs[] = {{0.7, 2.9}};
    const ArcSet set = ArcSet::from_intervals(arcs);
    const DiskPoint z{0.3, 0.2};
    // Simpson quadrature of the Poisson kernel over the arc
    const double r2 = z.re * z.re + z.im * z.im;
    const double phi = std::atan2(z.im, z.re);
    const auto kernel = [&](double t) {
        return (1.0 - r2) / (1.0 - 2.0 * std::sqrt(r2) * std::cos(t - phi) + r2) / kTwoPi;
    };
    const int n = 200000;
    double acc = kernel(0.7) + kernel(2.9);
    for (int i = 1; i < n; ++i) {
        acc += kernel(0.7 + (2.9 - 0.7) * i / n) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    const double quad = acc * (2.9 - 0.7) / (3.0 * n);
    REQUIRE(harmonic_omega(set, z) == Catch::Approx(quad).margin(1e-10));
}

TEST_CASE("harmonic_omega additivity and validation") {
    const std::pair<double, double> ab[] = {{0.0, 1.0}, {2.0, 2.5}};
    const std::pair<double, double> a[] = {{0.0, 1.0}};
    const std::pair<double, double> b[] = {{2.0, 2.5}};
    const ArcSet sab = ArcSet::from_intervals(ab);
    const ArcSet sa = ArcSet::from_intervals(a);
    const ArcSet sb = ArcSet::from_intervals(b);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(-0.6, 0.6);
    for (int it = 0; it < 25; ++it) {
        const DiskPoint z{unif(rng), unif(rng)};
        REQUIRE(harmonic_omega(sab, z) ==
                Catch::Approx(harmonic_omega(sa, z) + harmonic_omega(sb, z)).margin(1e-10));
    }

    const std::pair<double, double> overlapping[] = {{0.0, 1.0}, {0.5, 2.0}};
    REQUIRE_THROWS_AS(ArcSet::from_intervals(overlapping), std::invalid_argument);
    REQUIRE_THROWS_AS(ArcSet::from_intervals({}), std::invalid_argument);
    const std::pair<double, double> degenerate[] = {{1.0, 1.0}};
    REQUIRE_THROWS_AS(ArcSet::from_intervals(degenerate), std::invalid_argument);
}

TEST_CASE("positive_measure_bound formulas and monotonicity") {
    const std::pair<double, double> full[] = {{0.0, kTwoPi}};
    const std::pair<double, double> half[] = {{-kPi / 2.0, kPi / 2.0}};
    const ArcSet full_set = ArcSet::from_intervals(full);
    const ArcSet half_set = ArcSet::from_intervals(half);
    const PNorm p2 = PNorm::finite(2.0);

    // full circle: omega == 1, upper = 2^{1/p} (1-R^2)^{-1/p} eps
    const MeasureBound fb = positive_measure_bound(full_set, 0.1, 0.5, p2);
    REQUIRE(fb.omega_min == 1.0);
    REQUIRE(fb.lower == 0.1);
    REQUIRE(fb.upper == Catch::Approx(std::sqrt(2.0 / 0.75) * 0.1).margin(1e-12));

    // half circle at R = 0: upper = 2^{1/p} eps^{1/2}
    const MeasureBound hb0 = positive_measure_bound(half_set, 0.09, 0.0, p2);
    REQUIRE(hb0.omega_min == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(hb0.upper == Catch::Approx(std::sqrt(2.0) * 0.3).margin(1e-10));

    // half circle at R = 0.5: the minimum sits at z = -1/2 (frozen closed form)
    const MeasureBound hb = positive_measure_bound(half_set, 0.1, 0.5, p2);
    REQUIRE(hb.omega_min == Catch::Approx(2.0 * std::atan(0.75) / kTwoPi).margin(1e-9));
    // dense-scan oracle over the circle
    double omega_scan = 1.0;
    for (int i = 0; i < 100000; ++i) {
        const double t = kTwoPi * i / 100000.0;
        omega_scan = std::min(omega_scan,
                               harmonic_omega(half_set, {0.5 * std::cos(t), 0.5 * std::sin(t)}));
    }
    REQUIRE(hb.omega_min == Catch::Approx(omega_scan).margin(1e-9));
    REQUIRE(hb.omega_min <= omega_scan + 1e-12);

    // monotone in R and in eps
    double prev = 0.0;
    for (double R : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        const double upper = positive_measure_bound(half_set, 0.1, R, p2).upper;
        REQUIRE(upper >= prev - 1e-12);
        prev = upper;
    }
    prev = 0.0;
    for (double eps : {0.01, 0.05, 0.1, 0.3, 0.7}) {
        const double upper = positive_measure_bound(half_set, eps, 0.5, p2).upper;
        REQUIRE(upper >= prev - 1e-12);
        prev = upper;
    }

    REQUIRE_THROWS_AS(positive_measure_bound(half_set, 1.5, 0.5, p2), std::invalid_argument);

    // p = inf: both prefactors collapse to 1
    const MeasureBound binf = positive_measure_bound(half_set, 0.09, 0.0, PNorm::infinity());
    REQUIRE(binf.upper == Catch::Approx(0.3).margin(1e-12));
}
