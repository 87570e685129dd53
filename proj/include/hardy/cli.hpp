#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardy/analytic_corpus.hpp"
#include "hardy/bounds.hpp"
#include "hardy/eta.hpp"
#include "hardy/harmonic.hpp"
#include "hardy/scenarios.hpp"
#include "hardy/serialize.hpp"
#include "hardy/version.hpp"

namespace hardy::cli {

struct ScenarioOptions {
    std::string scenario;
    double r = 0.25;
    double mesh = 0.05;
    std::vector<double> vertices;
    double sigma = 1.0;
    int count = 16;
    std::string rule = "harmonic";
    double angle = 0.0;
    std::vector<double> radii;
    std::string in_path;
    std::string weight = "default";
};

inline void add_scenario_flags(CLI::App* cmd, ScenarioOptions& s) {
    cmd->add_option("--scenario", s.scenario, "compact|stolz|radial|file")->required();
    cmd->add_option("--r", s.r, "compact: radius cap of the lattice (default 0.25)");
    cmd->add_option("--mesh", s.mesh, "compact: lattice spacing (default 0.05)");
    cmd->add_option("--vertex", s.vertices, "stolz: vertex angle in radians (repeatable)");
    cmd->add_option("--sigma", s.sigma, "stolz: cone opening sigma >= 1 (default 1)");
    cmd->add_option("--count", s.count, "stolz/radial: radii per ray (default 16)");
    cmd->add_option("--rule", s.rule, "radial: harmonic|custom (default harmonic)");
    cmd->add_option("--angle", s.angle, "radial: ray angle in radians (default 0)");
    cmd->add_option("--radius", s.radii, "radial custom: radius, repeatable, increasing");
    cmd->add_option("--in", s.in_path, "file: point-set JSON to load");
    cmd->add_option("--weight", s.weight, "unit|auto (default: auto for stolz, unit otherwise)");
}

[[nodiscard]] inline CandidateSet build_scenario(const ScenarioOptions& s) {
    if (s.scenario == "compact") {
        return gen_compact_grid(s.r, s.mesh);
    }
    if (s.scenario == "stolz") {
        std::vector<double> vertices = s.vertices.empty() ? std::vector<double>{0.0} : s.vertices;
        std::vector<StolzSpec> specs;
        for (double v : vertices) specs.push_back({BoundaryPoint(v), s.sigma, s.count});
        return gen_stolz(specs, s.weight == "unit");
    }
    if (s.scenario == "radial") {
        const RadialRule rule = s.rule == "custom" ? RadialRule::Custom : RadialRule::Harmonic;
        return gen_radial(rule, s.count, s.angle, s.radii);
    }
    if (s.scenario == "file") {
        if (s.in_path.empty()) throw std::invalid_argument("file scenario needs --in");
        return load_points(s.in_path);
    }
    throw std::invalid_argument("unknown scenario: " + s.scenario);
}

[[nodiscard]] inline nlohmann::json scenario_json(const ScenarioOptions& s) {
    return nlohmann::json{{"scenario", s.scenario}, {"r", s.r},         {"mesh", s.mesh},
                          {"vertices", s.vertices}, {"sigma", s.sigma}, {"count", s.count},
                          {"rule", s.rule},         {"angle", s.angle}, {"radii", s.radii},
                          {"in", s.in_path},        {"weight", s.weight}};
}

struct OutputDoc {
    nlohmann::json config;
    std::string csv_header;
    std::vector<std::string> csv_rows;
    std::string json_key = "rows";
    nlohmann::json json_rows = nlohmann::json::array();
    nlohmann::json meta;  // optional extras merged into the JSON document
};

/// Every output embeds the resolved config and the library version; a rerun
/// with the same config is byte-identical.
inline void emit(const OutputDoc& doc, const std::string& out_base, std::ostream& fallback) {
    std::ostringstream csv;
    csv << "# hardy " << kVersion << "\n";
    csv << "# config " << doc.config.dump() << "\n";
    csv << doc.csv_header << "\n";
    for (const std::string& row : doc.csv_rows) csv << row << "\n";
    if (out_base.empty()) {
        fallback << csv.str();
        return;
    }
    {
        std::ofstream f(out_base + ".csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + out_base + ".csv");
        f << csv.str();
    }
    nlohmann::json j{{"version", kVersion}, {"config", doc.config}};
    if (!doc.meta.is_null()) {
        for (auto it = doc.meta.begin(); it != doc.meta.end(); ++it) j[it.key()] = it.value();
    }
    j[doc.json_key] = doc.json_rows;
    std::ofstream f(out_base + ".json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + out_base + ".json");
    f << j.dump(2) << "\n";
}

/// Deterministic full-disk evaluation grid (golden-angle spiral, radius cap
/// 0.95), used by interp-check.
[[nodiscard]] inline std::vector<DiskPoint> spiral_grid(int n) {
    std::vector<DiskPoint> grid;
    grid.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double rr = 0.95 * std::sqrt((k + 0.5) / n);
        const double th = 2.39996322972865332 * k;
        grid.emplace_back(rr * std::cos(th), rr * std::sin(th));
    }
    return grid;
}

namespace detail_cli {

struct ScanArgs {
    ScenarioOptions scenario;
    int nmax = 8;
    std::string mode = "heuristic";
    std::uint64_t seed = 1;
    std::uint64_t budget = 100000;
    std::string out;
};

inline int run_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
    const CandidateSet E = build_scenario(a.scenario);
    if (a.nmax < 1 || static_cast<std::size_t>(a.nmax) > E.size()) {
        throw std::invalid_argument("scan: --nmax must be in [1, |E|]");
    }
    std::vector<FeketeRecord> records;
    for (int n = 1; n <= a.nmax; ++n) {
        bool exact = a.mode == "exact";
        if (exact && detail::binomial_capped(E.size(), n, a.budget) > a.budget) {
            err << "# scan: C(|E|, " << n << ") exceeds budget " << a.budget
                << ", downgrading to heuristic\n";
            exact = false;
        }
        FeketeRecord rec = exact ? fekete_brute(E, n, a.budget)
                                 : fekete_exchange(E, fekete_greedy(E, n));
        if (rec.method == FeketeMethod::BruteForce && rec.logM > rec.logV / n + 1e-9) {
            throw InvariantError("scan: M_n <= V_n^{1/n} violated at n = " + std::to_string(n));
        }
        records.push_back(std::move(rec));
    }
    if (records.size() >= 8) {
        // Tail power-law fit: a diagnostic, never an exit condition.
        const PowerDecayFit fit = corollary_power_decay(records, 0.0, 0.0);
        err << "# fit: sigma=" << fit.sigma_fit << " phi_exponent=" << fit.bound_exponent << "\n";
    }
    // Cross-row inequalities hold for exact rows by construction; violations
    // are assertion-grade failures.
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        if (records[i].method != FeketeMethod::BruteForce ||
            records[i + 1].method != FeketeMethod::BruteForce) {
            continue;
        }
        const int n = records[i].n;
        if (records[i + 1].mu * std::exp(records[i].logM) > n + 1 + 1e-9) {
            throw InvariantError("scan: mu_{n+1} M_n <= n+1 violated at n = " + std::to_string(n));
        }
        if (records[i + 1].logV < records[i].logV + records[i].logM - 1e-9) {
            throw InvariantError("scan: V_{n+1} >= V_n M_n violated at n = " + std::to_string(n));
        }
    }
    OutputDoc doc;
    doc.config = {{"command", "scan"},   {"scenario", scenario_json(a.scenario)},
                  {"nmax", a.nmax},      {"mode", a.mode},
                  {"seed", a.seed},      {"budget", a.budget},
                  {"version", kVersion}, {"label", E.label}};
    doc.csv_header = records_csv_header();
    doc.json_key = "records";
    for (const FeketeRecord& rec : records) {
        doc.csv_rows.push_back(record_csv_row(rec));
        doc.json_rows.push_back(record_json(rec));
    }
    emit(doc, a.out, out);
    return 0;
}

struct SandwichArgs {
    ScenarioOptions scenario;
    std::vector<double> eps;
    double R = 0.5;
    std::string p = "inf";
    int nmax = 64;
    std::uint64_t seed = 1;
    std::uint64_t budget = 100000;
    std::string out;
};

inline int run_sandwich(const SandwichArgs& a, std::ostream& out, std::ostream& err) {
    const CandidateSet E = build_scenario(a.scenario);
    const PNorm p = PNorm::parse(a.p);
    if (a.eps.empty()) throw std::invalid_argument("sandwich: needs at least one --eps");
    for (double eps : a.eps) {
        if (!(eps > 0.0)) throw std::invalid_argument("sandwich: --eps must be positive");
    }
    if (!(a.R > 0.0 && a.R < 1.0)) throw std::invalid_argument("sandwich: --R must be in (0,1)");
    const double min_eps = *std::min_element(a.eps.begin(), a.eps.end());
    SearchBudget budget{a.budget};
    SandwichContext ctx = make_sandwich_context(E, a.R, min_eps, budget, a.seed, a.nmax);

    OutputDoc doc;
    doc.config = {{"command", "sandwich"}, {"scenario", scenario_json(a.scenario)},
                  {"eps", a.eps},          {"R", a.R},
                  {"p", a.p},              {"nmax", a.nmax},
                  {"seed", a.seed},        {"budget", a.budget},
                  {"version", kVersion},   {"label", E.label}};
    doc.csv_header = sandwich_csv_header();
    doc.meta = {{"eps0", ctx.phi.eps0}, {"scan_n", ctx.records.size()}};
    for (double eps : a.eps) {
        try {
            const StabilitySandwich s = sandwich_at(E, ctx, eps, p);
            doc.csv_rows.push_back(sandwich_csv_row(s));
            nlohmann::json row = sandwich_json(s);
            row["status"] = "ok";
            doc.json_rows.push_back(std::move(row));
        } catch (const SupportError& e) {
            err << "# sandwich: eps = " << eps << " outside support: " << e.what() << "\n";
            const double nan = std::numeric_limits<double>::quiet_NaN();
            std::ostringstream row;
            row << p.str() << ',' << hardy::detail::format17(eps) << ','
                << hardy::detail::format17(a.R) << ",nan,nan,nan,nan,nan,nan,,,"
                << "outside-support";
            doc.csv_rows.push_back(row.str());
            doc.json_rows.push_back({{"eps", eps},
                                     {"R", a.R},
                                     {"p", a.p},
                                     {"status", "outside-support"},
                                     {"lower_log", json_number(nan)}});
        }
    }
    emit(doc, a.out, out);
    return 0;
}

struct InterpArgs {
    ScenarioOptions scenario;
    std::string fn = "all";
    std::string p = "inf";
    int nodes = 8;
    int grid = 200;
    std::string out;
};

inline int run_interp_check(const InterpArgs& a, std::ostream& out, std::ostream&) {
    const CandidateSet E = build_scenario(a.scenario);
    const PNorm p = PNorm::parse(a.p);
    if (a.nodes < 1 || static_cast<std::size_t>(a.nodes) > E.size()) {
        throw std::invalid_argument("interp-check: --n must be in [1, |E|]");
    }
    ZeroTuple nodes(E.points.begin(), E.points.begin() + a.nodes);
    const InterpScheme scheme(std::move(nodes), p);
    const std::vector<DiskPoint> grid = spiral_grid(a.grid);

    std::vector<const AnalyticTestFunction*> fns;
    if (a.fn == "all") {
        for (const auto& f : analytic_corpus()) fns.push_back(&f);
    } else {
        fns.push_back(&corpus_function(a.fn));
    }

    OutputDoc doc;
    doc.config = {{"command", "interp-check"}, {"scenario", scenario_json(a.scenario)},
                  {"fn", a.fn},                {"p", a.p},
                  {"n", a.nodes},              {"grid", a.grid},
                  {"version", kVersion},       {"label", E.label}};
    doc.csv_header = "fn,p,n,grid,max_violation";
    doc.json_key = "checks";
    double worst = -std::numeric_limits<double>::infinity();
    for (const AnalyticTestFunction* f : fns) {
        SampleVector samples;
        samples.reserve(scheme.nodes.size());
        for (const DiskPoint& z : scheme.nodes) samples.push_back(f->fn(z.value()));
        std::vector<Complex> truth;
        truth.reserve(grid.size());
        for (const DiskPoint& z : grid) truth.push_back(f->fn(z.value()));
        const double violation = residual_check(scheme, samples, grid, truth, 1.0);
        worst = std::max(worst, violation);
        std::ostringstream row;
        row << f->id << ',' << p.str() << ',' << a.nodes << ',' << a.grid << ','
            << hardy::detail::format17(violation);
        doc.csv_rows.push_back(row.str());
        doc.json_rows.push_back({{"fn", f->id}, {"violation", json_number(violation)}});
    }
    doc.meta = {{"max_violation", json_number(worst)}};
    emit(doc, a.out, out);
    return worst <= 1e-9 ? 0 : 3;
}

struct EtaArgs {
    ScenarioOptions scenario;
    int kmax = 3;
    std::string fn = "half_sum";
    std::string out;
};

inline int run_eta(const EtaArgs& a, std::ostream& out, std::ostream&) {
    const CandidateSet E = build_scenario(a.scenario);
    if (a.kmax < 1) throw std::invalid_argument("eta: --kmax must be >= 1");
    std::function<Complex(Complex)> fn;
    if (a.fn != "none") fn = corpus_function(a.fn).fn;
    const EtaSequence seq = eta_sequence(E.points, a.kmax, fn);

    OutputDoc doc;
    doc.config = {{"command", "eta"},   {"scenario", scenario_json(a.scenario)},
                  {"kmax", a.kmax},     {"fn", a.fn},
                  {"version", kVersion}, {"label", E.label}};
    doc.csv_header = eta_csv_header();
    doc.json_key = "blocks";
    for (const EtaBlock& b : seq.blocks) {
        doc.csv_rows.push_back(eta_csv_row(b));
        doc.json_rows.push_back({{"k", b.k},
                                 {"start", b.start + 1},
                                 {"end", b.end + 1},
                                 {"size", b.size()},
                                 {"mass", b.mass},
                                 {"min_log_eta", json_number(b.min_log_eta)},
                                 {"max_log_eta", json_number(b.max_log_eta)},
                                 {"min_log_ratio", json_number(b.min_log_ratio)},
                                 {"max_log_ratio", json_number(b.max_log_ratio)}});
    }
    emit(doc, a.out, out);
    return 0;
}

struct HarmonicArgs {
    std::vector<std::string> arcs;
    double eps = 0.1;
    double R = 0.5;
    std::string p = "inf";
    std::string out;
};

inline int run_harmonic(const HarmonicArgs& a, std::ostream& out, std::ostream&) {
    if (a.arcs.empty()) throw std::invalid_argument("harmonic: needs at least one --arc a:b");
    std::vector<std::pair<double, double>> intervals;
    for (const std::string& s : a.arcs) {
        const auto sep = s.find(':');
        if (sep == std::string::npos) {
            throw std::invalid_argument("harmonic: --arc must be start:end, got " + s);
        }
        intervals.emplace_back(std::stod(s.substr(0, sep)), std::stod(s.substr(sep + 1)));
    }
    const ArcSet arcs = ArcSet::from_intervals(intervals);
    const PNorm p = PNorm::parse(a.p);
    const MeasureBound b = positive_measure_bound(arcs, a.eps, a.R, p);

    OutputDoc doc;
    doc.config = {{"command", "harmonic"}, {"arcs", a.arcs},      {"eps", a.eps},
                  {"R", a.R},              {"p", a.p},            {"version", kVersion}};
    doc.csv_header = "p,eps,R,omega_min,lower,upper";
    doc.json_key = "bounds";
    std::ostringstream row;
    row << p.str() << ',' << hardy::detail::format17(a.eps) << ','
        << hardy::detail::format17(a.R) << ',' << hardy::detail::format17(b.omega_min) << ','
        << hardy::detail::format17(b.lower) << ',' << hardy::detail::format17(b.upper);
    doc.csv_rows.push_back(row.str());
    doc.json_rows.push_back({{"p", a.p},
                             {"eps", a.eps},
                             {"R", a.R},
                             {"omega_min", b.omega_min},
                             {"lower", b.lower},
                             {"upper", b.upper},
                             {"argmin", {b.argmin.re, b.argmin.im}}});
    emit(doc, a.out, out);
    return 0;
}

struct GenArgs {
    ScenarioOptions scenario;
    std::string out;
};

inline int run_gen(const GenArgs& a, std::ostream&, std::ostream& err) {
    const CandidateSet E = build_scenario(a.scenario);
    save_points(E, a.out);
    err << "# gen: wrote " << E.size() << " points (mass "
        << non_blaschke_mass(E.points) << ") to " << a.out << "\n";
    return 0;
}

}  // namespace detail_cli

/// Command-line driver. Exit codes: 0 ok, 2 usage, 3 invariant violation,
/// 4 budget exceeded.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Blaschke-product interpolation and stability bounds on the unit disk"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    detail_cli::ScanArgs scan_args;
    CLI::App* scan = app.add_subcommand("scan", "Fekete-type sequence scan: V_n, mu_n, M_n");
    add_scenario_flags(scan, scan_args.scenario);
    scan->add_option("--nmax", scan_args.nmax, "largest tuple size")->required()
        ->check(CLI::PositiveNumber);
    scan->add_option("--mode", scan_args.mode, "exact|heuristic (default heuristic)")
        ->check(CLI::IsMember({"exact", "heuristic"}));
    scan->add_option("--seed", scan_args.seed, "search seed (default 1)");
    scan->add_option("--budget", scan_args.budget, "enumeration budget (default 1e5)");
    scan->add_option("--out", scan_args.out, "output base path (.csv/.json appended)");

    detail_cli::SandwichArgs sw_args;
    CLI::App* sw = app.add_subcommand("sandwich", "two-sided stability bounds per eps");
    add_scenario_flags(sw, sw_args.scenario);
    sw->add_option("--eps", sw_args.eps, "eps value (repeatable)")->required();
    sw->add_option("--R", sw_args.R, "ball radius R in (0,1)")->required();
    sw->add_option("--p", sw_args.p, "Hardy exponent p >= 1 or 'inf' (default inf)");
    sw->add_option("--nmax", sw_args.nmax, "scan size cap (default 64)");
    sw->add_option("--seed", sw_args.seed, "search seed (default 1)");
    sw->add_option("--budget", sw_args.budget, "enumeration budget (default 1e5)");
    sw->add_option("--out", sw_args.out, "output base path");

    detail_cli::InterpArgs in_args;
    CLI::App* ic = app.add_subcommand("interp-check", "verify the interpolation error bound");
    add_scenario_flags(ic, in_args.scenario);
    ic->add_option("--fn", in_args.fn, "test function id or 'all' (default all)");
    ic->add_option("--p", in_args.p, "Hardy exponent (default inf)");
    ic->add_option("--n", in_args.nodes, "node count (default 8)")->check(CLI::PositiveNumber);
    ic->add_option("--grid", in_args.grid, "evaluation grid size (default 200)")
        ->check(CLI::PositiveNumber);
    ic->add_option("--out", in_args.out, "output base path");

    detail_cli::EtaArgs eta_args;
    CLI::App* eta = app.add_subcommand("eta", "Danikas-Hayman eta sequence blocks");
    add_scenario_flags(eta, eta_args.scenario);
    eta->add_option("--kmax", eta_args.kmax, "number of blocks")->required()
        ->check(CLI::PositiveNumber);
    eta->add_option("--fn", eta_args.fn, "test function id or 'none' (default half_sum)");
    eta->add_option("--out", eta_args.out, "output base path");

    detail_cli::HarmonicArgs h_args;
    CLI::App* harm = app.add_subcommand("harmonic", "positive-measure harmonic bound");
    harm->add_option("--arc", h_args.arcs, "arc start:end in radians (repeatable)")->required();
    harm->add_option("--eps", h_args.eps, "eps in (0,1)")->required();
    harm->add_option("--R", h_args.R, "ball radius in [0,1)")->required();
    harm->add_option("--p", h_args.p, "Hardy exponent (default inf)");
    harm->add_option("--out", h_args.out, "output base path");

    detail_cli::GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a scenario point-set file");
    add_scenario_flags(gen, gen_args.scenario);
    gen->add_option("--out", gen_args.out, "point-set JSON path")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const BudgetError& e) {
        err << "error (budget): " << e.what() << "\n";
        return 4;
    } catch (const InvariantError& e) {
        err << "error (invariant): " << e.what() << "\n";
        return 3;
    } catch (const SupportError& e) {
        err << "error (support): " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error (usage): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (scan->parsed()) return detail_cli::run_scan(scan_args, out, err);
        if (sw->parsed()) return detail_cli::run_sandwich(sw_args, out, err);
        if (ic->parsed()) return detail_cli::run_interp_check(in_args, out, err);
        if (eta->parsed()) return detail_cli::run_eta(eta_args, out, err);
        if (harm->parsed()) return detail_cli::run_harmonic(h_args, out, err);
        if (gen->parsed()) return detail_cli::run_gen(gen_args, out, err);
    } catch (const BudgetError& e) {
        err << "error (budget): " << e.what() << "\n";
        return 4;
    } catch (const InvariantError& e) {
        err << "error (invariant): " << e.what() << "\n";
        return 3;
    } catch (const SupportError& e) {
        err << "error (support): " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error (usage): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace hardy::cli
