#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hardy/bounds.hpp"
#include "hardy/detail/numeric.hpp"
#include "hardy/eta.hpp"
#include "hardy/potential.hpp"

namespace hardy {

/// JSON scalar for a double: a number when finite, else the string form
/// ("inf", "-inf", "nan") so files stay parseable and deterministic.
[[nodiscard]] inline nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    return detail::format17(x);
}

[[nodiscard]] inline nlohmann::json record_json(const FeketeRecord& rec) {
    nlohmann::json points = nlohmann::json::array();
    for (const DiskPoint& z : rec.tuple) points.push_back({z.re, z.im});
    return nlohmann::json{{"n", rec.n},
                          {"points", points},
                          {"logV", json_number(rec.logV)},
                          {"mu", json_number(rec.mu)},
                          {"logM", json_number(rec.logM)},
                          {"method", to_string(rec.method)}};
}

[[nodiscard]] inline std::string records_csv_header() {
    return "n,logV,mu,logM,method,points";
}

[[nodiscard]] inline std::string record_csv_row(const FeketeRecord& rec) {
    std::ostringstream row;
    row << rec.n << ',' << detail::format17(rec.logV) << ',' << detail::format17(rec.mu) << ','
        << detail::format17(rec.logM) << ',' << to_string(rec.method) << ',';
    for (std::size_t i = 0; i < rec.tuple.size(); ++i) {
        if (i) row << ';';
        row << detail::format17(rec.tuple[i].re) << ' ' << detail::format17(rec.tuple[i].im);
    }
    return row.str();
}

[[nodiscard]] inline nlohmann::json weight_json(const WeightFunction& q) {
    nlohmann::json vertices = nlohmann::json::array();
    for (const BoundaryPoint& v : q.vertices()) vertices.push_back(v.theta);
    return nlohmann::json{{"kind", q.is_unit() ? "unit" : "boundary_poly"},
                          {"vertices", vertices},
                          {"norm_const", q.norm_const()}};
}

[[nodiscard]] inline nlohmann::json tuple_json(const ZeroTuple& tuple) {
    nlohmann::json out = nlohmann::json::array();
    for (const DiskPoint& z : tuple) out.push_back({z.re, z.im});
    return out;
}

[[nodiscard]] inline nlohmann::json sandwich_json(const StabilitySandwich& s) {
    return nlohmann::json{{"p", s.p.is_inf() ? nlohmann::json("inf") : nlohmann::json(s.p.value())},
                          {"eps", s.eps},
                          {"R", s.R},
                          {"alpha", s.alpha},
                          {"K", s.K},
                          {"q", weight_json(s.q)},
                          {"lower_log", json_number(s.lower_log)},
                          {"upper_log", json_number(s.upper_log)},
                          {"upper_certified_log", json_number(s.upper_certified_log)},
                          {"phi_eps", s.phi_eps},
                          {"witness_lower", tuple_json(s.witness_lower)},
                          {"witness_upper", tuple_json(s.witness_upper)},
                          {"method", s.method},
                          {"seed", s.seed}};
}

[[nodiscard]] inline std::string sandwich_csv_header() {
    return "p,eps,R,alpha,K,lower_log,upper_log,upper_certified_log,phi_eps,method,seed,status";
}

[[nodiscard]] inline std::string sandwich_csv_row(const StabilitySandwich& s,
                                                  const std::string& status = "ok") {
    std::ostringstream row;
    row << s.p.str() << ',' << detail::format17(s.eps) << ',' << detail::format17(s.R) << ','
        << detail::format17(s.alpha) << ',' << detail::format17(s.K) << ','
        << detail::format17(s.lower_log) << ',' << detail::format17(s.upper_log) << ','
        << detail::format17(s.upper_certified_log) << ',' << detail::format17(s.phi_eps) << ','
        << s.method << ',' << s.seed << ',' << status;
    return row.str();
}

[[nodiscard]] inline std::string eta_csv_header() {
    return "k,start,end,size,mass,min_log_eta,max_log_eta,min_log_ratio,max_log_ratio";
}

[[nodiscard]] inline std::string eta_csv_row(const EtaBlock& b) {
    std::ostringstream row;
    row << b.k << ',' << b.start + 1 << ',' << b.end + 1 << ',' << b.size() << ','
        << detail::format17(b.mass) << ',' << detail::format17(b.min_log_eta) << ','
        << detail::format17(b.max_log_eta) << ',' << detail::format17(b.min_log_ratio) << ','
        << detail::format17(b.max_log_ratio);
    return row.str();
}

}  // namespace hardy
