#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hardy/detail/numeric.hpp"
#include "hardy/errors.hpp"
#include "hardy/potential.hpp"

namespace hardy {

/// One Stolz cone |1 - conj(z) zeta| <= sigma (1 - |z|) to be discretized.
struct StolzSpec {
    BoundaryPoint vertex;
    double sigma = 1.0;  // >= 1
    int count = 0;       // radii per ray: rho_j = 1 - 1/(j+1), j = 0..count-1
};

/// Sum of (1 - |z_j|) over the set, compensated.
[[nodiscard]] inline double non_blaschke_mass(std::span<const DiskPoint> points) {
    detail::CompensatedSum mass;
    for (const DiskPoint& z : points) mass.add(1.0 - z.abs());
    return mass.value();
}

/// Square lattice of the given spacing intersected with |z| <= r, unit
/// weight, rows ordered by increasing imaginary part then real part.
[[nodiscard]] inline CandidateSet gen_compact_grid(double r, double mesh) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("gen_compact_grid: r must be in (0,1)");
    if (!(mesh > 0.0 && mesh < r)) {
        throw std::invalid_argument("gen_compact_grid: mesh must be in (0, r)");
    }
    const int k = static_cast<int>(std::floor(r / mesh));
    const std::size_t upper = (2 * static_cast<std::size_t>(k) + 1) * (2 * static_cast<std::size_t>(k) + 1);
    if (upper > 200000) throw std::invalid_argument("gen_compact_grid: mesh produces > 1e5 points");
    // Membership slack far below the mesh scale keeps decimal boundary
    // points (|z| == r up to one ulp) inside the lattice.
    const double cap = r + mesh * 1e-9;
    std::vector<DiskPoint> pts;
    for (int j = -k; j <= k; ++j) {
        for (int i = -k; i <= k; ++i) {
            const double re = i * mesh;
            const double im = j * mesh;
            if (std::hypot(re, im) <= cap) pts.emplace_back(re, im);
        }
    }
    if (pts.size() > 100000) throw std::invalid_argument("gen_compact_grid: > 1e5 points");
    std::ostringstream label;
    label << "compact_grid(r=" << r << ",mesh=" << mesh << ")";
    return CandidateSet(std::move(pts), WeightFunction::unit(), label.str());
}

namespace detail {

/// Half-opening of the cone cross-section at radius rho: the admissible
/// angular offsets delta satisfy |1 - rho e^{-i delta}| <= sigma (1 - rho).
[[nodiscard]] inline double stolz_delta_max(double rho, double sigma) {
    if (rho == 0.0) return 0.0;
    const double arg = (1.0 + rho * rho - sigma * sigma * (1.0 - rho) * (1.0 - rho)) / (2.0 * rho);
    if (arg >= 1.0) return 0.0;
    if (arg <= -1.0) return kPi;
    return std::acos(arg);
}

[[nodiscard]] inline bool in_stolz_cone(const DiskPoint& z, const BoundaryPoint& vertex,
                                        double sigma) {
    const double lhs = std::abs(1.0 - std::conj(z.value()) * vertex.value());
    return lhs <= sigma * (1.0 - z.abs());
}

}  // namespace detail

/// Discretizes each cone along radii 1 - 1/(j+1) (j = 0..count-1, so the
/// first point of each ray is the origin) with a fan of 2 ceil(sigma) + 1
/// angles across the admissible arc at each radius. Every emitted point is
/// re-verified against the cone inequality. The weight is the normalized
/// polynomial with roots at the vertices unless unit_weight is set.
[[nodiscard]] inline CandidateSet gen_stolz(std::span<const StolzSpec> specs,
                                            bool unit_weight = false) {
    if (specs.empty()) throw std::invalid_argument("gen_stolz: needs at least one spec");
    std::vector<DiskPoint> pts;
    for (const StolzSpec& spec : specs) {
        if (!(spec.sigma >= 1.0)) throw std::invalid_argument("gen_stolz: sigma must be >= 1");
        if (spec.count < 1) throw std::invalid_argument("gen_stolz: count must be >= 1");
        const int fan = 2 * static_cast<int>(std::ceil(spec.sigma)) + 1;
        for (int j = 0; j < spec.count; ++j) {
            const double rho = 1.0 - 1.0 / (j + 1.0);
            // Shrink the fan slightly inside the cone so the post-generation
            // check cannot trip on endpoint roundoff.
            const double dmax = detail::stolz_delta_max(rho, spec.sigma) * (1.0 - 1e-9);
            for (int a = 0; a < fan; ++a) {
                const double delta = fan == 1 ? 0.0
                                              : -dmax + 2.0 * dmax * a / (fan - 1);
                const double t = spec.vertex.theta + delta;
                const DiskPoint z{rho * std::cos(t), rho * std::sin(t)};
                if (!detail::in_stolz_cone(z, spec.vertex, spec.sigma)) {
                    throw InvariantError("gen_stolz: generated point violates the cone test");
                }
                if (std::find(pts.begin(), pts.end(), z) == pts.end()) pts.push_back(z);
            }
        }
    }
    WeightFunction weight = WeightFunction::unit();
    if (!unit_weight) {
        std::vector<BoundaryPoint> vertices;
        for (const StolzSpec& spec : specs) {
            const bool seen = std::any_of(vertices.begin(), vertices.end(), [&](const BoundaryPoint& v) {
                return v.theta == spec.vertex.theta;
            });
            if (!seen) vertices.push_back(spec.vertex);
        }
        weight = WeightFunction::boundary_poly(std::move(vertices));
    }
    std::ostringstream label;
    label << "stolz(" << specs.size() << " vertices)";
    return CandidateSet(std::move(pts), std::move(weight), label.str());
}

enum class RadialRule { Harmonic, Custom };

/// Points r_j e^{i angle} along one ray. The harmonic rule r_j = 1 - 1/(j+1)
/// (j = 1..count) has divergent mass sum 1/(j+1): the canonical non-Blaschke
/// truncation.
[[nodiscard]] inline CandidateSet gen_radial(RadialRule rule, int count, double angle,
                                             std::span<const double> custom_radii = {}) {
    std::vector<double> radii;
    if (rule == RadialRule::Harmonic) {
        if (count < 1) throw std::invalid_argument("gen_radial: count must be >= 1");
        radii.reserve(count);
        for (int j = 1; j <= count; ++j) radii.push_back(1.0 - 1.0 / (j + 1.0));
    } else {
        radii.assign(custom_radii.begin(), custom_radii.end());
        if (radii.empty()) throw std::invalid_argument("gen_radial: custom rule needs radii");
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (!(radii[i] >= 0.0 && radii[i] < 1.0)) {
                throw std::invalid_argument("gen_radial: radii must lie in [0, 1)");
            }
            if (i > 0 && !(radii[i] > radii[i - 1])) {
                throw std::invalid_argument("gen_radial: radii must be strictly increasing");
            }
        }
    }
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    std::vector<DiskPoint> pts;
    pts.reserve(radii.size());
    for (double r : radii) pts.emplace_back(r * c, r * s);
    std::ostringstream label;
    label << "radial(" << (rule == RadialRule::Harmonic ? "harmonic" : "custom") << ",count="
          << pts.size() << ")";
    return CandidateSet(std::move(pts), WeightFunction::unit(), label.str());
}

/// Lossless JSON persistence: coordinates are written as 17-significant-digit
/// decimal strings, so save -> load is bit-exact.
inline void save_points(const CandidateSet& E, const std::string& path) {
    nlohmann::json j;
    j["label"] = E.label;
    if (E.weight.is_unit()) {
        j["weight"] = {{"kind", "unit"}, {"vertices_theta", nlohmann::json::array()}};
    } else {
        nlohmann::json thetas = nlohmann::json::array();
        for (const BoundaryPoint& v : E.weight.vertices()) thetas.push_back(v.theta);
        j["weight"] = {{"kind", "boundary_poly"}, {"vertices_theta", thetas}};
    }
    nlohmann::json pts = nlohmann::json::array();
    for (const DiskPoint& z : E.points) {
        pts.push_back({{"re", detail::format17(z.re)}, {"im", detail::format17(z.im)}});
    }
    j["points"] = std::move(pts);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_points: cannot open " + path);
    out << j.dump(2) << "\n";
}

[[nodiscard]] inline CandidateSet load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_points: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvariantError("load_points: parse error in " + path + ": " + e.what());
    }
    CandidateSet E;
    E.label = j.value("label", "");
    if (!j.contains("points") || !j["points"].is_array()) {
        throw InvariantError("load_points: missing points array");
    }
    std::size_t index = 0;
    for (const auto& p : j["points"]) {
        const double re = std::stod(p.at("re").get<std::string>());
        const double im = std::stod(p.at("im").get<std::string>());
        if (!(re * re + im * im < 1.0)) {
            throw InvariantError("load_points: point at index " + std::to_string(index) +
                                 " has |z| >= 1");
        }
        E.points.emplace_back(re, im);
        ++index;
    }
    if (j.contains("weight") && j["weight"].value("kind", "unit") == "boundary_poly") {
        std::vector<BoundaryPoint> vertices;
        for (const auto& t : j["weight"].at("vertices_theta")) {
            vertices.emplace_back(t.get<double>());
        }
        E.weight = WeightFunction::boundary_poly(std::move(vertices));
    }
    E.validate();  // duplicate detection with index-precise errors
    return E;
}

}  // namespace hardy
