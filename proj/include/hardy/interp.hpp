#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardy/disk.hpp"

namespace hardy {

/// Holder exponent p in [1, inf]. Infinity is a tagged state, not an IEEE
/// value, so exponents like (2 - p)/p take their limits exactly.
class PNorm {
  public:
    static PNorm finite(double p) {
        if (!(p >= 1.0) || std::isinf(p)) {
            throw std::invalid_argument("PNorm: p must be a finite value >= 1");
        }
        return PNorm(false, p);
    }
    static PNorm infinity() { return PNorm(true, 0.0); }

    static PNorm parse(const std::string& s) {
        if (s == "inf" || s == "Inf" || s == "INF") return infinity();
        return finite(std::stod(s));
    }

    [[nodiscard]] bool is_inf() const { return inf_; }
    [[nodiscard]] double value() const {
        if (inf_) throw std::logic_error("PNorm: finite value requested for p = inf");
        return p_;
    }
    /// (2 - p)/p, with the p -> inf limit -1.
    [[nodiscard]] double coeff_exponent() const { return inf_ ? -1.0 : (2.0 - p_) / p_; }
    /// 1/p, with the p -> inf limit 0.
    [[nodiscard]] double inv() const { return inf_ ? 0.0 : 1.0 / p_; }
    [[nodiscard]] std::string str() const {
        if (inf_) return "inf";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", p_);
        return buf;
    }

    friend bool operator==(const PNorm& a, const PNorm& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.p_ == b.p_);
    }

  private:
    PNorm(bool inf, double p) : inf_(inf), p_(p) {}
    bool inf_;
    double p_;
};

/// Nodes within this pseudo-distance count as coincident: schemes reject
/// them, and evaluation at such a point returns the exact interpolant.
inline constexpr double kNodeCoincidenceTol = 1e-12;

/// Interpolation nodes (pairwise distinct) plus the exponent p.
struct InterpScheme {
    ZeroTuple nodes;
    PNorm p;

    InterpScheme(ZeroTuple nodes_, PNorm p_) : nodes(std::move(nodes_)), p(p_) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            for (std::size_t k = j + 1; k < nodes.size(); ++k) {
                if (pseudo_distance(nodes[j], nodes[k]) < kNodeCoincidenceTol) {
                    throw InvariantError("InterpScheme: nodes " + std::to_string(j) + " and " +
                                         std::to_string(k) + " coincide");
                }
            }
        }
    }
};

using SampleVector = std::vector<Complex>;

struct ReconstructionReport {
    DiskPoint point;
    Complex estimate;
    double error_bound;
    std::vector<Complex> coefficients;
};

/// Coefficients c_{p,k}(Z_n, z)
///   = (1 - |z_k|^2)/(1 - conj(z_k) z)
///     * ((1 - conj(z) z_k)/(1 - |z|^2))^{(2-p)/p}
///     * B(Z_{n,k}, z) / B(Z_{n,k}, z_k).
/// The power uses the principal branch; its base has positive real part for
/// |z|, |z_k| < 1, so the branch is continuous on the whole domain. At a
/// node (within pseudo-distance 1e-12) the Kronecker vector is returned.
[[nodiscard]] inline std::vector<Complex> interp_coefficients(const InterpScheme& scheme,
                                                              const DiskPoint& z) {
    const std::size_t n = scheme.nodes.size();
    std::vector<Complex> c(n, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
        if (pseudo_distance(z, scheme.nodes[j]) < kNodeCoincidenceTol) {
            c[j] = 1.0;
            return c;
        }
    }
    const Complex zc = z.value();
    const double e = scheme.p.coeff_exponent();
    const double one_minus_z2 = 1.0 - std::norm(zc);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex zk = scheme.nodes[k].value();
        // Deleted-product ratio, accumulated as log-magnitude plus phase so
        // long node lists neither underflow nor overflow.
        double logmag = 0.0;
        double phase = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            const Complex zj = scheme.nodes[j].value();
            const Complex num = (zc - zj) / (1.0 - std::conj(zj) * zc);
            const Complex den = (zk - zj) / (1.0 - std::conj(zj) * zk);
            logmag += std::log(std::abs(num)) - std::log(std::abs(den));
            phase += std::arg(num) - std::arg(den);
        }
        const Complex ratio = std::polar(std::exp(logmag), phase);
        const Complex first = (1.0 - std::norm(zk)) / (1.0 - std::conj(zk) * zc);
        const Complex base = (1.0 - std::conj(zc) * zk) / one_minus_z2;
        c[k] = first * std::pow(base, e) * ratio;
    }
    return c;
}

/// Linear reconstruction sum c_k f(z_k) with the Theorem-grade error bound
/// norm_bound * (1 - |z|^2)^{-1/p} * |B(Z_n, z)|.
[[nodiscard]] inline ReconstructionReport reconstruct(const InterpScheme& scheme,
                                                      const SampleVector& samples,
                                                      const DiskPoint& z, double norm_bound) {
    if (samples.size() != scheme.nodes.size()) {
        throw std::invalid_argument("reconstruct: samples must align with nodes");
    }
    ReconstructionReport rep{z, Complex{0.0, 0.0}, 0.0, interp_coefficients(scheme, z)};
    for (std::size_t k = 0; k < samples.size(); ++k) rep.estimate += rep.coefficients[k] * samples[k];
    const double one_minus_z2 = 1.0 - std::norm(z.value());
    const double logB = blaschke_log_abs(scheme.nodes, z).value;
    rep.error_bound = norm_bound * std::pow(one_minus_z2, -scheme.p.inv()) * std::exp(logB);
    return rep;
}

/// Max over the grid of (|truth - estimate| - error_bound). For a genuine
/// H^p function with ||f||_p <= norm_bound this is <= 0 up to roundoff.
[[nodiscard]] inline double residual_check(const InterpScheme& scheme, const SampleVector& samples,
                                           std::span<const DiskPoint> grid,
                                           std::span<const Complex> truth, double norm_bound) {
    if (grid.size() != truth.size()) {
        throw std::invalid_argument("residual_check: grid and truth must align");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const ReconstructionReport rep = reconstruct(scheme, samples, grid[i], norm_bound);
        worst = std::max(worst, std::abs(truth[i] - rep.estimate) - rep.error_bound);
    }
    return worst;
}

}  // namespace hardy
