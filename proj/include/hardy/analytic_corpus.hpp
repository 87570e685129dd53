#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardy/disk.hpp"

namespace hardy {

/// Built-in analytic test functions. Every entry satisfies ||f||_p <= 1 for
/// all p in [1, inf]: finite Blaschke products and their scalar multiples
/// have unimodular boundary values, monomials have unit p-means, and
/// (1 + z)/2 has boundary modulus |cos(theta/2)| <= 1.
struct AnalyticTestFunction {
    std::string id;
    std::function<Complex(Complex)> fn;
};

[[nodiscard]] inline const std::vector<AnalyticTestFunction>& analytic_corpus() {
    static const std::vector<AnalyticTestFunction> corpus = [] {
        const auto mobius = [](Complex a) {
            return [a](Complex z) { return (z - a) / (1.0 - std::conj(a) * z); };
        };
        std::vector<AnalyticTestFunction> fns;
        fns.push_back({"one", [](Complex) { return Complex{1.0, 0.0}; }});
        fns.push_back({"half_sum", [](Complex z) { return (1.0 + z) / 2.0; }});
        fns.push_back({"monomial1", [](Complex z) { return z; }});
        fns.push_back({"monomial3", [](Complex z) { return z * z * z; }});
        fns.push_back({"mobius03", mobius(Complex{0.3, 0.0})});
        fns.push_back({"mobius_i", mobius(Complex{0.0, 0.5})});
        fns.push_back({"blaschke2", [mobius](Complex z) { return z * mobius(Complex{0.4, 0.0})(z); }});
        fns.push_back({"scaled_mobius", [mobius](Complex z) { return 0.8 * mobius(Complex{-0.2, 0.0})(z); }});
        return fns;
    }();
    return corpus;
}

[[nodiscard]] inline const AnalyticTestFunction& corpus_function(const std::string& id) {
    for (const AnalyticTestFunction& f : analytic_corpus()) {
        if (f.id == id) return f;
    }
    throw std::invalid_argument("unknown test function id: " + id);
}

}  // namespace hardy
