#pragma once

#include <cstddef>
#include <vector>

namespace rtba {

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule. Rules are computed once and cached.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Integrates f over [a, b] with the n-point rule.
template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t n = 64) {
    const auto& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * sum;
}

}  // namespace rtba
