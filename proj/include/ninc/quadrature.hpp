#pragma once

#include <vector>

namespace ninc {

/// n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree
/// 2n - 1. Nodes ascending.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n);

    /// Integrates f over [lo, hi]; summation runs in node order.
    template <class F>
    double integrate(F&& f, double lo, double hi) const {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

}  // namespace ninc
