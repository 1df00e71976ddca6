#include "ninc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "ninc/errors.hpp"

namespace ninc {

namespace {

// (P_n(z), P_n'(z)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double z) {
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (z * p1 - p0) / (z * z - 1.0)};
}

}  // namespace

GaussLegendre::GaussLegendre(int n) {
    if (n < 1) throw DomainError("quadrature order must be at least 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [pn, dpn] = legendre(n, z);
            const double dz = pn / dpn;
            z -= dz;
            if (std::abs(dz) <= 1e-16) break;
        }
        const double dpn = legendre(n, z).second;
        const double w = 2.0 / ((1.0 - z * z) * dpn * dpn);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
}

}  // namespace ninc
