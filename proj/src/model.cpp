#include "ninc/model.hpp"

#include <cmath>
#include <string>

#include "ninc/errors.hpp"

namespace ninc {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Problem validate_problem(double sigma1, double sigma2, double p, double e_field,
                         double theta1, int dim) {
    if (!finite(sigma1) || !(sigma1 > 0.0)) throw DomainError("sigma1 must be positive");
    if (!finite(sigma2) || !(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
    if (!finite(p) || !(p > 1.0)) throw DomainError("p must exceed 1");
    if (!finite(e_field) || !(e_field > 0.0)) throw DomainError("e_field must be positive");
    if (!finite(theta1) || theta1 < 0.0 || theta1 > 1.0)
        throw DomainError("theta1 must lie in [0, 1]");
    if (dim != 2 && dim != 3)
        throw DomainError("dim must be 2 or 3, got " + std::to_string(dim));
    return Problem{sigma1, sigma2, p, e_field, theta1, dim};
}

Problem validate_problem(const Problem& raw) {
    return validate_problem(raw.sigma1, raw.sigma2, raw.p, raw.e_field, raw.theta1, raw.dim);
}

GeometryFactors geometry_factors(const Problem& prob) {
    if (prob.theta1 == 0.0)
        throw DegenerateGeometry("geometry factors are undefined at theta1 = 0");
    // (1 - theta1) is exact for theta1 >= 0.5, so A keeps its relative
    // precision as theta1 -> 1.
    const double a = prob.theta2() / prob.theta1;
    const double b = static_cast<double>(prob.dim - 1) / prob.theta1 + 1.0;
    return GeometryFactors{a, b};
}

std::string_view to_string(Branch b) noexcept {
    switch (b) {
        case Branch::GeneralRoot: return "GeneralRoot";
        case Branch::AllNonlinear: return "AllNonlinear";
        case Branch::AllLinear: return "AllLinear";
        case Branch::LinearClosedForm: return "LinearClosedForm";
    }
    return "Unknown";
}

}  // namespace ninc
