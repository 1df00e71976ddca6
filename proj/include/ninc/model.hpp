#pragma once

#include <optional>
#include <string_view>

namespace ninc {

/// Physical inputs of one coated inclusion: a p-Laplacian core (sigma1)
/// inside a linear coating (sigma2), loaded by a uniform field of magnitude
/// e_field. theta1 is the core volume fraction (area fraction when dim = 2).
///
/// Instances are only meant to be obtained through validate_problem().
struct Problem {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double p = 2.0;
    double e_field = 1.0;
    double theta1 = 0.5;
    int dim = 3;

    [[nodiscard]] double theta2() const noexcept { return 1.0 - theta1; }

    bool operator==(const Problem&) const = default;
};

/// Checks every bound on the inputs and throws DomainError naming the first
/// violated one. Nothing is normalized.
Problem validate_problem(double sigma1, double sigma2, double p, double e_field,
                         double theta1, int dim);
Problem validate_problem(const Problem& raw);

/// A = 1/theta1 - 1 and B = (d-1)/theta1 + 1. In 2D these are C and D.
struct GeometryFactors {
    double a_coef;
    double b_coef;
};

/// Throws DegenerateGeometry when theta1 = 0.
GeometryFactors geometry_factors(const Problem& prob);

/// Solution of the interface equation f(x) = 0.
///
/// x0 = b2 / r_e^d is the scale-free dipole strength. core_field is the
/// uniform core gradient E + A*x0 carried at full relative precision; it can
/// be far below ulp(E) when p is close to 1, where x0 itself sits within an
/// ulp of -E/A.
struct Root {
    double x0 = 0.0;
    double core_field = 0.0;
    double residual = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
};

/// Field coefficients of one concrete realization (r_c, r_e).
///   core:    u = a1 r cos(theta)
///   coating: u = (b2 / r^(d-1) + a2 r) cos(theta)
struct Coefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double b2 = 0.0;
    double r_c = 0.0;
    double r_e = 0.0;
};

enum class Branch {
    GeneralRoot,
    AllNonlinear,      // theta1 = 1
    AllLinear,         // theta1 = 0
    LinearClosedForm,  // p = 2
};

std::string_view to_string(Branch b) noexcept;

struct EffectiveResult {
    double sigma_star = 0.0;
    double x0 = 0.0;
    std::optional<double> hs_value;
    Branch branch = Branch::GeneralRoot;
};

/// Analytic partial derivatives of x0 and sigma* in p and theta1, next to
/// their central finite-difference estimates.
struct SensitivityReport {
    double dx0_dp = 0.0;
    double dsigma_dp = 0.0;
    double dx0_dtheta = 0.0;
    double dsigma_dtheta = 0.0;

    double fd_dx0_dp = 0.0;
    double fd_dsigma_dp = 0.0;
    double fd_dx0_dtheta = 0.0;
    double fd_dsigma_dtheta = 0.0;

    double max_rel_mismatch = 0.0;
};

}  // namespace ninc
