#pragma once

#include <optional>

#include "ninc/model.hpp"

namespace ninc {

/// Tolerances for solve_root. Unset tolerances resolve to problem-scaled
/// defaults, see resolved_abs_tol() / resolved_x_tol().
struct SolverConfig {
    std::optional<double> abs_tol;  // on |f(x)|; default 1e-14 * residual_scale()
    std::optional<double> x_tol;    // on the x-bracket width; default 1e-15 * width
    int max_iter = 200;

    /// Throws DomainError on non-positive tolerances or max_iter < 1.
    void validate() const;
    [[nodiscard]] double resolved_abs_tol(const Problem& prob) const;
    [[nodiscard]] double resolved_x_tol(double bracket_width) const;
};

/// Natural magnitude of f: sigma1 * max(1, E)^(p-1) + sigma2 * E.
double residual_scale(const Problem& prob);

/// |t|^(p-2) t written as sign(t) |t|^exponent; zero at t = 0 for every
/// exponent > 0.
double signed_power(double t, double exponent);

/// f(x) = sigma1 |E + A x|^(p-2) (E + A x) - sigma2 (E - B x).
/// Total, strictly increasing in x.
double interface_fn(double x, const Problem& prob, const GeometryFactors& gf);

/// f'(x) = A sigma1 (p-1) |E + A x|^(p-2) + sigma2 B. Unbounded as
/// E + A x -> 0 when p < 2.
double interface_derivative(double x, const Problem& prob, const GeometryFactors& gf);

/// Finds the unique root of f inside (-E/A, E/B).
///
/// The bracket is first halved by the sign of f(0): when positive the root
/// lies in (-E/A, 0). Iteration then runs on the core field t = E + A x
/// (root right of 0) or on the normalized core flux w = t^(p-1) (root left
/// of 0). Both keep the root well scaled when t is many orders of magnitude
/// below E.
///
/// theta1 = 1 (A = 0) makes f affine and returns the closed form.
/// Throws DegenerateGeometry for theta1 = 0 and ConvergenceError when
/// max_iter is exhausted.
Root solve_root(const Problem& prob, const SolverConfig& cfg = {});

/// sigma* = (sigma2 / E) (E - d x0).
double sigma_from_root(const Problem& prob, double x0);

/// Effective conductivity with its computation branch. p = 2 additionally
/// fills hs_value and throws InternalInconsistency if the two disagree.
EffectiveResult effective_conductivity(const Problem& prob, const SolverConfig& cfg = {});

/// sigma2 + d theta1 sigma2 (sigma1 - sigma2) / (d sigma2 + theta2 (sigma1 - sigma2)).
/// Ignores p.
double hashin_shtrikman(const Problem& prob);

struct HsBounds {
    double lower;
    double upper;
};

/// Two-phase Hashin-Shtrikman bounds. Requires sigma1 > sigma2.
HsBounds hs_bounds(const Problem& prob);

}  // namespace ninc
