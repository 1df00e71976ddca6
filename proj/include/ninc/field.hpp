#pragma once

#include <array>

#include "ninc/kernel.hpp"
#include "ninc/model.hpp"

namespace ninc {

/// Closed-form potential of one coated inclusion. Immutable once built.
struct FieldSolution {
    Coefficients coeffs;
    Problem prob;
    double sigma_star = 0.0;
};

struct PointSample {
    double r = 0.0;
    double theta = 0.0;  // angle to the applied-field direction, in [0, pi]
    double u = 0.0;
    double grad_r = 0.0;      // du/dr
    double grad_theta = 0.0;  // (1/r) du/dtheta
};

struct EnergyReport {
    double core_dissipation = 0.0;     // sigma1 |grad u|^p over the core
    double coating_dissipation = 0.0;  // sigma2 |grad u|^2 over the coating
    double homogeneous_dissipation = 0.0;
    double rel_error = 0.0;
};

/// Volume of the unit ball in dimension 2 or 3.
double unit_ball_volume(int dim);

/// Solves for x0 and assembles (a1, a2, b2) for a coated inclusion of outer
/// radius r_e, with r_c = r_e theta1^(1/d). Requires 0 < theta1 < 1.
/// Throws InternalInconsistency if any relative interface residual exceeds
/// 1e-10.
FieldSolution build_field(const Problem& prob, double r_e, const SolverConfig& cfg = {});

/// Potential and gradient at (r, theta); r <= r_c is evaluated in the core.
/// Throws DomainError for r outside [0, r_e].
PointSample eval_field(const FieldSolution& sol, double r, double theta);

/// Absolute residuals of, in order: potential continuity at r_c, flux
/// continuity at r_c, the boundary condition u = E r cos(theta) at r_e, and
/// flux matching sigma* E at r_e.
std::array<double, 4> residuals(const FieldSolution& sol);

/// residuals() divided by the largest term of each equation.
std::array<double, 4> relative_residuals(const FieldSolution& sol);

/// Normal current sigma2 du/dr on the outer boundary at angle theta.
double exterior_flux(const FieldSolution& sol, double theta);

/// sigma* read off the coefficients through the exterior flux condition.
double boundary_conductivity(const FieldSolution& sol);

/// Max |discrete Laplacian of u| over n_points quasi-random coating points,
/// using a Cartesian second-difference stencil of spacing h. Throws
/// DomainError if a stencil would leave the open coating annulus.
double harmonicity_check(const FieldSolution& sol, int n_points, double h);

/// Core term in closed form, coating term by tensor Gauss-Legendre in r and
/// cos(theta) (3D) or theta (2D). Requires quad_order >= 4.
EnergyReport energy_identity(const FieldSolution& sol, int quad_order);

/// |sigma*(r_e) - sigma*(lambda r_e)| from two independently built fields.
double scale_invariance_check(const Problem& prob, double r_e, double lambda,
                              const SolverConfig& cfg = {});

}  // namespace ninc
