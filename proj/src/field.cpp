#include "ninc/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ninc/errors.hpp"
#include "ninc/quadrature.hpp"

namespace ninc {

namespace {

double radius_power(double r, int dim) { return dim == 2 ? r * r : r * r * r; }

double max_abs(std::initializer_list<double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

// Additive recurrence on (phi^-1, phi^-2, phi^-3), phi^4 = phi + 1.
struct QuasiRandom3 {
    static constexpr double kPhi = 1.2207440846057594753616853491088;
    double state[3] = {0.5, 0.5, 0.5};

    void next(double out[3]) {
        double alpha = 1.0;
        for (double& s : state) {
            alpha /= kPhi;
            s += alpha;
            s -= std::floor(s);
        }
        for (int i = 0; i < 3; ++i) out[i] = state[i];
    }
};

}  // namespace

double unit_ball_volume(int dim) {
    return dim == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0;
}

FieldSolution build_field(const Problem& prob, double r_e, const SolverConfig& cfg) {
    if (!(prob.theta1 > 0.0 && prob.theta1 < 1.0))
        throw DomainError("build_field requires 0 < theta1 < 1");
    if (!std::isfinite(r_e) || !(r_e > 0.0)) throw DomainError("r_e must be positive");

    const Root root = solve_root(prob, cfg);
    const double r_ed = radius_power(r_e, prob.dim);
    FieldSolution sol;
    sol.prob = prob;
    sol.coeffs.r_e = r_e;
    sol.coeffs.r_c = r_e * (prob.dim == 2 ? std::sqrt(prob.theta1) : std::cbrt(prob.theta1));
    sol.coeffs.b2 = root.x0 * r_ed;
    sol.coeffs.a2 = prob.e_field - sol.coeffs.b2 / r_ed;
    sol.coeffs.a1 = root.core_field;
    sol.sigma_star = effective_conductivity(prob, cfg).sigma_star;

    const auto rel = relative_residuals(sol);
    for (std::size_t i = 0; i < rel.size(); ++i) {
        if (!(rel[i] <= 1e-10)) {
            std::ostringstream msg;
            msg << "interface condition " << (i + 1) << " violated after solve: relative residual "
                << rel[i];
            throw InternalInconsistency(msg.str());
        }
    }
    return sol;
}

PointSample eval_field(const FieldSolution& sol, double r, double theta) {
    const Coefficients& c = sol.coeffs;
    if (!(r >= 0.0) || r > c.r_e) throw DomainError("r must lie in [0, r_e]");
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    PointSample s{r, theta, 0.0, 0.0, 0.0};
    if (r <= c.r_c) {
        s.u = c.a1 * r * cos_t;
        s.grad_r = c.a1 * cos_t;
        s.grad_theta = -c.a1 * sin_t;
        return s;
    }
    const double dipole = c.b2 / radius_power(r, sol.prob.dim);
    s.u = (dipole + c.a2) * r * cos_t;
    s.grad_r = (c.a2 - (sol.prob.dim - 1) * dipole) * cos_t;
    s.grad_theta = -(c.a2 + dipole) * sin_t;
    return s;
}

std::array<double, 4> residuals(const FieldSolution& sol) {
    const Coefficients& c = sol.coeffs;
    const Problem& pr = sol.prob;
    const double dm1 = pr.dim - 1;
    const double at_core = c.b2 / radius_power(c.r_c, pr.dim);
    const double at_ext = c.b2 / radius_power(c.r_e, pr.dim);
    return {
        std::abs(c.a1 - c.a2 - at_core),
        std::abs(pr.sigma1 * signed_power(c.a1, pr.p - 1.0) - pr.sigma2 * (c.a2 - dm1 * at_core)),
        std::abs(pr.e_field - c.a2 - at_ext),
        std::abs(pr.sigma2 * (c.a2 - dm1 * at_ext) - sol.sigma_star * pr.e_field),
    };
}

std::array<double, 4> relative_residuals(const FieldSolution& sol) {
    const Coefficients& c = sol.coeffs;
    const Problem& pr = sol.prob;
    const double dm1 = pr.dim - 1;
    const double at_core = c.b2 / radius_power(c.r_c, pr.dim);
    const double at_ext = c.b2 / radius_power(c.r_e, pr.dim);
    const std::array<double, 4> scale = {
        max_abs({c.a1, c.a2, at_core}),
        max_abs({pr.sigma1 * std::pow(std::abs(c.a1), pr.p - 1.0), pr.sigma2 * c.a2,
                 pr.sigma2 * dm1 * at_core}),
        max_abs({pr.e_field, c.a2, at_ext}),
        max_abs({pr.sigma2 * c.a2, pr.sigma2 * dm1 * at_ext, sol.sigma_star * pr.e_field}),
    };
    auto out = residuals(sol);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale[i] > 0.0 ? out[i] / scale[i] : out[i];
    return out;
}

double exterior_flux(const FieldSolution& sol, double theta) {
    return sol.prob.sigma2 * eval_field(sol, sol.coeffs.r_e, theta).grad_r;
}

double boundary_conductivity(const FieldSolution& sol) {
    return exterior_flux(sol, 0.0) / sol.prob.e_field;
}

double harmonicity_check(const FieldSolution& sol, int n_points, double h) {
    const Coefficients& c = sol.coeffs;
    const int dim = sol.prob.dim;
    if (n_points < 1) throw DomainError("n_points must be at least 1");
    if (!(h > 0.0)) throw DomainError("stencil spacing h must be positive");
    if (!(c.r_e - c.r_c > 2.0 * h))
        throw DomainError("stencil spacing h does not fit inside the coating annulus");

    auto potential = [&](const double y[3]) {
        const double rho = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        if (!(rho > c.r_c && rho < c.r_e))
            throw DomainError("stencil point left the coating annulus");
        return eval_field(sol, rho, std::acos(std::clamp(y[0] / rho, -1.0, 1.0))).u;
    };

    QuasiRandom3 seq;
    double worst = 0.0;
    for (int k = 0; k < n_points; ++k) {
        double q[3];
        seq.next(q);
        const double r = c.r_c + h + (c.r_e - c.r_c - 2.0 * h) * (0.05 + 0.9 * q[0]);
        double x[3] = {0.0, 0.0, 0.0};
        if (dim == 2) {
            const double ang = 2.0 * std::numbers::pi * q[1];
            x[0] = r * std::cos(ang);
            x[1] = r * std::sin(ang);
        } else {
            const double mu = 2.0 * q[1] - 1.0;
            const double s = std::sqrt(1.0 - mu * mu);
            const double az = 2.0 * std::numbers::pi * q[2];
            x[0] = r * mu;
            x[1] = r * s * std::cos(az);
            x[2] = r * s * std::sin(az);
        }
        const double centre = potential(x);
        double lap = 0.0;
        for (int axis = 0; axis < dim; ++axis) {
            double plus[3] = {x[0], x[1], x[2]};
            double minus[3] = {x[0], x[1], x[2]};
            plus[axis] += h;
            minus[axis] -= h;
            lap += (potential(plus) - 2.0 * centre + potential(minus)) / (h * h);
        }
        worst = std::max(worst, std::abs(lap));
    }
    return worst;
}

EnergyReport energy_identity(const FieldSolution& sol, int quad_order) {
    if (quad_order < 4) throw DomainError("quad_order must be at least 4");
    const Coefficients& c = sol.coeffs;
    const Problem& pr = sol.prob;
    const double omega = unit_ball_volume(pr.dim);
    const GaussLegendre rule(quad_order);

    EnergyReport rep;
    rep.core_dissipation =
        pr.sigma1 * std::pow(std::abs(c.a1), pr.p) * omega * radius_power(c.r_c, pr.dim);

    auto density = [&](double r, double theta) {
        const PointSample s = eval_field(sol, r, theta);
        return pr.sigma2 * (s.grad_r * s.grad_r + s.grad_theta * s.grad_theta);
    };
    double coating = 0.0;
    if (pr.dim == 3) {
        // dV = 2 pi r^2 dr d(cos theta)
        coating = 2.0 * std::numbers::pi * rule.integrate(
            [&](double r) {
                return r * r * rule.integrate([&](double mu) { return density(r, std::acos(mu)); },
                                              -1.0, 1.0);
            },
            c.r_c, c.r_e);
    } else {
        // dA = r dr dtheta; the integrand has quarter-turn symmetry
        coating = 4.0 * rule.integrate(
            [&](double r) {
                return r * rule.integrate([&](double th) { return density(r, th); }, 0.0,
                                          0.5 * std::numbers::pi);
            },
            c.r_c, c.r_e);
    }
    rep.coating_dissipation = coating;
    rep.homogeneous_dissipation =
        sol.sigma_star * pr.e_field * pr.e_field * omega * radius_power(c.r_e, pr.dim);
    rep.rel_error = std::abs(rep.core_dissipation + rep.coating_dissipation -
                             rep.homogeneous_dissipation) /
                    rep.homogeneous_dissipation;
    return rep;
}

double scale_invariance_check(const Problem& prob, double r_e, double lambda,
                              const SolverConfig& cfg) {
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    const FieldSolution base = build_field(prob, r_e, cfg);
    const FieldSolution scaled = build_field(prob, lambda * r_e, cfg);
    return std::abs(boundary_conductivity(base) - boundary_conductivity(scaled));
}

}  // namespace ninc
