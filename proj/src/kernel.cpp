#include "ninc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ninc/errors.hpp"

namespace ninc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// One scalar equation g(v) = 0 on (lo, hi) with g(lo) < 0 < g(hi), plus the
// maps back to the core field t and to x.
struct Reduced {
    const Problem& prob;
    double a;
    double b;
    bool flux_variable;  // v = t^(p-1) when true, v = t otherwise

    [[nodiscard]] double core_field(double v) const {
        return flux_variable ? std::pow(v, 1.0 / (prob.p - 1.0)) : v;
    }
    [[nodiscard]] double x_of(double v) const { return (core_field(v) - prob.e_field) / a; }

    [[nodiscard]] double value(double v) const {
        const double t = core_field(v);
        const double x = (t - prob.e_field) / a;
        const double core = flux_variable ? v : std::pow(t, prob.p - 1.0);
        return prob.sigma1 * core - prob.sigma2 * (prob.e_field - b * x);
    }

    [[nodiscard]] double slope(double v) const {
        const double q = prob.p - 1.0;
        const double t = core_field(v);
        if (flux_variable) return prob.sigma1 + prob.sigma2 * (b / a) * t / (q * v);
        return prob.sigma1 * q * std::pow(t, q - 1.0) + prob.sigma2 * b / a;
    }
};

double split(double lo, double hi) {
    if (lo == 0.0) return 0.5 * hi;
    if (lo > 0.0 && hi > 4.0 * lo) return std::sqrt(lo) * std::sqrt(hi);
    return lo + 0.5 * (hi - lo);
}

}  // namespace

void SolverConfig::validate() const {
    if (abs_tol && !(*abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
    if (x_tol && !(*x_tol > 0.0)) throw DomainError("x_tol must be positive");
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
}

double SolverConfig::resolved_abs_tol(const Problem& prob) const {
    return abs_tol ? *abs_tol : 1e-14 * residual_scale(prob);
}

double SolverConfig::resolved_x_tol(double bracket_width) const {
    return x_tol ? *x_tol : 1e-15 * bracket_width;
}

double residual_scale(const Problem& prob) {
    return prob.sigma1 * std::pow(std::max(1.0, prob.e_field), prob.p - 1.0) +
           prob.sigma2 * prob.e_field;
}

double signed_power(double t, double exponent) {
    if (t == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(t), exponent), t);
}

double interface_fn(double x, const Problem& prob, const GeometryFactors& gf) {
    const double core = std::fma(gf.a_coef, x, prob.e_field);
    return prob.sigma1 * signed_power(core, prob.p - 1.0) -
           prob.sigma2 * (prob.e_field - gf.b_coef * x);
}

double interface_derivative(double x, const Problem& prob, const GeometryFactors& gf) {
    const double core = std::abs(std::fma(gf.a_coef, x, prob.e_field));
    return gf.a_coef * prob.sigma1 * (prob.p - 1.0) * std::pow(core, prob.p - 2.0) +
           prob.sigma2 * gf.b_coef;
}

Root solve_root(const Problem& prob, const SolverConfig& cfg) {
    cfg.validate();
    const GeometryFactors gf = geometry_factors(prob);
    const double e = prob.e_field;
    const double abs_tol = cfg.resolved_abs_tol(prob);

    if (gf.a_coef == 0.0) {
        const double d = prob.dim;
        const double x0 =
            (prob.sigma2 - prob.sigma1 * std::pow(e, prob.p - 2.0)) * e / (d * prob.sigma2);
        return Root{x0, e, std::abs(interface_fn(x0, prob, gf)), x0, x0, 0};
    }

    const double f0 = prob.sigma1 * std::pow(e, prob.p - 1.0) - prob.sigma2 * e;
    if (f0 == 0.0) return Root{0.0, e, 0.0, 0.0, 0.0, 0};

    const bool left = f0 > 0.0;
    const Reduced eq{prob, gf.a_coef, gf.b_coef, left};
    const double x_lo = left ? -e / gf.a_coef : 0.0;
    const double x_hi = left ? 0.0 : e / gf.b_coef;
    const double x_tol = cfg.resolved_x_tol(x_hi - x_lo);

    double lo = left ? 0.0 : e;
    double hi = left ? std::pow(e, prob.p - 1.0) : e * (gf.a_coef + gf.b_coef) / gf.b_coef;
    // Newton from the end where g is convex converges monotonically.
    const bool convex = (prob.p < 2.0) == left;
    double v = convex ? hi : split(lo, hi);
    double gv = eq.value(v);
    double prev_abs = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        if (gv == 0.0) {
            lo = hi = v;
        } else if (gv < 0.0) {
            lo = v;
        } else {
            hi = v;
        }

        double next = v - gv / eq.slope(v);
        const bool newton_ok =
            std::isfinite(next) && next > lo && next < hi && std::abs(gv) < 0.5 * prev_abs;
        if (!newton_ok) next = split(lo, hi);
        if (gv == 0.0) next = v;
        prev_abs = std::abs(gv);

        const double step = std::abs(next - v);
        const bool narrow = std::abs(eq.x_of(hi) - eq.x_of(lo)) <= x_tol;
        const bool collapsed = (hi - lo) <= 4.0 * kEps * std::abs(next);
        v = next;
        gv = eq.value(v);
        const bool small = std::abs(gv) <= abs_tol;
        if (gv == 0.0 || collapsed || (small && (narrow || step <= 4.0 * kEps * std::abs(v)))) {
            if (collapsed && !small) {
                // No representable improvement left; keep the best endpoint.
                for (double c : {lo, hi}) {
                    const double gc = eq.value(c);
                    if (std::abs(gc) < std::abs(gv)) v = c, gv = gc;
                }
            }
            double t = eq.core_field(v);
            double x0 = (t - e) / gf.a_coef;
            double r0 = std::abs(interface_fn(x0, prob, gf));
            // Polish in x, where the resolution is finer than in t when A is
            // small. Skipped when x cannot resolve t.
            for (int k = 0; k < 4 && r0 > 0.0 && t >= 1e-3 * e; ++k) {
                const double xn = x0 - interface_fn(x0, prob, gf) / interface_derivative(x0, prob, gf);
                const double tn = std::fma(gf.a_coef, xn, e);
                if (!(xn > x_lo && xn < x_hi) || !(tn > 0.0)) break;
                const double rn = std::abs(interface_fn(xn, prob, gf));
                if (!(rn < r0)) break;
                x0 = xn, t = tn, r0 = rn;
            }
            return Root{x0, t, r0, x_lo, x_hi, iter};
        }
    }
    std::ostringstream msg;
    msg << "root solve did not converge in " << cfg.max_iter << " iterations; bracket ["
        << eq.x_of(lo) << ", " << eq.x_of(hi) << "]";
    throw ConvergenceError(msg.str(), eq.x_of(lo), eq.x_of(hi));
}

double sigma_from_root(const Problem& prob, double x0) {
    return prob.sigma2 / prob.e_field * (prob.e_field - prob.dim * x0);
}

EffectiveResult effective_conductivity(const Problem& prob, const SolverConfig& cfg) {
    EffectiveResult out;
    if (prob.theta1 == 0.0) {
        out = {prob.sigma2, 0.0, std::nullopt, Branch::AllLinear};
    } else if (prob.theta1 == 1.0) {
        const double e = prob.e_field;
        const double core = prob.sigma1 * std::pow(e, prob.p - 2.0);
        out = {core, (prob.sigma2 - core) * e / (prob.dim * prob.sigma2), std::nullopt,
               Branch::AllNonlinear};
    } else if (prob.p == 2.0) {
        const GeometryFactors gf = geometry_factors(prob);
        const double x0 = (prob.sigma2 - prob.sigma1) * prob.e_field /
                          (gf.a_coef * prob.sigma1 + gf.b_coef * prob.sigma2);
        out = {sigma_from_root(prob, x0), x0, std::nullopt, Branch::LinearClosedForm};
    } else {
        const Root root = solve_root(prob, cfg);
        out = {sigma_from_root(prob, root.x0), root.x0, std::nullopt, Branch::GeneralRoot};
    }

    if (prob.p == 2.0) {
        const double hs = hashin_shtrikman(prob);
        if (std::abs(out.sigma_star - hs) > 1e-12 * std::max(1.0, std::abs(hs))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "p = 2 effective conductivity " << out.sigma_star
                << " disagrees with the Hashin-Shtrikman value " << hs;
            throw InternalInconsistency(msg.str());
        }
        out.hs_value = hs;
    }
    return out;
}

double hashin_shtrikman(const Problem& prob) {
    const double d = prob.dim;
    const double contrast = prob.sigma1 - prob.sigma2;
    return prob.sigma2 +
           d * prob.theta1 * prob.sigma2 * contrast / (d * prob.sigma2 + prob.theta2() * contrast);
}

HsBounds hs_bounds(const Problem& prob) {
    if (!(prob.sigma1 > prob.sigma2))
        throw DomainError("hs_bounds requires sigma1 > sigma2");
    const double d = prob.dim;
    const double lower = hashin_shtrikman(prob);
    const double inverse = prob.sigma2 - prob.sigma1;
    const double upper =
        prob.sigma1 + d * prob.theta2() * prob.sigma1 * inverse / (d * prob.sigma1 + prob.theta1 * inverse);
    return HsBounds{lower, upper};
}

}  // namespace ninc
