#include "ninc/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "ninc/errors.hpp"

namespace ninc {

namespace {

struct Implicit {
    double t;     // E + A x0
    double x0;
    double fx;    // df/dx at the root
    double core;  // sigma1 (p-1) t^(p-2)
};

Implicit implicit_terms(const Problem& prob, const Root& root) {
    if (!(prob.theta1 > 0.0)) throw DomainError("derivatives require theta1 > 0");
    const GeometryFactors gf = geometry_factors(prob);
    const double t = root.core_field;
    if (!(t > 0.0)) throw DomainError("E + A x0 must be positive at the root");
    const double core = prob.sigma1 * (prob.p - 1.0) * std::pow(t, prob.p - 2.0);
    return Implicit{t, root.x0, core * gf.a_coef + prob.sigma2 * gf.b_coef, core};
}

void require_interior(const Problem& prob) {
    if (!(prob.theta1 > 0.0 && prob.theta1 < 1.0))
        throw DomainError("theta1 derivatives require 0 < theta1 < 1");
}

double relative_gap(double analytic, double fd, double floor) {
    return std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), floor});
}

}  // namespace

double dx0_dp(const Problem& prob, const Root& root) {
    const Implicit im = implicit_terms(prob, root);
    return -prob.sigma1 * std::pow(im.t, prob.p - 1.0) * std::log(im.t) / im.fx;
}

double dsigma_dp(const Problem& prob, const Root& root) {
    return -(prob.dim * prob.sigma2 / prob.e_field) * dx0_dp(prob, root);
}

double dx0_dtheta(const Problem& prob, const Root& root) {
    require_interior(prob);
    const Implicit im = implicit_terms(prob, root);
    const double th2 = prob.theta1 * prob.theta1;
    return im.x0 / th2 * (im.core + (prob.dim - 1) * prob.sigma2) / im.fx;
}

double dsigma_dtheta(const Problem& prob, const Root& root) {
    return -(prob.dim * prob.sigma2 / prob.e_field) * dx0_dtheta(prob, root);
}

const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Increasing: return "Increasing";
        case Regime::Decreasing: return "Decreasing";
        case Regime::Flat: return "Flat";
    }
    return "Unknown";
}

RegimeVerdict regime_classify(const Problem& prob, const SolverConfig& cfg) {
    if (!(prob.e_field > 1.0)) throw DomainError("regime_classify requires E > 1");
    require_interior(prob);
    const double d = prob.dim;
    RegimeVerdict v;
    // dx0/dp >= 0 iff E + A x0 <= 1, iff f((1 - E)/A) >= 0.
    v.threshold = (d * prob.e_field - d + 1.0 - prob.theta1) / prob.theta2();
    const double critical = prob.sigma2 * v.threshold;
    if (std::abs(prob.sigma1 - critical) <= 1e-9 * std::max(prob.sigma1, critical)) {
        v.threshold_verdict = Regime::Flat;
    } else {
        v.threshold_verdict = prob.sigma1 > critical ? Regime::Increasing : Regime::Decreasing;
    }

    v.dx0_dp = dx0_dp(prob, solve_root(prob, cfg));
    if (std::abs(v.dx0_dp) <= 1e-8) {
        v.numeric_verdict = Regime::Flat;
    } else {
        v.numeric_verdict = v.dx0_dp > 0.0 ? Regime::Increasing : Regime::Decreasing;
    }
    v.consistent = v.threshold_verdict == v.numeric_verdict;
    return v;
}

SensitivityReport full_report(const Problem& prob, const SolverConfig& cfg, double fd_step) {
    require_interior(prob);
    if (!(fd_step > 0.0)) throw StepError("fd_step must be positive");
    const double hp = std::max(fd_step, fd_step * std::abs(prob.p));
    const double ht = std::max(fd_step, fd_step * std::abs(prob.theta1));
    if (!(prob.p - hp > 1.0)) throw StepError("p - h must stay above 1");
    if (!(prob.theta1 - ht > 0.0 && prob.theta1 + ht < 1.0))
        throw StepError("theta1 +- h must stay inside (0, 1)");

    const Root root = solve_root(prob, cfg);
    SensitivityReport rep;
    rep.dx0_dp = dx0_dp(prob, root);
    rep.dsigma_dp = dsigma_dp(prob, root);
    rep.dx0_dtheta = dx0_dtheta(prob, root);
    rep.dsigma_dtheta = dsigma_dtheta(prob, root);

    auto shifted = [&](double dp, double dtheta) {
        Problem q = prob;
        q.p += dp;
        q.theta1 += dtheta;
        const Root r = solve_root(q, cfg);
        return std::pair{r.x0, sigma_from_root(q, r.x0)};
    };
    const auto [xp_hi, sp_hi] = shifted(hp, 0.0);
    const auto [xp_lo, sp_lo] = shifted(-hp, 0.0);
    const auto [xt_hi, st_hi] = shifted(0.0, ht);
    const auto [xt_lo, st_lo] = shifted(0.0, -ht);
    rep.fd_dx0_dp = (xp_hi - xp_lo) / (2.0 * hp);
    rep.fd_dsigma_dp = (sp_hi - sp_lo) / (2.0 * hp);
    rep.fd_dx0_dtheta = (xt_hi - xt_lo) / (2.0 * ht);
    rep.fd_dsigma_dtheta = (st_hi - st_lo) / (2.0 * ht);

    // Floors keep a vanishing derivative (x0 = 0) from turning rounding noise
    // into an O(1) relative gap.
    const double x_floor = 1e-8 * prob.e_field;
    const double s_floor = 1e-8 * prob.sigma2;
    rep.max_rel_mismatch = std::max({
        relative_gap(rep.dx0_dp, rep.fd_dx0_dp, x_floor),
        relative_gap(rep.dsigma_dp, rep.fd_dsigma_dp, s_floor),
        relative_gap(rep.dx0_dtheta, rep.fd_dx0_dtheta, x_floor),
        relative_gap(rep.dsigma_dtheta, rep.fd_dsigma_dtheta, s_floor),
    });
    return rep;
}

}  // namespace ninc
