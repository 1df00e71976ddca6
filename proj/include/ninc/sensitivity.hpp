#pragma once

#include "ninc/kernel.hpp"
#include "ninc/model.hpp"

namespace ninc {

// Analytic derivatives by implicit differentiation of f(x0; p, theta1) = 0.
// A and B are the only theta1-dependent quantities. `root` must be the root
// of `prob` (solve_root output).

/// -sigma1 t^(p-1) ln t / (sigma1 (p-1) A t^(p-2) + sigma2 B), t = E + A x0.
/// Accepts theta1 = 1, where it reduces to the derivative of the closed form.
double dx0_dp(const Problem& prob, const Root& root);

/// -(d sigma2 / E) dx0_dp.
double dsigma_dp(const Problem& prob, const Root& root);

/// (x0 / theta1^2) (sigma1 (p-1) t^(p-2) + (d-1) sigma2) / (sigma1 (p-1) A t^(p-2) + sigma2 B).
double dx0_dtheta(const Problem& prob, const Root& root);

/// -(d sigma2 / E) dx0_dtheta.
double dsigma_dtheta(const Problem& prob, const Root& root);

enum class Regime { Increasing, Decreasing, Flat };

const char* to_string(Regime r) noexcept;

/// Sign of dx0/dp for E > 1, from two routes: the closed-form threshold
/// sigma1 >= sigma2 (d E - d + 1 - theta1) / (1 - theta1), and the sign of
/// the analytic derivative. `consistent` is false when they disagree.
struct RegimeVerdict {
    Regime threshold_verdict = Regime::Flat;
    Regime numeric_verdict = Regime::Flat;
    bool consistent = true;
    double threshold = 0.0;  // sigma1 / sigma2 at which dx0/dp vanishes
    double dx0_dp = 0.0;
};

/// Requires E > 1 and 0 < theta1 < 1.
RegimeVerdict regime_classify(const Problem& prob, const SolverConfig& cfg = {});

/// The four derivatives plus central differences that re-solve the root at
/// each perturbed parameter. Step is max(fd_step, fd_step |param|). Throws
/// StepError when theta1 +- h leaves (0, 1) or p - h <= 1.
SensitivityReport full_report(const Problem& prob, const SolverConfig& cfg = {},
                              double fd_step = 1e-6);

}  // namespace ninc
