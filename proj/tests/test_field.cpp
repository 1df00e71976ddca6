#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ninc/errors.hpp"
#include "ninc/field.hpp"
#include "oracles.hpp"

using namespace ninc;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// The four transmission conditions written out independently of residuals().
std::array<double, 4> substitute(const FieldSolution& s) {
    const auto& c = s.coeffs;
    const auto& pr = s.prob;
    const double d = pr.dim;
    const double rc = std::pow(c.r_c, d), re = std::pow(c.r_e, d);
    const double core_flux = pr.sigma1 * std::copysign(std::pow(std::abs(c.a1), pr.p - 1), c.a1);
    return {std::abs(c.a1 - c.a2 - c.b2 / rc),
            std::abs(core_flux - pr.sigma2 * (c.a2 - (d - 1) * c.b2 / rc)),
            std::abs(pr.e_field - c.a2 - c.b2 / re),
            std::abs(pr.sigma2 * (c.a2 - (d - 1) * c.b2 / re) - s.sigma_star * pr.e_field)};
}

}  // namespace

TEST_CASE("reference coefficients at p = 2") {
    const auto sol = build_field(validate_problem(10, 1, 2, 1, 0.5, 3), 1.0);
    CHECK(sol.coeffs.b2 == Approx(-0.60).epsilon(1e-13));
    CHECK(sol.coeffs.a2 == Approx(1.60).epsilon(1e-13));
    CHECK(sol.coeffs.a1 == Approx(0.40).epsilon(1e-13));
    CHECK(std::pow(sol.coeffs.r_c, 3) == Approx(0.5).epsilon(1e-14));
    CHECK(sol.sigma_star == Approx(2.80).epsilon(1e-13));
}

TEST_CASE("2D coefficients satisfy the transmission conditions") {
    const auto sol = build_field(validate_problem(3, 2, 2.5, 1.3, 0.37, 2), 2.5);
    CHECK(sol.coeffs.r_c * sol.coeffs.r_c / (2.5 * 2.5) == Approx(0.37).epsilon(1e-12));
    for (double r : substitute(sol)) CHECK(r < 1e-10);
}

TEST_CASE("nearly full core: sigma1 |a1|^(p-2) a1 = sigma* E") {
    const auto sol = build_field(validate_problem(10, 1, 3.2, 1.4, 1.0 - 1e-9, 3), 1.0);
    const double a1 = sol.coeffs.a1;
    CHECK(10 * std::pow(std::abs(a1), 2.2) * (a1 > 0 ? 1 : -1) ==
          Approx(sol.sigma_star * 1.4).epsilon(1e-6));
}

TEST_CASE("build_field rejects limits and bad radii") {
    CHECK_THROWS_AS(build_field(validate_problem(10, 1, 2, 1, 0.0, 3), 1.0), DomainError);
    CHECK_THROWS_AS(build_field(validate_problem(10, 1, 2, 1, 1.0, 3), 1.0), DomainError);
    CHECK_THROWS_AS(build_field(validate_problem(10, 1, 2, 1, 0.5, 3), 0.0), DomainError);
}

TEST_CASE("eval_field") {
    const auto sol = build_field(validate_problem(10, 1, 2.7, 1.2, 0.4, 3), 2.0);
    const auto& c = sol.coeffs;

    SUBCASE("core is uniform") {
        const auto s = eval_field(sol, c.r_c / 2, 0.0);
        CHECK(s.u == Approx(c.a1 * c.r_c / 2));
        for (double th : {0.0, 0.4, 1.9, kPi}) {
            const auto q = eval_field(sol, c.r_c * 0.3, th);
            CHECK(std::hypot(q.grad_r, q.grad_theta) == Approx(std::abs(c.a1)).epsilon(1e-14));
        }
        const auto centre = eval_field(sol, 0.0, 1.0);
        CHECK(centre.grad_theta == Approx(-c.a1 * std::sin(1.0)));
    }
    SUBCASE("boundary value is E r_e cos(theta)") {
        for (double th = 0; th <= kPi; th += 0.3)
            CHECK(eval_field(sol, c.r_e, th).u == Approx(1.2 * 2.0 * std::cos(th)).epsilon(1e-13));
    }
    SUBCASE("potential and tangential gradient continuous at r_c") {
        for (double th = 0; th <= kPi; th += kPi / 40) {
            const auto in = eval_field(sol, c.r_c, th);
            const auto out = eval_field(sol, std::nextafter(c.r_c, 10.0), th);
            CHECK(std::abs(in.u - out.u) < 1e-12);
            CHECK(std::abs(in.grad_theta - out.grad_theta) < 1e-12);
        }
    }
    SUBCASE("normal flux continuous at r_c") {
        const auto in = eval_field(sol, c.r_c, 0.0);
        const auto out = eval_field(sol, std::nextafter(c.r_c, 10.0), 0.0);
        const double core = 10 * std::copysign(std::pow(std::abs(in.grad_r), 1.7), in.grad_r);
        CHECK(std::abs(core - out.grad_r) < 1e-10);
    }
    SUBCASE("outside [0, r_e]") {
        CHECK_THROWS_AS(eval_field(sol, -1e-9, 0.0), DomainError);
        CHECK_THROWS_AS(eval_field(sol, 2.0 + 1e-9, 0.0), DomainError);
    }
}

TEST_CASE("exterior flux is sigma* E cos(theta)") {
    const auto sol = build_field(validate_problem(4, 1, 1.6, 0.7, 0.6, 2), 3.0);
    for (int k = 0; k < 100; ++k) {
        const double th = kPi * k / 99;
        CHECK(std::abs(exterior_flux(sol, th) - sol.sigma_star * 0.7 * std::cos(th)) < 1e-12);
    }
    CHECK(boundary_conductivity(sol) == Approx(sol.sigma_star).epsilon(1e-13));
}

TEST_CASE("residuals") {
    const auto sol = build_field(validate_problem(10, 1, 3, 1, 0.5, 3), 1.0);
    for (double r : residuals(sol)) CHECK(r < 1e-10);
    for (double r : relative_residuals(sol)) CHECK(r < 1e-12);

    FieldSolution bent = sol;
    bent.coeffs.b2 += 0.1;
    const auto r = residuals(bent);
    CHECK(r[0] > 1e-3);
    CHECK(r[1] > 1e-3);
    CHECK(r[2] == Approx(0.1).epsilon(1e-12));

    SUBCASE("hand-built p = 2 coefficients") {
        const oracle::Inputs in{10, 1, 2, 1.5, 0.3, 2};
        const double x0 = oracle::linear_root(in);
        FieldSolution hs;
        hs.prob = validate_problem(10, 1, 2, 1.5, 0.3, 2);
        const double re = 1.7;
        hs.coeffs = {1.5 + (1 / 0.3 - 1) * x0, 1.5 - x0, x0 * re * re, re * std::sqrt(0.3), re};
        hs.sigma_star = 1.0 / 1.5 * (1.5 - 2 * x0);
        for (double v : residuals(hs)) CHECK(v < 1e-12);
    }
}

TEST_CASE("harmonicity") {
    const auto sol = build_field(validate_problem(10, 1, 2.5, 1, 0.3, 3), 1.0);
    // The Cartesian stencil is exact on the uniform part only; the dipole
    // leaves an O(h^2) truncation term.
    const double coarse = harmonicity_check(sol, 200, 1e-2);
    const double mid = harmonicity_check(sol, 200, 5e-3);
    const double fine = harmonicity_check(sol, 200, 1e-3);
    CHECK(mid <= coarse);
    CHECK(fine <= mid);
    CHECK(coarse / mid == Approx(4.0).epsilon(0.05));
    CHECK(mid / fine == Approx(25.0).epsilon(0.05));
    CHECK(harmonicity_check(sol, 50, 1e-3) == harmonicity_check(sol, 50, 1e-3));

    // A 2D field with no dipole strength left is harmonic to rounding.
    const auto flat = build_field(validate_problem(1, 1, 2, 1, 0.6, 2), 1.0);
    CHECK(std::abs(flat.coeffs.b2) < 1e-15);
    CHECK(harmonicity_check(flat, 100, 1e-3) < 1e-8);

    FieldSolution bent = sol;
    bent.coeffs.a2 *= 1.1;
    CHECK(std::abs(harmonicity_check(bent, 200, 1e-3) - fine) < 1e-8);
    CHECK(residuals(bent)[2] > 1e-3);

    CHECK_THROWS_AS(harmonicity_check(sol, 10, 0.5), DomainError);
    CHECK_THROWS_AS(harmonicity_check(sol, 0, 1e-3), DomainError);
}

TEST_CASE("energy identity") {
    SUBCASE("p = 2 against the closed-form coating integral") {
        const auto sol = build_field(validate_problem(10, 1, 2, 1, 0.5, 3), 1.0);
        const auto en = energy_identity(sol, 16);
        CHECK(en.rel_error < 1e-10);
        const auto& c = sol.coeffs;
        CHECK(en.coating_dissipation ==
              Approx(oracle::coating_energy(3, 1, c.a2, c.b2, c.r_c, c.r_e)).epsilon(1e-12));
        CHECK(en.homogeneous_dissipation == Approx(2.80 * 4 * kPi / 3).epsilon(1e-13));
    }
    SUBCASE("p = 3.5, 2D and 3D") {
        for (int dim : {2, 3}) {
            const auto sol = build_field(validate_problem(6, 1.5, 3.5, 1.7, 0.45, dim), 2.0);
            const auto en = energy_identity(sol, 32);
            CHECK(en.rel_error < 1e-8);
            CHECK(en.core_dissipation > 0);
            CHECK(en.coating_dissipation > 0);
            CHECK(en.homogeneous_dissipation > 0);
            const auto& c = sol.coeffs;
            CHECK(en.coating_dissipation ==
                  Approx(oracle::coating_energy(dim, 1.5, c.a2, c.b2, c.r_c, c.r_e)).epsilon(1e-12));
            const double vcore = oracle::ball_volume(dim) * std::pow(c.r_c, dim);
            CHECK(en.core_dissipation == Approx(6 * std::pow(std::abs(c.a1), 3.5) * vcore).epsilon(1e-13));
        }
    }
    SUBCASE("error decreases with quad order until the rounding floor") {
        const auto sol = build_field(validate_problem(20, 1, 1.3, 0.8, 0.05, 3), 1.0);
        double prev = INFINITY;
        for (int n : {4, 8, 16, 32}) {
            const double e = energy_identity(sol, n).rel_error;
            CHECK(e <= std::max(prev, 1e-13));
            prev = e;
        }
    }
    SUBCASE("nearly full core is a single-phase identity") {
        const auto sol = build_field(validate_problem(10, 1, 4, 1.3, 1.0 - 1e-9, 3), 1.0);
        const auto en = energy_identity(sol, 16);
        CHECK(en.rel_error < 1e-7);
    }
    CHECK_THROWS_AS(energy_identity(build_field(validate_problem(10, 1, 2, 1, 0.5, 3), 1.0), 3),
                    DomainError);
}

TEST_CASE("scale invariance") {
    const Problem pr = validate_problem(10, 1, 2.7, 2, 0.4, 3);
    const double s = effective_conductivity(pr).sigma_star;
    for (double lambda : {10.0, 1e-6, 1e3}) CHECK(scale_invariance_check(pr, 1.0, lambda) < 1e-12 * s);
    const auto a = build_field(pr, 1.0);
    const auto b = build_field(pr, 10.0);
    CHECK(b.coeffs.b2 / a.coeffs.b2 == Approx(1e3).epsilon(1e-14));
    CHECK_THROWS_AS(scale_invariance_check(pr, 1.0, 0.0), DomainError);
}

TEST_CASE("unit ball volume") {
    CHECK(unit_ball_volume(2) == Approx(kPi));
    CHECK(unit_ball_volume(3) == Approx(4 * kPi / 3));
}
