#include <doctest.h>

#include "qes/errors.hpp"
#include "qes/spectra.hpp"
#include "qes/wavefunction.hpp"

#include <cmath>

using namespace qes;
using K = ConstraintKind;

namespace {

ConstrainedProblem build(const std::string& name, const ParamMap& p, int N, K k) {
    return apply_constraint(make_problem(name, p, N, k), {k, N});
}

} // namespace

TEST_CASE("N = 1 wavefunction is the weight") {
    const auto cp = build("morse_rising_exp", {{"alpha", 1}, {"gamma", 1}, {"xi", 1}}, 1, K::DiagA);
    const auto w = assemble(cp, -1.0);
    REQUIRE(w.p.size() == 1);
    CHECK(w.p[0] == 1.0);
    for (double x : {-0.5, 0.3, 2.0}) CHECK(w.psi(x) == doctest::Approx(w.weight.omega(w.map.y_of_x(x))).epsilon(1e-14));
}

TEST_CASE("morse N = 2 coefficient table") {
    const auto cp = build("morse_rising_exp", {{"alpha", 1}, {"gamma", 1}, {"xi", 1}}, 2, K::DiagA);
    for (double e : {(-5 + std::sqrt(17.0)) / 2, (-5 - std::sqrt(17.0)) / 2}) {
        const auto w = assemble(cp, e);
        REQUIRE(w.p.size() == 2);
        CHECK(w.p[0] == 1.0);
        CHECK(w.p[1] == doctest::Approx(-(e + 1)).epsilon(1e-12));
    }
}

TEST_CASE("analytic second derivative agrees with finite differences") {
    const auto cp = build("morse_rising_exp", {{"alpha", 2}, {"gamma", 1}, {"xi", 3}}, 4, K::DiagA);
    for (double e : energy_spectrum(cp).eigenvalues) {
        const auto w = assemble(cp, e);
        double scale = 0;
        const auto xs = residual_grid(w);
        for (double x : xs) scale = std::max(scale, std::abs(w.psi_dd(x)));
        for (std::size_t i = 5; i < xs.size(); i += 20)
            CHECK(std::abs(fd_second_derivative(w, xs[i], 1e-4 * std::max(1.0, std::abs(xs[i]))) - w.psi_dd(xs[i])) <=
                  1e-6 * scale);
    }
}

TEST_CASE("residual on the spectrum and the perturbed-energy control") {
    struct C {
        const char* name;
        ParamMap p;
        K k;
    };
    const C cs[] = {
        {"bender_dunne", {{"alpha", 0.25}, {"gamma", 1}}, K::DiagA},
        {"morse_rising_exp", {{"alpha", 20}, {"gamma", 1}, {"xi", 20}}, K::DiagA},
        {"sextic_partner", {{"alpha", 0.25}, {"gamma", 1}, {"xi", 1.375}}, K::DiagB},
        {"hyperbolic_II1", {{"alpha", 1.5}, {"gamma", 1}, {"v2", -2}}, K::DiagA},
    };
    for (const auto& c : cs)
        for (int N : {2, 4}) {
            CAPTURE(c.name);
            CAPTURE(N);
            const auto cp = build(c.name, c.p, N, c.k);
            for (double e : energy_spectrum(cp).eigenvalues) {
                const auto good = schrodinger_residual(assemble(cp, e));
                CHECK(good.interior <= 1e-6);
                const auto bad = schrodinger_residual(assemble(cp, e + 0.1));
                CHECK(bad.interior >= 1e3 * std::max(good.interior, 1e-12));
            }
        }
}

TEST_CASE("pointwise-exact case: coulomb at eps_N on the parameter spectrum") {
    const double l = 1;
    const auto cp = build("coulomb_plus_oscillator", {{"alpha", 1}, {"gamma", l + 1}, {"ell", l}}, 2, K::OffMinusEnergy);
    const auto ps = parameter_spectrum(cp);
    REQUIRE(ps.values.size() == 2);
    for (const auto& v : ps.values) {
        const auto w = assemble(at_parameter(cp, ps, v), *cp.eps_N);
        CHECK(w.pointwise_exact());
        const auto r = schrodinger_residual(w);
        CHECK(r.raw <= 1e-6);
        CHECK(r.interior <= 1e-6);
    }
}

TEST_CASE("truncated series generally leaves an edge residual") {
    const auto cp = build("morse_rising_exp", {{"alpha", 1}, {"gamma", 1}, {"xi", 1}}, 2, K::DiagA);
    const auto w = assemble(cp, (-5 + std::sqrt(17.0)) / 2);
    CHECK(!w.pointwise_exact());
    const auto r = schrodinger_residual(w);
    CHECK(r.raw > 1e-3);
    CHECK(r.interior <= 1e-10);
}

TEST_CASE("square integrability") {
    SUBCASE("morse N = 1") {
        const auto cp = build("morse_rising_exp", {{"alpha", 1}, {"gamma", 1}, {"xi", 1}}, 1, K::DiagA);
        const double n = l2_norm(assemble(cp, -1.0));
        CHECK(std::isfinite(n));
        CHECK(n > 0);
        // int_R e^{-2x} exp(-2 e^{-x}) dx = 1/4
        CHECK(n == doctest::Approx(0.25).epsilon(1e-8));
    }
    SUBCASE("power family ground state") {
        const auto cp = build("bender_dunne", {{"alpha", 0.25}, {"gamma", 1}}, 1, K::DiagA);
        const double n = l2_norm(assemble(cp, energy_spectrum(cp).eigenvalues[0]));
        // int_0^inf x^2 exp(-x^4/2) dx = Gamma(3/4) 2^{3/4} / 4
        CHECK(n == doctest::Approx(std::tgamma(0.75) * std::pow(2.0, 0.75) / 4).epsilon(1e-8));
    }
    SUBCASE("gamma <= 0 fails at the origin") {
        for (double g : {0.0, -0.4}) {
            const auto cp = build("bender_dunne", {{"alpha", 0.25}, {"gamma", g}}, 1, K::DiagA);
            CHECK_THROWS_AS(l2_norm(assemble(cp, energy_spectrum(cp).eigenvalues[0])), DivergenceError);
        }
    }
}
