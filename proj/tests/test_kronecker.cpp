#include <catch_amalgamated.hpp>

#include "reglab/checks.hpp"
#include "reglab/kronecker.hpp"

using namespace reglab;
using Catch::Approx;

namespace {
const ComplexLattice zi = make_lattice(1.0, cplx(0.0, 1.0));
const cplx q_real = std::exp(cplx(-kTwoPi, 0.0));
} // namespace

TEST_CASE("elliptic dilogarithm symmetries") {
    EvalSettings set;
    CHECK(std::abs(elliptic_dilog_Dq(cplx(0.37, 0.0), q_real, set)) < 1e-14);
    cplx z5 = std::exp(cplx(0.0, kTwoPi / 5.0));
    CHECK(std::abs(elliptic_dilog_Dq(z5, q_real, set) +
                   elliptic_dilog_Dq(1.0 / z5, q_real, set)) < 1e-12);
    CHECK_THROWS_AS(elliptic_dilog_Dq(z5, cplx(1.5, 0.0), set), NomeOutOfRange);
    CHECK_THROWS_AS(Jq(z5, cplx(0.0, 0.0), set), NomeOutOfRange);
}

TEST_CASE("Jq is invariant under multiplying the argument by q") {
    EvalSettings set;
    for (cplx z : {cplx(0.4, 0.2), cplx(-0.3, 0.6), std::exp(cplx(0.0, 1.1))}) {
        double a = Jq(z, q_real, set);
        double b = Jq(z * q_real, q_real, set);
        double c = Jq(z / q_real, q_real, set);
        CHECK(a == Approx(b).margin(1e-11));
        CHECK(a == Approx(c).margin(1e-11));
    }
}

TEST_CASE("Rq matches pi A^2 K21 on the normalized lattice") {
    EvalSettings set;
    for (auto& lat : checks::standard_lattices()) {
        ComplexLattice unit = unit_normalized(lat);
        double piA2 = kPi * unit.area * unit.area;
        for (auto [a, b] : {std::pair<int, int>{1, 0}, {2, 3}, {5, 1}, {3, 4}}) {
            cplx u = TorsionCoord(Rat(a, 7), Rat(b, 7)).embed(unit);
            cplx lhs = Rq(std::exp(cplx(0.0, kTwoPi) * u), unit.q, set);
            cplx rhs = piA2 * kronecker_continued(1, 0.0, u, 2.0, unit, set);
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
}

TEST_CASE("three routes agree at a 7-torsion point") {
    EvalSettings set;
    set.shell_radius = 300;
    cplx u = cplx(1.0, 2.0) / 7.0;
    K21Report rep = k21_crosscheck(u, zi, set);
    CHECK(rep.resid_q_vs_cont < 1e-11);
    CHECK(rep.resid_cont_vs_direct < 1e-5);
    CHECK(rep.resid_ereg < 1e-11);
    // route dispatch consistency
    EvalSettings qroute = set;
    qroute.route = Route::QSeries;
    CHECK(std::abs(k21(u, zi, qroute) - rep.qseries) < 1e-15);
    EvalSettings croute = set;
    croute.route = Route::Continued;
    CHECK(std::abs(k21(u, zi, croute) - rep.continued) < 1e-15);
}

TEST_CASE("K21 homothety") {
    EvalSettings set;
    cplx c(2.0, 1.0);
    cplx u = cplx(1.0, 2.0) / 7.0;
    ComplexLattice scaled = make_lattice(c * zi.omega1, c * zi.omega2);
    cplx lhs = scaled.area * scaled.area * kronecker_continued(1, 0.0, c * u, 2.0, scaled, set);
    cplx rhs = std::conj(c) * zi.area * zi.area * kronecker_continued(1, 0.0, u, 2.0, zi, set);
    CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("K21 oddness, two-torsion vanishing, periodicity") {
    EvalSettings set;
    cplx u = cplx(3.0, 1.0) / 8.0;
    cplx k = kronecker_continued(1, 0.0, u, 2.0, zi, set);
    CHECK(std::abs(kronecker_continued(1, 0.0, -u, 2.0, zi, set) + k) < 1e-10);
    CHECK(std::abs(kronecker_continued(1, 0.0, u + cplx(2.0, 1.0), 2.0, zi, set) - k) < 1e-10);
    CHECK(std::abs(kronecker_continued(1, 0.0, cplx(0.5, 0.0), 2.0, zi, set)) < 1e-9);
    CHECK(std::abs(kronecker_continued(1, 0.0, cplx(0.5, 0.5), 2.0, zi, set)) < 1e-9);
}

TEST_CASE("functional equation at the named sample points") {
    EvalSettings set;
    for (int a : {0, 1}) {
        double resid = functional_equation_residual(a, cplx(0.2, 0.0), cplx(0.0, 0.2),
                                                    cplx(1.3, 0.0), zi, set);
        CHECK(resid < 1e-8);
    }
    // dual-point relation with the explicit factor
    cplx x(0.2, 0.2), x0(1.0 / 7, 2.0 / 7), s(0.7, 0.0);
    cplx lhs = cgamma(s) * kronecker_continued(1, x, x0, s, zi, set);
    cplx rhs = std::pow(zi.area, 2.0 - 2.0 * s.real()) * cgamma(2.0 - s) *
               kronecker_continued(1, x0, x, 2.0 - s, zi, set) * pairing(x, x0, zi);
    CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("direct route vanishes at two-torsion by symmetry") {
    EvalSettings set;
    set.shell_radius = 120;
    for (auto u : {cplx(0.5, 0.0), cplx(0.0, 0.5), cplx(0.5, 0.5)}) {
        cplx v = kronecker_direct(1, 0.0, u, 2.0, zi, set);
        CHECK(std::abs(v) < 1e-12); // exact pairwise cancellation up to roundoff
    }
}

TEST_CASE("direct route enforces its convergence region") {
    EvalSettings set;
    set.shell_radius = 50;
    CHECK_THROWS_AS(kronecker_direct(1, 0.0, cplx(0.25, 0.0), cplx(1.2, 0.0), zi, set),
                    ConvergenceRegion);
    CHECK_THROWS_AS(kronecker_direct(0, 0.0, cplx(0.25, 0.0), cplx(1.2, 0.0), zi, set),
                    ConvergenceRegion);
}

TEST_CASE("continued route pole bookkeeping for a = 0") {
    EvalSettings set;
    // x0 on the lattice: pole of the completed function at s = 1
    CHECK_THROWS_AS(kronecker_continued(0, cplx(0.3, 0.1), 0.0, cplx(1.0, 0.0), zi, set),
                    PoleEncountered);
    // x on the lattice: pole at s = 0
    CHECK_THROWS_AS(kronecker_continued(0, 0.0, cplx(0.3, 0.1), cplx(0.0, 0.0), zi, set),
                    PoleEncountered);
    // both poles avoided: fine
    CHECK_NOTHROW(kronecker_continued(0, cplx(0.3, 0.1), 0.0, cplx(1.5, 0.0), zi, set));
}

TEST_CASE("deep-convergence agreement between direct and continued routes") {
    EvalSettings set;
    set.shell_radius = 600;
    cplx x(0.2, 0.2), x0(1.0 / 7.0, 2.0 / 7.0);
    for (int a : {0, 1}) {
        cplx c = kronecker_continued(a, x, x0, 2.5, zi, set);
        cplx d = kronecker_direct(a, x, x0, 2.5, zi, set);
        CHECK(std::abs(c - d) < 1e-6);
    }
}

TEST_CASE("distribution relation suites") {
    CheckResult res = checks::check_distribution();
    INFO(res.line());
    CHECK(res.passed);
    CheckResult gen = checks::check_distribution_general(400);
    INFO(gen.line());
    CHECK(gen.max_residual < 1e-4); // reduced radius in the unit suite
}

TEST_CASE("conjugate-embedding relation for Rq") {
    EvalSettings set;
    ComplexLattice lat = make_lattice(1.0, cplx(0.3, 1.1));
    ComplexLattice bar = conjugate_lattice(lat);
    cplx u(0.21, 0.37);
    cplx lhs = Rq(std::exp(cplx(0.0, kTwoPi) * (u / lat.omega1)), unit_normalized(lat).q, set);
    cplx rhs = Rq(std::exp(cplx(0.0, kTwoPi) * (std::conj(u) / bar.omega1)),
                  unit_normalized(bar).q, set);
    CHECK(std::abs(lhs - std::conj(rhs)) < 1e-10);
}

TEST_CASE("settings validation") {
    EvalSettings bad;
    bad.tol = 1.0;
    CHECK_THROWS_AS(bad.validate(), BadConfig);
    bad = EvalSettings{};
    bad.max_q_terms = 2;
    CHECK_THROWS_AS(bad.validate(), BadConfig);
    bad = EvalSettings{};
    bad.shell_radius = 1.0;
    CHECK_THROWS_AS(bad.validate(), BadConfig);
}
