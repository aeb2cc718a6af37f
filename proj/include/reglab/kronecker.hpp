#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "reglab/dilog.hpp"
#include "reglab/errors.hpp"
#include "reglab/gamma_fns.hpp"
#include "reglab/lattice.hpp"
#include "reglab/numeric.hpp"
#include "reglab/settings.hpp"

namespace reglab {

// 1/Gamma(s), entire; safe arbitrarily close to the poles of Gamma.
inline cplx rgamma(cplx s) {
    cplx factor = 1.0;
    while (s.real() < 0.5) {
        factor *= s;
        s += 1.0;
    }
    return factor / cgamma(s);
}

namespace detail {

inline void check_nome(cplx q) {
    double aq = std::abs(q);
    if (aq == 0.0 || aq >= 1.0)
        throw NomeOutOfRange("need 0 < |q| < 1, got |q| = " + std::to_string(aq));
}

// Rescale z by an integer power of q into the annulus |q| < |z| <= 1.
inline cplx reduce_to_annulus(cplx z, cplx q) {
    if (std::abs(z) == 0.0) throw Error("reduce_to_annulus", "z = 0");
    double b = std::log(std::abs(z)) / std::log(std::abs(q));
    double k = std::floor(b);
    if (k != 0.0) z *= std::exp(-k * std::log(q));
    // guard against boundary roundoff
    while (std::abs(z) > 1.0 + 1e-15) z *= q;
    while (std::abs(z) <= std::abs(q) * (1.0 + 1e-15)) z /= q;
    return z;
}

// |D(w)| and |J(w)| bounds used for geometric tail estimates, valid for |w| <= 1/2.
inline double small_term_bound(double aw) {
    return 2.0 * aw * (1.0 + std::abs(std::log(aw)));
}

} // namespace detail

// Elliptic (q-symmetrized) Bloch-Wigner dilogarithm: sum of D(z q^n) over n.
inline double elliptic_dilog_Dq(cplx z, cplx q, const EvalSettings& s = {}) {
    detail::check_nome(q);
    z = detail::reduce_to_annulus(z, q);
    double aq = std::abs(q);
    KahanSum acc;
    acc.add(bloch_wigner(z));
    // n >= 1
    cplx w = z;
    for (int n = 1; n <= s.max_q_terms; ++n) {
        w *= q;
        acc.add(bloch_wigner(w));
        double aw = std::abs(w);
        if (aw <= 0.5 && detail::small_term_bound(aw) / (1.0 - aq) < 0.125 * s.tol) break;
    }
    // n <= -1 : use |D(w)| = |D(1/w)| with |1/w| = |q|^{n+b} -> 0
    w = z;
    for (int n = 1; n <= s.max_q_terms; ++n) {
        w /= q;
        acc.add(bloch_wigner(w));
        double aw = 1.0 / std::abs(w);
        if (aw <= 0.5 && detail::small_term_bound(aw) / (1.0 - aq) < 0.125 * s.tol) break;
    }
    return acc.value();
}

// J_q(z): two geometric tails of log|.| log|1-.| plus the Bernoulli correction
// (1/3) log^2|q| B3(log|z|/log|q|).  The correction makes the value invariant
// under z -> zq, which is checked against the lattice-sum routes in tests.
inline double Jq(cplx z, cplx q, const EvalSettings& s = {}) {
    detail::check_nome(q);
    z = detail::reduce_to_annulus(z, q);
    double aq = std::abs(q);
    double logq = std::log(aq);
    double b = std::log(std::abs(z)) / logq;

    KahanSum acc;
    cplx w = z;
    acc.add(log_log_term(w));
    for (int n = 1; n <= s.max_q_terms; ++n) {
        w *= q;
        acc.add(log_log_term(w));
        double aw = std::abs(w);
        if (aw <= 0.5 && detail::small_term_bound(aw) / (1.0 - aq) < 0.125 * s.tol) break;
    }
    cplx zi = 1.0 / z;
    w = zi;
    for (int n = 1; n <= s.max_q_terms; ++n) {
        w *= q;
        acc.add(-log_log_term(w));
        double aw = std::abs(w);
        if (aw <= 0.5 && detail::small_term_bound(aw) / (1.0 - aq) < 0.125 * s.tol) break;
    }
    acc.add((logq * logq / 3.0) * bernoulli3(b));
    return acc.value();
}

inline cplx Rq(cplx z, cplx q, const EvalSettings& s = {}) {
    return cplx(elliptic_dilog_Dq(z, q, s), -Jq(z, q, s));
}

// Kronecker-Eisenstein-Lerch series by brute-force shell summation:
//   sum* <x0, w> (conj(x + w))^a |x + w|^{-2s}
// over lattice points w with |w| <= shell_radius, shells accumulated in
// increasing modulus with compensated summation.
inline cplx kronecker_direct(int a, cplx x, cplx x0, cplx s, const ComplexLattice& lat,
                             const EvalSettings& set = {}) {
    if (a < 0) throw Error("kronecker_direct", "need a >= 0");
    if (!(s.real() > 0.5 * a + 1.25))
        throw ConvergenceRegion("direct sum needs Re(s) > a/2 + 1.25");
    const double R = set.shell_radius;
    const double R2 = R * R;

    auto xc = basis_coords(x, lat);
    auto pc = basis_coords(x0, lat);
    const bool x_in_lattice =
        near_integer(xc[0], 1e-9) && near_integer(xc[1], 1e-9);
    const long long skip_m = x_in_lattice ? llround(-xc[0]) : 0;
    const long long skip_n = x_in_lattice ? llround(-xc[1]) : 0;

    const double al = std::norm(lat.omega1);
    const double be = (std::conj(lat.omega1) * lat.omega2).real();
    const double ga = std::norm(lat.omega2);
    const long long nmax = (long long)std::floor(R / std::sqrt(ga - be * be / al)) + 1;

    const bool s_real = (s.imag() == 0.0);
    const double sr = s.real();
    const bool s_is_two = s_real && sr == 2.0;

    const int nshell = (int)std::floor(R) + 2;
    std::vector<KahanCSum> shells((size_t)nshell);

    for (long long n = -nmax; n <= nmax; ++n) {
        // m-range solving al m^2 + 2 be m n + ga n^2 <= R^2
        double disc = be * be * double(n) * double(n) - al * (ga * double(n) * double(n) - R2);
        if (disc < 0) continue;
        double root = std::sqrt(disc);
        long long mlo = (long long)std::ceil((-be * double(n) - root) / al - 1e-12);
        long long mhi = (long long)std::floor((-be * double(n) + root) / al + 1e-12);
        for (long long m = mlo; m <= mhi; ++m) {
            double q2 = al * double(m) * double(m) + 2.0 * be * double(m) * double(n) +
                        ga * double(n) * double(n);
            if (q2 > R2) continue;
            if (x_in_lattice && m == skip_m && n == skip_n) continue;
            cplx w = double(m) * lat.omega1 + double(n) * lat.omega2;
            cplx xw = x + w;
            double nr = std::norm(xw);
            if (nr == 0.0) continue;
            // pairing <x0, w> = exp(2 pi i (a0 n - b0 m)) on the normalized basis
            double t = pc[0] * double(n) - pc[1] * double(m);
            t -= std::round(t);
            double th = kTwoPi * t;
            cplx term(std::cos(th), std::sin(th));
            for (int k = 0; k < a; ++k) term *= std::conj(xw);
            if (s_is_two) {
                term /= nr * nr;
            } else if (s_real) {
                term *= std::pow(nr, -sr);
            } else {
                term *= std::exp(-s * std::log(nr));
            }
            int shell = (int)std::floor(std::sqrt(q2));
            shells[(size_t)shell].add(term);
        }
    }
    KahanCSum total;
    for (auto& sh : shells) total.add(sh.value());
    return total.value();
}

namespace detail {

// One side of the theta-split representation:
//   sum over w != -center of <pair_pt, w> (conj(center + w))^a
//         Gamma(sexp, |center + w|^2 / A) / |center + w|^(2 sexp)
inline cplx theta_half(int a, cplx center, cplx pair_pt, cplx sexp,
                       const ComplexLattice& lat) {
    const double A = lat.area;
    const double Tcut = 80.0;
    auto cc = basis_coords(center, lat);
    auto pc = basis_coords(pair_pt, lat);
    const double rad = std::sqrt(Tcut * A);
    // index ranges via the lattice heights: distance between m-lines is covol/|w2|
    const double covol = kPi * A;
    const double hm = covol / std::abs(lat.omega2);
    const double hn = covol / std::abs(lat.omega1);
    long long mlo = (long long)std::floor(-cc[0] - rad / hm) - 1;
    long long mhi = (long long)std::ceil(-cc[0] + rad / hm) + 1;
    long long nlo = (long long)std::floor(-cc[1] - rad / hn) - 1;
    long long nhi = (long long)std::ceil(-cc[1] + rad / hn) + 1;

    KahanCSum acc;
    for (long long n = nlo; n <= nhi; ++n) {
        for (long long m = mlo; m <= mhi; ++m) {
            cplx w = double(m) * lat.omega1 + double(n) * lat.omega2;
            cplx cw = center + w;
            double nr = std::norm(cw);
            double t = nr / A;
            if (t > Tcut) continue;
            if (nr < 1e-24) continue; // singular term contributes 0 (a=1) or is the delta (a=0)
            double ph = pc[0] * double(n) - pc[1] * double(m);
            ph -= std::round(ph);
            double th = kTwoPi * ph;
            cplx term(std::cos(th), std::sin(th));
            for (int k = 0; k < a; ++k) term *= std::conj(cw);
            term *= upper_inc_gamma(sexp, t);
            term *= std::exp(-sexp * std::log(nr));
            acc.add(term);
        }
    }
    return acc.value();
}

inline bool lattice_point(cplx z, const ComplexLattice& lat) {
    auto c = basis_coords(z, lat);
    return near_integer(c[0], 1e-9) && near_integer(c[1], 1e-9);
}

} // namespace detail

// Analytic continuation of K_a(x, x0, s, L) for a in {0, 1}, valid for every
// s away from the poles of the completed function.  Exponentially convergent:
// the Mellin integral of the theta kernel is split at the self-dual point,
// turning each half into incomplete-gamma sums.
inline cplx kronecker_continued(int a, cplx x, cplx x0, cplx s, const ComplexLattice& lat,
                                const EvalSettings& = {}) {
    if (a != 0 && a != 1)
        throw Error("kronecker_continued", "only a in {0,1} supported");
    const double A = lat.area;
    const bool x_in = detail::lattice_point(x, lat);
    const bool x0_in = detail::lattice_point(x0, lat);

    if (a == 0) {
        if (x0_in && std::abs(s - cplx(1.0, 0.0)) < 1e-10)
            throw PoleEncountered("K_0 pole at s = 1 when x0 is a lattice point");
        if (x_in && std::abs(s) < 1e-10)
            throw PoleEncountered("completed K_0 pole at s = 0 when x is a lattice point");
    }

    cplx S1 = detail::theta_half(a, x, x0, s, lat);
    cplx S2 = detail::theta_half(a, x0, x, cplx(a + 1.0, 0.0) - s, lat);
    cplx completed = S1 + pairing(x, x0, lat) *
                              std::exp((cplx(a + 1.0, 0.0) - 2.0 * s) * std::log(A)) * S2;
    if (a == 0) {
        if (x0_in) completed += std::exp(-s * std::log(A)) / (s - 1.0);
        if (x_in) completed -= std::conj(pairing(x0, x, lat)) * std::exp(-s * std::log(A)) / s;
    }
    return completed * rgamma(s);
}

// K_{2,1}(u, L) = K_1(0, u, 2, L).
struct K21Report {
    cplx qseries{0, 0}, continued{0, 0}, direct{0, 0};
    cplx ereg_rq{0, 0}; // R_q(e^{2 pi i u'}) on the normalized lattice
    double resid_q_vs_cont = 0, resid_cont_vs_direct = 0, resid_q_vs_direct = 0;
    double resid_ereg = 0;
};

inline cplx k21_qseries(cplx u, const ComplexLattice& lat, const EvalSettings& s = {}) {
    // reduce to [1, tau]; R_q(e^{2 pi i u'}) = pi A^2([1,tau]) K_{2,1}(u', [1,tau])
    ComplexLattice unit = unit_normalized(lat);
    cplx up = u / lat.omega1;
    cplx z = std::exp(cplx(0.0, kTwoPi) * up);
    cplx rq = Rq(z, unit.q, s);
    double piA2 = kPi * unit.area * unit.area;
    cplx k_unit = rq / piA2;
    return std::conj(lat.omega1) / std::pow(std::abs(lat.omega1), 4.0) * k_unit;
}

inline cplx k21(cplx u, const ComplexLattice& lat, const EvalSettings& s = {}) {
    Route r = s.route;
    if (r == Route::Auto) {
        double aq = std::abs(unit_normalized(lat).q);
        r = (aq < std::exp(-kPi)) ? Route::QSeries : Route::Continued;
    }
    switch (r) {
        case Route::QSeries: return k21_qseries(u, lat, s);
        case Route::DirectSum: return kronecker_direct(1, 0.0, u, 2.0, lat, s);
        default: return kronecker_continued(1, 0.0, u, 2.0, lat, s);
    }
}

inline K21Report k21_crosscheck(cplx u, const ComplexLattice& lat, const EvalSettings& s = {}) {
    K21Report rep;
    rep.qseries = k21_qseries(u, lat, s);
    rep.continued = kronecker_continued(1, 0.0, u, 2.0, lat, s);
    rep.direct = kronecker_direct(1, 0.0, u, 2.0, lat, s);
    ComplexLattice unit = unit_normalized(lat);
    cplx up = u / lat.omega1;
    rep.ereg_rq = Rq(std::exp(cplx(0.0, kTwoPi) * up), unit.q, s);
    cplx cont_unit = kronecker_continued(1, 0.0, up, 2.0, unit, s);
    rep.resid_ereg = std::abs(rep.ereg_rq - kPi * unit.area * unit.area * cont_unit);
    rep.resid_q_vs_cont = std::abs(rep.qseries - rep.continued);
    rep.resid_cont_vs_direct = std::abs(rep.continued - rep.direct);
    rep.resid_q_vs_direct = std::abs(rep.qseries - rep.direct);
    return rep;
}

// Residual of the functional equation relating s and a+1-s:
//   Gamma(s) K_a(x, x0, s) = A^{a+1-2s} Gamma(a+1-s) K_a(x0, x, a+1-s) <x, x0>
inline double functional_equation_residual(int a, cplx x, cplx x0, cplx s,
                                           const ComplexLattice& lat,
                                           const EvalSettings& set = {}) {
    cplx lhs = cgamma(s) * kronecker_continued(a, x, x0, s, lat, set);
    cplx rhs = std::exp((cplx(a + 1.0, 0.0) - 2.0 * s) * std::log(lat.area)) *
               cgamma(cplx(a + 1.0, 0.0) - s) *
               kronecker_continued(a, x0, x, cplx(a + 1.0, 0.0) - s, lat, set) *
               pairing(x, x0, lat);
    return std::abs(lhs - rhs);
}

} // namespace reglab
