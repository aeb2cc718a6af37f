#pragma once

#include <cmath>
#include <complex>

#include "reglab/numeric.hpp"

namespace reglab {

namespace detail {

// Li2 core on the region |z| <= 1, Re z <= 1/2, via the Bernoulli series in
// w = -log(1-z).
inline cplx li2_core(cplx z) {
    static const double bern[] = {
        1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0, 0.0,
        -1.0 / 30.0, 0.0, 5.0 / 66.0, 0.0, -691.0 / 2730.0, 0.0, 7.0 / 6.0, 0.0,
        -3617.0 / 510.0, 0.0, 43867.0 / 798.0, 0.0, -174611.0 / 330.0, 0.0,
        854513.0 / 138.0, 0.0, -236364091.0 / 2730.0, 0.0, 8553103.0 / 6.0, 0.0,
        -23749461029.0 / 870.0, 0.0, 8615841276005.0 / 14322.0};
    cplx w = -std::log(1.0 - z);
    cplx sum = 0.0, wp = w;
    double fact = 1.0;
    for (int k = 0; k < 31; ++k) {
        if (bern[k] != 0.0) {
            cplx term = bern[k] * wp / fact;
            sum += term;
            if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30) && k > 4) break;
        }
        wp *= w;
        fact *= double(k + 2);
    }
    return sum;
}

} // namespace detail

// Euler dilogarithm, principal branch; on the cut [1, oo) the boundary value
// from the upper side is returned.
inline cplx dilog(cplx z) {
    const double pi2_6 = kPi * kPi / 6.0;
    if (z == cplx(0.0, 0.0)) return 0.0;
    if (z == cplx(1.0, 0.0)) return pi2_6;

    if (z.imag() == 0.0 && z.real() > 1.0) {
        // upper-side boundary value
        double x = z.real();
        double lx = std::log(x);
        cplx inner = dilog(cplx(1.0 / x, 0.0));
        return cplx(kPi * kPi / 3.0 - 0.5 * lx * lx, kPi * lx) - inner;
    }

    if (std::abs(z) > 1.0) {
        // inversion: Li2(z) + Li2(1/z) = -pi^2/6 - log^2(-z)/2
        cplx lmz = std::log(-z);
        return -pi2_6 - 0.5 * lmz * lmz - dilog(1.0 / z);
    }
    if (z.real() > 0.5) {
        // reflection: Li2(z) + Li2(1-z) = pi^2/6 - log(z) log(1-z)
        return pi2_6 - std::log(z) * std::log(1.0 - z) - detail::li2_core(1.0 - z);
    }
    return detail::li2_core(z);
}

// Bloch-Wigner dilogarithm D(z) = Im Li2(z) + log|z| arg(1-z), single valued
// on C minus {0, 1}; returns 0 at the punctures and on the whole real line.
inline double bloch_wigner(cplx z) {
    if (z.imag() == 0.0) return 0.0;
    cplx omz = 1.0 - z;
    double d = dilog(z).imag() + std::log(std::abs(z)) * std::arg(omz);
    return d;
}

// Third Bernoulli polynomial.
inline double bernoulli3(double t) { return t * t * t - 1.5 * t * t + 0.5 * t; }

// J(z) = log|z| log|1-z|, with the removable values at z = 0, 1 set to 0.
inline double log_log_term(cplx z) {
    if (z == cplx(0.0, 0.0) || z == cplx(1.0, 0.0)) return 0.0;
    return std::log(std::abs(z)) * std::log(std::abs(1.0 - z));
}

} // namespace reglab
