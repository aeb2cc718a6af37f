#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "reglab/errors.hpp"
#include "reglab/numeric.hpp"

namespace reglab {

// Lanczos approximation (g = 7, 9 terms), good to ~1e-14 relative on the
// strip we use (|Im s| small, |Re s| < 10).
inline cplx cgamma(cplx z) {
    static const double g[9] = {
        0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
        771.32342877765313,    -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // reflection
        cplx s = std::sin(kPi * z);
        if (std::abs(s) == 0.0) throw PoleEncountered("gamma pole at nonpositive integer");
        return kPi / (s * cgamma(1.0 - z));
    }
    z -= 1.0;
    cplx x = g[0];
    for (int i = 1; i < 9; ++i) x += g[i] / (z + cplx(double(i), 0.0));
    cplx t = z + 7.5;
    return std::sqrt(kTwoPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// Exponential integral E1(x) = Gamma(0, x) for x > 0.
inline double expint_e1(double x) {
    if (x <= 0.0) throw Error("expint_e1", "requires x > 0");
    if (x > 700.0) return 0.0;
    if (x <= 1.0) {
        // -gamma - log x + sum (-1)^{k+1} x^k / (k k!)
        static const double euler_gamma = 0.57721566490153286060651209008240243;
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 64; ++k) {
            term *= x / k;
            double add = term / k;
            if ((k & 1) == 0) add = -add;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
        }
        return -euler_gamma - std::log(x) + sum;
    }
    // Lentz continued fraction.
    const double fpmin = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i < 300; ++i) {
        double a = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

// Upper incomplete gamma Gamma(s, x) for complex s and real x > 0.
inline cplx upper_inc_gamma(cplx s, double x) {
    if (x <= 0.0) throw Error("upper_inc_gamma", "requires x > 0");
    if (x > 700.0) return 0.0;
    if (std::abs(s - cplx(1.0, 0.0)) < 1e-13) return std::exp(-x);
    if (std::abs(s - cplx(2.0, 0.0)) < 1e-13) return (1.0 + x) * std::exp(-x);
    if (std::abs(s) < 1e-13) return expint_e1(x);

    if (x >= 1.0 && x >= s.real() + 1.0) {
        // continued fraction (modified Lentz)
        const double fpmin = std::numeric_limits<double>::min() / 1e-30;
        cplx b = x + 1.0 - s, c = 1.0 / fpmin, d = 1.0 / b, h = d;
        if (std::abs(b) < fpmin) { b = fpmin; d = 1.0 / b; h = d; }
        for (int i = 1; i < 400; ++i) {
            cplx a = -double(i) * (double(i) - s);
            b += 2.0;
            d = a * d + b;
            if (std::abs(d) < fpmin) d = fpmin;
            c = b + a / c;
            if (std::abs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            cplx del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) break;
        }
        return std::exp(-x + s * std::log(x)) * h;
    }

    // series for the lower function; the split needs Gamma(s) itself
    double dist = std::abs(s.imag()) + std::abs(s.real() - std::round(s.real()));
    if (s.real() < 0.5 && dist < 1e-9)
        throw PoleEncountered("incomplete gamma series near nonpositive-integer s");
    cplx term = 1.0 / s, sum = term;
    for (int n = 1; n < 400; ++n) {
        term *= x / (s + double(n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    cplx lower = sum * std::exp(-x + s * std::log(x));
    return cgamma(s) - lower;
}

} // namespace reglab
