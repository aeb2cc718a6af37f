#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "reglab/errors.hpp"

namespace reglab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
// Single global threshold for recovering integers from floating coordinates.
inline constexpr double kIntegerRecoveryTol = 1e-9;

// Neumaier-compensated accumulator.  All lattice sums in this library go
// through one of these so that results are reproducible and carry no
// order-of-magnitude cancellation surprises.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

struct KahanCSum {
    KahanSum re, im;

    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

inline bool near_integer(double x, double tol = kIntegerRecoveryTol) {
    return std::abs(x - std::round(x)) < tol;
}

inline long long round_to_integer(double x, const char* what, double tol = kIntegerRecoveryTol) {
    double r = std::round(x);
    if (std::abs(x - r) >= tol)
        throw NotAnIsogeny(std::string(what) + ": residual " + std::to_string(std::abs(x - r)));
    return static_cast<long long>(r);
}

// FNV-1a, used to fingerprint configurations in reports.
inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace reglab
