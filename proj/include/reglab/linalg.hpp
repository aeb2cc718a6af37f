#pragma once

#include <cmath>
#include <vector>

#include "reglab/numeric.hpp"

namespace reglab {

using CMatrix = std::vector<std::vector<cplx>>;

inline CMatrix cmatrix(std::size_t n, std::size_t m) {
    return CMatrix(n, std::vector<cplx>(m, cplx(0.0, 0.0)));
}

// Determinant by LU with partial pivoting; matrices here are tiny.
inline cplx det(CMatrix a) {
    const std::size_t n = a.size();
    cplx d(1.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (std::abs(a[piv][k]) == 0.0) return 0.0;
        if (piv != k) {
            std::swap(a[piv], a[k]);
            d = -d;
        }
        d *= a[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            cplx f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return d;
}

} // namespace reglab
