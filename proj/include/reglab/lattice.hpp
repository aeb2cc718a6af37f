#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "reglab/errors.hpp"
#include "reglab/numeric.hpp"
#include "reglab/rational.hpp"

namespace reglab {

// Rank-2 lattice [omega1, omega2] in C.  Construction normalizes the basis so
// that tau = omega2/omega1 lies in the upper half-plane; the sign needed to
// get there is kept in original_delta for pairing-sign audits, and delta is
// the effective sign of the stored basis (always +1).
struct ComplexLattice {
    cplx omega1{1.0, 0.0};
    cplx omega2{0.0, 1.0};
    int delta = 1;          // sign for the stored basis
    int original_delta = 1; // sign of the basis as supplied
    cplx tau{0.0, 1.0};
    cplx q{0.0, 0.0};
    double area = 0.0;
};

inline ComplexLattice make_lattice(cplx omega1, cplx omega2) {
    if (std::abs(omega1) == 0.0 || std::abs(omega2) == 0.0)
        throw DegenerateLattice("zero generator");
    cplx ratio = omega2 / omega1;
    if (std::abs(ratio.imag()) < 1e-12 * (1.0 + std::abs(ratio)))
        throw DegenerateLattice("generators are R-linearly dependent");
    ComplexLattice lat;
    lat.original_delta = ratio.imag() > 0 ? 1 : -1;
    if (lat.original_delta < 0) {
        omega2 = -omega2;
        ratio = -ratio;
    }
    lat.omega1 = omega1;
    lat.omega2 = omega2;
    lat.delta = 1;
    lat.tau = ratio;
    lat.q = std::exp(cplx(0.0, kTwoPi) * lat.tau);
    lat.area = std::norm(omega1) * ratio.imag() / kPi;
    return lat;
}

// <x0, omega> = exp((conj(x0) w - x0 conj(w)) / A); the exponent is purely
// imaginary so the modulus is exactly 1 by construction.
inline cplx pairing(cplx x0, cplx omega, const ComplexLattice& lat) {
    double theta = 2.0 * (std::conj(x0) * omega).imag() / lat.area;
    return {std::cos(theta), std::sin(theta)};
}

inline ComplexLattice sl2_change(const ComplexLattice& lat, long long a, long long b,
                                 long long c, long long d) {
    if (a * d - b * c != 1)
        throw NotUnimodular("ad - bc = " + std::to_string(a * d - b * c));
    cplx w1 = double(d) * lat.omega1 + double(c) * lat.omega2;
    cplx w2 = double(b) * lat.omega1 + double(a) * lat.omega2;
    return make_lattice(w1, w2);
}

// Real coordinates of z in the lattice basis.
inline std::array<double, 2> basis_coords(cplx z, const ComplexLattice& lat) {
    double det = (std::conj(lat.omega1) * lat.omega2).imag();
    double x = (z * std::conj(lat.omega2)).imag() / -det;
    double y = (z * std::conj(lat.omega1)).imag() / det;
    return {x, y};
}

// Torsion point with exact rational coordinates (a, b), each reduced to [0,1):
// the point is a*omega1 + b*omega2 modulo the lattice.
struct TorsionCoord {
    Rat a, b;

    TorsionCoord() = default;
    TorsionCoord(Rat a_, Rat b_) : a(a_.mod1()), b(b_.mod1()) {}

    TorsionCoord negated() const { return TorsionCoord(-a, -b); }
    bool is_zero() const { return a.num == 0 && b.num == 0; }
    long long level() const { return lcm_ll(a.den, b.den); }

    cplx embed(const ComplexLattice& lat) const {
        return a.to_double() * lat.omega1 + b.to_double() * lat.omega2;
    }

    friend bool operator==(const TorsionCoord& p, const TorsionCoord& q) {
        return p.a == q.a && p.b == q.b;
    }
    friend bool operator<(const TorsionCoord& p, const TorsionCoord& q) {
        if (p.a != q.a) return p.a < q.a;
        return p.b < q.b;
    }
};

struct IntMat2 {
    long long m[2][2] = {{1, 0}, {0, 1}};

    long long det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    static IntMat2 identity() { return IntMat2{}; }

    friend IntMat2 operator*(const IntMat2& A, const IntMat2& B) {
        IntMat2 C;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                C.m[i][j] = A.m[i][0] * B.m[0][j] + A.m[i][1] * B.m[1][j];
        return C;
    }
};

// Smith normal form of a nonsingular 2x2 integer matrix: U*M*V = diag(d1,d2)
// with U, V unimodular and d1 | d2, d1, d2 > 0.
struct Snf2 {
    IntMat2 U, V;
    long long d1 = 1, d2 = 1;
};

inline Snf2 smith_normal_form(IntMat2 M) {
    if (M.det() == 0) throw NotAnIsogeny("singular integer matrix");
    IntMat2 U = IntMat2::identity(), V = IntMat2::identity();

    auto swap_rows = [&]() {
        for (int j = 0; j < 2; ++j) {
            std::swap(M.m[0][j], M.m[1][j]);
            std::swap(U.m[0][j], U.m[1][j]);
        }
    };
    auto swap_cols = [&]() {
        for (int i = 0; i < 2; ++i) {
            std::swap(M.m[i][0], M.m[i][1]);
            std::swap(V.m[i][0], V.m[i][1]);
        }
    };
    auto row_sub = [&](int i, int j, long long k) { // row i -= k * row j
        for (int c = 0; c < 2; ++c) {
            M.m[i][c] -= k * M.m[j][c];
            U.m[i][c] -= k * U.m[j][c];
        }
    };
    auto col_sub = [&](int i, int j, long long k) { // col i -= k * col j
        for (int r = 0; r < 2; ++r) {
            M.m[r][i] -= k * M.m[r][j];
            V.m[r][i] -= k * V.m[r][j];
        }
    };

    for (int iter = 0;; ++iter) {
        if (iter > 512) throw Error("smith_normal_form", "did not terminate");
        if (M.m[0][0] == 0) {
            if (M.m[1][0] != 0) swap_rows();
            else swap_cols();
            continue;
        }
        if (M.m[1][0] != 0) {
            row_sub(1, 0, M.m[1][0] / M.m[0][0]);
            if (M.m[1][0] != 0) swap_rows();
            continue;
        }
        if (M.m[0][1] != 0) {
            col_sub(1, 0, M.m[0][1] / M.m[0][0]);
            if (M.m[0][1] != 0) swap_cols();
            continue;
        }
        // diagonal; enforce divisibility d1 | d2
        if (M.m[1][1] % M.m[0][0] != 0) {
            col_sub(0, 1, -1); // col0 += col1, reintroduces an off-diagonal entry
            continue;
        }
        break;
    }

    auto flip_row = [&](int i) {
        for (int j = 0; j < 2; ++j) {
            M.m[i][j] = -M.m[i][j];
            U.m[i][j] = -U.m[i][j];
        }
    };
    if (M.m[0][0] < 0) flip_row(0);
    if (M.m[1][1] < 0) flip_row(1);

    Snf2 out;
    out.U = U;
    out.V = V;
    out.d1 = M.m[0][0];
    out.d2 = M.m[1][1];
    return out;
}

// Isogeny phi: C/source -> C/target given by multiplication by the scalar phi
// with phi*source contained in target; mat holds the integer coordinates of
// phi*omega_j(source) in the target basis.
struct IsogenyData {
    cplx scalar;
    ComplexLattice source, target;
    long long degree = 1;
    long long d1 = 1, d2 = 1;
    IntMat2 mat;       // column j = coords of phi*omega_j(source) in target basis
    IntMat2 snf_u, snf_v;
    std::array<cplx, 2> adapted_source; // basis with phi w1' = d1 w1'', phi w2' = d2 w2''
    std::array<cplx, 2> adapted_target;
};

inline IsogenyData elementary_divisors(cplx phi, const ComplexLattice& source,
                                       const ComplexLattice& target) {
    if (std::abs(phi) == 0.0) throw NotAnIsogeny("zero scalar");
    IsogenyData iso;
    iso.scalar = phi;
    iso.source = source;
    iso.target = target;
    for (int j = 0; j < 2; ++j) {
        cplx image = phi * (j == 0 ? source.omega1 : source.omega2);
        auto xy = basis_coords(image, target);
        iso.mat.m[0][j] = round_to_integer(xy[0], "isogeny coordinate");
        iso.mat.m[1][j] = round_to_integer(xy[1], "isogeny coordinate");
    }
    long long det = iso.mat.det();
    if (det == 0) throw NotAnIsogeny("degenerate image lattice");
    Snf2 snf = smith_normal_form(iso.mat);
    iso.d1 = snf.d1;
    iso.d2 = snf.d2;
    iso.degree = snf.d1 * snf.d2;
    iso.snf_u = snf.U;
    iso.snf_v = snf.V;
    // adapted bases: source basis * V and target basis * U^{-1}
    auto mul_basis = [](const ComplexLattice& lat, const IntMat2& T) {
        std::array<cplx, 2> out;
        out[0] = double(T.m[0][0]) * lat.omega1 + double(T.m[1][0]) * lat.omega2;
        out[1] = double(T.m[0][1]) * lat.omega1 + double(T.m[1][1]) * lat.omega2;
        return out;
    };
    long long du = snf.U.det(); // +-1
    IntMat2 uinv;
    uinv.m[0][0] = du * snf.U.m[1][1];
    uinv.m[0][1] = -du * snf.U.m[0][1];
    uinv.m[1][0] = -du * snf.U.m[1][0];
    uinv.m[1][1] = du * snf.U.m[0][0];
    iso.adapted_source = mul_basis(source, snf.V);
    iso.adapted_target = mul_basis(target, uinv);
    return iso;
}

// Coset representatives of phi^{-1}(target)/source: exactly degree-many
// pairwise distinct torsion points.
inline std::vector<TorsionCoord> kernel_cosets(const IsogenyData& iso) {
    std::vector<TorsionCoord> out;
    out.reserve(std::size_t(iso.degree));
    for (long long k1 = 0; k1 < iso.d1; ++k1) {
        for (long long k2 = 0; k2 < iso.d2; ++k2) {
            Rat y1(k1, iso.d1), y2(k2, iso.d2);
            Rat x1 = Rat(iso.snf_v.m[0][0]) * y1 + Rat(iso.snf_v.m[0][1]) * y2;
            Rat x2 = Rat(iso.snf_v.m[1][0]) * y1 + Rat(iso.snf_v.m[1][1]) * y2;
            out.emplace_back(x1, x2);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline ComplexLattice conjugate_lattice(const ComplexLattice& lat) {
    return make_lattice(std::conj(lat.omega1), -std::conj(lat.omega2));
}

// The homothetic copy [1, tau] of the lattice.
inline ComplexLattice unit_normalized(const ComplexLattice& lat) {
    return make_lattice(cplx(1.0, 0.0), lat.tau);
}

} // namespace reglab
