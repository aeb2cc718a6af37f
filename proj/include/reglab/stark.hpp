#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reglab/divisors.hpp"
#include "reglab/heckefield.hpp"
#include "reglab/linalg.hpp"

namespace reglab {

// ---------------------------------------------------------------------------
// Rational recognition by continued fractions.
// ---------------------------------------------------------------------------
inline std::optional<std::pair<long long, long long>> recognize_rational(double x,
                                                                         long long max_den,
                                                                         double tol) {
    if (max_den < 1) throw BadConfig("max_den must be >= 1");
    double y = x;
    long long h0 = 1, k0 = 0, h1 = (long long)std::floor(y), k1 = 1;
    if (std::abs(x - double(h1)) < tol) return std::make_pair(h1, 1ll);
    for (int it = 0; it < 64; ++it) {
        double frac = y - std::floor(y);
        if (frac < 1e-18) break;
        y = 1.0 / frac;
        long long a = (long long)std::floor(y);
        long long h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den || k2 < 0) break;
        h0 = h1; k0 = k1; h1 = h2; k1 = k2;
        if (std::abs(x - double(h1) / double(k1)) < tol)
            return std::make_pair(h1, k1);
    }
    if (k1 >= 1 && k1 <= max_den && std::abs(x - double(h1) / double(k1)) < tol)
        return std::make_pair(h1, k1);
    return std::nullopt;
}

struct RecognitionResult {
    std::string kind = "none"; // none | rational | rational_sqrtD
    long long p = 0, q = 1;
    double residual = 0.0;
};

// Recognize x as p/q, or as (p/q) sqrt(|D|) when the first attempt fails.
inline RecognitionResult recognize_real(double x, int D, long long max_den, double tol) {
    RecognitionResult r;
    if (auto pq = recognize_rational(x, max_den, tol)) {
        r.kind = "rational";
        r.p = pq->first;
        r.q = pq->second;
        r.residual = std::abs(x - double(r.p) / double(r.q));
        return r;
    }
    double sD = std::sqrt(double(std::abs(D)));
    if (auto pq = recognize_rational(x / sD, max_den, tol)) {
        r.kind = "rational_sqrtD";
        r.p = pq->first;
        r.q = pq->second;
        r.residual = std::abs(x - double(r.p) / double(r.q) * sD);
        return r;
    }
    return r;
}

inline long long expected_zero_order(long long n, long long dimV) {
    if (n < 1 || dimV < 1) throw BadConfig("expected_zero_order needs n, dimV >= 1");
    return n * dimV;
}

// ---------------------------------------------------------------------------
// Block Laplace expansion: det [[p+ R, conj(p+ R)], [p- R, conj(p- R)]] equals
// kappa det(R) det(conj R) with kappa rational (h even) or rational * sqrt(D)
// (h odd).
// ---------------------------------------------------------------------------
struct LaplaceCheck {
    cplx kappa;
    std::string classification; // "rational" or "rational_sqrtD"
    RecognitionResult recognition;
    double class_residual = 0.0; // distance from the predicted line in C
};

inline LaplaceCheck laplace_block_check(const CMatrix& R, cplx pi_plus, cplx pi_minus, int D,
                                        long long max_den = 10000, double tol = 1e-6) {
    const std::size_t h = R.size();
    cplx dR = det(R);
    if (std::abs(dR) < 1e-12) throw SingularR("det R below 1e-12");
    CMatrix big = cmatrix(2 * h, 2 * h);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
            big[i][j] = pi_plus * R[i][j];
            big[i][j + h] = std::conj(pi_plus * R[i][j]);
            big[i + h][j] = pi_minus * R[i][j];
            big[i + h][j + h] = std::conj(pi_minus * R[i][j]);
        }
    }
    LaplaceCheck out;
    out.kappa = det(big) / (dR * std::conj(dR));
    double sD = std::sqrt(double(std::abs(D)));
    if (h % 2 == 0) {
        out.classification = "rational";
        out.class_residual = std::abs(out.kappa.imag());
        out.recognition = recognize_real(out.kappa.real(), D, max_den, tol);
    } else {
        out.classification = "rational_sqrtD";
        out.class_residual = std::abs(out.kappa.real());
        // kappa = t sqrt(D) = t i sqrt(|D|)
        if (auto pq = recognize_rational(out.kappa.imag() / sD, max_den, tol)) {
            out.recognition.kind = "rational";
            out.recognition.p = pq->first;
            out.recognition.q = pq->second;
            out.recognition.residual =
                std::abs(out.kappa.imag() / sD - double(pq->first) / double(pq->second));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Regulator blocks for the K-inside-F case: per Galois element tau an
// n x n matrix of 2x2 blocks [reg(xi_{i,+-}^tau)_{Phi_j}, ..._{conj Phi_j}].
// ---------------------------------------------------------------------------
struct GaloisElt {
    IntMat2 cm_matrix;   // CM multiplication realizing the torsion action
    cplx phase{1.0, 0.0}; // finite-character phase carried by the desk model
};

struct EmbeddingFamily {
    enum class Case { Big, Small } tag = Case::Big;
    std::vector<EmbeddingSpec> embeddings; // canonical ones carry lattices
    int r = 0, s = 0;                      // case Small shape
    std::vector<long long> gamma_j;        // case Small: conjugating elements
    std::optional<long long> gamma_out;    // case Small: fixed gamma outside N

    std::vector<const EmbeddingSpec*> canonical() const {
        std::vector<const EmbeddingSpec*> out;
        for (auto& e : embeddings)
            if (e.canonical) out.push_back(&e);
        return out;
    }
};

struct RegulatorBlocks {
    std::vector<CMatrix> per_tau; // aligned with the galois element list
    std::size_t half = 1;         // n/2 in case Big

    // max over tau, entries of |B[2i][2j+1] - conj(B[2i][2j])|
    double conjugate_column_residual() const {
        double r = 0;
        for (auto& b : per_tau)
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t j = 0; 2 * j + 1 < b[i].size(); ++j)
                    r = std::max(r, std::abs(b[i][2 * j + 1] - std::conj(b[i][2 * j])));
        return r;
    }
};

inline RegulatorBlocks build_blocks(const std::vector<SymbolDivisorData>& xi_plus,
                                    const std::vector<SymbolDivisorData>& xi_minus,
                                    const EmbeddingFamily& fam,
                                    const std::vector<GaloisElt>& galois,
                                    const EvalSettings& set = {},
                                    const RegulatorOptions& opt = {}) {
    if (fam.tag != EmbeddingFamily::Case::Big)
        throw Error("build_blocks", "only the K-inside-F block shape is assembled here");
    if (xi_plus.size() != xi_minus.size())
        throw Error("build_blocks", "mismatched symbol families");
    auto cols = fam.canonical();
    const std::size_t half = cols.size();
    if (xi_plus.size() != half)
        throw Error("build_blocks", "need one symbol pair per canonical embedding");
    RegulatorBlocks out;
    out.half = half;
    for (auto& g : galois) {
        CMatrix b = cmatrix(2 * half, 2 * half);
        for (std::size_t i = 0; i < half; ++i) {
            SymbolDivisorData sp = galois_act(xi_plus[i], g.cm_matrix);
            SymbolDivisorData sm = galois_act(xi_minus[i], g.cm_matrix);
            for (std::size_t j = 0; j < half; ++j) {
                cplx rp = g.phase * regulator_at_embedding(sp, cols[j]->lat, set, opt);
                cplx rm = g.phase * regulator_at_embedding(sm, cols[j]->lat, set, opt);
                b[2 * i][2 * j] = rp;
                b[2 * i][2 * j + 1] = std::conj(rp);
                b[2 * i + 1][2 * j] = rm;
                b[2 * i + 1][2 * j + 1] = std::conj(rm);
            }
        }
        out.per_tau.push_back(std::move(b));
    }
    return out;
}

// R(E, chi) = (-sqrt(D))^{dim(V) n/2} det( sum_tau chi(tau) B(tau) ),
// dim V = 1 so the tensor factor is the scalar chi(tau).
inline cplx stark_regulator_case_big(const std::vector<cplx>& chi_values,
                                     const RegulatorBlocks& blocks, int D) {
    if (chi_values.size() != blocks.per_tau.size())
        throw Error("stark_regulator_case_big", "chi values misaligned with blocks");
    const std::size_t n = blocks.per_tau.empty() ? 0 : blocks.per_tau.front().size();
    CMatrix m = cmatrix(n, n);
    for (std::size_t t = 0; t < blocks.per_tau.size(); ++t)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m[i][j] += chi_values[t] * blocks.per_tau[t][i][j];
    cplx msqrtD = -cplx(0.0, std::sqrt(double(std::abs(D))));
    cplx factor = 1.0;
    for (std::size_t k = 0; k < blocks.half; ++k) factor *= msqrtD;
    return factor * det(m);
}

// Case K not inside F: matrix coefficients from the real/complex embedding
// split (r real embeddings, s conjugate pairs, n = r + 2s).  The per-tau
// matrices carry rows i = 1..n and column pairs (Phi_j, conj Phi_j).
struct SmallCaseData {
    int r = 0, s = 0;
    std::vector<long long> gamma_j; // one per real embedding column
    std::optional<long long> gamma_out;
};

struct SmallCaseResult {
    CMatrix coefficients;
    cplx determinant;
};

inline SmallCaseResult stark_coefficients_case_small(const std::vector<cplx>& chi_values,
                                                     const std::vector<CMatrix>& reg_per_tau,
                                                     int D, const SmallCaseData& data) {
    if ((int)data.gamma_j.size() != data.r || (data.s > 0 && !data.gamma_out))
        throw MissingGammaData("case-2 family needs gamma_j per real column and a fixed gamma");
    const int n = data.r + 2 * data.s;
    if (reg_per_tau.size() != chi_values.size())
        throw Error("stark_coefficients_case_small", "chi values misaligned");
    cplx sqrtD(0.0, std::sqrt(double(std::abs(D))));
    CMatrix m = cmatrix(n, n);
    auto reg = [&](std::size_t t, int i, int j, bool bar) -> cplx {
        return reg_per_tau[t][std::size_t(i)][std::size_t(2 * j + (bar ? 1 : 0))];
    };
    for (std::size_t t = 0; t < chi_values.size(); ++t) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < data.r; ++j)
                m[i][j] += chi_values[t] * ((1.0 - sqrtD) * reg(t, i, j, false) +
                                            (1.0 + sqrtD) * reg(t, i, j, true));
            for (int j = data.r; j < data.r + data.s; ++j) {
                m[i][j] += chi_values[t] *
                           (reg(t, i, j, false) + reg(t, i, j, true) -
                            sqrtD * reg(t, i, j + data.s, false) +
                            sqrtD * reg(t, i, j + data.s, true));
                m[i][j + data.s] += chi_values[t] *
                                    (reg(t, i, j + data.s, false) + reg(t, i, j + data.s, true) -
                                     sqrtD * reg(t, i, j, false) + sqrtD * reg(t, i, j, true));
            }
        }
    }
    SmallCaseResult out;
    out.coefficients = m;
    out.determinant = det(m);
    return out;
}

// ---------------------------------------------------------------------------
// Leading Taylor coefficient c(E, chi) = L^(h)(0, conj(phi) x chi) *
// L^(h)(0, phi x chi) assembled from the partial derivatives through the
// Dedekind determinant; spectral and matrix routes are compared internally.
// ---------------------------------------------------------------------------
struct LeadingCoefficient {
    cplx value;
    cplx half_conjphi, half_phi;
    double dedekind_residual = 0.0;
};

inline LeadingCoefficient leading_coefficient(const CharacterData& chi,
                                              const HeckeCharData& phi,
                                              const RayClassGroupData& rc,
                                              const EvalSettings& set = {}) {
    const FiniteAbelianGroup& grp = rc.group();
    std::vector<cplx> ell_bar((std::size_t)grp.size()), ell((std::size_t)grp.size());
    for (long long i = 0; i < grp.size(); ++i) {
        PartialLSpec spec;
        spec.hecke = phi;
        spec.class_element = grp.element(i);
        spec.conjugated = false;
        ell_bar[(std::size_t)i] = partial_L_deriv0(spec, set);
        spec.conjugated = true;
        ell[(std::size_t)i] = partial_L_deriv0(spec, set);
    }
    // G = Gamma: the induced decomposition is chi itself; both Dedekind routes
    // must agree on each half.
    FiniteAbelianGroup gamma = grp;
    std::vector<GrpElem> gens;
    for (std::size_t k = 0; k < gamma.rank(); ++k) {
        GrpElem e = gamma.zero();
        e[k] = 1;
        gens.push_back(e);
    }
    SubgroupEmbedding full = SubgroupEmbedding::build(gamma, gamma, gens);
    CosetSystem cs = CosetSystem::build(gamma, full);
    auto fbar = [&](const GrpElem& g) { return ell_bar[(std::size_t)gamma.index_of(g)]; };
    auto fphi = [&](const GrpElem& g) { return ell[(std::size_t)gamma.index_of(g)]; };

    LeadingCoefficient out;
    cplx sbar = dedekind_det_spectral(gamma, full, chi, fbar);
    cplx mbar = dedekind_det_matrix(gamma, full, chi, fbar, cs);
    cplx sphi = dedekind_det_spectral(gamma, full, chi, fphi);
    cplx mphi = dedekind_det_matrix(gamma, full, chi, fphi, cs);
    out.dedekind_residual = std::max(std::abs(sbar - mbar), std::abs(sphi - mphi));
    if (out.dedekind_residual > 1e-8)
        throw Error("leading_coefficient", "Dedekind determinant routes disagree");
    out.half_conjphi = sbar;
    out.half_phi = sphi;
    out.value = sbar * sphi;
    return out;
}

} // namespace reglab
