#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "reglab/kronecker.hpp"
#include "reglab/lattice.hpp"

namespace reglab {

// Finite formal integer combination of torsion points, exact rational
// coordinates throughout.  Entries with multiplicity 0 are pruned.
struct TorsionDivisor {
    std::map<TorsionCoord, long long> entries;

    void add(const TorsionCoord& p, long long mult) {
        if (mult == 0) return;
        auto it = entries.find(p);
        if (it == entries.end()) {
            entries.emplace(p, mult);
        } else {
            it->second += mult;
            if (it->second == 0) entries.erase(it);
        }
    }

    long long degree() const {
        long long d = 0;
        for (auto& [p, m] : entries) d += m;
        return d;
    }

    long long torsion_level() const {
        long long n = 1;
        for (auto& [p, m] : entries) n = lcm_ll(n, p.level());
        return n;
    }

    TorsionDivisor negated() const {
        TorsionDivisor out;
        for (auto& [p, m] : entries) out.add(p.negated(), m);
        return out;
    }

    bool is_negation_symmetric() const {
        for (auto& [p, m] : entries) {
            auto it = entries.find(p.negated());
            if (it == entries.end() || it->second != m) return false;
        }
        return true;
    }

    friend TorsionDivisor operator+(const TorsionDivisor& x, const TorsionDivisor& y) {
        TorsionDivisor out = x;
        for (auto& [p, m] : y.entries) out.add(p, m);
        return out;
    }

    friend bool operator==(const TorsionDivisor& x, const TorsionDivisor& y) {
        return x.entries == y.entries;
    }
};

// Convolution sum_{Q,Q'} ord_Q(f) ord_{Q'}(g) (Q - Q'), exact.
inline TorsionDivisor convolve(const TorsionDivisor& f, const TorsionDivisor& g) {
    TorsionDivisor out;
    for (auto& [q, mq] : f.entries)
        for (auto& [qp, mqp] : g.entries)
            out.add(TorsionCoord(q.a - qp.a, q.b - qp.b), mq * mqp);
    return out;
}

// Abel-type sanity check for divisors of functions: degree 0 and the
// multiplicity-weighted point sum lands in the lattice.
inline bool is_principal(const TorsionDivisor& d) {
    if (d.degree() != 0) return false;
    Rat sa(0), sb(0);
    for (auto& [p, m] : d.entries) {
        sa = sa + Rat(m) * p.a;
        sb = sb + Rat(m) * p.b;
    }
    return sa.is_integer() && sb.is_integer();
}

struct SymbolDivisorData {
    TorsionDivisor f_div, g_div;
    TorsionDivisor convolution; // derived

    SymbolDivisorData() = default;
    SymbolDivisorData(TorsionDivisor f, TorsionDivisor g)
        : f_div(std::move(f)), g_div(std::move(g)), convolution(convolve(f_div, g_div)) {}

    static SymbolDivisorData from_convolution(TorsionDivisor conv) {
        SymbolDivisorData s;
        s.convolution = std::move(conv);
        return s;
    }

    // both function divisors pass the Abel-type principality test
    bool function_divisors_principal() const {
        return is_principal(f_div) && is_principal(g_div);
    }
};

// Multiplication of torsion points by an integer matrix (the CM action in the
// lattice basis), exact.  Requires det(M) invertible modulo the torsion level.
inline TorsionDivisor act_on_divisor(const TorsionDivisor& d, const IntMat2& cm) {
    long long level = d.torsion_level();
    long long det = ((cm.det() % level) + level) % level;
    if (std::gcd(det, level) != 1)
        throw NonInvertibleMultiplier("matrix determinant " + std::to_string(cm.det()) +
                                      " shares a factor with torsion level " +
                                      std::to_string(level));
    TorsionDivisor out;
    for (auto& [p, m] : d.entries) {
        Rat na = Rat(cm.m[0][0]) * p.a + Rat(cm.m[0][1]) * p.b;
        Rat nb = Rat(cm.m[1][0]) * p.a + Rat(cm.m[1][1]) * p.b;
        out.add(TorsionCoord(na, nb), m);
    }
    return out;
}

inline SymbolDivisorData galois_act(const SymbolDivisorData& sym, const IntMat2& cm) {
    SymbolDivisorData out;
    out.f_div = act_on_divisor(sym.f_div, cm);
    out.g_div = act_on_divisor(sym.g_div, cm);
    out.convolution = act_on_divisor(sym.convolution, cm);
    return out;
}

// Pullback of a divisor along an isogeny: each point is replaced by its full
// preimage set (all kernel translates of one preimage); degree scales by deg.
inline TorsionDivisor pullback_divisor(const IsogenyData& iso, const TorsionDivisor& d) {
    auto ker = kernel_cosets(iso);
    long long det = iso.mat.det();
    // M^{-1} = adj(M)/det, exact rationals
    auto preimage = [&](const TorsionCoord& q) {
        Rat x = (Rat(iso.mat.m[1][1]) * q.a - Rat(iso.mat.m[0][1]) * q.b) / Rat(det);
        Rat y = (-Rat(iso.mat.m[1][0]) * q.a + Rat(iso.mat.m[0][0]) * q.b) / Rat(det);
        return TorsionCoord(x, y);
    };
    TorsionDivisor out;
    for (auto& [q, m] : d.entries) {
        TorsionCoord p0 = preimage(q);
        for (auto& t : ker) out.add(TorsionCoord(p0.a + t.a, p0.b + t.b), m);
    }
    return out;
}

// Regulator of a symbol at one embedding:
//   sum_P a_P A^2([1,tau]) K_{2,1}(u_P / omega1, [1,tau])
// over the convolution divisor.  Entries at the origin hit the logarithmic
// singularity of R_q; they are dropped by default and rejected in strict mode.
struct RegulatorOptions {
    bool strict_origin = false;
};

inline cplx regulator_at_embedding(const SymbolDivisorData& sym, const ComplexLattice& lat,
                                   const EvalSettings& set = {},
                                   const RegulatorOptions& opt = {},
                                   int* dropped_origin_entries = nullptr) {
    ComplexLattice unit = unit_normalized(lat);
    double a2 = unit.area * unit.area;
    KahanCSum acc;
    for (auto& [p, m] : sym.convolution.entries) {
        if (p.is_zero()) {
            if (opt.strict_origin)
                throw SingularEntry("convolution entry at the origin with multiplicity " +
                                    std::to_string(m));
            if (dropped_origin_entries) ++*dropped_origin_entries;
            continue;
        }
        cplx u = p.embed(unit); // coordinates are basis independent
        acc.add(double(m) * a2 * k21(u, unit, set));
    }
    return acc.value();
}

// Embedding family entry for the lambda map; conjugate labels are evaluated
// as complex conjugates of their partner rather than recomputed.
struct EmbeddingSpec {
    std::string label;
    ComplexLattice lat;
    std::string conj_partner;
    bool canonical = true; // false: value is conj of partner's value
};

struct MinkowskiVector {
    std::map<std::string, cplx> values;

    // max |z_conj(label) - conj(z_label)| over conjugate pairs
    double conjugation_residual(const std::vector<EmbeddingSpec>& fam) const {
        double r = 0;
        for (auto& e : fam) {
            auto a = values.find(e.label);
            auto b = values.find(e.conj_partner);
            if (a == values.end() || b == values.end()) continue;
            r = std::max(r, std::abs(b->second - std::conj(a->second)));
        }
        return r;
    }
};

inline MinkowskiVector lambda_map(const SymbolDivisorData& sym,
                                  const std::vector<EmbeddingSpec>& embeddings,
                                  const EvalSettings& set = {},
                                  const RegulatorOptions& opt = {}) {
    MinkowskiVector out;
    for (auto& e : embeddings) {
        if (!e.canonical) continue;
        out.values[e.label] = regulator_at_embedding(sym, e.lat, set, opt);
    }
    for (auto& e : embeddings) {
        if (e.canonical) continue;
        auto it = out.values.find(e.conj_partner);
        if (it == out.values.end())
            throw Error("lambda_map", "embedding list not closed under conjugation");
        out.values[e.label] = std::conj(it->second);
    }
    return out;
}

} // namespace reglab
