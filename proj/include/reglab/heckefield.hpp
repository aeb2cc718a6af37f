#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "reglab/chartheory.hpp"
#include "reglab/kronecker.hpp"
#include "reglab/quadint.hpp"

namespace reglab {

// ---------------------------------------------------------------------------
// Residue ring O_K / (g), canonical representatives via a triangular basis of
// the sublattice g O_K.
// ---------------------------------------------------------------------------
struct ResidueRing {
    ImagQuadField K;
    QuadInt g;
    // triangular sublattice basis: f1 = (t, 0), f2 = (f2x, gy)
    long long t = 1, gy = 1, f2x = 0;

    ResidueRing(const ImagQuadField& field, const QuadInt& modulus) : K(field), g(modulus) {
        if (g.is_zero()) throw ZeroModulus("modulus generator is zero");
        QuadInt c1 = g;
        QuadInt c2 = K.mul(g, QuadInt{0, 1});
        // combine columns to make one basis vector with zero w-component
        long long a = c1.y, b = c2.y;
        long long u = 1, v = 0, gcd_y = a;
        {
            // extended gcd on (a, b)
            long long u0 = 1, v0 = 0, u1 = 0, v1 = 1, r0 = a, r1 = b;
            while (r1 != 0) {
                long long q = r0 / r1;
                long long r2 = r0 - q * r1;
                long long u2 = u0 - q * u1, v2 = v0 - q * v1;
                r0 = r1; r1 = r2;
                u0 = u1; u1 = u2;
                v0 = v1; v1 = v2;
            }
            gcd_y = r0; u = u0; v = v0;
            if (gcd_y < 0) { gcd_y = -gcd_y; u = -u; v = -v; }
        }
        if (gcd_y == 0) throw ZeroModulus("degenerate modulus lattice");
        QuadInt w2{u * c1.x + v * c2.x, gcd_y};
        long long det = c1.x * c2.y - c1.y * c2.x; // = +- N(g)
        t = std::llabs(det) / gcd_y;
        gy = gcd_y;
        f2x = w2.x;
    }

    long long size() const { return t * gy; }

    QuadInt reduce(QuadInt p) const {
        long long k = p.y >= 0 ? p.y / gy : -((-p.y + gy - 1) / gy);
        p.y -= k * gy;
        p.x -= k * f2x;
        p.x %= t;
        if (p.x < 0) p.x += t;
        return p;
    }

    long long index_of(const QuadInt& reduced) const { return reduced.x * gy + reduced.y; }

    QuadInt mul(const QuadInt& a, const QuadInt& b) const { return reduce(K.mul(a, b)); }
    bool is_one(const QuadInt& r) const { return r == reduce(QuadInt{1, 0}); }
};

// ---------------------------------------------------------------------------
// Structure of a small finite abelian group given by explicit elements and a
// multiplication rule: invariant factors, generators, discrete logarithms.
// ---------------------------------------------------------------------------
struct AbelianStructure {
    FiniteAbelianGroup fab;            // invariant factors, largest first
    std::vector<QuadInt> generators;   // realizing the factors
    std::map<QuadInt, GrpElem> dlog;   // element -> exponent vector
};

namespace detail {

inline AbelianStructure abelian_structure(
    const std::vector<QuadInt>& elems, const QuadInt& id,
    const std::function<QuadInt(const QuadInt&, const QuadInt&)>& mul) {
    const long long n = (long long)elems.size();
    auto order_of = [&](const QuadInt& x) {
        QuadInt acc = x;
        long long k = 1;
        while (!(acc == id)) {
            acc = mul(acc, x);
            ++k;
            if (k > n) throw Error("abelian_structure", "element order exceeded group size");
        }
        return k;
    };
    std::map<QuadInt, long long> orders;
    for (auto& x : elems) orders[x] = order_of(x);

    // invariant factors (largest first) from p-primary element counts:
    // #{x : x^{p^j} = 1} = p^{sum_i min(lambda_i, j)} determines the p-type.
    std::vector<long long> inv_factors;
    {
        std::vector<long long> primes;
        long long nn = n;
        for (long long p = 2; p * p <= nn; ++p)
            if (nn % p == 0) {
                primes.push_back(p);
                while (nn % p == 0) nn /= p;
            }
        if (nn > 1) primes.push_back(nn);

        std::map<long long, std::vector<int>> ptypes; // prime -> partition lambda
        std::size_t maxlen = 0;
        for (long long p : primes) {
            std::vector<int> conj_lambda; // entry j-1 = #{i : lambda_i >= j}
            long long prev = 1;
            for (long long pj = p; pj <= n * p; pj *= p) {
                long long cnt = 0;
                for (auto& [x, o] : orders)
                    if (pj % o == 0) ++cnt;
                long long ratio = cnt / prev;
                int steps = 0;
                while (ratio > 1) { ratio /= p; ++steps; }
                if (steps == 0) break;
                conj_lambda.push_back(steps);
                prev = cnt;
            }
            std::vector<int> lambda; // conjugate partition
            for (int i = 1;; ++i) {
                int c = 0;
                for (int v : conj_lambda)
                    if (v >= i) ++c;
                if (c == 0) break;
                lambda.push_back(c);
            }
            ptypes[p] = lambda;
            maxlen = std::max(maxlen, lambda.size());
        }
        std::vector<long long> dk(maxlen, 1);
        for (auto& [p, lambda] : ptypes)
            for (std::size_t k = 0; k < lambda.size(); ++k) {
                long long pk = 1;
                for (int i = 0; i < lambda[k]; ++i) pk *= p;
                dk[k] *= pk;
            }
        inv_factors = dk;
        if (inv_factors.empty()) inv_factors.push_back(1);
    }

    // find generators realizing the factors, depth-first with backtracking
    std::vector<QuadInt> gens(inv_factors.size());
    std::function<bool(std::size_t, std::set<QuadInt>)> dfs =
        [&](std::size_t k, std::set<QuadInt> have) -> bool {
        if (k == inv_factors.size()) return true;
        long long want = inv_factors[k];
        for (auto& x : elems) {
            if (orders[x] != want) continue;
            // close have + <x>
            std::set<QuadInt> closure = have;
            std::vector<QuadInt> frontier(closure.begin(), closure.end());
            QuadInt xp = x;
            std::vector<QuadInt> xpow;
            for (long long e = 1; e <= want; ++e) {
                xpow.push_back(xp);
                xp = mul(xp, x);
            }
            std::set<QuadInt> bigger;
            for (auto& h : closure)
                for (auto& xe : xpow) bigger.insert(mul(h, xe));
            if ((long long)bigger.size() != (long long)have.size() * want) continue;
            gens[k] = x;
            if (dfs(k + 1, std::move(bigger))) return true;
        }
        return false;
    };
    std::set<QuadInt> start{id};
    if (inv_factors.size() == 1 && inv_factors[0] == 1) {
        gens.clear();
        AbelianStructure s;
        s.fab = FiniteAbelianGroup({1});
        s.generators = {id};
        s.dlog[id] = GrpElem{0};
        return s;
    }
    if (!dfs(0, start)) throw Error("abelian_structure", "no generator system found");

    AbelianStructure s;
    s.fab = FiniteAbelianGroup(inv_factors);
    s.generators = gens;
    // discrete logs by full enumeration
    std::function<void(std::size_t, QuadInt, GrpElem&)> fill = [&](std::size_t k, QuadInt acc,
                                                                   GrpElem& v) {
        if (k == gens.size()) {
            s.dlog[acc] = v;
            return;
        }
        QuadInt cur = acc;
        for (long long e = 0; e < inv_factors[k]; ++e) {
            v[k] = e;
            fill(k + 1, cur, v);
            cur = mul(cur, gens[k]);
        }
    };
    GrpElem v(gens.size(), 0);
    fill(0, id, v);
    if ((long long)s.dlog.size() != n)
        throw Error("abelian_structure", "generator system does not span");
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Ray class group modulo a principal modulus (g), class number one:
// (O_K/g)^x modulo the image of the unit group.
// ---------------------------------------------------------------------------
struct RayClassGroupData {
    ImagQuadField K{-4};
    std::shared_ptr<ResidueRing> ring;
    std::vector<QuadInt> unit_elements;    // units of the residue ring, canonical reps
    AbelianStructure unit_group;           // structure of (O_K/g)^x
    std::vector<QuadInt> unit_image;       // subgroup: images of the field units
    AbelianStructure quotient;             // the ray class group
    std::map<QuadInt, QuadInt> coset_key;  // residue -> lex-min member of its unit-image coset
    std::map<QuadInt, QuadInt> section;    // coset key -> chosen residue representative
    bool units_injective = true;           // field units have distinct images mod g

    const FiniteAbelianGroup& group() const { return quotient.fab; }

    // representative residue (canonical lift in O_K) of a ray class
    QuadInt class_representative(const GrpElem& cls) const {
        QuadInt key = coset_min(ring->reduce(QuadInt{1, 0}));
        for (std::size_t k = 0; k < quotient.generators.size(); ++k)
            for (long long e = 0; e < cls[k]; ++e)
                key = coset_min(ring->mul(key, quotient.generators[k]));
        auto it = section.find(key);
        if (it == section.end()) throw Error("RayClassGroupData", "missing section entry");
        return it->second;
    }

    QuadInt coset_min(const QuadInt& residue) const {
        auto it = coset_key.find(residue);
        if (it == coset_key.end()) throw NotCoprime("residue is not a unit modulo g");
        return it->second;
    }

    GrpElem class_of_residue(const QuadInt& residue) const {
        auto it = quotient.dlog.find(coset_min(residue));
        if (it == quotient.dlog.end()) throw Error("RayClassGroupData", "missing dlog entry");
        return it->second;
    }
};

inline RayClassGroupData ray_class_group(const ImagQuadField& K, const QuadInt& g) {
    if (g.is_zero()) throw ZeroModulus("zero modulus");
    if (K.is_unit(g)) throw ZeroModulus("modulus is a unit");
    RayClassGroupData rc;
    rc.K = K;
    rc.ring = std::make_shared<ResidueRing>(K, g);
    const ResidueRing& R = *rc.ring;

    // collect units of the residue ring
    std::vector<QuadInt> residues;
    for (long long x = 0; x < R.t; ++x)
        for (long long y = 0; y < R.gy; ++y) residues.push_back(QuadInt{x, y});
    QuadInt one = R.reduce(QuadInt{1, 0});
    std::set<QuadInt> unit_set;
    for (auto& r : residues) {
        for (auto& s : residues) {
            if (R.mul(r, s) == one) {
                unit_set.insert(r);
                break;
            }
        }
    }
    rc.unit_elements.assign(unit_set.begin(), unit_set.end());
    auto mul = [&R](const QuadInt& a, const QuadInt& b) { return R.mul(a, b); };
    rc.unit_group = detail::abelian_structure(rc.unit_elements, one, mul);

    // subgroup generated by the images of the field units
    std::set<QuadInt> img;
    std::set<QuadInt> distinct;
    for (auto& u : K.units()) {
        QuadInt r = R.reduce(u);
        distinct.insert(r);
        img.insert(r);
    }
    rc.units_injective = distinct.size() == K.units().size();
    // close under multiplication
    for (bool grew = true; grew;) {
        grew = false;
        std::vector<QuadInt> cur(img.begin(), img.end());
        for (auto& a : cur)
            for (auto& b : cur)
                if (img.insert(R.mul(a, b)).second) grew = true;
    }
    rc.unit_image.assign(img.begin(), img.end());

    // cosets of the unit image inside the unit group
    std::set<QuadInt> seen;
    for (auto& u : rc.unit_elements) {
        if (seen.count(u)) continue;
        std::vector<QuadInt> coset;
        for (auto& h : rc.unit_image) {
            QuadInt y = R.mul(u, h);
            coset.push_back(y);
            seen.insert(y);
        }
        std::sort(coset.begin(), coset.end());
        for (auto& y : coset) rc.coset_key[y] = coset.front();
        rc.section[coset.front()] = coset.front();
    }
    // quotient group on coset keys
    std::vector<QuadInt> keys;
    for (auto& [k, v] : rc.section) keys.push_back(k);
    auto qmul = [&rc, &R](const QuadInt& a, const QuadInt& b) {
        return rc.coset_key.at(R.mul(a, b));
    };
    rc.quotient = detail::abelian_structure(keys, rc.coset_key.at(one), qmul);
    return rc;
}

// Artin symbol of the principal ideal (lambda) in the ray class group.
inline GrpElem artin_symbol(const QuadInt& lambda, const RayClassGroupData& rc) {
    QuadInt r = rc.ring->reduce(lambda);
    return rc.class_of_residue(r); // throws NotCoprime if not a unit
}

// ---------------------------------------------------------------------------
// Hecke characters phi((lambda)) = phi_fin(lambda) * lambda with phi_fin a
// character of (O_K/g)^x restricting to u -> u^{-1} on the field units.
// ---------------------------------------------------------------------------
struct HeckeCharData {
    ImagQuadField field{-4};
    QuadInt modulus;
    std::shared_ptr<RayClassGroupData> rc; // level-g data
    CharacterData phi_fin;                 // on the unit group structure
    int index = 0;                         // position in the enumerated list

    Rat phi_fin_angle(const QuadInt& lambda) const {
        QuadInt r = rc->ring->reduce(lambda);
        auto it = rc->unit_group.dlog.find(r);
        if (it == rc->unit_group.dlog.end())
            throw NotCoprime("phi_fin at a residue not coprime to the modulus");
        return phi_fin.angle(it->second);
    }
    cplx phi_fin_value(const QuadInt& lambda) const {
        double t = kTwoPi * phi_fin_angle(lambda).to_double();
        return {std::cos(t), std::sin(t)};
    }
    // phi((lambda)) as a complex number
    cplx value(const QuadInt& lambda) const {
        return phi_fin_value(lambda) * field.embed(lambda);
    }
    // true when phi_fin(lambda) is a root of unity lying in O_K
    std::optional<QuadInt> phi_fin_as_unit(const QuadInt& lambda) const {
        Rat a = phi_fin_angle(lambda);
        long long nu = (long long)field.units().size();
        Rat scaled = a * Rat(nu);
        if (!scaled.is_integer()) return std::nullopt;
        // unit with angle a
        for (auto& u : field.units())
            if (field.unit_angle(u) == a) return u;
        return std::nullopt;
    }
};

inline std::vector<HeckeCharData> hecke_characters(const ImagQuadField& K, const QuadInt& g,
                                                   std::shared_ptr<RayClassGroupData> rc = {}) {
    if (!rc) rc = std::make_shared<RayClassGroupData>(ray_class_group(K, g));
    std::vector<HeckeCharData> out;
    int idx = 0;
    for (auto& chi : all_characters(rc->unit_group.fab)) {
        bool ok = true;
        for (auto& u : K.units()) {
            QuadInt r = rc->ring->reduce(u);
            Rat want = (-K.unit_angle(u)).mod1(); // angle of u^{-1}
            auto it = rc->unit_group.dlog.find(r);
            if (it == rc->unit_group.dlog.end()) { ok = false; break; }
            if (!(chi.angle(it->second) == want)) { ok = false; break; }
        }
        if (ok) {
            HeckeCharData h;
            h.field = K;
            h.modulus = g;
            h.rc = rc;
            h.phi_fin = chi;
            h.index = idx++;
            out.push_back(std::move(h));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Partial L-functions attached to a ray class.
// ---------------------------------------------------------------------------
struct PartialLSpec {
    HeckeCharData hecke;
    std::shared_ptr<RayClassGroupData> level; // defaults to the character's level
    GrpElem class_element;
    bool conjugated = false; // false: L(s, conj(phi), gamma); true: L(s, phi, gamma)

    const RayClassGroupData& level_rc() const { return level ? *level : *hecke.rc; }
};

// Direct Dirichlet sum over integral ideals with the given Artin symbol,
// one canonical generator per ideal.
inline cplx partial_L_direct(const PartialLSpec& spec, cplx s, long long norm_bound) {
    if (!(s.real() > 1.75))
        throw ConvergenceRegion("direct ideal sum needs Re(s) > 1.75");
    const ImagQuadField& K = spec.hecke.field;
    const RayClassGroupData& rc = spec.level_rc();
    const ResidueRing& R = *rc.ring;

    // per-residue cache: unit? class index, phi value
    const long long nres = R.size();
    std::vector<int> cls(nres, -1);
    std::vector<cplx> phiv(nres);
    for (auto& u : rc.unit_elements) {
        long long i = R.index_of(u);
        cls[i] = (int)rc.group().index_of(rc.class_of_residue(u));
        phiv[i] = spec.hecke.phi_fin_value(u);
    }
    const int want = (int)rc.group().index_of(spec.class_element);

    KahanCSum acc;
    for (auto& lam : canonical_elements_up_to_norm(K, norm_bound)) {
        long long i = R.index_of(R.reduce(lam));
        if (cls[i] != want) continue;
        cplx phi = phiv[i] * K.embed(lam);
        if (!spec.conjugated) phi = std::conj(phi);
        double N = double(K.norm(lam));
        acc.add(phi * std::exp(-s * std::log(N)));
    }
    return acc.value();
}

namespace detail {

inline ComplexLattice modulus_lattice(const ImagQuadField& K, const QuadInt& g) {
    cplx gg = K.embed(g);
    return make_lattice(gg, gg * K.embed_w());
}

} // namespace detail

// The same partial L-function realized as a Kronecker-Eisenstein value: with
// r the chosen class representative,
//   L(s, conj(phi), gamma) = conj(phi_fin(r)) K_1(r, 0, s, g O_K),
// evaluated by the analytically continued route (valid for all s).
inline cplx partial_L_kronecker(const PartialLSpec& spec, cplx s, const EvalSettings& set = {}) {
    const ImagQuadField& K = spec.hecke.field;
    const RayClassGroupData& rc = spec.level_rc();
    if (!rc.units_injective)
        throw BadConfig("modulus too small: field units collide modulo g");
    QuadInt r = rc.class_representative(spec.class_element);
    ComplexLattice latg = detail::modulus_lattice(K, rc.ring->g);
    if (spec.conjugated) {
        cplx base = std::conj(spec.hecke.phi_fin_value(r)) *
                    kronecker_continued(1, K.embed(r), 0.0, std::conj(s), latg, set);
        return std::conj(base);
    }
    return std::conj(spec.hecke.phi_fin_value(r)) *
           kronecker_continued(1, K.embed(r), 0.0, s, latg, set);
}

// Derivative at s = 0 via the functional equation: the value is carried by
// K_{2,1} on the modulus lattice,
//   L'(0, conj(phi), gamma) = conj(phi_fin(r)) A(gL)^2 K_{2,1}(r, gL).
// When phi_fin(r) is a unit of O_K this equals the normal form
//   (1/conj(nu)) A(L)^2 K_{2,1}(phi((r)) nu, L),  nu = 1/g,
// by the homothety rule; the phase is kept outside K_{2,1} so the lattice
// coset stays inside O_K for every character.
inline cplx partial_L_deriv0(const PartialLSpec& spec, const EvalSettings& set = {}) {
    const ImagQuadField& K = spec.hecke.field;
    const RayClassGroupData& rc = spec.level_rc();
    if (!rc.units_injective)
        throw BadConfig("modulus too small: field units collide modulo g");
    QuadInt r = rc.class_representative(spec.class_element);
    ComplexLattice latg = detail::modulus_lattice(K, rc.ring->g);
    cplx val = std::conj(spec.hecke.phi_fin_value(r)) * latg.area * latg.area *
               k21(K.embed(r), latg, set);
    return spec.conjugated ? std::conj(val) : val;
}

// pi = 1 - conj(phi)((P)) chi([P]) for a principal prime generator P.
inline cplx twist_factor(const HeckeCharData& hecke, const CharacterData& chi,
                         const QuadInt& P) {
    GrpElem cls = artin_symbol(P, *hecke.rc); // throws NotCoprime when invalid
    return cplx(1.0, 0.0) - std::conj(hecke.value(P)) * chi.value(cls);
}

// Scan ideals of norm <= bound for psi((lambda)) = -1 mod N; congruences are
// tested exactly in O_K, and values outside O_K cannot satisfy them.
struct TypeRWitness {
    QuadInt lambda;
    QuadInt psi_value;
};

inline std::optional<TypeRWitness> type_R_scan(const HeckeCharData& psi, const QuadInt& N,
                                               long long norm_bound) {
    const ImagQuadField& K = psi.field;
    if (K.is_unit(N)) return std::nullopt; // vacuous congruence
    for (auto& lam : canonical_elements_up_to_norm(K, norm_bound)) {
        QuadInt r = psi.rc->ring->reduce(lam);
        auto it = psi.rc->unit_group.dlog.find(r);
        if (it == psi.rc->unit_group.dlog.end()) continue; // not coprime to the modulus
        auto u = psi.phi_fin_as_unit(lam);
        if (!u) continue; // value not in O_K
        QuadInt value = K.mul(*u, lam);
        QuadInt vp1 = K.add(value, QuadInt{1, 0});
        if (K.divides(N, vp1)) return TypeRWitness{lam, value};
    }
    return std::nullopt;
}

// A(Lambda_A) = |Omega|^2 sqrt(|D|) / (2 pi N(A)) for a principal ideal A.
inline double area_of_class_lattice(const ImagQuadField& K, cplx Omega, const QuadInt& Agen) {
    if (Agen.is_zero()) throw ZeroModulus("zero ideal generator");
    return std::norm(Omega) * std::sqrt(double(-K.D)) / (kTwoPi * double(K.norm(Agen)));
}

} // namespace reglab
