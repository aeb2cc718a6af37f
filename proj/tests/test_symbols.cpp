#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "reglab/divisors.hpp"

using namespace reglab;
using Catch::Approx;

namespace {
const ComplexLattice zi = make_lattice(1.0, cplx(0.0, 1.0));

TorsionDivisor random_divisor(std::mt19937_64& rng, long long level, int entries) {
    std::uniform_int_distribution<long long> num(0, level - 1), mult(-3, 3);
    TorsionDivisor d;
    for (int k = 0; k < entries; ++k)
        d.add(TorsionCoord(Rat(num(rng), level), Rat(num(rng), level)), mult(rng));
    return d;
}
} // namespace

TEST_CASE("convolution expands the double sum") {
    TorsionCoord P(Rat(1, 3), Rat(0));
    TorsionDivisor f;
    f.add(P, 1);
    f.add(TorsionCoord(Rat(0), Rat(0)), -1);
    TorsionDivisor conv = convolve(f, f);
    // 2(0) - (P) - (-P)
    REQUIRE(conv.entries.size() == 3);
    CHECK(conv.entries.at(TorsionCoord(Rat(0), Rat(0))) == 2);
    CHECK(conv.entries.at(P) == -1);
    CHECK(conv.entries.at(P.negated()) == -1);

    TorsionDivisor empty;
    CHECK(convolve(f, empty).entries.empty());
    CHECK(convolve(empty, f).entries.empty());
}

TEST_CASE("convolution is bilinear and multiplies degrees") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
        TorsionDivisor f = random_divisor(rng, 6, 3);
        TorsionDivisor g = random_divisor(rng, 6, 3);
        TorsionDivisor h = random_divisor(rng, 6, 2);
        CHECK(convolve(f, g).degree() == f.degree() * g.degree());
        // additivity in the first slot
        CHECK(convolve(f + h, g) == convolve(f, g) + convolve(h, g));
        // integer scaling
        TorsionDivisor f3;
        for (auto& [p, m] : f.entries) f3.add(p, 3 * m);
        TorsionDivisor lhs = convolve(f3, g);
        TorsionDivisor rhs;
        for (auto& [p, m] : convolve(f, g).entries) rhs.add(p, 3 * m);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("principality check") {
    TorsionCoord P(Rat(1, 3), Rat(1, 3));
    TorsionDivisor d;
    d.add(P, 3);
    d.add(TorsionCoord(Rat(0), Rat(0)), -3);
    CHECK(is_principal(d));

    TorsionDivisor e;
    e.add(P, 1);
    e.add(TorsionCoord(Rat(0), Rat(0)), -1);
    CHECK_FALSE(is_principal(e));

    TorsionDivisor empty;
    CHECK(is_principal(empty));
}

TEST_CASE("galois action on divisors") {
    TorsionDivisor d;
    d.add(TorsionCoord(Rat(1, 5), Rat(2, 5)), 1);
    d.add(TorsionCoord(Rat(3, 5), Rat(0)), -2);
    SymbolDivisorData sym = SymbolDivisorData::from_convolution(d);

    IntMat2 id;
    CHECK(galois_act(sym, id).convolution == d);

    IntMat2 neg;
    neg.m[0][0] = -1;
    neg.m[1][1] = -1;
    CHECK(galois_act(sym, neg).convolution == d.negated());
}

TEST_CASE("galois action composes and rejects non-invertible multipliers") {
    std::mt19937_64 rng(32);
    TorsionDivisor d = random_divisor(rng, 7, 4);
    auto mk = [](long long p, long long q) {
        // multiplication by p + qi on Z[i] coordinates
        IntMat2 m;
        m.m[0][0] = p;
        m.m[0][1] = -q;
        m.m[1][0] = q;
        m.m[1][1] = p;
        return m;
    };
    IntMat2 a = mk(2, 1), b = mk(1, 1);
    CHECK(act_on_divisor(act_on_divisor(d, b), a) == act_on_divisor(d, a * b));

    TorsionDivisor four;
    four.add(TorsionCoord(Rat(1, 4), Rat(0)), 1);
    CHECK_THROWS_AS(act_on_divisor(four, mk(2, 0)), NonInvertibleMultiplier);
    CHECK_THROWS_AS(act_on_divisor(four, mk(1, 1)), NonInvertibleMultiplier); // norm 2
    CHECK_NOTHROW(act_on_divisor(four, mk(2, 1))); // norm 5, invertible mod 4
}

TEST_CASE("pullback of divisors") {
    IsogenyData idmap = elementary_divisors(1.0, zi, zi);
    TorsionDivisor d;
    d.add(TorsionCoord(Rat(1, 3), Rat(2, 3)), 2);
    CHECK(pullback_divisor(idmap, d) == d);

    IsogenyData two = elementary_divisors(2.0, zi, zi);
    TorsionDivisor pd;
    pd.add(TorsionCoord(Rat(1, 3), Rat(0)), 1);
    pd.add(TorsionCoord(Rat(0), Rat(0)), -1);
    TorsionDivisor pb = pullback_divisor(two, pd);
    CHECK(pb.entries.size() == 8);
    CHECK(pb.degree() == 0);
    // every entry maps forward to the source point
    for (auto& [p, m] : pb.entries) {
        Rat a2 = (Rat(2) * p.a).mod1();
        Rat b2 = (Rat(2) * p.b).mod1();
        bool hits_P = (a2 == Rat(1, 3) && b2 == Rat(0));
        bool hits_0 = (a2 == Rat(0) && b2 == Rat(0));
        CHECK((hits_P || hits_0));
        CHECK(m == (hits_P ? 1 : -1));
    }
}

TEST_CASE("regulator compatibility with pullback: lambda(phi^* xi) = phi lambda(xi)") {
    EvalSettings set;
    // a symbol with explicit function divisors
    TorsionDivisor fdiv, gdiv;
    fdiv.add(TorsionCoord(Rat(1, 7), Rat(2, 7)), 1);
    fdiv.add(TorsionCoord(Rat(0), Rat(0)), -1);
    gdiv.add(TorsionCoord(Rat(3, 7), Rat(1, 7)), 1);
    gdiv.add(TorsionCoord(Rat(0), Rat(0)), -1);
    SymbolDivisorData sym(fdiv, gdiv);
    cplx base = regulator_at_embedding(sym, zi, set);
    for (cplx phi : {cplx(2.0, 0.0), cplx(1.0, 1.0), cplx(0.0, 1.0)}) {
        IsogenyData iso = elementary_divisors(phi, zi, zi);
        // the symbol pullback pulls back both function divisors
        SymbolDivisorData pulled(pullback_divisor(iso, fdiv), pullback_divisor(iso, gdiv));
        // its convolution is deg(phi) times the divisor pullback of the base
        TorsionDivisor scaled;
        for (auto& [p, m] : pullback_divisor(iso, sym.convolution).entries)
            scaled.add(p, m * iso.degree);
        CHECK(pulled.convolution == scaled);
        cplx lhs = regulator_at_embedding(pulled, zi, set);
        CHECK(std::abs(lhs - phi * base) < 1e-9 * (1.0 + std::abs(base)));
        // divisor-level counterpart: pullback scales by phi/deg(phi)
        cplx dlhs = regulator_at_embedding(
            SymbolDivisorData::from_convolution(pullback_divisor(iso, sym.convolution)),
            zi, set);
        CHECK(std::abs(dlhs - phi / double(iso.degree) * base) <
              1e-9 * (1.0 + std::abs(base)));
    }
}

TEST_CASE("regulator vanishing on symmetric and two-torsion divisors") {
    EvalSettings set;
    TorsionDivisor sym2;
    sym2.add(TorsionCoord(Rat(1, 2), Rat(0)), 5);
    sym2.add(TorsionCoord(Rat(1, 2), Rat(1, 2)), -3);
    CHECK(std::abs(regulator_at_embedding(SymbolDivisorData::from_convolution(sym2), zi,
                                          set)) < 1e-9);

    std::mt19937_64 rng(33);
    TorsionDivisor d = random_divisor(rng, 9, 4);
    TorsionDivisor symm = d + d.negated();
    CHECK(symm.is_negation_symmetric());
    CHECK(std::abs(regulator_at_embedding(SymbolDivisorData::from_convolution(symm), zi,
                                          set)) < 1e-9);
}

TEST_CASE("seven-torsion pair doubles the K21 value") {
    EvalSettings set;
    TorsionCoord P(Rat(1, 7), Rat(2, 7));
    TorsionDivisor d;
    d.add(P, 1);
    d.add(P.negated(), -1);
    cplx reg =
        regulator_at_embedding(SymbolDivisorData::from_convolution(d), zi, set);
    ComplexLattice unit = unit_normalized(zi);
    cplx expect = 2.0 * unit.area * unit.area *
                  kronecker_continued(1, 0.0, P.embed(unit), 2.0, unit, set);
    CHECK(std::abs(reg - expect) < 1e-11);
    EvalSettings direct;
    direct.shell_radius = 300;
    cplx dval = 2.0 * unit.area * unit.area *
                kronecker_direct(1, 0.0, P.embed(unit), 2.0, unit, direct);
    CHECK(std::abs(reg - dval) < 1e-4);
}

TEST_CASE("origin entries are dropped or rejected") {
    EvalSettings set;
    TorsionDivisor d;
    d.add(TorsionCoord(Rat(0), Rat(0)), 2);
    d.add(TorsionCoord(Rat(1, 5), Rat(0)), 1);
    SymbolDivisorData sym = SymbolDivisorData::from_convolution(d);
    int dropped = 0;
    RegulatorOptions lax;
    cplx v = regulator_at_embedding(sym, zi, set, lax, &dropped);
    CHECK(dropped == 1);
    CHECK(std::abs(v) > 0.0);
    RegulatorOptions strict;
    strict.strict_origin = true;
    CHECK_THROWS_AS(regulator_at_embedding(sym, zi, set, strict), SingularEntry);
}

TEST_CASE("lambda map lands in Minkowski space and respects the module structure") {
    EvalSettings set;
    std::vector<EmbeddingSpec> fam = {
        {"Phi1", zi, "Phi1bar", true},
        {"Phi1bar", conjugate_lattice(zi), "Phi1", false},
    };
    TorsionDivisor d;
    d.add(TorsionCoord(Rat(1, 5), Rat(1, 5)), 2);
    d.add(TorsionCoord(Rat(2, 5), Rat(0)), -1);
    SymbolDivisorData sym = SymbolDivisorData::from_convolution(d);
    MinkowskiVector v = lambda_map(sym, fam, set);
    CHECK(v.conjugation_residual(fam) < 1e-10);

    // negation-symmetric symbol -> zero vector
    SymbolDivisorData symm =
        SymbolDivisorData::from_convolution(d + d.negated());
    MinkowskiVector vz = lambda_map(symm, fam, set);
    for (auto& [label, z] : vz.values) CHECK(std::abs(z) < 1e-9);

    // O_K-module structure: pulling back a symbol by alpha scales lambda by
    // alpha (at symbol level the convolution gains a factor deg over the
    // divisor pullback)
    for (cplx alpha : {cplx(0.0, 1.0), cplx(1.0, 1.0)}) {
        IsogenyData iso = elementary_divisors(alpha, zi, zi);
        TorsionDivisor scaled;
        for (auto& [p, m] : pullback_divisor(iso, d).entries)
            scaled.add(p, m * iso.degree);
        SymbolDivisorData pulled = SymbolDivisorData::from_convolution(scaled);
        MinkowskiVector vp = lambda_map(pulled, fam, set);
        CHECK(std::abs(vp.values["Phi1"] - alpha * v.values["Phi1"]) < 1e-9);
        CHECK(vp.conjugation_residual(fam) < 1e-10);
    }
}

TEST_CASE("galois equivariance of the lambda components") {
    EvalSettings set;
    // order-2 action: multiplication by a residue representative squares to
    // the identity on the 3-torsion data
    auto mk = [](long long p, long long q) {
        IntMat2 m;
        m.m[0][0] = p;
        m.m[0][1] = -q;
        m.m[1][0] = q;
        m.m[1][1] = p;
        return m;
    };
    IntMat2 g = mk(1, 1); // norm 2, invertible mod 3
    TorsionDivisor d;
    d.add(TorsionCoord(Rat(1, 3), Rat(0)), 1);
    d.add(TorsionCoord(Rat(2, 3), Rat(0)), -1);
    SymbolDivisorData sym = SymbolDivisorData::from_convolution(d);
    SymbolDivisorData once = galois_act(sym, g);
    SymbolDivisorData twice = galois_act(once, g);
    // g^2 = 2i has norm 4 = 1 mod 3, and 2i = i(1+i)^2 acts like the unit i
    // composed with itself; on 3-torsion (1+i)^4 = -4 = -1 mod 3
    SymbolDivisorData four = galois_act(twice, g * g);
    CHECK(four.convolution == sym.convolution.negated());
    cplx r0 = regulator_at_embedding(sym, zi, set);
    cplx r4 = regulator_at_embedding(four, zi, set);
    CHECK(std::abs(r4 + r0) < 1e-10);
}
