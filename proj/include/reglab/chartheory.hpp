#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "reglab/errors.hpp"
#include "reglab/linalg.hpp"
#include "reglab/numeric.hpp"
#include "reglab/rational.hpp"

namespace reglab {

using GrpElem = std::vector<long long>;

// Finite abelian group as a product of cyclic factors; elements are integer
// vectors reduced componentwise mod the orders.
struct FiniteAbelianGroup {
    std::vector<long long> orders;

    FiniteAbelianGroup() = default;
    explicit FiniteAbelianGroup(std::vector<long long> ord) : orders(std::move(ord)) {
        for (long long n : orders)
            if (n < 1) throw Error("FiniteAbelianGroup", "cyclic order < 1");
    }

    std::size_t rank() const { return orders.size(); }
    long long size() const {
        long long s = 1;
        for (long long n : orders) s *= n;
        return s;
    }
    GrpElem zero() const { return GrpElem(orders.size(), 0); }
    GrpElem reduce(GrpElem v) const {
        for (std::size_t i = 0; i < orders.size(); ++i) {
            v[i] %= orders[i];
            if (v[i] < 0) v[i] += orders[i];
        }
        return v;
    }
    GrpElem add(const GrpElem& a, const GrpElem& b) const {
        GrpElem c(orders.size());
        for (std::size_t i = 0; i < orders.size(); ++i) c[i] = a[i] + b[i];
        return reduce(c);
    }
    GrpElem neg(const GrpElem& a) const {
        GrpElem c(orders.size());
        for (std::size_t i = 0; i < orders.size(); ++i) c[i] = -a[i];
        return reduce(c);
    }
    GrpElem element(long long index) const {
        GrpElem v(orders.size());
        for (std::size_t i = orders.size(); i-- > 0;) {
            v[i] = index % orders[i];
            index /= orders[i];
        }
        return v;
    }
    long long index_of(const GrpElem& v) const {
        long long idx = 0;
        for (std::size_t i = 0; i < orders.size(); ++i) idx = idx * orders[i] + v[i];
        return idx;
    }
    std::vector<GrpElem> elements() const {
        std::vector<GrpElem> out;
        out.reserve(std::size_t(size()));
        for (long long i = 0; i < size(); ++i) out.push_back(element(i));
        return out;
    }
};

// Character of a FiniteAbelianGroup.  Values are roots of unity carried as
// exact rational angles; the complex value is materialized on demand, so
// multiplicativity and restriction tests stay exact.
struct CharacterData {
    std::vector<long long> orders;
    std::vector<long long> exponents;

    Rat angle(const GrpElem& v) const {
        Rat a(0);
        for (std::size_t i = 0; i < orders.size(); ++i)
            a = a + Rat(exponents[i] * v[i], orders[i]);
        return a.mod1();
    }
    cplx value(const GrpElem& v) const {
        Rat a = angle(v);
        double t = kTwoPi * a.to_double();
        return {std::cos(t), std::sin(t)};
    }
    CharacterData conjugated() const {
        CharacterData c = *this;
        for (auto& e : c.exponents) e = -e;
        return c;
    }
};

inline std::vector<CharacterData> all_characters(const FiniteAbelianGroup& g) {
    std::vector<CharacterData> out;
    out.reserve(std::size_t(g.size()));
    for (long long i = 0; i < g.size(); ++i) {
        CharacterData c;
        c.orders = g.orders;
        c.exponents = g.element(i);
        out.push_back(std::move(c));
    }
    return out;
}

// Subgroup G of Gamma described by generator images; carries the abstract
// group, the embedding, and the inverse map on the image.
struct SubgroupEmbedding {
    FiniteAbelianGroup sub;                 // abstract G
    std::vector<GrpElem> gen_images;        // images in Gamma of the abstract generators
    std::map<GrpElem, GrpElem> image_to_abstract; // Gamma element -> abstract G element
    std::vector<GrpElem> image_elements;    // sorted

    static SubgroupEmbedding build(const FiniteAbelianGroup& gamma,
                                   const FiniteAbelianGroup& sub,
                                   const std::vector<GrpElem>& gen_images) {
        if (gen_images.size() != sub.rank())
            throw NotASubgroup("generator image count does not match subgroup rank");
        for (std::size_t k = 0; k < gen_images.size(); ++k) {
            GrpElem acc = gamma.zero();
            for (long long rep = 0; rep < sub.orders[k]; ++rep)
                acc = gamma.add(acc, gen_images[k]);
            if (acc != gamma.zero())
                throw NotASubgroup("generator image order does not divide the declared order");
        }
        SubgroupEmbedding e;
        e.sub = sub;
        e.gen_images = gen_images;
        for (long long i = 0; i < sub.size(); ++i) {
            GrpElem v = sub.element(i);
            GrpElem img = gamma.zero();
            for (std::size_t k = 0; k < gen_images.size(); ++k)
                for (long long rep = 0; rep < v[k]; ++rep)
                    img = gamma.add(img, gen_images[k]);
            auto [it, fresh] = e.image_to_abstract.emplace(img, v);
            if (!fresh) throw NotASubgroup("generator images do not embed the subgroup");
        }
        for (auto& [img, v] : e.image_to_abstract) e.image_elements.push_back(img);
        std::sort(e.image_elements.begin(), e.image_elements.end());
        return e;
    }

    bool contains(const GrpElem& g) const { return image_to_abstract.count(g) != 0; }
    const GrpElem& abstract_of(const GrpElem& g) const {
        auto it = image_to_abstract.find(g);
        if (it == image_to_abstract.end()) throw NotASubgroup("element not in subgroup");
        return it->second;
    }
};

// The [Gamma:G] characters of Gamma restricting to chi on G.
inline std::vector<CharacterData> extensions_of(const FiniteAbelianGroup& gamma,
                                                const SubgroupEmbedding& g,
                                                const CharacterData& chi) {
    std::vector<CharacterData> out;
    for (auto& psi : all_characters(gamma)) {
        bool ok = true;
        for (std::size_t k = 0; k < g.gen_images.size(); ++k) {
            GrpElem ek(g.sub.rank(), 0);
            ek[k] = 1;
            if (!(psi.angle(g.gen_images[k]) == chi.angle(ek))) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(psi);
    }
    if (out.size() != std::size_t(gamma.size() / g.sub.size()))
        throw NotASubgroup("restriction fibre has wrong size");
    return out;
}

// Coset system for G\Gamma: representatives (lexicographically smallest by
// default) and the factor set g(c, c') in G with g(c,c') c = c' c'' where
// G c = G c' G c'' in the quotient.
struct CosetSystem {
    FiniteAbelianGroup gamma;
    SubgroupEmbedding g;
    std::vector<GrpElem> reps;
    std::map<GrpElem, std::size_t> coset_of; // Gamma element -> rep index
    std::vector<std::vector<GrpElem>> factor_set; // in Gamma coordinates, lies in G

    static CosetSystem build(const FiniteAbelianGroup& gamma, const SubgroupEmbedding& g,
                             const std::vector<GrpElem>& chosen_reps = {}) {
        CosetSystem cs;
        cs.gamma = gamma;
        cs.g = g;
        // partition into cosets
        std::set<GrpElem> seen;
        std::vector<std::vector<GrpElem>> cosets;
        for (long long i = 0; i < gamma.size(); ++i) {
            GrpElem x = gamma.element(i);
            if (seen.count(x)) continue;
            std::vector<GrpElem> coset;
            for (auto& h : g.image_elements) {
                GrpElem y = gamma.add(x, h);
                coset.push_back(y);
                seen.insert(y);
            }
            std::sort(coset.begin(), coset.end());
            cosets.push_back(std::move(coset));
        }
        for (auto& coset : cosets) cs.reps.push_back(coset.front());
        for (std::size_t ci = 0; ci < cosets.size(); ++ci)
            for (auto& y : cosets[ci]) cs.coset_of[y] = ci;
        if (!chosen_reps.empty()) {
            if (chosen_reps.size() != cs.reps.size())
                throw NotASubgroup("wrong number of coset representatives");
            std::vector<GrpElem> newreps(cs.reps.size());
            std::vector<bool> used(cs.reps.size(), false);
            for (auto& r : chosen_reps) {
                auto it = cs.coset_of.find(gamma.reduce(r));
                if (it == cs.coset_of.end() || used[it->second])
                    throw NotASubgroup("chosen representatives do not hit each coset once");
                newreps[it->second] = gamma.reduce(r);
                used[it->second] = true;
            }
            cs.reps = newreps;
        }
        const std::size_t n = cs.reps.size();
        cs.factor_set.assign(n, std::vector<GrpElem>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                // c = reps[i], c' = reps[j]; c'' = rep of coset(c - c')
                GrpElem diff = gamma.add(cs.reps[i], gamma.neg(cs.reps[j]));
                GrpElem cpp = cs.reps[cs.coset_of.at(diff)];
                // g = c' + c'' - c, an element of G
                GrpElem gel = gamma.add(gamma.add(cs.reps[j], cpp), gamma.neg(cs.reps[i]));
                if (!g.contains(gel)) throw NotASubgroup("factor set left the subgroup");
                cs.factor_set[i][j] = gel;
            }
        }
        return cs;
    }
};

// Spectral side of the Dedekind determinant: product over the extensions
// chi_i of sum_gamma f(gamma) chi_i(gamma).
inline cplx dedekind_det_spectral(const FiniteAbelianGroup& gamma, const SubgroupEmbedding& g,
                                  const CharacterData& chi,
                                  const std::function<cplx(const GrpElem&)>& f) {
    cplx prod(1.0, 0.0);
    for (auto& psi : extensions_of(gamma, g, chi)) {
        KahanCSum s;
        for (long long i = 0; i < gamma.size(); ++i) {
            GrpElem x = gamma.element(i);
            s.add(f(x) * psi.value(x));
        }
        prod *= s.value();
    }
    return prod;
}

// Matrix side: det[ sum_{tau in G} chi(tau) f(tau c' c^{-1}) ] over the coset
// representatives of the system.
inline cplx dedekind_det_matrix(const FiniteAbelianGroup& gamma, const SubgroupEmbedding& g,
                                const CharacterData& chi,
                                const std::function<cplx(const GrpElem&)>& f,
                                const CosetSystem& cs) {
    const std::size_t n = cs.reps.size();
    CMatrix m = cmatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            GrpElem base = gamma.add(cs.reps[j], gamma.neg(cs.reps[i]));
            KahanCSum s;
            for (auto& tau : cs.g.image_elements) {
                cplx cv = chi.value(cs.g.abstract_of(tau));
                s.add(cv * f(gamma.add(tau, base)));
            }
            m[i][j] = s.value();
        }
    }
    return det(m);
}

// Equivalent assembly through the factor set: entry(c, c') =
// sum_{sigma in G} chi(sigma g(c, c')) f(sigma c''), used to audit the
// coset system.
inline cplx dedekind_det_matrix_factorset(const FiniteAbelianGroup& gamma,
                                          const SubgroupEmbedding& g, const CharacterData& chi,
                                          const std::function<cplx(const GrpElem&)>& f,
                                          const CosetSystem& cs) {
    const std::size_t n = cs.reps.size();
    CMatrix m = cmatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            GrpElem diff = gamma.add(cs.reps[i], gamma.neg(cs.reps[j]));
            GrpElem cpp = cs.reps[cs.coset_of.at(diff)];
            const GrpElem& gel = cs.factor_set[i][j];
            KahanCSum s;
            for (auto& sigma : cs.g.image_elements) {
                cplx cv = chi.value(cs.g.abstract_of(gamma.add(sigma, gel)));
                s.add(cv * f(gamma.add(sigma, cpp)));
            }
            m[i][j] = s.value();
        }
    }
    return det(m);
}

// Group convolution (f * h)(x) = sum_y f(y) h(x - y).
inline std::function<cplx(const GrpElem&)> group_convolve(
    const FiniteAbelianGroup& gamma, const std::function<cplx(const GrpElem&)>& f,
    const std::function<cplx(const GrpElem&)>& h) {
    return [&gamma, f, h](const GrpElem& x) {
        KahanCSum s;
        for (long long i = 0; i < gamma.size(); ++i) {
            GrpElem y = gamma.element(i);
            s.add(f(y) * h(gamma.add(x, gamma.neg(y))));
        }
        return s.value();
    };
}

} // namespace reglab
