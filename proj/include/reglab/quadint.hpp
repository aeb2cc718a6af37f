#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "reglab/errors.hpp"
#include "reglab/numeric.hpp"
#include "reglab/rational.hpp"

namespace reglab {

// Integers a + b w of a class-number-one imaginary quadratic field.
// w = sqrt(D/4) when D is even, w = (1 + sqrt(D))/2 when D is odd.
struct QuadInt {
    long long x = 0, y = 0;

    friend bool operator==(const QuadInt& p, const QuadInt& q) {
        return p.x == q.x && p.y == q.y;
    }
    friend bool operator<(const QuadInt& p, const QuadInt& q) {
        if (p.x != q.x) return p.x < q.x;
        return p.y < q.y;
    }
    bool is_zero() const { return x == 0 && y == 0; }
};

struct ImagQuadField {
    int D = -4; // field discriminant, class number one

    explicit ImagQuadField(int disc = -4) : D(disc) {
        static const int allowed[] = {-3, -4, -7, -8, -11, -19, -43, -67, -163};
        bool ok = false;
        for (int a : allowed) ok = ok || (a == disc);
        if (!ok) throw BadConfig("discriminant must be one of the nine class-number-one values");
    }

    bool odd_disc() const { return ((-D) % 4) != 0; }

    QuadInt mul(const QuadInt& p, const QuadInt& q) const {
        long long ac = p.x * q.x, bd = p.y * q.y, cross = p.x * q.y + p.y * q.x;
        if (odd_disc()) {
            // w^2 = w + (D-1)/4
            long long c = (long long)(D - 1) / 4;
            return {ac + bd * c, cross + bd};
        }
        long long c = (long long)D / 4; // w^2 = D/4
        return {ac + bd * c, cross};
    }
    QuadInt add(const QuadInt& p, const QuadInt& q) const { return {p.x + q.x, p.y + q.y}; }
    QuadInt sub(const QuadInt& p, const QuadInt& q) const { return {p.x - q.x, p.y - q.y}; }
    QuadInt neg(const QuadInt& p) const { return {-p.x, -p.y}; }
    QuadInt conj(const QuadInt& p) const {
        if (odd_disc()) return {p.x + p.y, -p.y}; // conj(w) = 1 - w
        return {p.x, -p.y};
    }
    long long norm(const QuadInt& p) const {
        if (odd_disc()) return p.x * p.x + p.x * p.y + p.y * p.y * (1 - (long long)D) / 4;
        return p.x * p.x + p.y * p.y * (-(long long)D) / 4;
    }
    cplx embed_w() const {
        double s = std::sqrt(double(-D));
        if (odd_disc()) return {0.5, 0.5 * s};
        return {0.0, 0.5 * s};
    }
    cplx embed(const QuadInt& p) const {
        return double(p.x) + double(p.y) * embed_w();
    }

    // Roots of unity of the field.
    std::vector<QuadInt> units() const {
        if (D == -4) return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        if (D == -3) return {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
        return {{1, 0}, {-1, 0}};
    }

    // Exact angle of a unit as a fraction of a full turn.
    Rat unit_angle(const QuadInt& u) const {
        auto us = units();
        long long n = (long long)us.size();
        // units are the powers of the first primitive one in cyclic order
        QuadInt prim = (n == 2) ? QuadInt{-1, 0} : us[1];
        QuadInt acc{1, 0};
        for (long long k = 0; k < n; ++k) {
            if (acc == u) return Rat(k, n).mod1();
            acc = mul(acc, prim);
        }
        throw Error("unit_angle", "not a unit");
    }

    bool is_unit(const QuadInt& p) const { return norm(p) == 1; }

    // Canonical sector for dedup of generators modulo units:
    // argument in [0, 2*pi/#units).
    bool canonical_generator(const QuadInt& p) const {
        if (p.is_zero()) return false;
        if (D == -4 || D == -3) return p.x >= 1 && p.y >= 0;
        return p.y > 0 || (p.y == 0 && p.x > 0);
    }
    QuadInt canonicalize(const QuadInt& p) const {
        if (p.is_zero()) return p;
        for (auto& u : units()) {
            QuadInt q = mul(p, u);
            if (canonical_generator(q)) return q;
        }
        throw Error("canonicalize", "no canonical associate found");
    }

    // Exact divisibility test d | p in the ring of integers.
    bool divides(const QuadInt& d, const QuadInt& p) const {
        if (d.is_zero()) return p.is_zero();
        QuadInt num = mul(p, conj(d));
        long long n = norm(d);
        return num.x % n == 0 && num.y % n == 0;
    }

    std::string print(const QuadInt& p) const {
        const char* sym = (D == -4) ? "i" : "w";
        if (p.y == 0) return std::to_string(p.x);
        std::string ys = (p.y == 1) ? sym : (p.y == -1 ? std::string("-") + sym
                                                       : std::to_string(p.y) + sym);
        if (p.x == 0) return ys;
        return std::to_string(p.x) + (p.y > 0 ? "+" : "") + ys;
    }

    QuadInt parse(const std::string& s) const {
        // forms: "3", "-2", "i", "-i", "2+i", "2-3i", "1+2w", "w"
        std::string t;
        for (char c : s)
            if (!isspace((unsigned char)c)) t += c;
        if (t.empty()) throw BadConfig("empty ring element");
        auto sym = (D == -4) ? 'i' : 'w';
        // split at the last +/- that is not leading
        long long a = 0, b = 0;
        auto parse_part = [&](const std::string& part) {
            if (part.empty()) return;
            if (part.back() == sym || part.back() == 'i' || part.back() == 'w') {
                std::string coef = part.substr(0, part.size() - 1);
                if (coef.empty() || coef == "+") b += 1;
                else if (coef == "-") b -= 1;
                else b += std::stoll(coef);
            } else {
                a += std::stoll(part);
            }
        };
        std::size_t start = 0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (t[i] == '+' || t[i] == '-') {
                parse_part(t.substr(start, i - start));
                start = i;
            }
        }
        parse_part(t.substr(start));
        return {a, b};
    }
};

// Enumerate elements with norm <= bound lying in the canonical sector,
// deterministic order (y ascending, then x ascending).
inline std::vector<QuadInt> canonical_elements_up_to_norm(const ImagQuadField& K,
                                                          long long bound) {
    std::vector<QuadInt> out;
    double absD = double(-K.D);
    long long ymax = (long long)std::floor(std::sqrt(4.0 * double(bound) / absD)) + 1;
    long long ymin = 0;
    if (K.D != -4 && K.D != -3) ymin = 0; // sector includes y = 0 row (x > 0)
    for (long long y = ymin; y <= ymax; ++y) {
        // norm condition solves a quadratic in x
        double r2;
        double xc;
        if (K.odd_disc()) {
            r2 = double(bound) - absD / 4.0 * double(y) * double(y);
            xc = -0.5 * double(y);
        } else {
            r2 = double(bound) - absD / 4.0 * double(y) * double(y);
            xc = 0.0;
        }
        if (r2 < 0) continue;
        double r = std::sqrt(r2);
        long long xlo = (long long)std::ceil(xc - r - 1e-9);
        long long xhi = (long long)std::floor(xc + r + 1e-9);
        for (long long x = xlo; x <= xhi; ++x) {
            QuadInt p{x, y};
            if (!K.canonical_generator(p)) continue;
            if (K.norm(p) > bound) continue;
            out.push_back(p);
        }
    }
    return out;
}

} // namespace reglab
