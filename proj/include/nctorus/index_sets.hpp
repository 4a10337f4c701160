#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "sl2.hpp"

namespace nctorus {

/**
 * Arithmetic progression {n : n == residue (mod modulus)} or the empty set.
 * Invariant: modulus > 0 and 0 <= residue < modulus whenever non-empty.
 */
struct ArithProgression {
    std::int64_t residue = 0;
    std::int64_t modulus = 1;
    bool empty = false;

    static ArithProgression none() {
        ArithProgression p;
        p.empty = true;
        return p;
    }

    bool contains(std::int64_t n) const {
        return !empty && floor_mod(n - residue, modulus) == 0;
    }

    bool operator==(const ArithProgression& o) const {
        if (empty || o.empty) return empty == o.empty;
        return residue == o.residue && modulus == o.modulus;
    }
};

// Intersect n == r1 (mod m1) with n == r2 (mod m2); moduli positive.
inline ArithProgression crt_intersect(std::int64_t r1, std::int64_t m1,
                                      std::int64_t r2, std::int64_t m2) {
    r1 = floor_mod(r1, m1);
    r2 = floor_mod(r2, m2);
    Bezout bz = ext_gcd(m1, m2);
    std::int64_t diff = r2 - r1;
    if (diff % bz.g != 0) return ArithProgression::none();
    std::int64_t lcm = m1 / bz.g * m2;
    // r = r1 + m1 * ((diff/g) * x mod (m2/g)); 128-bit intermediate avoids overflow.
    std::int64_t m2g = m2 / bz.g;
    __int128 k = static_cast<__int128>(diff / bz.g) * bz.x;
    std::int64_t kmod = static_cast<std::int64_t>(k % m2g);
    if (kmod < 0) kmod += m2g;
    std::int64_t r = r1 + m1 * kmod;
    ArithProgression p;
    p.residue = floor_mod(r, lcm);
    p.modulus = lcm;
    return p;
}

/**
 * Solution set of the congruence pair attached to a factorization g1*g2:
 *   n == -c1*alpha  + c12*alpha1      (mod c12*c1)
 *   n ==  c2*d12*alpha - c12*d2*alpha2 (mod c12*c2)
 * Moduli are taken by absolute value; residues keep their signs.
 */
inline ArithProgression index_set(const SL2Mat& g1, const SL2Mat& g2,
                                  std::int64_t alpha1, std::int64_t alpha2,
                                  std::int64_t alpha) {
    SL2Mat g12 = compose(g1, g2);
    std::int64_t c1 = g1.c, c2 = g2.c, c12 = g12.c;
    if (c1 == 0 || c2 == 0 || c12 == 0)
        throw DegenerateDegree("index_set: all three degrees must be nonzero");
    std::int64_t m1 = std::llabs(checked_mul(c12, c1));
    std::int64_t m2 = std::llabs(checked_mul(c12, c2));
    std::int64_t r1 = checked_add(checked_mul(-c1, alpha), checked_mul(c12, alpha1));
    std::int64_t r2 = checked_add(checked_mul(checked_mul(c2, g12.d), alpha),
                                  checked_neg(checked_mul(checked_mul(c12, g2.d), alpha2)));
    return crt_intersect(r1, m1, r2, m2);
}

// Members n of p with |n| <= window, ascending.
inline std::vector<std::int64_t> enumerate(const ArithProgression& p, std::int64_t window) {
    std::vector<std::int64_t> out;
    if (p.empty || window < 0) return out;
    std::int64_t first = p.residue - ((p.residue + window) / p.modulus) * p.modulus;
    while (first > -window) first -= p.modulus;
    while (first < -window) first += p.modulus;
    for (std::int64_t n = first; n <= window; n += p.modulus) out.push_back(n);
    return out;
}

/**
 * Window check of the rebracketing bijection
 *   (m, n) |-> ((c3*m + c123*n)/c23, (c2*m - c1*n)/c23)
 * from U_{a23} I_{g1,g2g3}(a1,a23,a) x I_{g2,g3}(a2,a3,a23)
 * to   U_{a12} I_{g1g2,g3}(a12,a3,a) x I_{g1,g2}(a1,a2,a12).
 * Inverse is (m', n') |-> ((c1*m' + c123*n')/c12, (c2*m' - c3*n')/c12);
 * pairs whose partner falls outside the window are skipped on both sides.
 */
inline bool assoc_bijection_check(const SL2Mat& g1, const SL2Mat& g2, const SL2Mat& g3,
                                  std::int64_t a1, std::int64_t a2, std::int64_t a3,
                                  std::int64_t a, std::int64_t window) {
    SL2Mat g12 = compose(g1, g2), g23 = compose(g2, g3), g123 = compose(g12, g3);
    std::int64_t c1 = g1.c, c2 = g2.c, c3 = g3.c;
    std::int64_t c12 = g12.c, c23 = g23.c, c123 = g123.c;
    if (c1 == 0 || c2 == 0 || c3 == 0 || c12 == 0 || c23 == 0 || c123 == 0)
        throw DegenerateDegree("assoc_bijection_check: degenerate degree in triple");

    // c1*c3 + c2*c123 == c12*c23 exactly; the map has nonzero rational determinant.
    if (checked_add(checked_mul(c1, c3), checked_mul(c2, c123)) != checked_mul(c12, c23))
        throw InternalInvariantViolation("assoc_bijection_check: product identity failed");

    // Source: middle index a23 sits in slot 2 of the first factor, slot 3 of the second.
    auto in_source = [&](std::int64_t m, std::int64_t n) {
        for (std::int64_t t = 0; t < std::llabs(c23); ++t)
            if (index_set(g1, g23, a1, t, a).contains(m) &&
                index_set(g2, g3, a2, a3, t).contains(n))
                return true;
        return false;
    };
    // Target: middle index a12 sits in slot 1 of the first factor, slot 3 of the second.
    auto in_target = [&](std::int64_t m, std::int64_t n) {
        for (std::int64_t s = 0; s < std::llabs(c12); ++s)
            if (index_set(g12, g3, s, a3, a).contains(m) &&
                index_set(g1, g2, a1, a2, s).contains(n))
                return true;
        return false;
    };

    for (std::int64_t m = -window; m <= window; ++m) {
        for (std::int64_t n = -window; n <= window; ++n) {
            if (in_source(m, n)) {
                std::int64_t num1 = checked_add(checked_mul(c3, m), checked_mul(c123, n));
                std::int64_t num2 = checked_add(checked_mul(c2, m), checked_neg(checked_mul(c1, n)));
                if (num1 % c23 != 0 || num2 % c23 != 0) return false;
                if (!in_target(num1 / c23, num2 / c23)) return false;
            }
            if (in_target(m, n)) {
                std::int64_t pnum1 = checked_add(checked_mul(c1, m), checked_mul(c123, n));
                std::int64_t pnum2 = checked_add(checked_mul(c2, m), checked_neg(checked_mul(c3, n)));
                if (pnum1 % c12 != 0 || pnum2 % c12 != 0) return false;
                std::int64_t pm = pnum1 / c12, pn = pnum2 / c12;
                if (std::llabs(pm) > window || std::llabs(pn) > window) continue;
                if (!in_source(pm, pn)) return false;
            }
        }
    }
    return true;
}

}  // namespace nctorus
