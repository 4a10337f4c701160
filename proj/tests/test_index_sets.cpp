#include <gtest/gtest.h>

#include <random>
#include <set>

#include "nctorus/index_sets.hpp"

using namespace nctorus;

namespace {

SL2Mat random_sl2(std::mt19937_64& rng, std::int64_t bound) {
    std::uniform_int_distribution<std::int64_t> dist(-bound, bound);
    for (;;) {
        std::int64_t c = dist(rng), d = dist(rng);
        if (c == 0 && d == 0) continue;
        Bezout bz = ext_gcd(d, -c);
        if (bz.g != 1) continue;
        return SL2Mat(bz.x, bz.y, c, d);
    }
}

// Direct congruence scan; the oracle index_set must reproduce.
std::set<std::int64_t> brute_index_set(const SL2Mat& g1, const SL2Mat& g2,
                                       std::int64_t a1, std::int64_t a2, std::int64_t a,
                                       std::int64_t window) {
    SL2Mat g12 = compose(g1, g2);
    std::set<std::int64_t> out;
    for (std::int64_t n = -window; n <= window; ++n) {
        bool c1ok = floor_mod(n - (-g1.c * a + g12.c * a1), std::llabs(g12.c * g1.c)) == 0;
        bool c2ok = floor_mod(n - (g2.c * g12.d * a - g12.c * g2.d * a2),
                              std::llabs(g12.c * g2.c)) == 0;
        if (c1ok && c2ok) out.insert(n);
    }
    return out;
}

const SL2Mat L(1, 0, 1, 1);

}  // namespace

TEST(IndexSets, UnipotentExamples) {
    // c1 = c2 = 1, c12 = 2: residues track the output leg.
    ArithProgression p0 = index_set(L, L, 0, 0, 0);
    EXPECT_FALSE(p0.empty);
    EXPECT_EQ(p0.modulus, 2);
    EXPECT_EQ(p0.residue, 0);

    ArithProgression p1 = index_set(L, L, 0, 0, 1);
    EXPECT_EQ(p1.modulus, 2);
    EXPECT_EQ(p1.residue, 1);

    SL2Mat g2(1, 0, 2, 1);
    ArithProgression q = index_set(L, g2, 0, 0, 1);
    EXPECT_FALSE(q.empty);
    EXPECT_EQ(q.modulus, 6);
    EXPECT_EQ(q.residue, 2);
}

TEST(IndexSets, DegenerateDegreeRejected) {
    SL2Mat shear(1, 1, 0, 1);
    EXPECT_THROW(index_set(shear, L, 0, 0, 0), DegenerateDegree);
    EXPECT_THROW(index_set(L, shear, 0, 0, 0), DegenerateDegree);
    // c1 = 1, c2 = -1 with c12 = 0
    SL2Mat g1(1, 0, 1, 1), g2(1, 0, -1, 1);
    EXPECT_THROW(index_set(g1, g2, 0, 0, 0), DegenerateDegree);
}

TEST(IndexSets, EnumerateWindow) {
    ArithProgression p;
    p.residue = 2;
    p.modulus = 6;
    std::vector<std::int64_t> got = enumerate(p, 13);
    std::vector<std::int64_t> want = {-10, -4, 2, 8};
    EXPECT_EQ(got, want);
    EXPECT_TRUE(enumerate(ArithProgression::none(), 100).empty());
}

TEST(IndexSets, MatchesBruteForce) {
    std::mt19937_64 rng(2024);
    int done = 0;
    while (done < 1500) {
        SL2Mat g1 = random_sl2(rng, 8), g2 = random_sl2(rng, 8);
        SL2Mat g12 = compose(g1, g2);
        if (g1.c == 0 || g2.c == 0 || g12.c == 0) continue;
        std::uniform_int_distribution<std::int64_t> leg(-10, 10);
        std::int64_t a1 = leg(rng), a2 = leg(rng), a = leg(rng);
        ArithProgression p = index_set(g1, g2, a1, a2, a);
        std::set<std::int64_t> brute = brute_index_set(g1, g2, a1, a2, a, 100);
        std::vector<std::int64_t> fast = enumerate(p, 100);
        std::set<std::int64_t> fastset(fast.begin(), fast.end());
        ASSERT_EQ(fastset, brute);
        ++done;
    }
}

TEST(IndexSets, SecondaryCongruence) {
    // Every member satisfies n == -c1*a2 + d1*c2*a1 (mod c1*c2).
    std::mt19937_64 rng(555);
    int done = 0;
    while (done < 800) {
        SL2Mat g1 = random_sl2(rng, 8), g2 = random_sl2(rng, 8);
        if (g1.c == 0 || g2.c == 0 || compose(g1, g2).c == 0) continue;
        std::uniform_int_distribution<std::int64_t> leg(-6, 6);
        std::int64_t a1 = leg(rng), a2 = leg(rng), a = leg(rng);
        ArithProgression p = index_set(g1, g2, a1, a2, a);
        for (std::int64_t n : enumerate(p, 200)) {
            std::int64_t want = -g1.c * a2 + g1.d * g2.c * a1;
            ASSERT_EQ(floor_mod(n - want, std::llabs(g1.c * g2.c)), 0);
        }
        ++done;
    }
}

TEST(IndexSets, InversionSymmetry) {
    // I_{g2, -(g1 g2)^{-1}}(a1, a2, a3) = I_{g1, g2}(-a1'*a3, -a1, -a12*a2) with
    // a1', a12 the upper-left entries of g1 and g1*g2.
    std::mt19937_64 rng(909);
    int done = 0;
    while (done < 600) {
        SL2Mat g1 = random_sl2(rng, 6), g2 = random_sl2(rng, 6);
        SL2Mat g12 = compose(g1, g2);
        if (g1.c == 0 || g2.c == 0 || g12.c == 0) continue;
        SL2Mat h2 = compose(g2.inverse(), g1.inverse()).negated();
        std::uniform_int_distribution<std::int64_t> leg(-6, 6);
        std::int64_t a1 = leg(rng), a2 = leg(rng), a3 = leg(rng);
        ArithProgression lhs = index_set(g2, h2, a1, a2, a3);
        ArithProgression rhs = index_set(g1, g2, -g1.a * a3, -a1, -g12.a * a2);
        ASSERT_EQ(lhs, rhs);
        ++done;
    }
}

TEST(IndexSets, AssociativityBijection) {
    std::mt19937_64 rng(31416);
    int done = 0;
    while (done < 60) {
        SL2Mat g1 = random_sl2(rng, 4), g2 = random_sl2(rng, 4), g3 = random_sl2(rng, 4);
        SL2Mat g12 = compose(g1, g2), g23 = compose(g2, g3), g123 = compose(g12, g3);
        if (g1.c == 0 || g2.c == 0 || g3.c == 0) continue;
        if (g12.c == 0 || g23.c == 0 || g123.c == 0) continue;
        std::uniform_int_distribution<std::int64_t> leg(-4, 4);
        ASSERT_TRUE(assoc_bijection_check(g1, g2, g3, leg(rng), leg(rng), leg(rng),
                                          leg(rng), 24));
        ++done;
    }
}
