#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nctorus/analytic.hpp"
#include "nctorus/table_io.hpp"
#include "nctorus/theta.hpp"

using namespace nctorus;

namespace {

const SL2Mat kL(1, 0, 1, 1);
const SL2Mat kL2 = compose(kL, kL);
const SL2Mat kL3 = compose(kL2, kL);

long double parity_theta_sum(int parity) {
    long double s = 0.0L;
    for (int n = -60; n <= 60; ++n)
        if (floor_mod(n, 2) == parity) s += std::exp(-(long double)(PI)*n * n / 2.0L);
    return s;
}

}  // namespace

TEST(StructureConstants, FrozenParameterOracle) {
    TorusParams params(0.0, cplx(0.0, -1.0));
    auto t = structure_constants(kL, kL, params, cplx(0.0, 0.0), cplx(0.0, 0.0), 1e-14);
    EXPECT_EQ(t.c1, 1);
    EXPECT_EQ(t.c2, 1);
    EXPECT_EQ(t.c12, 2);
    EXPECT_LE(t.tail_bound, 1e-14);
    EXPECT_NEAR(t.at(0, 0, 0).real(), double(parity_theta_sum(0)), 1e-12);
    EXPECT_NEAR(t.at(0, 0, 1).real(), double(parity_theta_sum(1)), 1e-12);
    EXPECT_NEAR(t.at(0, 0, 0).imag(), 0.0, 1e-13);
    EXPECT_NEAR(t.at(0, 0, 0).real(), 1.003735, 5e-7);
    EXPECT_NEAR(t.at(0, 0, 1).real(), 0.415761, 5e-7);
}

TEST(StructureConstants, EmptyIndexSetsGiveExactZeros) {
    const SL2Mat g(1, 0, 2, 1);
    TorusParams params(0.3, cplx(0.0, -1.0));
    auto t = structure_constants(g, g, params, cplx(0.1, 0.0), cplx(0.0, 0.2), 1e-12);
    int empties = 0;
    for (std::int64_t a1 = 0; a1 < t.n1(); ++a1)
        for (std::int64_t a2 = 0; a2 < t.n2(); ++a2)
            for (std::int64_t a = 0; a < t.n12(); ++a)
                if (index_set(g, g, a1, a2, a).empty) {
                    ++empties;
                    EXPECT_EQ(t.at(a1, a2, a), cplx(0.0, 0.0));
                }
    EXPECT_GT(empties, 0);
}

TEST(StructureConstants, PreconditionGuards) {
    TorusParams params(0.3, cplx(0.0, -1.0));
    const cplx z(0.0, 0.0);
    EXPECT_THROW(structure_constants(SL2Mat(1, 1, 0, 1), kL, params, z, z), DomainError);
    EXPECT_THROW(structure_constants(kL, SL2Mat(1, -1, 0, 1).inverse(), params, z, z),
                 DomainError);
    EXPECT_THROW(structure_constants(kL, kL, TorusParams(-1.5, cplx(0.0, -1.0)), z, z),
                 DomainError);
    EXPECT_THROW(structure_constants(kL, kL, params, z, z, 0.0), DomainError);
    EXPECT_THROW(raw_table(kL, kL, 0.3, cplx(0.0, 1.0), z, z), ConfigError);
    EXPECT_THROW(TorusParams(0.3, cplx(0.0, 1.0)), ConfigError);
}

TEST(StructureConstants, MatchesLatticePairingOracle) {
    const SL2Mat g1 = kL, g2(1, 0, 2, 1);
    const SL2Mat g12 = compose(g1, g2);
    const double theta = 0.2;
    for (const cplx tau : {cplx(0.0, -1.0), cplx(0.3, -1.1)}) {
        TorusParams params(theta, tau);
        const cplx z1(0.1, -0.05), z2(-0.07, 0.12);
        auto table = structure_constants(g1, g2, params, z1, z2, 1e-12);
        ModuleLabel label1(g1, mobius(g2, theta));
        ModuleLabel label2(g2, theta);
        ModuleLabel label12(g12, theta);
        const double r2 = rank(g2, theta);
        std::vector<std::pair<double, std::int64_t>> pts = {
            {0.0, 0}, {0.35, 1}, {-0.5, 2}, {0.8, 0}};
        for (std::int64_t a1 = 0; a1 < table.n1(); ++a1)
            for (std::int64_t a2 = 0; a2 < table.n2(); ++a2) {
                GaussianPacket f1 = phi_basis(label1, r2 * z1, a1, tau);
                GaussianPacket f2 = phi_basis(label2, z2, a2, tau);
                auto direct = pairing_t(g1, g2, theta, f1, f2, pts, 1e-12);
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    GaussianPacket out =
                        phi_basis(label12, z1 + z2, pts[i].second, tau);
                    const cplx expect =
                        table.at(a1, a2, pts[i].second) * eval(out, pts[i].first, pts[i].second);
                    EXPECT_LE(std::abs(direct[i] - expect), 1e-9)
                        << "a1=" << a1 << " a2=" << a2 << " point " << i;
                }
            }
    }
}

TEST(StructureConstants, ParameterCollapseInvariant) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> th(0.05, 0.95), zz(-0.6, 0.6);
    const SL2Mat g1 = kL, g2(1, 0, 2, 1);
    const SL2Mat g12 = compose(g1, g2);
    const cplx tau(0.1, -1.0);
    for (int rep = 0; rep < 12; ++rep) {
        const double theta = th(rng), theta2 = th(rng);
        const cplx z1(zz(rng), zz(rng)), z2(zz(rng), zz(rng)), z1p(zz(rng), zz(rng));
        const cplx w = double(g1.c) * z2 - rank(g12, theta) * double(g2.c) * z1;
        const cplx z2p = (w + rank(g12, theta2) * double(g2.c) * z1p) / double(g1.c);
        auto ta = structure_constants(g1, g2, TorusParams(theta, tau), z1, z2, 1e-13);
        auto tb = structure_constants(g1, g2, TorusParams(theta2, tau), z1p, z2p, 1e-13);
        ASSERT_EQ(ta.values.size(), tb.values.size());
        const double bound = ta.tail_bound + tb.tail_bound + 1e-11;
        for (std::size_t i = 0; i < ta.values.size(); ++i)
            EXPECT_LE(std::abs(ta.values[i] - tb.values[i]), bound);
    }
}

TEST(StructureConstants, AssociativityAtConstantLevel) {
    const cplx tau(0.0, -1.0);
    const double theta = 0.3;
    const cplx z1(0.1, -0.2), z2(0.05, 0.1), z3(-0.12, 0.03);
    for (const auto& [g1, g2, g3] : std::vector<std::array<SL2Mat, 3>>{
             {kL, kL, kL},
             {kL, compose(kL, SL2Mat(1, 1, 0, 1)), kL},
             {SL2Mat(1, 0, 2, 1), kL, kL}}) {
        const SL2Mat g12 = compose(g1, g2), g23 = compose(g2, g3), g123 = compose(g12, g3);
        const double r3 = rank(g3, theta);
        auto A = structure_constants(g1, g2, TorusParams(mobius(g3, theta), tau), r3 * z1,
                                     r3 * z2, 1e-13);
        auto B = structure_constants(g12, g3, TorusParams(theta, tau), z1 + z2, z3, 1e-13);
        auto C = structure_constants(g2, g3, TorusParams(theta, tau), z2, z3, 1e-13);
        auto D = structure_constants(g1, g23, TorusParams(theta, tau), z1, z2 + z3, 1e-13);
        for (std::int64_t a1 = 0; a1 < std::llabs(g1.c); ++a1)
            for (std::int64_t a2 = 0; a2 < std::llabs(g2.c); ++a2)
                for (std::int64_t a3 = 0; a3 < std::llabs(g3.c); ++a3)
                    for (std::int64_t a = 0; a < std::llabs(g123.c); ++a) {
                        cplx lhs(0.0, 0.0), rhs(0.0, 0.0);
                        for (std::int64_t m = 0; m < std::llabs(g12.c); ++m)
                            lhs += A.at(a1, a2, m) * B.at(m, a3, a);
                        for (std::int64_t m = 0; m < std::llabs(g23.c); ++m)
                            rhs += C.at(a2, a3, m) * D.at(a1, m, a);
                        EXPECT_LE(std::abs(lhs - rhs), 1e-10)
                            << "a1=" << a1 << " a2=" << a2 << " a3=" << a3 << " a=" << a;
                    }
    }
}

TEST(CompositionConstants, IdentityBaseReducesToPlainTable) {
    const cplx tau(0.2, -0.9);
    const double theta = 0.27;
    const cplx Z2(0.15, -0.1), Z3(-0.2, 0.3);
    auto via_triple = composition_constants(SL2Mat(1, 0, 0, 1), kL, kL2, theta, tau,
                                            cplx(0.0, 0.0), Z2, Z3, 1e-13);
    auto direct = structure_constants(kL, kL, TorusParams(theta, tau), Z3 - Z2, Z2, 1e-13);
    ASSERT_EQ(via_triple.values.size(), direct.values.size());
    for (std::size_t i = 0; i < direct.values.size(); ++i)
        EXPECT_LE(std::abs(via_triple.values[i] - direct.values[i]),
                  via_triple.tail_bound + direct.tail_bound + 1e-13);
}

TEST(CyclicIdentity, HoldsAndDetectsPerturbation) {
    const cplx tau(0.0, -1.0);
    const cplx z1(0.1, 0.0), z2(0.2, 0.0), z3(-0.05, 0.0);
    EXPECT_TRUE(cyclic_identity_check(kL, kL2, kL3, z1, z2, z3, 0.1, 0.1, tau, 1e-9));
    EXPECT_TRUE(cyclic_identity_check(kL, kL2, kL3, z1, z2, z3, 0.1, 0.3, tau, 1e-9));
    EXPECT_FALSE(cyclic_identity_check(kL, kL2, kL3, z1, z2, z3, 0.1, 0.3, tau, 1e-9,
                                       cplx(0.1, 0.0)));
}

TEST(TableIO, JsonRoundTripIsExact) {
    TorusParams params(0.3, cplx(0.2, -0.8));
    auto t = structure_constants(kL, SL2Mat(1, 0, 2, 1), params, cplx(0.3, -0.7),
                                 cplx(-0.1, 0.4), 1e-12);
    const std::string text = table_to_json(t).dump(2);
    auto back = table_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.g1, t.g1);
    EXPECT_EQ(back.g2, t.g2);
    EXPECT_EQ(back.theta, t.theta);
    EXPECT_EQ(back.tau, t.tau);
    EXPECT_EQ(back.z1, t.z1);
    EXPECT_EQ(back.z2, t.z2);
    EXPECT_EQ(back.tol, t.tol);
    EXPECT_EQ(back.tail_bound, t.tail_bound);
    ASSERT_EQ(back.values.size(), t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i) EXPECT_EQ(back.values[i], t.values[i]);
}
