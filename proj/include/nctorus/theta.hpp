#pragma once

#include <cstdint>
#include <vector>

#include "nctorus/gaussian.hpp"
#include "nctorus/index_sets.hpp"
#include "nctorus/sl2.hpp"

namespace nctorus {

// Certified table of the theta-series coefficients attached to a pair of
// labels: entry (a1, a2, a) sums e((-tau m^2/2 + w m)/(c1 c2 c12)) over the
// progression I_{g1,g2}(a1, a2, a), with w = c1 z2 - rk(g1 g2, theta) c2 z1.
struct StructureConstantsTable {
    SL2Mat g1{1, 0, 0, 1};
    SL2Mat g2{1, 0, 0, 1};
    double theta = 0.0;
    cplx tau{0.0, -1.0};
    cplx z1{0.0, 0.0};
    cplx z2{0.0, 0.0};
    double tol = 1e-12;
    std::int64_t c1 = 0, c2 = 0, c12 = 0;
    std::vector<cplx> values;  // ((a1 * |c2|) + a2) * |c12| + a
    double tail_bound = 0.0;

    std::int64_t n1() const { return std::llabs(c1); }
    std::int64_t n2() const { return std::llabs(c2); }
    std::int64_t n12() const { return std::llabs(c12); }

    const cplx& at(std::int64_t a1, std::int64_t a2, std::int64_t a) const {
        const std::int64_t i1 = floor_mod(a1, n1());
        const std::int64_t i2 = floor_mod(a2, n2());
        const std::int64_t i = floor_mod(a, n12());
        return values[std::size_t((i1 * n2() + i2) * n12() + i)];
    }
};

// Assembles the table from the raw series data. Only degree and orientation
// checks happen here; rank-positivity screening belongs to the callers that
// give the table a module-theoretic meaning.
inline StructureConstantsTable raw_table(const SL2Mat& g1, const SL2Mat& g2, double theta,
                                         cplx tau, cplx z1, cplx z2, double tol = 1e-12) {
    if (tau.imag() >= 0.0) throw ConfigError("tau must lie in the lower half-plane");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const SL2Mat g12 = compose(g1, g2);
    if (g1.c == 0 || g2.c == 0 || g12.c == 0)
        throw DegenerateDegree("series needs all three degrees nonzero");
    const std::int64_t D = checked_mul(checked_mul(g1.c, g2.c), g12.c);
    if (D <= 0) throw DomainError("degree product must be positive for convergence");

    StructureConstantsTable t;
    t.g1 = g1;
    t.g2 = g2;
    t.theta = theta;
    t.tau = tau;
    t.z1 = z1;
    t.z2 = z2;
    t.tol = tol;
    t.c1 = g1.c;
    t.c2 = g2.c;
    t.c12 = g12.c;
    const double r12 = rank(g12, theta);
    const cplx w = double(g1.c) * z2 - r12 * double(g2.c) * z1;
    const cplx q = -(cplx(0.0, TWO_PI) * tau) / double(D);
    const cplx l = (cplx(0.0, TWO_PI) * w) / double(D);
    t.values.assign(std::size_t(t.n1() * t.n2() * t.n12()), cplx(0.0, 0.0));
    for (std::int64_t a1 = 0; a1 < t.n1(); ++a1)
        for (std::int64_t a2 = 0; a2 < t.n2(); ++a2)
            for (std::int64_t a = 0; a < t.n12(); ++a) {
                const ArithProgression prog = index_set(g1, g2, a1, a2, a);
                if (prog.empty) continue;
                const CertifiedSum s = theta_progression_sum(q, l, prog, tol);
                t.values[std::size_t((a1 * t.n2() + a2) * t.n12() + a)] = s.value;
                t.tail_bound = std::max(t.tail_bound, s.tail_bound);
            }
    return t;
}

// Table for the product map E_{g1}(g2 theta) (x) E_{g2}(theta) ->
// E_{g1 g2}(theta) on twisted basis sections: first factor carries twist
// rk(g2, theta) z1, second carries z2, output carries z1 + z2.
inline StructureConstantsTable structure_constants(const SL2Mat& g1, const SL2Mat& g2,
                                                   const TorusParams& params, cplx z1, cplx z2,
                                                   double tol = 1e-12) {
    if (g1.c <= 0 || g2.c <= 0) throw DomainError("both degrees must be positive");
    if (rank(g2, params.theta) <= RANK_EPS)
        throw DomainError("inner label needs positive rank");
    if (rank(compose(g1, g2), params.theta) <= RANK_EPS)
        throw DomainError("product label needs positive rank");
    StructureConstantsTable t =
        raw_table(g1, g2, params.theta, params.tau, z1, z2, tol);
    if (t.c12 <= 0) throw InternalInvariantViolation("product degree must come out positive");
    return t;
}

// Raw-table arguments that realize the composition product for a triple of
// standard objects: quotient pair over the transported base, with twists
// rescaled by the rank of the innermost label.
struct CompositionFrame {
    SL2Mat g1{1, 0, 0, 1};
    SL2Mat g2{1, 0, 0, 1};
    double theta = 0.0;
    cplx z1{0.0, 0.0};
    cplx z2{0.0, 0.0};
};

inline CompositionFrame composition_frame(const SL2Mat& G1, const SL2Mat& G2, const SL2Mat& G3,
                                          double theta, cplx Z1, cplx Z2, cplx Z3) {
    const SL2Mat h2 = quotient(G2, G1);
    const SL2Mat h1 = quotient(G3, G2);
    const SL2Mat h12 = quotient(G3, G1);
    if (h1.c <= 0 || h2.c <= 0 || h12.c <= 0)
        throw DomainError("composition needs positive quotient degrees");
    const double r1 = rank(G1, theta);
    return CompositionFrame{h1, h2, mobius(G1, theta), r1 * (Z3 - Z2), r1 * (Z2 - Z1)};
}

// Composition constants for a triple of standard objects labeled (G1, G2, G3)
// with twists (Z1, Z2, Z3): the series of the induced product on basis
// sections of the two morphism spaces, living over the base G1 theta.
inline StructureConstantsTable composition_constants(const SL2Mat& G1, const SL2Mat& G2,
                                                     const SL2Mat& G3, double theta, cplx tau,
                                                     cplx Z1, cplx Z2, cplx Z3,
                                                     double tol = 1e-12) {
    const CompositionFrame f = composition_frame(G1, G2, G3, theta, Z1, Z2, Z3);
    return raw_table(f.g1, f.g2, f.theta, tau, f.z1, f.z2, tol);
}

// Cross-parameter symmetry of the composition constants: the triple rotated
// to (G2, G3, -G1) with twists rescaled by lambda(G) = rk(G,theta)/rk(G,theta')
// reproduces the same table up to the index flip
// (a, b, c) -> (-d13 c, a, -d12 b). rhs_twist_offset shifts the rotated
// third twist; nonzero offsets are for falsification experiments.
inline bool cyclic_identity_check(const SL2Mat& g1, const SL2Mat& g2, const SL2Mat& g3,
                                  cplx z1, cplx z2, cplx z3, double theta, double theta_prime,
                                  cplx tau, double tol, cplx rhs_twist_offset = cplx(0.0, 0.0)) {
    auto lambda = [&](const SL2Mat& g) {
        const double denom = rank(g, theta_prime);
        if (std::fabs(denom) < RANK_EPS) throw ZeroRank("rank vanishes at the second parameter");
        return rank(g, theta) / denom;
    };
    const StructureConstantsTable lhs =
        composition_constants(g1, g2, g3, theta, tau, z1, z2, z3, tol);
    const StructureConstantsTable rhs = composition_constants(
        g2, g3, g1.negated(), theta_prime, tau, lambda(g2) * z2, lambda(g3) * z3,
        lambda(g1) * z1 + rhs_twist_offset, tol);
    const std::int64_t d12 = quotient(g2, g1).d;
    const std::int64_t d13 = quotient(g3, g1).d;
    // tol covers roundoff, so it scales with the entry magnitude; the
    // certified truncation tails stay absolute
    const double tails = lhs.tail_bound + rhs.tail_bound;
    for (std::int64_t a = 0; a < lhs.n1(); ++a)
        for (std::int64_t b = 0; b < lhs.n2(); ++b)
            for (std::int64_t c = 0; c < lhs.n12(); ++c) {
                const cplx want = lhs.at(a, b, c);
                const cplx got = rhs.at(-d13 * c, a, -d12 * b);
                const double scale = std::max(1.0, std::max(std::abs(want), std::abs(got)));
                if (std::abs(want - got) > tol * scale + tails) return false;
            }
    return true;
}

}  // namespace nctorus
