#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nctorus/category.hpp"

namespace nctorus {

// Parameter pair of the cross-parameter equivalence, running from the
// smaller deformation parameter to the larger one.
struct FunctorContext {
    double theta = 0.0;
    double theta_prime = 0.0;
    cplx tau{0.0, -1.0};

    FunctorContext(double theta_, double theta_prime_, cplx tau_)
        : theta(theta_), theta_prime(theta_prime_), tau(tau_) {
        if (!(tau.imag() < 0.0)) throw ConfigError("tau must lie in the lower half-plane");
        if (theta > theta_prime)
            throw ConfigError("functor runs from the smaller parameter to the larger");
    }

    // twist rescaling rk(g, theta) / rk(g, theta'); even under g -> -g
    double lambda(const SL2Mat& g) const {
        const double hi = rank(g, theta_prime);
        if (std::fabs(hi) < RANK_EPS) throw ZeroRankTarget("rank vanishes at the target parameter");
        return rank(g, theta) / hi;
    }
};

namespace detail {

inline bool same_param(double a, double b) {
    return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace detail

// Object map: twist rescaled by lambda; labels whose rank goes negative at
// the target parameter fold to the negated matrix with a one-step shift.
inline StdObject f_object(const StdObject& E, const FunctorContext& ctx) {
    if (!detail::same_param(E.theta, ctx.theta))
        throw DomainError("object lives at the wrong source parameter");
    const double hi = rank(E.g, ctx.theta_prime);
    if (std::fabs(hi) < RANK_EPS) throw ZeroRankTarget("image rank vanishes");
    const cplx znew = ctx.lambda(E.g) * E.z;
    if (hi > 0.0) return StdObject(E.g, ctx.theta_prime, znew, E.shift);
    return StdObject(E.g.negated(), ctx.theta_prime, znew, E.shift - 1);
}

inline StdObject f_object_inverse(const StdObject& E, const FunctorContext& ctx) {
    if (!detail::same_param(E.theta, ctx.theta_prime))
        throw DomainError("object lives at the wrong target parameter");
    const double lo = rank(E.g, ctx.theta);
    if (std::fabs(lo) < RANK_EPS) throw ZeroRankTarget("preimage rank vanishes");
    const cplx znew = E.z * rank(E.g, ctx.theta_prime) / lo;
    if (lo > 0.0) return StdObject(E.g, ctx.theta, znew, E.shift);
    return StdObject(E.g.negated(), ctx.theta, znew, E.shift + 1);
}

enum class CaseClass { i, ii, iii };

// Sign pattern of the target-parameter ranks for a positive-degree morphism
// pair. The pattern (+, -) contradicts the two-parameter rank inequality and
// can only arise from broken invariants.
inline CaseClass case_classify(const SL2Mat& g1, const SL2Mat& g2, const FunctorContext& ctx) {
    if (quotient(g2, g1).c <= 0)
        throw DomainError("classification needs a positive quotient degree");
    if (rank(g1, ctx.theta) <= RANK_EPS || rank(g2, ctx.theta) <= RANK_EPS)
        throw DomainError("source labels must have positive rank");
    const double r1 = rank(g1, ctx.theta_prime);
    const double r2 = rank(g2, ctx.theta_prime);
    if (std::fabs(r1) < RANK_EPS || std::fabs(r2) < RANK_EPS)
        throw ZeroRankTarget("classification undefined at vanishing image rank");
    if (r1 > 0.0 && r2 > 0.0) return CaseClass::i;
    if (r1 < 0.0 && r2 > 0.0) return CaseClass::ii;
    if (r1 < 0.0 && r2 < 0.0) return CaseClass::iii;
    throw InternalInvariantViolation("rank sign pattern excluded by the half-plane inequality");
}

// Morphism map on basis coefficients. Degree-0 vectors map by the case
// table: (i) index-preserving, (ii) phi_a -> psi_{-d12 a} into degree one,
// (iii) phi_a -> phi_{-a}. Degree-1 vectors transport as the
// inverse-transpose of the map on the Serre-dual basis, the unique choice
// that keeps both pairings strictly compatible.
inline HolVector f_morphism(const HolVector& v, const FunctorContext& ctx) {
    const StdObject& E1 = v.source;
    const StdObject& E2 = v.target;
    const StdObject F1 = f_object(E1, ctx);
    const StdObject F2 = f_object(E2, ctx);

    if (v.degree == 0) {
        const SL2Mat q = quotient(E2.g, E1.g);
        if (q.c <= 0) throw DomainError("degree-0 transport needs a positive quotient degree");
        const CaseClass cc = case_classify(E1.g, E2.g, ctx);
        const std::int64_t c12 = q.c;
        std::vector<cplx> out(std::size_t(c12), cplx(0.0, 0.0));
        for (std::int64_t a = 0; a < c12; ++a) {
            std::int64_t to = a;
            if (cc == CaseClass::ii) to = floor_mod(-q.d * a, c12);
            if (cc == CaseClass::iii) to = floor_mod(-a, c12);
            out[std::size_t(to)] = v.coeffs[std::size_t(a)];
        }
        const int degree_out = cc == CaseClass::ii ? 1 : 0;
        return HolVector{F1, F2, degree_out,
                         degree_out == 0 ? HolBasis::phi : HolBasis::psi, std::move(out)};
    }

    const std::int64_t c21 = quotient(E1.g, E2.g).c;
    if (c21 <= 0 || std::int64_t(v.coeffs.size()) != c21)
        throw DomainError("degree-1 transport needs a positive-degree dual space");
    Eigen::MatrixXcd M(c21, c21);
    int dual_degree = 0;
    for (std::int64_t b = 0; b < c21; ++b) {
        const HolVector img = f_morphism(unit_hol(E2, E1, 0, b, ctx.tau), ctx);
        dual_degree = img.degree;
        for (std::int64_t r = 0; r < c21; ++r) M(r, b) = img.coeffs[std::size_t(r)];
    }
    Eigen::VectorXcd rhs(c21);
    for (std::int64_t r = 0; r < c21; ++r) rhs(r) = v.coeffs[std::size_t(r)];
    const Eigen::VectorXcd sol = M.transpose().partialPivLu().solve(rhs);
    std::vector<cplx> out(static_cast<std::size_t>(c21));
    for (std::int64_t r = 0; r < c21; ++r) out[std::size_t(r)] = sol(r);
    const int degree_out = 1 - dual_degree;
    return HolVector{F1, F2, degree_out, degree_out == 0 ? HolBasis::phi : HolBasis::psi,
                     std::move(out)};
}

// F(v . u) = F(v) . F(u) on every pair of basis vectors of the two
// morphism spaces, within tol.
inline bool functoriality_check(const SL2Mat& g1, const SL2Mat& g2, const SL2Mat& g3, cplx z1,
                                cplx z2, cplx z3, const FunctorContext& ctx, double tol) {
    const StdObject E1(g1, ctx.theta, z1);
    const StdObject E2(g2, ctx.theta, z2);
    const StdObject E3(g3, ctx.theta, z3);
    const std::int64_t c12 = quotient(g2, g1).c;
    const std::int64_t c23 = quotient(g3, g2).c;
    if (c12 <= 0 || c23 <= 0) throw DomainError("check needs positive quotient degrees");
    for (std::int64_t a = 0; a < c12; ++a)
        for (std::int64_t b = 0; b < c23; ++b) {
            const HolVector u = unit_hol(E1, E2, 0, a, ctx.tau);
            const HolVector v = unit_hol(E2, E3, 0, b, ctx.tau);
            const HolVector lhs = f_morphism(compose_hom(v, u, ctx.tau, tol), ctx);
            const HolVector rhs =
                compose_hom(f_morphism(v, ctx), f_morphism(u, ctx), ctx.tau, tol);
            if (lhs.degree != rhs.degree || lhs.coeffs.size() != rhs.coeffs.size()) return false;
            // roundoff budget scales with the coefficient magnitude
            for (std::size_t i = 0; i < lhs.coeffs.size(); ++i) {
                const double scale = std::max(
                    1.0, std::max(std::abs(lhs.coeffs[i]), std::abs(rhs.coeffs[i])));
                if (std::abs(lhs.coeffs[i] - rhs.coeffs[i]) > tol * scale) return false;
            }
        }
    return true;
}

// Transport along the basic bimodule labeled g0: an object over g0 theta
// maps to the label composed with g0 over theta, twist divided by
// rk(g0, theta). A negative-rank outcome folds with a shift.
inline StdObject morita_transport(const StdObject& E, const SL2Mat& g0) {
    const double denom = rank(g0.inverse(), E.theta);
    if (std::fabs(denom) < RANK_EPS) throw ZeroRank("base parameter has no preimage");
    const double theta = mobius(g0.inverse(), E.theta);
    const double r0 = rank(g0, theta);
    if (std::fabs(r0) < RANK_EPS) throw ZeroRank("transport bimodule has vanishing rank");
    const SL2Mat m = compose(E.g, g0);
    const double r = rank(m, theta);
    if (std::fabs(r) < RANK_EPS) throw ZeroRank("transported label has vanishing rank");
    const cplx znew = E.z / r0;
    if (r > 0.0) return StdObject(m, theta, znew, E.shift);
    return StdObject(m.negated(), theta, znew, E.shift - 1);
}

inline SL2Mat transposed(const SL2Mat& g) { return SL2Mat(g.a, g.c, g.b, g.d); }

// Parity-folded integer class (deg, rk) of an object over the commutative
// end, where rk is the integer d-entry.
inline std::pair<std::int64_t, std::int64_t> ktheory_class(const StdObject& E) {
    const std::int64_t s = floor_mod(E.shift, 2) == 0 ? 1 : -1;
    return {s * E.g.c, s * E.g.d};
}

// Round trip commutative end -> g theta -> theta -> commutative end. The
// induced map on (deg, rk) must be the transpose of g; passing a different
// predicted matrix turns the check into a falsification probe.
inline bool ktheory_action_check(const SL2Mat& g, const std::vector<StdObject>& samples,
                                 const FunctorContext& ctx,
                                 std::optional<SL2Mat> predicted = std::nullopt) {
    if (ctx.theta_prime != 0.0)
        throw ConfigError("k-theory action is read off at the commutative end");
    const double gtheta = mobius(g, ctx.theta);
    const FunctorContext inner(gtheta, 0.0, ctx.tau);
    const SL2Mat p = predicted.value_or(transposed(g));
    for (const auto& E : samples) {
        const StdObject X = f_object_inverse(E, inner);
        const StdObject Y = morita_transport(X, g);
        if (!detail::same_param(Y.theta, ctx.theta))
            throw InternalInvariantViolation("transport landed at an unexpected parameter");
        const StdObject Ysnap(Y.g, ctx.theta, Y.z, Y.shift);
        const StdObject Z = f_object(Ysnap, ctx);
        const auto [de, re] = ktheory_class(E);
        const auto [dz, rz] = ktheory_class(Z);
        if (dz != p.a * de + p.b * re || rz != p.c * de + p.d * re) return false;
    }
    return true;
}

enum class TiltClass { below, above_shifted };

// Image side of the negative-parameter equivalence: labels keeping positive
// rank at 0 land below the slope cut -1/theta, the others land above it with
// a one-step shift.
inline TiltClass tilt_classify(const StdObject& E, const FunctorContext& ctx) {
    if (!(ctx.theta < 0.0) || ctx.theta_prime != 0.0)
        throw ConfigError("tilt classification needs theta < 0 mapped to 0");
    if (!detail::same_param(E.theta, ctx.theta))
        throw DomainError("object lives at the wrong source parameter");
    if (E.g.d == 0) throw ZeroRankTarget("image is a torsion point object");
    return E.g.d > 0 ? TiltClass::below : TiltClass::above_shifted;
}

}  // namespace nctorus
