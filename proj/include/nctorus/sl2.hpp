#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "common.hpp"

namespace nctorus {

inline constexpr double RANK_EPS = 1e-12;

/**
 * Integer matrix [[a,b],[c,d]] with det = 1.
 *
 * Bottom-row data drives everything: deg = c, rk(theta) = c*theta + d.
 * All arithmetic is overflow-checked so invariants hold exactly.
 */
struct SL2Mat {
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    SL2Mat() = default;
    SL2Mat(std::int64_t a_, std::int64_t b_, std::int64_t c_, std::int64_t d_)
        : a(a_), b(b_), c(c_), d(d_) {
        std::int64_t det = checked_add(checked_mul(a, d), checked_neg(checked_mul(b, c)));
        if (det != 1)
            throw DomainError("SL2Mat: determinant must be 1, got " + std::to_string(det));
    }

    static SL2Mat identity() { return SL2Mat(); }

    bool operator==(const SL2Mat& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator!=(const SL2Mat& o) const { return !(*this == o); }

    SL2Mat inverse() const { return SL2Mat(d, -b, -c, a); }
    SL2Mat negated() const { return SL2Mat(-a, -b, -c, -d); }

    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
};

inline SL2Mat compose(const SL2Mat& g1, const SL2Mat& g2) {
    return SL2Mat(checked_add(checked_mul(g1.a, g2.a), checked_mul(g1.b, g2.c)),
                  checked_add(checked_mul(g1.a, g2.b), checked_mul(g1.b, g2.d)),
                  checked_add(checked_mul(g1.c, g2.a), checked_mul(g1.d, g2.c)),
                  checked_add(checked_mul(g1.c, g2.b), checked_mul(g1.d, g2.d)));
}

// Quotient g2 * g1^{-1}, the label of maps between objects labelled g1 and g2.
inline SL2Mat quotient(const SL2Mat& g2, const SL2Mat& g1) {
    return compose(g2, g1.inverse());
}

/** Base parameters: the deformation angle and the complex modulus, Im(tau) < 0. */
struct TorusParams {
    double theta = 0.0;
    cplx tau = cplx(0.0, -1.0);

    TorusParams() = default;
    TorusParams(double theta_, cplx tau_) : theta(theta_), tau(tau_) {
        if (!(tau.imag() < 0.0))
            throw ConfigError("TorusParams: Im(tau) must be negative");
        if (!std::isfinite(theta) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
            throw ConfigError("TorusParams: parameters must be finite");
    }
};

inline std::int64_t deg(const SL2Mat& g) { return g.c; }

inline double rank(const SL2Mat& g, double theta) {
    return static_cast<double>(g.c) * theta + static_cast<double>(g.d);
}

// Fractional-linear action; pole guarded by the same cutoff as rank checks.
inline double mobius(const SL2Mat& g, double theta) {
    double rk = rank(g, theta);
    if (std::fabs(rk) < RANK_EPS)
        throw ZeroRank("mobius: c*theta + d vanishes");
    return (static_cast<double>(g.a) * theta + static_cast<double>(g.b)) / rk;
}

struct Invariants {
    std::int64_t deg;
    double rank;
    double mu;      // deg / rank
    double gtheta;  // (a*theta + b) / (c*theta + d)
};

inline Invariants invariants_of(const SL2Mat& g, double theta) {
    double rk = rank(g, theta);
    if (std::fabs(rk) < RANK_EPS)
        throw ZeroRank("invariants_of: rank vanishes at theta");
    Invariants inv;
    inv.deg = deg(g);
    inv.rank = rk;
    inv.mu = static_cast<double>(inv.deg) / rk;
    inv.gtheta = (static_cast<double>(g.a) * theta + static_cast<double>(g.b)) / rk;
    return inv;
}

inline double slope(const SL2Mat& g, double theta) { return invariants_of(g, theta).mu; }

}  // namespace nctorus
