#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "nctorus/gaussian.hpp"
#include "nctorus/index_sets.hpp"
#include "nctorus/sl2.hpp"

namespace nctorus {

// Label of a concrete Schwartz-space module: matrix g over base parameter
// theta, with deg = g.c and rk = g.c*theta + g.d. Only rk > 0 representatives
// are modeled directly; negative-rank data travels through shifts upstream.
struct ModuleLabel {
    SL2Mat g;
    double theta = 0.0;

    ModuleLabel(const SL2Mat& g_, double theta_) : g(g_), theta(theta_) {
        const double r = rank(g, theta);
        if (std::fabs(r) < RANK_EPS) throw ZeroRank("module label has vanishing rank");
        if (r < 0.0) throw DomainError("module label needs positive rank");
    }

    std::int64_t degree() const { return g.c; }
    double rk() const { return rank(g, theta); }
    double mu() const { return double(g.c) / rk(); }
    std::int64_t legs() const { return g.c == 0 ? 1 : std::llabs(g.c); }
};

enum class Side { right, left };
enum class Gen { U1, U2 };

namespace detail {

inline void require_packet_shape(const GaussianPacket& f, const ModuleLabel& label) {
    if (label.degree() == 0) throw DegenerateDegree("packet ops need a nonzero-degree label");
    if (f.m_index != label.legs()) throw ShapeMismatch("packet leg count does not match label degree");
}

}  // namespace detail

// One generator step of the right A_theta action or the left action of the
// endomorphism algebra. power < 0 applies the inverse step.
inline GaussianPacket act_generator(const GaussianPacket& f, const ModuleLabel& label,
                                    Side side, Gen gen, std::int64_t power) {
    detail::require_packet_shape(f, label);
    const double m = double(label.g.c);
    const double n = double(label.g.d);
    const double r = label.rk();
    GaussianPacket cur = f;
    normalize(cur);
    const std::int64_t steps = power < 0 ? -power : power;
    const int sgn = power < 0 ? -1 : 1;
    for (std::int64_t s = 0; s < steps; ++s) {
        GaussianPacket next = zero_packet(cur.m_index);
        for (const auto& t : cur.terms) {
            GaussTerm o = t;
            if (side == Side::right && gen == Gen::U1) {
                o = term_affine(t, cplx(1.0, 0.0), cplx(-sgn * r / m, 0.0));
                o.alpha = t.alpha + sgn;
            } else if (side == Side::right && gen == Gen::U2) {
                o.lin += cplx(0.0, sgn * TWO_PI);
                o.poly = detail::poly_scale(o.poly, e2pi(-sgn * double(t.alpha) * n / m));
            } else if (side == Side::left && gen == Gen::U1) {
                o = term_affine(t, cplx(1.0, 0.0), cplx(-sgn / m, 0.0));
                o.alpha = t.alpha + sgn * label.g.a;
            } else {
                o.lin += cplx(0.0, sgn * TWO_PI / r);
                o.poly = detail::poly_scale(o.poly, e2pi(-sgn * double(t.alpha) / m));
            }
            next.terms.push_back(std::move(o));
        }
        normalize(next);
        cur = std::move(next);
    }
    return cur;
}

// The holomorphic structure operator: f -> f' + 2 pi i (tau mu x + z) f.
inline GaussianPacket dbar(const GaussianPacket& f, const ModuleLabel& label, cplx z, cplx tau) {
    detail::require_packet_shape(f, label);
    const cplx ax = cplx(0.0, TWO_PI) * tau * label.mu();
    const cplx b = cplx(0.0, TWO_PI) * z;
    GaussianPacket out = zero_packet(f.m_index);
    for (const auto& t : f.terms) {
        GaussTerm o = t;
        auto lead = detail::poly_add(
            detail::poly_scale(detail::poly_shift_up(t.poly), t.quad + ax),
            detail::poly_scale(t.poly, t.lin + b));
        o.poly = detail::poly_add(detail::poly_deriv(t.poly), lead);
        out.terms.push_back(std::move(o));
    }
    normalize(out);
    return out;
}

// Basis section of the kernel of dbar at twist z: supported on one leg,
// Gaussian exp(-2 pi i tau mu x^2/2 - 2 pi i z x).
inline GaussianPacket phi_basis(const ModuleLabel& label, cplx z, std::int64_t alpha, cplx tau) {
    if (label.degree() <= 0 || label.mu() <= 0.0)
        throw DomainError("phi basis needs positive degree and slope");
    GaussianPacket f = zero_packet(label.legs());
    GaussTerm t;
    t.alpha = floor_mod(alpha, label.legs());
    t.poly = {cplx(1.0, 0.0)};
    t.quad = -(cplx(0.0, TWO_PI) * tau * label.mu());
    t.lin = -(cplx(0.0, TWO_PI) * z);
    f.terms.push_back(std::move(t));
    normalize(f);
    return f;
}

// Gaussian representative used on the negative-slope side: a kernel element
// of the transposed operator -f' + 2 pi i (tau mu x + z) f.
inline GaussianPacket psi_rep(const ModuleLabel& label, cplx z, std::int64_t alpha, cplx tau) {
    if (label.degree() >= 0 || label.mu() >= 0.0)
        throw DomainError("psi representative needs negative degree and slope");
    GaussianPacket f = zero_packet(label.legs());
    GaussTerm t;
    t.alpha = floor_mod(alpha, label.legs());
    t.poly = {cplx(1.0, 0.0)};
    t.quad = cplx(0.0, TWO_PI) * tau * label.mu();
    t.lin = cplx(0.0, TWO_PI) * z;
    f.terms.push_back(std::move(t));
    normalize(f);
    return f;
}

// b(f1 (x) f2) = sum_alpha int f1(x/rk, alpha) f2(x, -a*alpha) dx for the
// dual pair of modules labeled by g^{-1} (over g theta) and g (over theta).
inline cplx pairing_b(const GaussianPacket& f1, const GaussianPacket& f2,
                      const SL2Mat& g, double theta) {
    if (g.c == 0) throw DegenerateDegree("integral pairing needs nonzero degree");
    const std::int64_t legs = std::llabs(g.c);
    if (f1.m_index != legs || f2.m_index != legs)
        throw ShapeMismatch("integral pairing leg counts must equal |deg|");
    const double r = rank(g, theta);
    if (std::fabs(r) < RANK_EPS) throw ZeroRank("integral pairing at vanishing rank");
    cplx acc(0.0, 0.0);
    for (std::int64_t alpha = 0; alpha < legs; ++alpha) {
        const std::int64_t beta = floor_mod(-g.a * alpha, legs);
        for (const auto& t1 : f1.terms) {
            if (t1.alpha != alpha) continue;
            const GaussTerm s1 = term_affine(t1, cplx(1.0 / r, 0.0), cplx(0.0, 0.0));
            for (const auto& t2 : f2.terms) {
                if (t2.alpha != beta) continue;
                acc += gauss_integral(detail::poly_mul(s1.poly, t2.poly),
                                      s1.quad + t2.quad, s1.lin + t2.lin);
            }
        }
    }
    return acc;
}

// Lattice-sum pairing t_{g1,g2}: E_{g1}(g2 theta) (x) E_{g2}(theta) ->
// E_{g1 g2}(theta), evaluated at sample points with a certified tail.
inline std::vector<cplx> pairing_t(const SL2Mat& g1, const SL2Mat& g2, double theta,
                                   const GaussianPacket& f1, const GaussianPacket& f2,
                                   const std::vector<std::pair<double, std::int64_t>>& points,
                                   double tol) {
    const SL2Mat g12 = compose(g1, g2);
    if (g1.c == 0 || g2.c == 0 || g12.c == 0)
        throw DegenerateDegree("lattice pairing needs all three degrees nonzero");
    if (f1.m_index != std::llabs(g1.c) || f2.m_index != std::llabs(g2.c))
        throw DomainError("lattice pairing: leg counts do not match labels");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const double r2 = rank(g2, theta);
    if (std::fabs(r2) < RANK_EPS) throw ZeroRank("lattice pairing at vanishing rank");
    const double r1hat = rank(g1, mobius(g2, theta));
    const double ashift = r1hat / double(g1.c * g12.c);
    const double bshift = 1.0 / double(g2.c * g12.c);

    std::vector<cplx> out;
    out.reserve(points.size());
    const std::size_t pairs = std::max<std::size_t>(1, f1.terms.size() * f2.terms.size());
    const double budget = tol / (2.0 * double(pairs));
    for (const auto& [x, alpha_raw] : points) {
        const std::int64_t alpha = floor_mod(alpha_raw, std::llabs(g12.c));
        cplx acc(0.0, 0.0);
        for (const auto& t1 : f1.terms) {
            for (const auto& t2 : f2.terms) {
                ArithProgression prog = index_set(g1, g2, t1.alpha, t2.alpha, alpha);
                if (prog.empty) continue;
                // substitute u = x/r2 + ashift*n into t1 and v = x - bshift*n into t2,
                // collect the n-polynomial and n-exponent
                const cplx u0(x / r2, 0.0), v0(x, 0.0);
                const cplx c1 = std::exp(t1.quad * u0 * u0 / 2.0 + t1.lin * u0) *
                                std::exp(t2.quad * v0 * v0 / 2.0 + t2.lin * v0);
                auto p1 = detail::poly_affine(t1.poly, cplx(ashift, 0.0), u0);
                auto p2 = detail::poly_affine(t2.poly, cplx(-bshift, 0.0), v0);
                const cplx q = t1.quad * ashift * ashift + t2.quad * bshift * bshift;
                const cplx l = ashift * (t1.quad * u0 + t1.lin) - bshift * (t2.quad * v0 + t2.lin);
                auto s = progression_gauss_sum(detail::poly_mul(p1, p2), q, l, prog,
                                               budget / std::max(1.0, std::abs(c1)));
                acc += c1 * s.value;
            }
        }
        out.push_back(acc);
    }
    return out;
}

// Kernel and cokernel dimensions of f -> f' + (a x + z) f on the Hermite
// function basis. Rectangular (N+1) x N truncations keep the injectivity
// question honest; the cokernel uses the transposed operator -f' + (a x + z) f.
inline std::pair<int, int> kernel_cokernel_dims(cplx a, cplx z, int hermite_dim,
                                                double threshold) {
    if (hermite_dim < 64) throw DomainError("hermite dimension must be at least 64");
    if (a.real() == 0.0) throw DomainError("operator needs Re(a) nonzero");
    if (!(threshold > 0.0)) throw DomainError("threshold must be positive");
    const int N = hermite_dim;
    auto nullity = [&](double dsign) {
        // dsign = +1: d/dx + ax + z; dsign = -1: -d/dx + ax + z
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N + 1, N);
        for (int k = 0; k < N; ++k) {
            if (k > 0) M(k - 1, k) = std::sqrt(double(k) / 2.0) * (a + dsign);
            M(k + 1, k) = std::sqrt(double(k + 1) / 2.0) * (a - dsign);
            M(k, k) = z;
        }
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
        const auto& sv = svd.singularValues();
        const double cut = threshold * sv(0);
        int count = 0;
        for (int i = 0; i < sv.size(); ++i) {
            if (sv(i) < cut) ++count;
            if (sv(i) >= cut / 3.0 && sv(i) < 3.0 * cut)
                throw IndeterminateRank("singular value within the threshold band");
        }
        return count;
    };
    return {nullity(+1.0), nullity(-1.0)};
}

// Checks that f -> e(mu v1 x) f(x + v2) conjugates the (v1, v2)-twisted right
// action to the plain one and shifts the holomorphic twist by mu(tau v2 - v1).
inline bool translate_iso_check(const ModuleLabel& label, cplx z, double v1, double v2,
                                cplx tau, double tol) {
    if (label.degree() == 0) throw DegenerateDegree("translation check needs nonzero degree");
    const double mu = label.mu();
    const cplx lam = mu * (tau * v2 - v1);
    auto translate = [&](const GaussianPacket& f) {
        GaussianPacket out = zero_packet(f.m_index);
        for (const auto& t : f.terms) {
            GaussTerm o = term_affine(t, cplx(1.0, 0.0), cplx(v2, 0.0));
            o.lin += cplx(0.0, TWO_PI) * mu * v1;
            out.terms.push_back(std::move(o));
        }
        normalize(out);
        return out;
    };
    std::vector<GaussianPacket> probes;
    for (int j = 0; j < 2; ++j) {
        GaussianPacket f = zero_packet(label.legs());
        for (std::int64_t leg = 0; leg < label.legs(); ++leg) {
            GaussTerm t;
            t.alpha = leg;
            t.poly = j == 0 ? std::vector<cplx>{cplx(1.0, 0.0)}
                            : std::vector<cplx>{cplx(0.4, -0.2), cplx(1.0, 0.3)};
            t.quad = cplx(-2.1 - 0.3 * double(j), 0.45);
            t.lin = cplx(0.3 * double(leg + 1), -0.2);
            f.terms.push_back(std::move(t));
        }
        normalize(f);
        probes.push_back(std::move(f));
    }
    const std::vector<double> grid = {-1.35, -0.4, 0.25, 0.9, 1.6};
    auto close = [&](const GaussianPacket& A, const GaussianPacket& B) {
        for (double x : grid)
            for (std::int64_t leg = 0; leg < label.legs(); ++leg) {
                const cplx va = eval(A, x, leg), vb = eval(B, x, leg);
                if (std::abs(va - vb) > tol * std::max(1.0, std::abs(vb))) return false;
            }
        return true;
    };
    for (const auto& f : probes) {
        for (Gen gen : {Gen::U1, Gen::U2}) {
            const double v = gen == Gen::U1 ? v1 : v2;
            GaussianPacket lhs = translate(packet_scale(act_generator(f, label, Side::right, gen, 1),
                                                        e2pi(-v)));
            GaussianPacket rhs = act_generator(translate(f), label, Side::right, gen, 1);
            if (!close(lhs, rhs)) return false;
        }
        GaussianPacket lhs = translate(dbar(f, label, z, tau));
        GaussianPacket rhs = dbar(translate(f), label, z + lam, tau);
        if (!close(lhs, rhs)) return false;
    }
    return true;
}

enum class IsogenyDirection { push, pull };

namespace detail {

inline void require_isogeny_shape(const ModuleLabel& label, std::int64_t N) {
    if (N < 1) throw ShapeMismatch("isogeny order must be positive");
    if (label.g.d != 1 || label.g.c < 1)
        throw ShapeMismatch("isogeny transport needs a label with unit diagonal and positive degree");
    if (gcd_i64(label.g.c, N) != 1) throw ShapeMismatch("isogeny order must be coprime to the degree");
}

}  // namespace detail

// push: f(x, alpha) -> f(x, N*alpha) identifying the induced module over the
// index-N subalgebra with the degree-m module at N*theta.
// pull: window-flattened tuples (leg = alpha + m*k, k < N) over parameter
// theta_hat map onto the degree-m*N module at theta_hat/N; window slot k is
// shifted by k*rk/(m*N).
inline GaussianPacket isogeny_transport(const GaussianPacket& f, std::int64_t N,
                                        IsogenyDirection direction, const ModuleLabel& label) {
    detail::require_isogeny_shape(label, N);
    const std::int64_t m = label.g.c;
    if (direction == IsogenyDirection::push) {
        if (f.m_index != m) throw ShapeMismatch("push input must live on m legs");
        Bezout bz = ext_gcd(N, m);  // bz.x = N^{-1} mod m
        GaussianPacket out = zero_packet(m);
        for (const auto& t : f.terms) {
            GaussTerm o = t;
            o.alpha = floor_mod(bz.x * t.alpha, m);
            out.terms.push_back(std::move(o));
        }
        normalize(out);
        return out;
    }
    if (f.m_index != m * N) throw ShapeMismatch("pull input must live on m*N window legs");
    const double delta = label.rk() / double(m * N);
    GaussianPacket out = zero_packet(m * N);
    for (const auto& t : f.terms) {
        const std::int64_t alpha = t.alpha % m;
        const std::int64_t k = t.alpha / m;
        GaussTerm o = term_affine(t, cplx(1.0, 0.0), cplx(-double(k) * delta, 0.0));
        o.alpha = alpha * N + k;
        out.terms.push_back(std::move(o));
    }
    normalize(out);
    return out;
}

// Right action of the big-torus generators on window-flattened tuples
// (leg = alpha + m*k): U1 cycles the window and applies the small-module U1
// on wraparound; U2 acts slotwise with the commutation phase e(k theta).
inline GaussianPacket window_action(const GaussianPacket& f, const ModuleLabel& label,
                                    std::int64_t N, Gen gen) {
    detail::require_isogeny_shape(label, N);
    const std::int64_t m = label.g.c;
    if (f.m_index != m * N) throw ShapeMismatch("window action needs m*N legs");
    const double theta_out = label.theta / double(N);
    GaussianPacket out = zero_packet(m * N);
    for (const auto& t : f.terms) {
        const std::int64_t alpha = t.alpha % m;
        const std::int64_t k = t.alpha / m;
        if (gen == Gen::U1) {
            if (k + 1 < N) {
                GaussTerm o = t;
                o.alpha = alpha + m * (k + 1);
                out.terms.push_back(std::move(o));
            } else {
                GaussTerm o = term_affine(t, cplx(1.0, 0.0), cplx(-label.rk() / double(m), 0.0));
                o.alpha = floor_mod(alpha + 1, m);
                out.terms.push_back(std::move(o));
            }
        } else {
            GaussTerm o = t;
            o.lin += cplx(0.0, TWO_PI);
            o.poly = detail::poly_scale(o.poly, e2pi(-double(alpha) * double(label.g.d) / double(m)) *
                                                    e2pi(double(k) * theta_out));
            o.alpha = t.alpha;
            out.terms.push_back(std::move(o));
        }
    }
    normalize(out);
    return out;
}

}  // namespace nctorus
