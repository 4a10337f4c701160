#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nctorus/common.hpp"
#include "nctorus/index_sets.hpp"

namespace nctorus {

// One summand p(x) * exp(quad*x^2/2 + lin*x) supported on a single leg.
struct GaussTerm {
    std::int64_t alpha = 0;
    std::vector<cplx> poly;  // ascending coefficients
    cplx quad{0.0, 0.0};
    cplx lin{0.0, 0.0};
};

// Finite sum of GaussTerms on m_index legs; the concrete model of a
// Schwartz vector f(x, alpha), alpha in Z/m_index.
struct GaussianPacket {
    std::int64_t m_index = 1;
    std::vector<GaussTerm> terms;
};

namespace detail {

inline void poly_trim(std::vector<cplx>& p) {
    while (!p.empty() && p.back() == cplx(0.0, 0.0)) p.pop_back();
}

inline std::vector<cplx> poly_add(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(std::max(a.size(), b.size()), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    poly_trim(out);
    return out;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> out(a.size() + b.size() - 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    poly_trim(out);
    return out;
}

inline std::vector<cplx> poly_scale(std::vector<cplx> p, cplx k) {
    for (auto& c : p) c *= k;
    poly_trim(p);
    return p;
}

inline std::vector<cplx> poly_deriv(const std::vector<cplx>& p) {
    if (p.size() < 2) return {};
    std::vector<cplx> out(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * cplx(double(i), 0.0);
    return out;
}

// multiply by x
inline std::vector<cplx> poly_shift_up(const std::vector<cplx>& p) {
    if (p.empty()) return {};
    std::vector<cplx> out(p.size() + 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < p.size(); ++i) out[i + 1] = p[i];
    return out;
}

inline cplx poly_eval(const std::vector<cplx>& p, cplx x) {
    cplx acc(0.0, 0.0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

// p(s*x + t) as a polynomial in x
inline std::vector<cplx> poly_affine(const std::vector<cplx>& p, cplx s, cplx t) {
    std::vector<cplx> out;
    std::vector<cplx> pw = {cplx(1.0, 0.0)};  // (s*x+t)^k
    const std::vector<cplx> base = {t, s};
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k > 0) pw = poly_mul(pw, base);
        out = poly_add(out, poly_scale(pw, p[k]));
    }
    return out;
}

inline double poly_abs_at(const std::vector<cplx>& p, double t) {
    double acc = 0.0, tp = 1.0;
    for (const auto& c : p) {
        acc += std::abs(c) * tp;
        tp *= t;
    }
    return acc;
}

}  // namespace detail

// Canonical form: legs folded into [0, m_index), exact-duplicate exponents
// merged, vanished terms dropped. Schwartz invariant Re(quad) < 0 enforced.
inline void normalize(GaussianPacket& f) {
    if (f.m_index <= 0) throw DomainError("packet needs a positive leg count");
    std::vector<GaussTerm> kept;
    for (auto& t : f.terms) {
        detail::poly_trim(t.poly);
        if (t.poly.empty()) continue;
        if (!(t.quad.real() < 0.0)) throw DomainError("non-Schwartz term: Re(quad) must be negative");
        t.alpha = floor_mod(t.alpha, f.m_index);
        bool merged = false;
        for (auto& k : kept) {
            if (k.alpha == t.alpha && k.quad == t.quad && k.lin == t.lin) {
                k.poly = detail::poly_add(k.poly, t.poly);
                merged = true;
                break;
            }
        }
        if (!merged) kept.push_back(std::move(t));
    }
    std::vector<GaussTerm> out;
    for (auto& k : kept)
        if (!k.poly.empty()) out.push_back(std::move(k));
    f.terms = std::move(out);
}

inline GaussianPacket zero_packet(std::int64_t legs) {
    GaussianPacket f;
    f.m_index = legs;
    return f;
}

inline cplx eval(const GaussianPacket& f, double x, std::int64_t alpha) {
    const std::int64_t a = floor_mod(alpha, f.m_index);
    cplx acc(0.0, 0.0);
    for (const auto& t : f.terms) {
        if (floor_mod(t.alpha, f.m_index) != a) continue;
        acc += detail::poly_eval(t.poly, cplx(x, 0.0)) *
               std::exp(t.quad * (x * x / 2.0) + t.lin * x);
    }
    return acc;
}

inline GaussianPacket packet_add(const GaussianPacket& a, const GaussianPacket& b) {
    if (a.m_index != b.m_index) throw ShapeMismatch("packet leg counts differ");
    GaussianPacket out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    normalize(out);
    return out;
}

inline GaussianPacket packet_scale(GaussianPacket f, cplx k) {
    for (auto& t : f.terms) t.poly = detail::poly_scale(t.poly, k);
    normalize(f);
    return f;
}

// x -> s*x + t inside one term, exponential constants folded into poly
inline GaussTerm term_affine(const GaussTerm& t, cplx s, cplx shift) {
    GaussTerm out;
    out.alpha = t.alpha;
    const cplx c = std::exp(t.quad * (shift * shift / 2.0) + t.lin * shift);
    out.poly = detail::poly_scale(detail::poly_affine(t.poly, s, shift), c);
    out.quad = t.quad * s * s;
    out.lin = t.quad * s * shift + t.lin * s;
    return out;
}

// product in a shared variable; leg comes from the caller
inline GaussTerm term_mul(const GaussTerm& a, const GaussTerm& b, std::int64_t alpha) {
    GaussTerm out;
    out.alpha = alpha;
    out.poly = detail::poly_mul(a.poly, b.poly);
    out.quad = a.quad + b.quad;
    out.lin = a.lin + b.lin;
    return out;
}

// plain d/dx, term by term: (p' + (quad*x + lin)*p) * exp(...)
inline GaussianPacket packet_derivative(const GaussianPacket& f) {
    GaussianPacket out;
    out.m_index = f.m_index;
    for (const auto& t : f.terms) {
        GaussTerm d = t;
        auto lead = detail::poly_add(detail::poly_scale(detail::poly_shift_up(t.poly), t.quad),
                                     detail::poly_scale(t.poly, t.lin));
        d.poly = detail::poly_add(detail::poly_deriv(t.poly), lead);
        out.terms.push_back(std::move(d));
    }
    normalize(out);
    return out;
}

// integral over R of p(x)*exp(A*x^2/2 + B*x), via the moment recurrence
// I_{k+1} = -(B*I_k + k*I_{k-1})/A from differentiating under B.
inline cplx gauss_integral(const std::vector<cplx>& poly, cplx A, cplx B) {
    if (!(A.real() < 0.0)) throw NonIntegrable("combined quadratic coefficient must have Re < 0");
    if (poly.empty()) return cplx(0.0, 0.0);
    const cplx I0 = std::sqrt(-TWO_PI / A) * std::exp(-B * B / (2.0 * A));
    cplx acc = poly[0] * I0;
    cplx Ik_1 = I0, Ik = (-B / A) * I0;
    for (std::size_t k = 1; k < poly.size(); ++k) {
        acc += poly[k] * Ik;
        const cplx next = -(B * Ik + cplx(double(k), 0.0) * Ik_1) / A;
        Ik_1 = Ik;
        Ik = next;
    }
    return acc;
}

struct CertifiedSum {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
    std::int64_t terms_used = 0;
};

// Sum of p(n)*exp(q*n^2/2 + l*n) over an arithmetic progression, truncated
// once a geometric majorant certifies both tails below tol. The ratio of
// consecutive member magnitudes past the window boundary nb is at most
// 2^deg(p) * exp(Re(q)*(|nb|*M + M^2/2) +- Re(l)*M), which the doubling loop
// drives under 1/2 before trusting the geometric bound.
inline CertifiedSum progression_gauss_sum(const std::vector<cplx>& poly, cplx q, cplx l,
                                          const ArithProgression& prog, double tol,
                                          std::int64_t cap = 100000) {
    if (prog.empty) return {};
    if (!(q.real() < 0.0)) throw ConvergenceError("progression sum needs Re(quad) < 0");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const double rq = q.real(), rl = l.real();
    const double M = double(prog.modulus);
    const double degp = double(poly.empty() ? 0 : poly.size() - 1);
    const double polyfac = std::pow(2.0, degp);

    auto majorant = [&](double n) {
        return detail::poly_abs_at(poly, std::abs(n)) * std::exp(rq * n * n / 2.0 + rl * n);
    };

    for (std::int64_t K = 8;; K *= 2) {
        if (2 * K + 1 > cap) throw ConvergenceError("progression window exceeded term cap");
        const double nR = double(prog.residue) + double(K + 1) * M;
        const double nL = double(prog.residue) - double(K + 1) * M;
        if (nR < M || nL > -M) continue;  // boundary too close to 0 for the poly ratio bound
        const double rhoR = polyfac * std::exp(rq * (nR * M + M * M / 2.0) + rl * M);
        const double rhoL = polyfac * std::exp(rq * (-nL * M + M * M / 2.0) - rl * M);
        if (!(rhoR < 0.5 && rhoL < 0.5)) continue;
        const double tail = majorant(nR) / (1.0 - rhoR) + majorant(nL) / (1.0 - rhoL);
        if (tail > tol) continue;
        CertifiedSum out;
        out.tail_bound = tail;
        for (std::int64_t k = -K; k <= K; ++k) {
            const double n = double(prog.residue) + double(k) * M;
            out.value += detail::poly_eval(poly, cplx(n, 0.0)) * std::exp(q * (n * n / 2.0) + l * n);
            ++out.terms_used;
        }
        return out;
    }
}

inline CertifiedSum theta_progression_sum(cplx q, cplx l, const ArithProgression& prog,
                                          double tol, std::int64_t cap = 100000) {
    static const std::vector<cplx> one = {cplx(1.0, 0.0)};
    return progression_gauss_sum(one, q, l, prog, tol, cap);
}

}  // namespace nctorus
