#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nctorus/category.hpp"

namespace nctorus {

enum class FMKind { bundle, point };

// Discrete data of the transform image: a stable bundle with (rank, degree)
// read off the label, or a point with its location on the target curve.
struct FMImage {
    FMKind kind = FMKind::bundle;
    std::int64_t rank = 0;
    std::int64_t degree = 0;
    int shift = 0;
    cplx point{0.0, 0.0};
};

namespace detail {

inline void require_transform_input(const StdObject& E, cplx tau) {
    if (!(tau.imag() < 0.0)) throw ConfigError("tau must lie in the lower half-plane");
    if (E.g.c <= 0) throw DomainError("kernel sections need positive degree and slope");
}

inline cplx reduce_mod_lattice(cplx w, cplx tau) {
    const double q = std::nearbyint(w.imag() / tau.imag());
    w -= q * tau;
    w -= std::nearbyint(w.real());
    return w;
}

}  // namespace detail

// Sections spanning the kernel of the twisted holomorphic structure at
// transform parameter z0: one Gaussian per leg, annihilated symbolically.
inline std::vector<GaussianPacket> kernel_basis(const StdObject& E, cplx z0, cplx tau) {
    detail::require_transform_input(E, tau);
    const ModuleLabel label(E.g, E.theta);
    std::vector<GaussianPacket> out;
    out.reserve(std::size_t(label.degree()));
    for (std::int64_t a = 0; a < label.degree(); ++a)
        out.push_back(phi_basis(label, E.z + z0, a, tau));
    return out;
}

namespace detail {

inline bool packets_close(const GaussianPacket& a, const GaussianPacket& b, double tol) {
    static const double xs[] = {-1.7, -0.9, -0.3, 0.2, 0.6, 1.4};
    if (a.m_index != b.m_index) return false;
    for (std::int64_t leg = 0; leg < a.m_index; ++leg)
        for (const double x : xs) {
            const cplx va = eval(a, x, leg);
            const cplx vb = eval(b, x, leg);
            if (std::abs(va - vb) > tol * std::max(1.0, std::abs(vb))) return false;
        }
    return true;
}

}  // namespace detail

// The lattice action on kernel sections: translating the parameter by 1 and
// acting by U2 is diagonal with factor e(-(n/m) alpha); translating by tau,
// acting by U1 and correcting by e(-theta z) moves leg alpha to alpha + 1
// with the scalar factor e((n/m)(zE + z) + theta zE + tau/(2 mu)). Both are
// checked pointwise, together with the commutation of the two walks.
inline bool automorphy_check(const StdObject& E, cplx z0, cplx tau, double tol) {
    detail::require_transform_input(E, tau);
    const ModuleLabel label(E.g, E.theta);
    const double nm = double(label.g.d) / double(label.g.c);
    const cplx zt = E.z + z0;
    const cplx tau_factor =
        e2pi(nm * zt + label.theta * E.z + tau / (2.0 * label.mu()));
    for (std::int64_t a = 0; a < label.degree(); ++a) {
        const GaussianPacket lhs1 =
            act_generator(phi_basis(label, zt + 1.0, a, tau), label, Side::right, Gen::U2, 1);
        const GaussianPacket rhs1 =
            packet_scale(phi_basis(label, zt, a, tau), e2pi(-double(a) * nm));
        if (!detail::packets_close(lhs1, rhs1, tol)) return false;

        const GaussianPacket lhst = packet_scale(
            act_generator(phi_basis(label, zt + tau, a, tau), label, Side::right, Gen::U1, 1),
            e2pi(-label.theta * z0));
        const GaussianPacket rhst =
            packet_scale(phi_basis(label, zt, a + 1, tau), tau_factor);
        if (!detail::packets_close(lhst, rhst, tol)) return false;

        // corrected walks around the fundamental cell agree
        const GaussianPacket corner = phi_basis(label, zt + 1.0 + tau, a, tau);
        const GaussianPacket path1 = packet_scale(
            act_generator(act_generator(corner, label, Side::right, Gen::U1, 1), label,
                          Side::right, Gen::U2, 1),
            e2pi(-label.theta * (z0 + 1.0)));
        const GaussianPacket path2 = packet_scale(
            act_generator(act_generator(corner, label, Side::right, Gen::U2, 1), label,
                          Side::right, Gen::U1, 1),
            e2pi(-label.theta * z0));
        if (!detail::packets_close(path1, path2, tol)) return false;
    }
    return true;
}

// Discrete image class: positive degree gives a bundle with rank and degree
// exchanged (degree picks up a sign), negative degree the same data shifted
// by one, and the trivial-label module a point at the negated twist.
inline FMImage fm_class(const StdObject& E, cplx tau) {
    const std::int64_t m = E.g.c;
    const std::int64_t n = E.g.d;
    if (m > 0) return FMImage{FMKind::bundle, m, -n, E.shift, cplx(0.0, 0.0)};
    if (m < 0) return FMImage{FMKind::bundle, -m, n, E.shift - 1, cplx(0.0, 0.0)};
    return FMImage{FMKind::point, 0, 0, E.shift - 1, detail::reduce_mod_lattice(-E.z, tau)};
}

namespace detail {

// coordinates of a one-term packet (p0 + p1 x) G_alpha against the Gaussian
// with the given exponents
struct KernelCoords {
    std::int64_t alpha = 0;
    cplx p0{0.0, 0.0};
    cplx p1{0.0, 0.0};
};

inline KernelCoords kernel_coords(const GaussianPacket& f, cplx quad, cplx lin) {
    if (f.terms.size() != 1) throw InternalInvariantViolation("expected a one-term packet");
    const GaussTerm& t = f.terms.front();
    const double scale = std::max(1.0, std::abs(quad)) + std::abs(lin);
    if (std::abs(t.quad - quad) + std::abs(t.lin - lin) > 1e-9 * scale)
        throw InternalInvariantViolation("packet left the kernel family");
    KernelCoords out;
    out.alpha = t.alpha;
    out.p0 = t.poly.size() > 0 ? t.poly[0] : cplx(0.0, 0.0);
    out.p1 = t.poly.size() > 1 ? t.poly[1] : cplx(0.0, 0.0);
    if (t.poly.size() > 2) throw InternalInvariantViolation("packet degree grew past one");
    return out;
}

inline int commutant_dim(const std::vector<Eigen::MatrixXcd>& mats, double cut_rel) {
    const Eigen::Index k = mats.front().rows();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(Eigen::Index(mats.size()) * k * k, k * k);
    Eigen::Index off = 0;
    for (const auto& U : mats) {
        for (Eigen::Index kk = 0; kk < k; ++kk)
            for (Eigen::Index l = 0; l < k; ++l)
                for (Eigen::Index j = 0; j < k; ++j) {
                    A(off + kk + l * k, j + l * k) += U(kk, j);
                    A(off + kk + l * k, kk + j * k) -= U(j, l);
                }
        off += k * k;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    const double cut = cut_rel * (sv.size() > 0 ? sv(0) : 0.0);
    int dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cut) ++dim;
    dim += int(A.cols() - sv.size());
    return dim;
}

}  // namespace detail

// Self-extension along the unit class: the kernel doubles to pairs
// (p0 - p1 x, p1) G and the tau-step picks up an off-diagonal mixing block.
// Non-splitness is read off the joint commutant of the two lattice steps:
// dimension 2 means only upper-triangular intertwiners survive, so no
// splitting idempotent exists. Zeroing the mixing block (falsification
// probe) restores the split answer.
inline bool extension_nonsplit_check(const StdObject& E, cplx tau, double tol,
                                     bool zero_mixing = false) {
    detail::require_transform_input(E, tau);
    const ModuleLabel label(E.g, E.theta);
    const std::int64_t m = label.degree();
    const GaussianPacket ref = phi_basis(label, E.z, 0, tau);
    const cplx quad = ref.terms.front().quad;
    const cplx lin = ref.terms.front().lin;

    const auto coords_of = [&](const GaussianPacket& f) {
        return detail::kernel_coords(f, quad, lin);
    };
    // column = image of the basis pair (delta f1 or delta f2 on leg a) under
    // one lattice step; rows 0..m-1 hold f1, rows m..2m-1 hold f2
    Eigen::MatrixXcd Rt = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    Eigen::MatrixXcd R1 = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    for (std::int64_t a = 0; a < m; ++a) {
        // tau step: input sections at twist E.z + tau
        GaussianPacket g = phi_basis(label, E.z + tau, a, tau);
        GaussianPacket xg = g;
        xg.terms.front().poly = {cplx(0.0, 0.0), cplx(1.0, 0.0)};

        const auto v1 = coords_of(act_generator(g, label, Side::right, Gen::U1, 1));
        Rt(v1.alpha, a) = v1.p0;
        const auto w1 = coords_of(
            packet_scale(act_generator(xg, label, Side::right, Gen::U1, 1), cplx(-1.0, 0.0)));
        const auto w2 = coords_of(act_generator(g, label, Side::right, Gen::U1, 1));
        Rt(w1.alpha, m + a) = w1.p0;
        Rt(m + w2.alpha, m + a) = w2.p0;
        if (std::abs(-w1.p1 - w2.p0) > tol * std::max(1.0, std::abs(w2.p0)))
            throw InternalInvariantViolation("pair coordinates disagree between components");

        // unit step: input sections at twist E.z + 1
        GaussianPacket h = phi_basis(label, E.z + 1.0, a, tau);
        GaussianPacket xh = h;
        xh.terms.front().poly = {cplx(0.0, 0.0), cplx(1.0, 0.0)};
        const auto u1 = coords_of(act_generator(h, label, Side::right, Gen::U2, 1));
        R1(u1.alpha, a) = u1.p0;
        const auto y1 = coords_of(
            packet_scale(act_generator(xh, label, Side::right, Gen::U2, 1), cplx(-1.0, 0.0)));
        const auto y2 = coords_of(act_generator(h, label, Side::right, Gen::U2, 1));
        R1(y1.alpha, m + a) = y1.p0;
        R1(m + y2.alpha, m + a) = y2.p0;
    }

    const double mixing = Rt.block(0, m, m, m).norm();
    if (zero_mixing) {
        Rt.block(0, m, m, m).setZero();
        R1.block(0, m, m, m).setZero();
    } else if (mixing <= tol * Rt.norm()) {
        return false;
    }
    return detail::commutant_dim({R1, Rt}, 1e-9) == 2;
}

}  // namespace nctorus
