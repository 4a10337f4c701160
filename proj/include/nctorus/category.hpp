#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "nctorus/analytic.hpp"
#include "nctorus/theta.hpp"

namespace nctorus {

// Object of the cohomology-level category: a positive-rank label together
// with a holomorphic twist and a homological shift.
struct StdObject {
    SL2Mat g{1, 0, 0, 1};
    double theta = 0.0;
    cplx z{0.0, 0.0};
    std::int64_t shift = 0;

    StdObject(const SL2Mat& g_, double theta_, cplx z_ = cplx(0.0, 0.0), std::int64_t shift_ = 0)
        : g(g_), theta(theta_), z(z_), shift(shift_) {
        const double r = rank(g, theta);
        if (std::fabs(r) < RANK_EPS) throw ZeroRank("object label has vanishing rank");
        if (r < 0.0) throw DomainError("object label needs positive rank");
    }

    double rk() const { return rank(g, theta); }
    std::int64_t degree() const { return g.c; }
    double mu() const { return double(g.c) / rk(); }

    friend bool operator==(const StdObject&, const StdObject&) = default;
};

// Morphism-space data: Hom(E, E2) is modeled on the module labeled by the
// quotient matrix over the transported base, twisted by rk(E)(z2 - z).
struct HomDescriptor {
    SL2Mat quot{1, 0, 0, 1};
    ModuleLabel label;
    cplx twist{0.0, 0.0};
};

inline HomDescriptor hom_label(const StdObject& E, const StdObject& E2) {
    if (E.theta != E2.theta) throw DomainError("objects live over different base parameters");
    const SL2Mat q = quotient(E2.g, E.g);
    const double base = mobius(E.g, E.theta);
    return HomDescriptor{q, ModuleLabel(q, base), E.rk() * (E2.z - E.z)};
}

// Cohomology dimensions of a twisted module from its slope data alone:
// positive degree puts everything in H^0, negative in H^1, and the flat case
// is a lattice membership test for rk*z in Z + tau Z.
inline std::pair<std::int64_t, std::int64_t> twisted_cohomology_dims(std::int64_t deg, double rk,
                                                                     cplx z, cplx tau) {
    if (tau.imag() >= 0.0) throw ConfigError("tau must lie in the lower half-plane");
    if (deg > 0) return {deg, 0};
    if (deg < 0) return {0, -deg};
    const cplx c = rk * z;
    const double q = c.imag() / tau.imag();
    const double p = c.real() - q * tau.real();
    const double r =
        std::max(std::fabs(p - std::round(p)), std::fabs(q - std::round(q)));
    if (r < 1e-9) return {1, 1};
    if (r < 1e-8) throw LatticeBoundary("twist sits near the flat-locus lattice boundary");
    return {0, 0};
}

inline std::pair<std::int64_t, std::int64_t> cohomology_dims(const StdObject& E, cplx tau) {
    return twisted_cohomology_dims(E.degree(), E.rk(), E.z, tau);
}

inline std::pair<std::int64_t, std::int64_t> hom_cohomology_dims(const StdObject& E,
                                                                 const StdObject& E2, cplx tau) {
    const HomDescriptor h = hom_label(E, E2);
    return twisted_cohomology_dims(h.label.degree(), h.label.rk(), h.twist, tau);
}

enum class HolBasis { phi, psi };

// Element of H^0 or H^1 of a morphism space: degree-0 vectors expand in the
// phi basis, degree-1 vectors in its Serre-dual psi basis.
struct HolVector {
    StdObject source;
    StdObject target;
    int degree = 0;
    HolBasis basis = HolBasis::phi;
    std::vector<cplx> coeffs;
};

inline HolVector make_hol(const StdObject& src, const StdObject& tgt, int degree,
                          std::vector<cplx> coeffs, cplx tau) {
    if (degree != 0 && degree != 1) throw DomainError("morphism degree must be 0 or 1");
    const auto dims = hom_cohomology_dims(src, tgt, tau);
    const std::int64_t want = degree == 0 ? dims.first : dims.second;
    if (std::int64_t(coeffs.size()) != want)
        throw ShapeMismatch("coefficient count must match the cohomology dimension");
    return HolVector{src, tgt, degree, degree == 0 ? HolBasis::phi : HolBasis::psi,
                     std::move(coeffs)};
}

inline HolVector unit_hol(const StdObject& src, const StdObject& tgt, int degree,
                          std::int64_t index, cplx tau) {
    if (degree != 0 && degree != 1) throw DomainError("morphism degree must be 0 or 1");
    const auto dims = hom_cohomology_dims(src, tgt, tau);
    const std::int64_t want = degree == 0 ? dims.first : dims.second;
    if (want <= 0) throw DomainError("requested basis vector of a zero space");
    std::vector<cplx> coeffs(std::size_t(want), cplx(0.0, 0.0));
    coeffs[std::size_t(floor_mod(index, want))] = cplx(1.0, 0.0);
    return HolVector{src, tgt, degree, degree == 0 ? HolBasis::phi : HolBasis::psi,
                     std::move(coeffs)};
}

namespace detail {

struct TableKey {
    SL2Mat g1, g2;
    double theta, tau_re, tau_im, z1_re, z1_im, z2_re, z2_im, tol;

    auto tie() const {
        return std::tie(g1.a, g1.b, g1.c, g1.d, g2.a, g2.b, g2.c, g2.d, theta, tau_re, tau_im,
                        z1_re, z1_im, z2_re, z2_im, tol);
    }
    friend bool operator<(const TableKey& x, const TableKey& y) { return x.tie() < y.tie(); }
};

}  // namespace detail

// Process-wide memo of series tables; lookups take a shared lock so
// concurrent readers never block each other.
class TableCache {
  public:
    static TableCache& instance() {
        static TableCache cache;
        return cache;
    }

    std::shared_ptr<const StructureConstantsTable> raw(const SL2Mat& g1, const SL2Mat& g2,
                                                       double theta, cplx tau, cplx z1, cplx z2,
                                                       double tol) {
        const detail::TableKey key{g1,        g2,        theta,     tau.real(), tau.imag(),
                                   z1.real(), z1.imag(), z2.real(), z2.imag(),  tol};
        {
            std::shared_lock lk(mtx_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        auto fresh = std::make_shared<const StructureConstantsTable>(
            raw_table(g1, g2, theta, tau, z1, z2, tol));
        std::unique_lock lk(mtx_);
        return map_.emplace(key, std::move(fresh)).first->second;
    }

    std::size_t size() const {
        std::shared_lock lk(mtx_);
        return map_.size();
    }

  private:
    TableCache() = default;
    mutable std::shared_mutex mtx_;
    std::map<detail::TableKey, std::shared_ptr<const StructureConstantsTable>> map_;
};

inline std::shared_ptr<const StructureConstantsTable> cached_composition_table(
    const SL2Mat& G1, const SL2Mat& G2, const SL2Mat& G3, double theta, cplx tau, cplx Z1,
    cplx Z2, cplx Z3, double tol) {
    const CompositionFrame f = composition_frame(G1, G2, G3, theta, Z1, Z2, Z3);
    return TableCache::instance().raw(f.g1, f.g2, f.theta, tau, f.z1, f.z2, tol);
}

// Composition H^i Hom(E2,E3) x H^j Hom(E1,E2) -> H^{i+j} Hom(E1,E3).
// Both factors in degree 0 contract the composition table directly; the
// mixed patterns are read off through the dual basis, tracing against the
// degree-0 basis of the reversed outer space. Two degree-1 factors have no
// home in the two-term complex and are rejected.
inline HolVector compose_hom(const HolVector& v2, const HolVector& v1, cplx tau,
                             double tol = 1e-12) {
    if (!(v1.target == v2.source)) throw ShapeMismatch("factors do not share the middle object");
    const StdObject& E1 = v1.source;
    const StdObject& E2 = v1.target;
    const StdObject& E3 = v2.target;

    const auto scalar_endo = [](const HolVector& v) {
        return v.degree == 0 && v.source == v.target;
    };
    if (scalar_endo(v1)) {
        HolVector out = v2;
        out.source = E1;
        for (auto& c : out.coeffs) c *= v1.coeffs[0];
        return out;
    }
    if (scalar_endo(v2)) {
        HolVector out = v1;
        out.target = E3;
        for (auto& c : out.coeffs) c *= v2.coeffs[0];
        return out;
    }

    if (v1.degree == 1 && v2.degree == 1)
        throw DomainError("no degree-two morphisms in the two-term complex");

    const int degree_out = v1.degree + v2.degree;
    if (v1.coeffs.empty() || v2.coeffs.empty()) {
        const auto dims = hom_cohomology_dims(E1, E3, tau);
        const std::int64_t want = degree_out == 0 ? dims.first : dims.second;
        return HolVector{E1, E3, degree_out,
                         degree_out == 0 ? HolBasis::phi : HolBasis::psi,
                         std::vector<cplx>(std::size_t(want), cplx(0.0, 0.0))};
    }

    const std::int64_t c12 = quotient(E2.g, E1.g).c;
    const std::int64_t c23 = quotient(E3.g, E2.g).c;
    const std::int64_t c13 = quotient(E3.g, E1.g).c;
    if (c12 == 0 || c23 == 0)
        throw DomainError("composition through a flat non-scalar morphism space");

    if (degree_out == 0) {
        const auto tbl =
            cached_composition_table(E1.g, E2.g, E3.g, E1.theta, tau, E1.z, E2.z, E3.z, tol);
        std::vector<cplx> out(std::size_t(c13), cplx(0.0, 0.0));
        for (std::int64_t a = 0; a < std::int64_t(v2.coeffs.size()); ++a)
            for (std::int64_t b = 0; b < std::int64_t(v1.coeffs.size()); ++b) {
                const cplx prod = v2.coeffs[std::size_t(a)] * v1.coeffs[std::size_t(b)];
                for (std::int64_t g = 0; g < c13; ++g)
                    out[std::size_t(g)] += prod * tbl->at(a, b, g);
            }
        return HolVector{E1, E3, 0, HolBasis::phi, std::move(out)};
    }

    if (c13 > 0) return HolVector{E1, E3, 1, HolBasis::psi, {}};
    if (c13 == 0) throw DomainError("mixed composition lands in a flat morphism space");

    std::vector<cplx> out(std::size_t(-c13), cplx(0.0, 0.0));
    for (std::int64_t gma = 0; gma < -c13; ++gma) {
        const HolVector probe = unit_hol(E3, E1, 0, gma, tau);
        cplx s(0.0, 0.0);
        if (v1.degree == 0) {
            const HolVector inner = compose_hom(v1, probe, tau, tol);
            for (std::size_t a = 0; a < inner.coeffs.size(); ++a)
                s += inner.coeffs[a] * v2.coeffs[a];
        } else {
            const HolVector inner = compose_hom(probe, v2, tau, tol);
            for (std::size_t a = 0; a < inner.coeffs.size(); ++a)
                s += inner.coeffs[a] * v1.coeffs[a];
        }
        out[std::size_t(gma)] = s;
    }
    return HolVector{E1, E3, 1, HolBasis::psi, std::move(out)};
}

// Perfect pairing between complementary cohomological degrees of opposite
// morphism spaces. The psi basis is dual to phi by definition, so the value
// is the plain coefficient contraction.
inline cplx serre_pairing(const HolVector& v, const HolVector& w) {
    if (!(v.source == w.target) || !(v.target == w.source))
        throw ShapeMismatch("pairing needs opposite morphism spaces");
    if (v.degree + w.degree != 1) throw ShapeMismatch("pairing needs complementary degrees");
    if (v.coeffs.size() != w.coeffs.size())
        throw ShapeMismatch("coefficient lengths do not match");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < v.coeffs.size(); ++i) s += v.coeffs[i] * w.coeffs[i];
    return s;
}

// Gram matrix of the integral pairing between analytic representatives of
// H^0 Hom(E, E2) and H^1 Hom(E2, E). Nonsingularity is the perfectness fact
// behind the dual-basis normalization.
inline Eigen::MatrixXcd serre_gram_matrix(const StdObject& E, const StdObject& E2, cplx tau) {
    const HomDescriptor fwd = hom_label(E, E2);
    const HomDescriptor bwd = hom_label(E2, E);
    const std::int64_t c = fwd.quot.c;
    if (c <= 0) throw DomainError("gram matrix needs a positive-degree morphism space");
    Eigen::MatrixXcd G(c, c);
    for (std::int64_t b = 0; b < c; ++b) {
        const GaussianPacket psi = psi_rep(bwd.label, bwd.twist, b, tau);
        for (std::int64_t a = 0; a < c; ++a) {
            const GaussianPacket phi = phi_basis(fwd.label, fwd.twist, a, tau);
            G(b, a) = pairing_b(psi, phi, fwd.quot, fwd.label.theta);
        }
    }
    return G;
}

// |det| of the gram matrix divided by the product of row norms; the ratio
// lies in [0,1] and is scale-free.
inline double serre_gram_normalized_det(const StdObject& E, const StdObject& E2, cplx tau) {
    const Eigen::MatrixXcd G = serre_gram_matrix(E, E2, tau);
    double scale = 1.0;
    for (Eigen::Index r = 0; r < G.rows(); ++r) {
        const double n = G.row(r).norm();
        if (n == 0.0) return 0.0;
        scale *= n;
    }
    return std::abs(G.determinant()) / scale;
}

// Matrix of U_{(m/c, n/c)} f(x, alpha) = e(-(m/c) alpha) f(x, alpha - n a)
// on the |c|-dimensional cohomology basis indexed by legs.
inline Eigen::MatrixXcd heisenberg_matrix(const StdObject& E, std::int64_t m, std::int64_t n) {
    const std::int64_t c = E.degree();
    if (c == 0) throw DegenerateDegree("torsion action needs nonzero degree");
    const std::int64_t cc = std::llabs(c);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(cc, cc);
    for (std::int64_t b = 0; b < cc; ++b) {
        const std::int64_t img = b + n * E.g.a;
        M(floor_mod(img, cc), b) = e2pi(-double(m) * double(img) / double(c));
    }
    return M;
}

// Dimension of the algebra commuting with the whole torsion-translation
// family; 1 means the representation is irreducible.
inline int heisenberg_commutant_dim(const StdObject& E) {
    const Eigen::MatrixXcd u1 = heisenberg_matrix(E, 1, 0);
    const Eigen::MatrixXcd u2 = heisenberg_matrix(E, 0, 1);
    const Eigen::Index cc = u1.rows();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * cc * cc, cc * cc);
    const auto fill = [&](Eigen::Index off, const Eigen::MatrixXcd& u) {
        for (Eigen::Index k = 0; k < cc; ++k)
            for (Eigen::Index l = 0; l < cc; ++l)
                for (Eigen::Index j = 0; j < cc; ++j) {
                    A(off + k + l * cc, j + l * cc) += u(k, j);
                    A(off + k + l * cc, k + j * cc) -= u(j, l);
                }
    };
    fill(0, u1);
    fill(cc * cc, u2);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    const double cut = 1e-9 * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return int(cc * cc) - rank;
}

// chi(E[n]) = (-1)^n deg(E): the two-term complex has h0 - h1 = deg in every
// slope regime, including the flat one.
inline std::int64_t euler_char(const StdObject& E) {
    return floor_mod(E.shift, 2) == 0 ? E.degree() : -E.degree();
}

// Finite combination of left generator monomials: sum of coeff * U1^j U2^k,
// each monomial applying the U2 steps first.
struct EndoPoly {
    std::map<std::pair<std::int64_t, std::int64_t>, cplx> coeff;
};

inline GaussianPacket endo_apply(const EndoPoly& p, const GaussianPacket& f,
                                 const ModuleLabel& label) {
    GaussianPacket out = zero_packet(f.m_index);
    for (const auto& [jk, w] : p.coeff) {
        GaussianPacket term = act_generator(f, label, Side::left, Gen::U2, jk.second);
        term = act_generator(term, label, Side::left, Gen::U1, jk.first);
        out = packet_add(out, packet_scale(term, w));
    }
    normalize(out);
    return out;
}

// Flat derivative on the endomorphism side: monomials are eigenvectors with
// eigenvalue 2 pi i (j tau + k) / rk.
inline EndoPoly endo_dbar(const EndoPoly& p, cplx tau, double rk) {
    EndoPoly out;
    for (const auto& [jk, w] : p.coeff)
        out.coeff[jk] = w * cplx(0.0, TWO_PI) * (double(jk.first) * tau + double(jk.second)) / rk;
    return out;
}

// Connection data of the self-extension attached to a degree-one class:
// the operator acts as [[dbar, rep],[0, dbar]] on section pairs.
struct ExtStructure {
    StdObject top;
    StdObject bottom;
    EndoPoly rep;
    bool split = true;
};

inline ExtStructure ext_structure(const HolVector& cls) {
    if (cls.degree != 1) throw DomainError("extension class must have degree one");
    if (!(cls.source == cls.target))
        throw DomainError("only flat endomorphism classes carry a monomial representative");
    ExtStructure s{cls.target, cls.source, EndoPoly{}, true};
    const cplx c0 = cls.coeffs.empty() ? cplx(0.0, 0.0) : cls.coeffs[0];
    if (c0 != cplx(0.0, 0.0)) {
        s.rep.coeff[{0, 0}] = c0;
        s.split = false;
    }
    return s;
}

inline std::pair<GaussianPacket, GaussianPacket> ext_apply(const ExtStructure& s,
                                                           const GaussianPacket& s1,
                                                           const GaussianPacket& s2, cplx tau) {
    const ModuleLabel lab(s.top.g, s.top.theta);
    GaussianPacket top = dbar(s1, lab, s.top.z, tau);
    top = packet_add(top, endo_apply(s.rep, s2, lab));
    GaussianPacket bot = dbar(s2, lab, s.bottom.z, tau);
    return {top, bot};
}

// Changing the representative by the flat derivative of f is the conjugation
// by [[1, f],[0, 1]]; the two structures are isomorphic.
inline ExtStructure ext_conjugate(const ExtStructure& s, const EndoPoly& f, cplx tau) {
    ExtStructure out = s;
    const EndoPoly df = endo_dbar(f, tau, s.top.rk());
    for (const auto& [jk, w] : df.coeff) out.rep.coeff[jk] += w;
    out.split = true;
    for (const auto& [jk, w] : out.rep.coeff)
        if (w != cplx(0.0, 0.0)) out.split = false;
    return out;
}

}  // namespace nctorus
