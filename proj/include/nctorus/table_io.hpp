#pragma once

#include <json.hpp>

#include "nctorus/theta.hpp"

namespace nctorus {

// Schema: {g1, g2, theta, tau:[re,im], z1:[re,im], z2:[re,im], tol,
// entries:[{a1,a2,a,re,im}], tail_bound}; matrices as flat [a,b,c,d];
// entries with empty index sets are omitted and read back as exact zeros.
inline nlohmann::json table_to_json(const StructureConstantsTable& t) {
    nlohmann::json j;
    j["g1"] = {t.g1.a, t.g1.b, t.g1.c, t.g1.d};
    j["g2"] = {t.g2.a, t.g2.b, t.g2.c, t.g2.d};
    j["theta"] = t.theta;
    j["tau"] = {t.tau.real(), t.tau.imag()};
    j["z1"] = {t.z1.real(), t.z1.imag()};
    j["z2"] = {t.z2.real(), t.z2.imag()};
    j["tol"] = t.tol;
    j["tail_bound"] = t.tail_bound;
    nlohmann::json entries = nlohmann::json::array();
    for (std::int64_t a1 = 0; a1 < t.n1(); ++a1)
        for (std::int64_t a2 = 0; a2 < t.n2(); ++a2)
            for (std::int64_t a = 0; a < t.n12(); ++a) {
                if (index_set(t.g1, t.g2, a1, a2, a).empty) continue;
                const cplx v = t.at(a1, a2, a);
                entries.push_back({{"a1", a1},
                                   {"a2", a2},
                                   {"a", a},
                                   {"re", v.real()},
                                   {"im", v.imag()}});
            }
    j["entries"] = std::move(entries);
    return j;
}

inline StructureConstantsTable table_from_json(const nlohmann::json& j) {
    auto mat = [&](const char* key) {
        const auto& m = j.at(key);
        if (!m.is_array() || m.size() != 4) throw IOError("matrix field must be [a,b,c,d]");
        return SL2Mat(m[0].get<std::int64_t>(), m[1].get<std::int64_t>(),
                      m[2].get<std::int64_t>(), m[3].get<std::int64_t>());
    };
    auto cx = [&](const char* key) {
        const auto& v = j.at(key);
        if (!v.is_array() || v.size() != 2) throw IOError("complex field must be [re,im]");
        return cplx(v[0].get<double>(), v[1].get<double>());
    };
    StructureConstantsTable t;
    t.g1 = mat("g1");
    t.g2 = mat("g2");
    t.theta = j.at("theta").get<double>();
    t.tau = cx("tau");
    t.z1 = cx("z1");
    t.z2 = cx("z2");
    t.tol = j.at("tol").get<double>();
    t.tail_bound = j.at("tail_bound").get<double>();
    t.c1 = t.g1.c;
    t.c2 = t.g2.c;
    t.c12 = compose(t.g1, t.g2).c;
    if (t.c1 == 0 || t.c2 == 0 || t.c12 == 0) throw IOError("degenerate degrees in table data");
    t.values.assign(std::size_t(t.n1() * t.n2() * t.n12()), cplx(0.0, 0.0));
    for (const auto& e : j.at("entries")) {
        const std::int64_t a1 = floor_mod(e.at("a1").get<std::int64_t>(), t.n1());
        const std::int64_t a2 = floor_mod(e.at("a2").get<std::int64_t>(), t.n2());
        const std::int64_t a = floor_mod(e.at("a").get<std::int64_t>(), t.n12());
        t.values[std::size_t((a1 * t.n2() + a2) * t.n12() + a)] =
            cplx(e.at("re").get<double>(), e.at("im").get<double>());
    }
    return t;
}

}  // namespace nctorus
