#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "nctorus/verify.hpp"

namespace {

using namespace nctorus;

void write_json_report(const Report& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open report file: " + path);
    out << report_to_json(rep).dump(2) << '\n';
    if (!out.good()) throw IOError("write failed: " + path);
}

int finish_report(const Report& rep, const std::string& json_path) {
    std::cout << "suite: " << rep.suite << "\n";
    for (const auto& line : rep.log) std::cout << "# " << line << "\n";
    std::size_t passed = 0;
    for (const auto& c : rep.checks) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "[%s] %-40s residual=%.3e bound=%.3e",
                      c.pass ? "pass" : "FAIL", c.id.c_str(), c.residual, c.bound);
        std::cout << buf << "\n";
        if (c.pass) ++passed;
    }
    std::cout << "result: " << passed << "/" << rep.checks.size() << " checks passed\n";
    if (!json_path.empty()) write_json_report(rep, json_path);
    return passed == rep.checks.size() ? 0 : 1;
}

int cmd_constants(const SL2Mat& g1, const SL2Mat& g2, const RunConfig& cfg,
                  const std::string& json_path) {
    cfg.validate();
    const StructureConstantsTable t = structure_constants(
        g1, g2, TorusParams(cfg.theta, cfg.tau), cplx(0.0, 0.0), cplx(0.0, 0.0), cfg.tol);
    char buf[200];
    std::snprintf(buf, sizeof(buf), "table theta=%.17g tau=(%.17g,%.17g) tol=%.3e", t.theta,
                  t.tau.real(), t.tau.imag(), t.tol);
    std::cout << buf << "\n";
    for (std::int64_t a1 = 0; a1 < t.n1(); ++a1)
        for (std::int64_t a2 = 0; a2 < t.n2(); ++a2)
            for (std::int64_t a = 0; a < t.n12(); ++a) {
                const cplx v = t.at(a1, a2, a);
                std::snprintf(buf, sizeof(buf), "c[%lld,%lld,%lld] = %.17g %+.17gi",
                              static_cast<long long>(a1), static_cast<long long>(a2),
                              static_cast<long long>(a), v.real(), v.imag());
                std::cout << buf << "\n";
            }
    std::snprintf(buf, sizeof(buf), "tail_bound <= %.3e", t.tail_bound);
    std::cout << buf << "\n";
    if (!json_path.empty()) {
        export_constants(g1, g2, cfg, json_path);
        std::cout << "wrote " << json_path << "\n";
    }
    return 0;
}

int cmd_cohomology(std::int64_t n, std::int64_t m, const RunConfig& cfg,
                   const std::string& json_path) {
    cfg.validate();
    const SL2Mat g = standard_label(n, m);
    const StdObject E(g, cfg.theta, cplx(0.0, 0.0));
    const auto dims = cohomology_dims(E, cfg.tau);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "object n=%lld m=%lld theta=%.17g: degree=%lld rank=%.17g slope=%.17g",
                  static_cast<long long>(n), static_cast<long long>(m), cfg.theta,
                  static_cast<long long>(E.degree()), rank(g, cfg.theta), slope(g, cfg.theta));
    std::cout << buf << "\n";
    std::cout << "h0=" << dims.first << " h1=" << dims.second << " euler=" << euler_char(E)
              << "\n";

    Report rep;
    rep.suite = "cohomology";
    rep.config = cfg;
    detail::add_check(rep, "cohomology.euler-consistency",
                      euler_char(E) == dims.first - dims.second,
                      std::fabs(double(euler_char(E) - (dims.first - dims.second))), 0.0);
    const auto want = m > 0   ? std::pair<std::int64_t, std::int64_t>(m, 0)
                      : m < 0 ? std::pair<std::int64_t, std::int64_t>(0, -m)
                              : std::pair<std::int64_t, std::int64_t>(1, 1);
    detail::add_check(rep, "cohomology.dimension-rule", dims == want,
                      dims == want ? 0.0 : 1.0, 0.0);
    return finish_report(rep, json_path);
}

int cmd_fourier(std::int64_t n, std::int64_t m, const RunConfig& cfg,
                const std::string& json_path) {
    cfg.validate();
    const SL2Mat g = standard_label(n, m);
    const StdObject E(g, cfg.theta, cplx(0.0, 0.0));
    const FMImage img = fm_class(E, cfg.tau);
    std::cout << "object n=" << n << " m=" << m << " theta=" << cfg.theta << "\n";
    if (img.kind == FMKind::bundle) {
        std::cout << "image: bundle rank=" << img.rank << " degree=" << img.degree
                  << " shift=" << img.shift << "\n";
    } else {
        std::cout << "image: point z=(" << img.point.real() << "," << img.point.imag()
                  << ") shift=" << img.shift << "\n";
    }

    Report rep;
    rep.suite = "fourier";
    rep.config = cfg;
    if (E.degree() > 0) {
        const auto basis = kernel_basis(E, cplx(0.0, 0.0), cfg.tau);
        bool exact = std::int64_t(basis.size()) == E.degree();
        const ModuleLabel label(E.g, E.theta);
        for (const auto& f : basis)
            if (!dbar(f, label, E.z, cfg.tau).terms.empty()) exact = false;
        detail::add_check(rep, "fourier.kernel-dimension", exact, exact ? 0.0 : 1.0, 0.0);
        const bool auto_ok = automorphy_check(E, cplx(0.1, -0.2), cfg.tau, 1e-10);
        detail::add_check(rep, "fourier.automorphy", auto_ok, auto_ok ? 0.0 : 1.0, 0.0);
    }
    return finish_report(rep, json_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification suites and tables for standard modules over the deformed torus"};
    app.require_subcommand(1);

    RunConfig cfg;
    double tau_re = 0.0, tau_im = -1.0;
    std::string json_path;
    app.add_option("--tol", cfg.tol, "certified series tolerance");
    app.add_option("--window", cfg.window, "lattice window for scans");
    app.add_option("--hermite-dim", cfg.hermite_dim, "spectral truncation size");
    app.add_option("--tau-re", tau_re, "real part of the modulus");
    app.add_option("--tau-im", tau_im, "imaginary part of the modulus (negative)");
    app.add_option("--theta", cfg.theta, "deformation parameter");
    app.add_option("--theta-prime", cfg.theta_prime, "second deformation parameter");
    app.add_option("--seed", cfg.seed, "seed for randomized suites");
    app.add_option("--json", json_path, "write the JSON report or table to this path");

    std::string suite;
    auto* sub_verify = app.add_subcommand("verify", "run a named verification suite");
    sub_verify->add_option("suite", suite, "identities|index|constants|category|equivalence|fourier|all")
        ->required();
    sub_verify->fallthrough();

    std::string g1_text, g2_text;
    auto* sub_constants = app.add_subcommand("constants", "structure-constant table for a pair");
    sub_constants->add_option("g1", g1_text, "first matrix, \"a,b;c,d\"")->required();
    sub_constants->add_option("g2", g2_text, "second matrix, \"a,b;c,d\"")->required();
    sub_constants->fallthrough();

    std::int64_t coh_n = 0, coh_m = 0;
    auto* sub_cohomology = app.add_subcommand("cohomology", "cohomology dimensions of a module");
    sub_cohomology->add_option("n", coh_n, "index n")->required();
    sub_cohomology->add_option("m", coh_m, "index m (the degree)")->required();
    sub_cohomology->fallthrough();

    double eq_theta = 0.0, eq_theta_prime = 0.0;
    auto* sub_equivalence =
        app.add_subcommand("equivalence", "equivalence suite at a parameter pair");
    sub_equivalence->add_option("theta", eq_theta, "source parameter")->required();
    sub_equivalence->add_option("theta-prime", eq_theta_prime, "target parameter")->required();
    sub_equivalence->fallthrough();

    std::int64_t fm_n = 0, fm_m = 0;
    auto* sub_fourier = app.add_subcommand("fourier", "transform data for a module");
    sub_fourier->add_option("n", fm_n, "index n")->required();
    sub_fourier->add_option("m", fm_m, "index m (the degree)")->required();
    sub_fourier->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.tau = nctorus::cplx(tau_re, tau_im);

    try {
        if (sub_verify->parsed()) return finish_report(nctorus::run_suite(suite, cfg), json_path);
        if (sub_constants->parsed())
            return cmd_constants(nctorus::parse_sl2_text(g1_text),
                                 nctorus::parse_sl2_text(g2_text), cfg, json_path);
        if (sub_cohomology->parsed()) return cmd_cohomology(coh_n, coh_m, cfg, json_path);
        if (sub_equivalence->parsed()) {
            cfg.theta = eq_theta;
            cfg.theta_prime = eq_theta_prime;
            return finish_report(nctorus::run_suite("equivalence", cfg), json_path);
        }
        if (sub_fourier->parsed()) return cmd_fourier(fm_n, fm_m, cfg, json_path);
    } catch (const nctorus::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
