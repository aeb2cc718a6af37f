#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reglab/checks.hpp"
#include "reglab/report.hpp"
#include "reglab/stark_pipeline.hpp"

using namespace reglab;

namespace {

struct GlobalOpts {
    double tol = 1e-12;
    double shells = 1500;
    int max_q_terms = 400;
    long long norm_bound = 1000000;
    long long max_den = 10000;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;

    EvalSettings settings() const {
        EvalSettings s;
        s.tol = tol;
        s.shell_radius = shells;
        s.max_q_terms = max_q_terms;
        s.validate();
        return s;
    }
};

void emit(const Json& j, const GlobalOpts& g) {
    if (g.out.empty())
        std::cout << j.dump(2) << std::endl;
    else
        write_json_file(j, g.out);
}

Json base_report(const std::string& cmd, const Json& resolved, const GlobalOpts& g) {
    Json j;
    j["tool"] = kToolVersion;
    j["command"] = cmd;
    j["config"] = resolved;
    j["config_hash"] = std::to_string(fnv1a(resolved.dump()));
    j["seed"] = g.seed;
    j["settings"] = settings_json(g.settings());
    j["threads"] = g.threads;
    return j;
}

ComplexLattice lattice_by_name(const std::string& name, const std::string& tau_str) {
    if (!tau_str.empty()) {
        cplx tau = detail::parse_complex(tau_str);
        return make_lattice(1.0, tau);
    }
    if (name == "zi") return make_lattice(1.0, cplx(0.0, 1.0));
    if (name == "eisenstein") return make_lattice(1.0, std::exp(cplx(0.0, kTwoPi / 3.0)));
    if (name == "d7") return make_lattice(1.0, cplx(0.5, 0.5 * std::sqrt(7.0)));
    throw BadConfig("unknown lattice name: " + name + " (use zi, eisenstein, d7 or --tau)");
}

int run_dilog(const GlobalOpts& g, const std::string& zs, const std::string& qs) {
    cplx z = detail::parse_complex(zs);
    Json cfg{{"z", zs}, {"q", qs}};
    Json rep = base_report("dilog", cfg, g);
    rep["dilog"] = to_json(dilog(z));
    rep["bloch_wigner"] = fmt_double(bloch_wigner(z));
    if (!qs.empty()) {
        cplx q = detail::parse_complex(qs);
        EvalSettings s = g.settings();
        rep["Dq"] = fmt_double(elliptic_dilog_Dq(z, q, s));
        rep["Jq"] = fmt_double(Jq(z, q, s));
        rep["Rq"] = to_json(Rq(z, q, s));
    }
    emit(rep, g);
    return 0;
}

int run_kronecker(const GlobalOpts& g, const std::string& ua, const std::string& ub,
                  const std::string& latname, const std::string& tau_str,
                  const std::string& s_str, int a) {
    ComplexLattice lat = lattice_by_name(latname, tau_str);
    TorsionCoord p(Rat::parse(ua), Rat::parse(ub));
    cplx u = p.embed(lat);
    EvalSettings set = g.settings();
    Json cfg{{"ua", ua}, {"ub", ub}, {"lattice", latname}, {"tau", tau_str},
             {"s", s_str}, {"a", a}};
    Json rep = base_report("kronecker", cfg, g);
    if (!s_str.empty()) {
        cplx s = detail::parse_complex(s_str);
        rep["K_a_continued"] = to_json(kronecker_continued(a, 0.0, u, s, lat, set));
        emit(rep, g);
        return 0;
    }
    K21Report k = k21_crosscheck(u, lat, set);
    rep["qseries"] = to_json(k.qseries);
    rep["continued"] = to_json(k.continued);
    rep["direct"] = to_json(k.direct);
    rep["Rq"] = to_json(k.ereg_rq);
    Json res;
    res["qseries_vs_continued"] = fmt_double(k.resid_q_vs_cont);
    res["continued_vs_direct"] = fmt_double(k.resid_cont_vs_direct);
    res["qseries_vs_direct"] = fmt_double(k.resid_q_vs_direct);
    res["rq_identity"] = fmt_double(k.resid_ereg);
    rep["residuals"] = res;
    emit(rep, g);
    bool ok = k.resid_q_vs_cont < 1e-9 && k.resid_cont_vs_direct < 5e-3;
    return ok ? 0 : 1;
}

int run_check(const GlobalOpts& g, const std::string& suite) {
    std::vector<std::string> names =
        suite == "all" ? checks::suite_names() : std::vector<std::string>{suite};
    Json rep = base_report("check", Json{{"suite", suite}}, g);
    Json lines = Json::array();
    bool all_ok = true;
    for (auto& n : names) {
        for (auto& res : checks::run_suite(n, g.seed)) {
            std::printf("%s\n", res.line().c_str());
            std::fflush(stdout);
            all_ok = all_ok && res.passed;
            lines.push_back(Json{{"name", res.name},
                                 {"passed", res.passed},
                                 {"max_residual", fmt_double(res.max_residual)},
                                 {"threshold", fmt_double(res.threshold)}});
        }
    }
    rep["results"] = lines;
    rep["passed"] = all_ok;
    if (!g.out.empty()) write_json_file(rep, g.out);
    return all_ok ? 0 : 1;
}

int run_heckeL(const GlobalOpts& g, int D, const std::string& modulus, int phi_index,
               const std::string& s_str) {
    ImagQuadField K(D);
    QuadInt gmod = K.parse(modulus);
    auto rc = std::make_shared<RayClassGroupData>(ray_class_group(K, gmod));
    auto chars = hecke_characters(K, gmod, rc);
    Json cfg{{"D", D}, {"modulus", modulus}, {"phi_fin_index", phi_index}, {"s", s_str}};
    Json rep = base_report("heckeL", cfg, g);
    rep["ray_class_orders"] = rc->group().orders;
    rep["num_hecke_characters"] = chars.size();
    if (chars.empty()) {
        emit(rep, g);
        return 0;
    }
    if (phi_index < 0 || phi_index >= (int)chars.size())
        throw BadConfig("phi_fin_index out of range");
    const HeckeCharData& phi = chars[(std::size_t)phi_index];
    cplx s = s_str.empty() ? cplx(2.0, 0.0) : detail::parse_complex(s_str);
    EvalSettings set = g.settings();

    Json classes = Json::array();
    double worst_rel = 0.0;
    for (long long t = 0; t < rc->group().size(); ++t) {
        PartialLSpec spec;
        spec.hecke = phi;
        spec.class_element = rc->group().element(t);
        Json c;
        c["class_index"] = t;
        c["representative"] = K.print(rc->class_representative(spec.class_element));
        cplx direct = partial_L_direct(spec, s, g.norm_bound);
        cplx kron = partial_L_kronecker(spec, s, set);
        cplx d0 = partial_L_deriv0(spec, set);
        c["L_direct"] = to_json(direct);
        c["L_kronecker"] = to_json(kron);
        c["L_deriv0"] = to_json(d0);
        double rel = std::abs(direct - kron) / std::max(1e-30, std::abs(kron));
        c["rel_direct_vs_kronecker"] = fmt_double(rel);
        worst_rel = std::max(worst_rel, rel);
        classes.push_back(c);
    }
    rep["classes"] = classes;
    rep["worst_rel_direct_vs_kronecker"] = fmt_double(worst_rel);
    emit(rep, g);
    return worst_rel < 1e-3 ? 0 : 1;
}

int run_stark(const GlobalOpts& g, const std::string& config_path, bool dry_run) {
    std::ifstream in(config_path);
    if (!in) throw BadConfig("cannot open config " + config_path);
    Json cj = Json::parse(in);
    StarkConfig cfg = StarkConfig::from_json(cj);
    if (g.seed) cfg.seed = g.seed;
    if (dry_run) {
        Json plan = base_report("stark", cfg.to_json(), g);
        plan["plan"] = Json::array({"setup", "ray_class_group", "hecke_character", "twist",
                                    "galois_data", "symbols", "blocks", "stark_regulator",
                                    "leading_coefficient", "ratio", "conjugate_run",
                                    "recognition"});
        plan["dry_run"] = true;
        emit(plan, g);
        return 0;
    }
    StarkReport rep = run_stark_pipeline(cfg);
    Json j = rep.to_json();
    j["threads"] = g.threads;
    emit(j, g);
    bool ok = rep.resid_dedekind < 1e-8 && rep.resid_conj_A < 1e-8;
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for elliptic dilogarithms, Kronecker-Eisenstein "
                 "series, K2 regulators of CM curves, Hecke L-derivatives, and the "
                 "elliptic Stark ratio A(E,chi) = R(E,chi)/c(E,chi)"};
    app.require_subcommand(1);

    GlobalOpts g;
    if (const char* env = std::getenv("REGLAB_THREADS")) {
        g.threads = std::max(1, std::atoi(env));
        g.threads = std::min(g.threads, 1); // current build evaluates serially
    }
    app.add_option("--tol", g.tol, "target absolute accuracy");
    app.add_option("--shells", g.shells, "direct-sum shell radius");
    app.add_option("--max-q-terms", g.max_q_terms, "q-series term cap");
    app.add_option("--norm-bound", g.norm_bound, "ideal-norm cutoff for direct L sums");
    app.add_option("--max-den", g.max_den, "largest denominator for rational recognition");
    app.add_option("--seed", g.seed, "seed for randomized suites (recorded in reports)");
    app.add_option("--out", g.out, "write the JSON report to this file");

    auto* cdilog = app.add_subcommand("dilog", "dilogarithms and the q-symmetrized values");
    std::string zs, qs;
    cdilog->add_option("--z", zs, "complex argument, e.g. 0.5 or 0.3+0.7i")->required();
    cdilog->add_option("--q", qs, "nome; adds Dq, Jq, Rq to the report");

    auto* ckron = app.add_subcommand("kronecker", "K_{2,1} cross-route evaluation");
    std::string ua = "1/7", ub = "2/7", latname = "zi", tau_str, s_str;
    int a_par = 1;
    ckron->add_option("--ua", ua, "first torsion coordinate (rational)");
    ckron->add_option("--ub", ub, "second torsion coordinate (rational)");
    ckron->add_option("--lattice", latname, "zi | eisenstein | d7");
    ckron->add_option("--tau", tau_str, "explicit tau for the lattice [1, tau]");
    ckron->add_option("--s", s_str, "evaluate K_a(0, u, s) by analytic continuation instead");
    ckron->add_option("--a", a_par, "series weight a in {0,1} for --s mode");

    auto* ccheck = app.add_subcommand("check", "run a named invariant suite");
    std::string suite = "all";
    ccheck->add_option("suite", suite,
                       "oddness | fneqn | distribution | dedekind | laplace | conjugation | all");

    auto* checkeL = app.add_subcommand("heckeL", "partial Hecke L values and derivatives");
    int D = -4, phi_index = 0;
    std::string modulus = "3";
    std::string sL;
    checkeL->add_option("--D", D, "field discriminant");
    checkeL->add_option("--modulus", modulus, "principal modulus generator");
    checkeL->add_option("--phi-index", phi_index, "index of the finite character");
    checkeL->add_option("--s", sL, "evaluation point (default 2)");

    auto* cstark = app.add_subcommand("stark", "full pipeline from a JSON config");
    std::string config_path;
    bool dry_run = false;
    cstark->add_option("--config", config_path, "pipeline configuration file")->required();
    cstark->add_flag("--dry-run", dry_run, "print the resolved plan without computing");

    // global flags may follow the subcommand name
    for (auto* sub : {cdilog, ckron, ccheck, checkeL, cstark}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cdilog) return run_dilog(g, zs, qs);
        if (*ckron) return run_kronecker(g, ua, ub, latname, tau_str, s_str, a_par);
        if (*ccheck) return run_check(g, suite);
        if (*checkeL) return run_heckeL(g, D, modulus, phi_index, sL);
        if (*cstark) return run_stark(g, config_path, dry_run);
    } catch (const Error& e) {
        Json err{{"error", e.stage()}, {"message", e.what()}};
        std::cerr << err.dump(2) << std::endl;
        return 1;
    } catch (const std::exception& e) {
        Json err{{"error", "unexpected"}, {"message", e.what()}};
        std::cerr << err.dump(2) << std::endl;
        return 1;
    }
    return 2;
}
