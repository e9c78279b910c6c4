#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "magsym/replay.hpp"
#include "magsym/sysfile.hpp"
#include "magsym/verify.hpp"

using namespace magsym;

namespace {

struct GlobalOpts {
    double tol = 1e-9;
    unsigned seed = 20260826;
    int samples = 100;
    std::string json_path;
    bool classical = false;
};

OracleConfig oracle_of(const GlobalOpts& g) {
    OracleConfig cfg;
    cfg.tol = g.tol;
    cfg.seed = g.seed;
    cfg.samples = g.samples;
    return cfg;
}

int finish(const GlobalOpts& g, const std::vector<Report>& reports) {
    bool ok = true;
    for (const auto& r : reports) {
        std::cout << r.text();
        ok = ok && r.all_pass();
    }
    if (!g.json_path.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : reports) j.push_back(r.to_json());
        std::ofstream out(g.json_path);
        out << j.dump(2) << "\n";
    }
    std::cout << (ok ? "verdict: pass" : "verdict: FAIL") << "\n";
    return ok ? 0 : 1;
}

RealityAssignment parse_reality(const std::vector<std::string>& specs) {
    RealityAssignment re;
    for (const std::string& s : specs) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--reality expects name=real|imag|"
                                       "general, got '" + s + "'");
        std::string name = s.substr(0, eq), kind = s.substr(eq + 1);
        if (kind == "real")
            re[name] = ParamReality::RealValued;
        else if (kind == "imag" || kind == "imaginary")
            re[name] = ParamReality::Imaginary;
        else if (kind == "general")
            re[name] = ParamReality::General;
        else
            throw CLI::ValidationError("unknown reality '" + kind + "'");
    }
    return re;
}

std::vector<AntilinearMap> standard_maps() {
    std::vector<AntilinearMap> maps{AntilinearMap::T(), AntilinearMap::P(0),
                                    AntilinearMap::PT(0)};
    for (int ax = 1; ax <= 3; ++ax) {
        maps.push_back(AntilinearMap::P(ax));
        maps.push_back(AntilinearMap::PT(ax));
    }
    return maps;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"magsym: symbolic verification of cylindrical first-order "
                 "superintegrability with complex magnetic fields"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--tol", g.tol, "numeric oracle tolerance");
    app.add_option("--seed", g.seed, "numeric oracle RNG seed");
    app.add_option("--samples", g.samples, "numeric oracle sample count");
    app.add_option("--json", g.json_path, "write the report as JSON");
    app.add_flag("--classical", g.classical,
                 "include/restrict to classical (Poisson) checks");

    auto* cmd_list = app.add_subcommand("list", "list the built-in systems");

    std::string sys_verify;
    auto* cmd_verify =
        app.add_subcommand("verify", "run the integrability commutator suite");
    cmd_verify->add_option("system", sys_verify)->required();

    std::string sys_algebra;
    auto* cmd_algebra = app.add_subcommand(
        "algebra", "verify the displayed commutator algebra closure");
    cmd_algebra->add_option("system", sys_algebra)->required();

    std::string sys_adjoint;
    std::vector<std::string> reality_specs;
    auto* cmd_adjoint = app.add_subcommand(
        "adjoint", "classify symmetry / pseudo-Hermiticity witnesses");
    cmd_adjoint->add_option("system", sys_adjoint)->required();
    cmd_adjoint->add_option("--reality", reality_specs,
                            "parameter reality, e.g. b=imag,w0=real")
        ->delimiter(',');

    std::string branch;
    auto* cmd_determ = app.add_subcommand(
        "determ", "replay the determining-equation compatibility analysis");
    cmd_determ->add_option("branch", branch, "k4zero | k4nonzero")->required();

    std::string sys_eigen;
    auto* cmd_eigen =
        app.add_subcommand("eigen", "verify closed-form eigenfunctions");
    cmd_eigen->add_option("system", sys_eigen)->required();

    std::string sys_depend;
    auto* cmd_depend = app.add_subcommand(
        "depend", "verify the classical dependence relation of the integrals");
    cmd_depend->add_option("system", sys_depend)->required();

    std::string sys_conserve;
    std::vector<std::string> param_specs, integral_names;
    double t_end = 100.0, step = 1e-3;
    std::vector<double> initial{0.4, 0.3, 0.2, 0.5, -0.3, 0.7};
    auto* cmd_conserve = app.add_subcommand(
        "conserve", "numeric conservation check along a classical trajectory");
    cmd_conserve->add_option("system", sys_conserve)->required();
    cmd_conserve
        ->add_option("--params", param_specs, "parameter values, e.g. b=1")
        ->delimiter(',');
    cmd_conserve->add_option("--integrals", integral_names,
                             "integrals to track (default: all)")
        ->delimiter(',');
    cmd_conserve->add_option("--t-end", t_end, "integration time");
    cmd_conserve->add_option("--step", step, "RK4 step size");
    cmd_conserve->add_option("--initial", initial, "x1,x2,x3,p1,p2,p3")
        ->delimiter(',')
        ->expected(6);

    std::string check_file;
    auto* cmd_parse =
        app.add_subcommand("parse", "check a system description file");
    cmd_parse->add_option("--check", check_file, "file to check")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_list) {
            for (const auto& n : builtin_names()) std::cout << n << "\n";
            return 0;
        }
        if (*cmd_verify)
            return finish(g, {integrability_suite(builtin(sys_verify),
                                                  oracle_of(g))});
        if (*cmd_algebra) {
            SystemDef s = builtin(sys_algebra);
            AlgebraTable table = algebra_closure(s); // throws on residual
            std::cout << "algebra closure: " << table.cells.size()
                      << " displayed relations hold exactly\n";
            return finish(g, {closure_grading(s, oracle_of(g))});
        }
        if (*cmd_adjoint)
            return finish(
                g, {adjoint_classify(builtin(sys_adjoint), standard_maps(),
                                     parse_reality(reality_specs),
                                     oracle_of(g))});
        if (*cmd_determ) {
            ReplayConfig cfg;
            if (branch == "k4zero" || branch == "k4=k5=0")
                cfg.branch = ReplayBranch::K4Zero;
            else if (branch == "k4nonzero" || branch == "k4!=0")
                cfg.branch = ReplayBranch::K4Nonzero;
            else {
                std::cerr << "unknown branch '" << branch
                          << "' (expected k4zero or k4nonzero)\n";
                return 2;
            }
            return finish(g, {compatibility_replay(cfg)});
        }
        if (*cmd_eigen)
            return finish(g, {eigenfunction_suite(builtin(sys_eigen),
                                                  oracle_of(g))});
        if (*cmd_depend)
            return finish(g, {dependence_check(builtin(sys_depend),
                                               oracle_of(g))});
        if (*cmd_conserve) {
            SystemDef s = builtin(sys_conserve);
            ConservationConfig cfg;
            for (const std::string& spec : param_specs) {
                auto eq = spec.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "--params expects name=value\n";
                    return 2;
                }
                cfg.params[spec.substr(0, eq)] =
                    std::stod(spec.substr(eq + 1));
            }
            for (int j = 0; j < 6; ++j) cfg.initial[j] = initial[j];
            cfg.t_end = t_end;
            cfg.step = step;
            std::vector<std::string> names = integral_names;
            if (names.empty())
                for (const auto& idf : s.integrals) names.push_back(idf.name);
            double tol = g.tol >= 1e-9 ? std::max(g.tol, 1e-6) : g.tol;
            bool ok = true;
            for (const DriftRow& row :
                 classical_conservation(s, names, cfg)) {
                bool pass = row.drift <= tol;
                ok = ok && pass;
                std::cout << (pass ? "  pass  " : "  FAIL  ") << row.name
                          << "  drift=" << row.drift << "\n";
            }
            std::cout << (ok ? "verdict: pass" : "verdict: FAIL") << "\n";
            return ok ? 0 : 1;
        }
        if (*cmd_parse) {
            std::ifstream in(check_file);
            if (!in) {
                std::cerr << "cannot open " << check_file << "\n";
                return 2;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            SysParseResult pr = parse_system_file(ss.str());
            for (const auto& d : pr.diagnostics)
                std::cout << check_file << ":" << d.line << ": " << d.message
                          << "\n";
            if (!pr.diagnostics.empty() || !pr.file) return 2;
            try {
                SystemDef s = load(*pr.file);
                std::cout << "ok: system '" << s.name << "' with "
                          << s.integrals.size() << " integrals\n";
            } catch (const Error& e) {
                std::cout << check_file << ": " << e.what() << "\n";
                return 2;
            }
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const UnknownSystem& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
