// varform: command-line front end for the variational-calculus engine.
//
// Subcommands: el, theta, omega, symmetries, noether, gauge, hamiltonian,
// onshell, transgress, check-all, selftest. Exit codes: 0 success, 1 a
// certificate failed (report still emitted), 2 parse or usage error.

#include <varform/engine.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace varform;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(boost::multiprecision::cpp_int(text));
        return Rational(boost::multiprecision::cpp_int(text.substr(0, slash)),
                        boost::multiprecision::cpp_int(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw UsageError("cannot parse rational: " + text);
    }
}

struct Cli {
    std::string input;
    bool json = false;
    Options opt;
    std::string t0 = "0";
    std::string solution;
    std::string tangents;
};

void print_checks(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        std::cout << "check " << c.name << ": " << pass_fail(c.pass);
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
}

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void print_form(const char* label, const Json& terms) {
    std::cout << label << ":\n";
    if (terms.empty()) {
        std::cout << "  0\n";
        return;
    }
    for (const auto& t : terms) {
        std::cout << "  (" << t["coeff"].get<std::string>() << ")";
        if (t.contains("dx"))
            for (const auto& dx : t["dx"]) std::cout << " d" << dx.get<std::string>();
        if (t.contains("dv"))
            for (const auto& dv : t["dv"]) std::cout << " dv(" << dv.get<std::string>() << ")";
        std::cout << "\n";
    }
}

int run_subcommand(const std::string& cmd, const Cli& cli) {
    Theory th = parse_theory(read_file(cli.input));
    Engine engine(th, cli.opt);
    std::vector<CheckResult> checks;
    Json report;
    report["theory"] = engine.theory_json();

    if (cmd == "el") {
        report["el"] = engine.el_json();
        if (!cli.json)
            for (auto& [k, v] : report["el"].items())
                std::cout << "EL[" << k << "] = " << v.get<std::string>() << "\n";
    } else if (cmd == "theta") {
        report["el"] = engine.el_json();
        report["theta"] = engine.theta_json();
        checks.push_back({"ibp_residual", engine.ibp().residual.is_zero(), ""});
        if (!cli.json) print_form("theta", report["theta"]);
    } else if (cmd == "omega") {
        report["theta"] = engine.theta_json();
        report["omega"] = engine.omega_json();
        PresymplecticData P = engine.presymplectic();
        checks.push_back(
            {"presymplectic_dH_omega", (P.omega.d_H() - P.source.to_biform().d_V()).is_zero(), ""});
        checks.push_back({"presymplectic_dV_omega", P.omega.d_V().is_zero(), ""});
        if (!cli.json) print_form("omega", report["omega"]);
    } else if (cmd == "symmetries") {
        report["symmetries"] = engine.symmetries_json(&checks);
    } else if (cmd == "noether") {
        report["symmetries"] = engine.symmetries_json(&checks);
        report["noether_currents"] = engine.noether_json(&checks);
    } else if (cmd == "gauge") {
        report["gauge"] = engine.gauge_json(&checks);
    } else if (cmd == "hamiltonian") {
        report["hamiltonian"] = engine.hamiltonian_json(&checks);
    } else if (cmd == "onshell") {
        report["onshell"] = engine.onshell_json(&checks);
    } else if (cmd == "transgress") {
        auto comma = cli.tangents.find(',');
        if (cli.solution.empty() || comma == std::string::npos)
            throw UsageError("transgress requires --solution NAME and --tangents NAME1,NAME2");
        Engine::Transgression tr =
            engine.transgress(cli.solution, cli.tangents.substr(0, comma),
                              cli.tangents.substr(comma + 1), parse_rational(cli.t0));
        Json j;
        j["solution"] = cli.solution;
        j["tangents"] = cli.tangents;
        if (tr.mechanics) {
            j["t0"] = cli.t0;
            j["value"] = tr.value.render(th.names);
            j["t0_independent"] = tr.t0_independent;
            checks.push_back({"transgression_t0_independent", tr.t0_independent, ""});
            if (!cli.json)
                std::cout << "transgression = " << tr.value.render(th.names)
                          << " at t0 = " << cli.t0 << "\n";
        } else {
            j["integrand"] = pullback_to_json(tr.integrand, th.names);
            if (!cli.json) print_form("integrand", j["integrand"]);
        }
        report["transgression"] = j;
    } else if (cmd == "check-all") {
        checks = engine.check_all(&report);
    } else {
        throw UsageError("unknown subcommand " + cmd);
    }

    if (cmd != "check-all" && !checks.empty()) {
        Json jc;
        for (const auto& c : checks) jc[c.name] = pass_fail(c.pass);
        report["checks"] = jc;
    }
    if (cli.json)
        std::cout << report.dump(2) << "\n";
    else
        print_checks(checks);
    return all_pass(checks) ? 0 : 1;
}

int run_selftest(const Cli& cli, int scale) {
    auto suites = selftest_suites(cli.opt.seed, scale);
    bool ok = true;
    Json report;
    Json js;
    for (const auto& s : suites) {
        js[s.name] =
            Json{{"cases", s.cases}, {"failures", s.failures}, {"result", pass_fail(s.pass())}};
        if (!cli.json)
            std::cout << "suite " << s.name << ": " << s.cases << " cases, " << pass_fail(s.pass())
                      << "\n";
        ok = ok && s.pass();
    }
    report["seed"] = cli.opt.seed;
    report["selftest"] = js;
    if (cli.json) std::cout << report.dump(2) << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"varform: variational bicomplex engine for local Lagrangian field theories"};
    app.require_subcommand(1);

    Cli cli;
    int scale = 1;

    app.set_help_flag("--help", "print help");
    auto add_common = [&](CLI::App* sub, bool needs_input) {
        sub->set_help_flag("--help", "print help");
        if (needs_input) sub->add_option("input", cli.input, "theory file (.vcth)")->required();
        sub->add_flag("--json", cli.json, "emit a JSON report on stdout");
        sub->add_option("--max-order", cli.opt.max_order,
                        "reject expressions beyond this jet order");
        sub->add_option("--tol", cli.opt.tol, "finite-difference tolerance");
        sub->add_option("--h", cli.opt.h, "finite-difference step");
        sub->add_option("--seed", cli.opt.seed, "seed for randomized checks");
    };

    for (const char* name : {"el", "theta", "omega", "symmetries", "noether", "gauge",
                             "hamiltonian", "onshell", "check-all"})
        add_common(app.add_subcommand(name), true);

    CLI::App* tr = app.add_subcommand("transgress", "evaluate omega on tangent families (d = 1)");
    add_common(tr, true);
    tr->add_option("--t0", cli.t0, "evaluation instant (rational)");
    tr->add_option("--solution", cli.solution, "name of the on-shell base solution")->required();
    tr->add_option("--tangents", cli.tangents, "two Jacobi-field solution names, comma separated")
        ->required();

    CLI::App* st = app.add_subcommand("selftest", "run the randomized invariant suites");
    add_common(st, false);
    st->add_option("--scale", scale, "divide suite sizes by this factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "selftest") return run_selftest(cli, scale);
        return run_subcommand(cmd, cli);
    } catch (const varform::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const varform::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
