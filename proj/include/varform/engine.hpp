#pragma once

#include "random.hpp"
#include "report.hpp"

namespace varform {

struct Options {
    int max_order = 6;    // guard rail on declared expression order
    double tol = 1e-6;    // finite-difference tolerance
    double h = 1e-4;      // finite-difference step
    uint32_t seed = 1;    // randomized suites
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Randomized invariant suites (shared by `selftest` and the acceptance gate)
// ---------------------------------------------------------------------------

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    bool pass() const { return failures == 0; }
};

// Bicomplex relations and graded Leibniz on random forms.
inline SuiteResult suite_bicomplex(uint32_t seed, int cases = 500) {
    SuiteResult r{"bicomplex", cases, 0};
    for (int i = 0; i < cases; ++i) {
        FormGen gen(seed + static_cast<uint32_t>(i), 1 + (i % 2), 1 + (i % 2));
        BiForm a = gen.random_biform(gen.uniform(0, gen.dim - 1), gen.uniform(0, 2));
        bool ok = a.d_H().d_H().is_zero() && a.d_V().d_V().is_zero() &&
                  (a.d_H().d_V() + a.d_V().d_H()).is_zero();
        BiForm b = gen.random_biform(0, gen.uniform(0, 1));
        int sign = (a.p() + a.q()) % 2 == 0 ? 1 : -1;
        ok = ok && wedge(a, b).d_H() == wedge(a.d_H(), b) + wedge(a, b.d_H()).scaled(Expr(sign));
        ok = ok && wedge(a, b).d_V() == wedge(a.d_V(), b) + wedge(a, b.d_V()).scaled(Expr(sign));
        if (!ok) ++r.failures;
    }
    return r;
}

// Interior Euler operator: projection, kernel, nilpotence, E after d_H.
inline SuiteResult suite_interior_euler(uint32_t seed, int cases = 200) {
    SuiteResult r{"interior_euler", cases, 0};
    for (int i = 0; i < cases; ++i) {
        FormGen gen(seed * 7919u + static_cast<uint32_t>(i), 1 + (i % 2), 1 + (i % 2));
        const int d = gen.dim;
        bool ok = true;
        for (int q = 1; q <= 2; ++q) {
            BiForm w = gen.random_biform(d, q);
            ok = ok && interior_euler(interior_euler(w)) == interior_euler(w);
        }
        if (d >= 1) {
            BiForm eta = gen.random_biform(d - 1, gen.uniform(1, 2));
            ok = ok && interior_euler(eta.d_H()).is_zero();
        }
        BiForm L = gen.random_lagrangian(3);
        BiForm el1 = interior_euler(L.d_V());
        ok = ok && interior_euler(el1.d_V()).is_zero(); // (I d_V)^2 = 0
        BiForm K = gen.random_biform(d - 1, 0);
        ok = ok && euler_lagrange(K.d_H(), gen.nfields).is_zero();
        if (!ok) ++r.failures;
    }
    return r;
}

// Evolutionary Cartan calculus on random (Z, alpha) pairs.
inline SuiteResult suite_cartan(uint32_t seed, int cases = 200) {
    SuiteResult r{"evolutionary_cartan", cases, 0};
    for (int i = 0; i < cases; ++i) {
        FormGen gen(seed * 104729u + static_cast<uint32_t>(i), 1 + (i % 2), 1 + (i % 2));
        BiForm a = gen.random_biform(gen.uniform(0, gen.dim - 1), gen.uniform(0, 2));
        EvoField Z1 = gen.random_evo();
        EvoField Z2 = gen.random_evo();
        bool ok = (a.d_H().contract_prolonged(Z1) + a.contract_prolonged(Z1).d_H()).is_zero();
        ok = ok && a.d_H().lie_evolutionary(Z1) == a.lie_evolutionary(Z1).d_H();
        BiForm P = gen.random_biform(gen.uniform(0, gen.dim), 0);
        ok = ok && P.lie_evolutionary(evo_bracket(Z1, Z2)) ==
                       P.lie_evolutionary(Z2).lie_evolutionary(Z1) -
                           P.lie_evolutionary(Z1).lie_evolutionary(Z2);
        if (!ok) ++r.failures;
    }
    return r;
}

// Agreement of the two Euler-Lagrange routes on random Lagrangians.
inline SuiteResult suite_el_paths(uint32_t seed, int cases = 100) {
    SuiteResult r{"el_both_paths", cases, 0};
    for (int i = 0; i < cases; ++i) {
        FormGen gen(seed * 1299709u + static_cast<uint32_t>(i), 1 + (i % 2), 1 + (i % 2));
        BiForm L = gen.random_lagrangian(3);
        if (!(euler_lagrange(L, gen.nfields) == euler_lagrange_via_interior(L, gen.nfields)))
            ++r.failures;
    }
    return r;
}

// Integration-by-parts certificate residual on the same Lagrangian set.
inline SuiteResult suite_ibp(uint32_t seed, int cases = 100) {
    SuiteResult r{"ibp_residual", cases, 0};
    for (int i = 0; i < cases; ++i) {
        FormGen gen(seed * 1299709u + static_cast<uint32_t>(i), 1 + (i % 2), 1 + (i % 2));
        BiForm L = gen.random_lagrangian(3);
        IbpCertificate cert = ibp_theta(L, gen.nfields);
        if (!cert.residual.is_zero() || !(cert.source == euler_lagrange(L, gen.nfields)))
            ++r.failures;
    }
    return r;
}

inline std::vector<SuiteResult> selftest_suites(uint32_t seed, int scale = 1) {
    return {suite_bicomplex(seed, 500 / scale), suite_interior_euler(seed, 200 / scale),
            suite_cartan(seed, 200 / scale), suite_el_paths(seed, 100 / scale),
            suite_ibp(seed, 100 / scale)};
}

// ---------------------------------------------------------------------------
// Per-theory analysis engine
// ---------------------------------------------------------------------------

class Engine {
  public:
    Engine(Theory theory, Options opt = {}) : th_(std::move(theory)), opt_(opt) {
        enforce_order_guard();
        L_ = th_.lagrangian_form();
        el_ = euler_lagrange(L_, th_.nfields());
        ibp_ = ibp_theta(L_, th_.nfields());
    }

    const Theory& theory() const { return th_; }
    const BiForm& lagrangian() const { return L_; }
    const SourceForm& el() const { return el_; }
    const IbpCertificate& ibp() const { return ibp_; }

    PresymplecticData presymplectic() const { return presymplectic_data(L_, th_.nfields()); }

    // ---- report sections ---------------------------------------------------

    Json theory_json() const {
        Json j;
        j["name"] = th_.name;
        j["dim"] = th_.dim;
        j["coords"] = th_.names.coords;
        j["fields"] = th_.names.fields;
        j["max_jet_order"] = th_.lagrangian.max_jet_order();
        j["lagrangian"] = th_.lagrangian.render(th_.names);
        return j;
    }

    Json el_json() const { return source_to_json(el_, th_.names); }
    Json theta_json() const { return form_to_json(ibp_.theta, th_.names); }
    Json omega_json() const { return form_to_json(ibp_.theta.d_V(), th_.names); }

    Json symmetries_json(std::vector<CheckResult>* checks = nullptr) const {
        Json out;
        for (const auto& decl : th_.symmetries) {
            SymmetryCertificate cert = check_symmetry(decl.Z, L_, decl.K, th_.nfields());
            Json j;
            j["Z"] = evo_to_json(decl.Z, th_.names);
            j["is_symmetry"] = cert.is_symmetry;
            j["residual"] = source_to_json(cert.residual_source, th_.names);
            j["K_supplied"] = decl.K.has_value();
            if (decl.K) j["K_verified"] = cert.k_verified;
            out[decl.name] = j;
            if (checks)
                checks->push_back({"symmetry/" + decl.name,
                                   cert.is_symmetry && (!decl.K || cert.k_verified), ""});
        }
        return out;
    }

    Json noether_json(std::vector<CheckResult>* checks = nullptr) const {
        Json out;
        for (const auto& decl : th_.symmetries) {
            Json j;
            try {
                NoetherPair pair = noether_current(decl.Z, decl.K, L_, th_.nfields());
                j["P"] = form_to_json(pair.current, th_.names);
                bool ok = pair.certificate.is_zero();
                j["certificate"] = pass_fail(ok);
                if (checks) checks->push_back({"noether/" + decl.name, ok, ""});
            } catch (const DomainError& e) {
                j["error"] = e.what();
                if (checks) checks->push_back({"noether/" + decl.name, false, e.what()});
            }
            out[decl.name] = j;
        }
        return out;
    }

    Json gauge_json(std::vector<CheckResult>* checks = nullptr) const {
        Json out;
        PresymplecticData P = presymplectic();
        for (const auto& decl : th_.gauges) {
            NameTable names = th_.gauge_names(decl);
            Json j;
            NoetherIdentityReport rep = noether_identity(decl.R, L_, false);
            Json ids = Json::array();
            for (const Expr& n : rep.identities) ids.push_back(n.render(names));
            j["noether_identities"] = ids;
            j["is_gauge_symmetry"] = rep.gauge_symmetry && rep.identities_vanish;
            if (checks)
                checks->push_back({"gauge_identity/" + decl.name,
                                   rep.gauge_symmetry && rep.identities_vanish, ""});
            if (rep.gauge_symmetry && rep.identities_vanish) {
                DegeneracyCertificate cert = gauge_degeneracy(decl.R, P, L_);
                j["degeneracy"] = pass_fail(cert.ok);
                if (checks) checks->push_back({"gauge_degeneracy/" + decl.name, cert.ok, ""});
            }
            out[decl.name] = j;
        }
        return out;
    }

    Json hamiltonian_json(std::vector<CheckResult>* checks = nullptr) const {
        Json out;
        PresymplecticData P = presymplectic();
        for (const auto& decl : th_.hamiltonians) {
            HamiltonianPair pair = hamiltonian_check(decl.H, decl.Z, P);
            Json j;
            j["H"] = form_to_json(decl.H, th_.names);
            j["Z"] = evo_to_json(decl.Z, th_.names);
            j["verified"] = pair.verified;
            out[decl.name] = j;
            if (checks) checks->push_back({"hamiltonian/" + decl.name, pair.verified, ""});
        }
        return out;
    }

    Json onshell_json(std::vector<CheckResult>* checks = nullptr) const {
        Json out;
        for (const auto& sol : th_.solutions) {
            OnshellReport rep = check_onshell_field(sol.comps, el_);
            Json j;
            j["on_shell"] = rep.on_shell;
            Json res;
            for (int a = 0; a < th_.nfields(); ++a)
                res[th_.names.fields[static_cast<size_t>(a)]] =
                    rep.residuals[static_cast<size_t>(a)].render(th_.names);
            j["residuals"] = res;
            if (rep.syntactic_only) j["note"] = "residual not syntactically zero";
            out[sol.name] = j;
            if (checks) checks->push_back({"onshell/" + sol.name, rep.on_shell, ""});
        }
        return out;
    }

    struct Transgression {
        bool mechanics = false;  // d = 1: value at t0; otherwise: integrand only
        Expr value;
        bool t0_independent = false;
        PullbackForm integrand; // (d-1)-form on the base
    };

    // Transgression of omega on two tangent families over a declared solution.
    // For d = 1 the value at t0 is returned; for d >= 2 integration over a
    // submanifold is out of scope and the integrand is emitted instead.
    // Tangents are certified Jacobi fields first.
    Transgression transgress(const std::string& solution, const std::string& tangent1,
                             const std::string& tangent2, const Rational& t0) const {
        const SolutionDecl* phi = find_solution(solution);
        const SolutionDecl* b1 = find_solution(tangent1);
        const SolutionDecl* b2 = find_solution(tangent2);
        if (!phi || !b1 || !b2) throw UsageError("transgress: unknown solution name");
        if (!check_onshell_field(phi->comps, el_).on_shell)
            throw UsageError("transgress: base solution is not on-shell");
        for (const SolutionDecl* b : {b1, b2})
            if (!jacobi_check(phi->comps, b->comps, el_).on_shell)
                throw UsageError("transgress: tangent fails the Jacobi equation");
        PresymplecticData P = presymplectic();
        Transgression out;
        out.integrand = transgression_integrand(P, phi->comps, b1->comps, b2->comps);
        if (th_.dim == 1) {
            out.mechanics = true;
            out.value = mechanics_transgression(P, phi->comps, b1->comps, b2->comps, t0);
            Expr shifted = mechanics_transgression(P, phi->comps, b1->comps, b2->comps, t0 + 1);
            out.t0_independent = (out.value == shifted);
        }
        return out;
    }

    // ---- the full certificate suite -----------------------------------------

    std::vector<CheckResult> check_all(Json* report = nullptr) const {
        std::vector<CheckResult> checks;

        // bicomplex sanity on the theory's own forms
        BiForm theta = ibp_.theta;
        bool bic = L_.d_V().d_V().is_zero() && theta.d_H().d_H().is_zero() &&
                   theta.d_V().d_V().is_zero() &&
                   (theta.d_H().d_V() + theta.d_V().d_H()).is_zero();
        checks.push_back({"bicomplex_on_theory_forms", bic, ""});

        checks.push_back(
            {"el_both_paths", euler_lagrange_via_interior(L_, th_.nfields()) == el_, ""});
        checks.push_back({"ibp_residual", ibp_.residual.is_zero(), ""});

        PresymplecticData P = presymplectic();
        checks.push_back(
            {"presymplectic_dH_omega", (P.omega.d_H() - P.source.to_biform().d_V()).is_zero(), ""});
        checks.push_back({"presymplectic_dV_omega", P.omega.d_V().is_zero(), ""});

        Json sym = symmetries_json(&checks);
        Json noe = noether_json(&checks);
        Json gau = gauge_json(&checks);
        Json ham = hamiltonian_json(&checks);
        Json ons = onshell_json(&checks);
        checks.push_back({"fd_spotcheck", fd_spotcheck(), ""});

        if (report) {
            (*report)["theory"] = theory_json();
            (*report)["el"] = el_json();
            (*report)["theta"] = theta_json();
            (*report)["omega"] = omega_json();
            (*report)["symmetries"] = sym;
            (*report)["noether_currents"] = noe;
            (*report)["gauge"] = gau;
            (*report)["hamiltonian"] = ham;
            (*report)["onshell"] = ons;
            Json jc;
            for (const auto& c : checks) jc[c.name] = pass_fail(c.pass);
            (*report)["checks"] = jc;
        }
        return checks;
    }

  private:
    Theory th_;
    Options opt_;
    BiForm L_;
    SourceForm el_;
    IbpCertificate ibp_;

    const SolutionDecl* find_solution(const std::string& name) const {
        for (const auto& s : th_.solutions)
            if (s.name == name) return &s;
        return nullptr;
    }

    void enforce_order_guard() const {
        int order = th_.lagrangian.max_jet_order();
        for (const auto& s : th_.symmetries)
            for (const auto& c : s.Z.comps) order = std::max(order, c.max_jet_order());
        for (const auto& h : th_.hamiltonians)
            for (const auto& c : h.Z.comps) order = std::max(order, c.max_jet_order());
        for (const auto& g : th_.gauges) order = std::max(order, g.R.max_param_order());
        if (order > opt_.max_order)
            throw UsageError("declared expressions exceed --max-order " +
                             std::to_string(opt_.max_order));
    }

    // Numeric cross-check of d_H against central differences along declared
    // solutions; skipped (pass) when the theory has no usable solution.
    bool fd_spotcheck() const {
        if (th_.solutions.empty() || !th_.backgrounds.empty()) return true;
        std::map<Symbol, double> extra;
        for (size_t p = 0; p < th_.names.parameters.size(); ++p)
            extra[Symbol::parameter(static_cast<int>(p))] = 0.5 + 0.25 * static_cast<double>(p);
        FormGen gen(opt_.seed, th_.dim, th_.nfields());
        gen.max_order = std::min(2, opt_.max_order);
        std::uniform_real_distribution<double> pt(0.2, 0.9);
        for (const auto& sol : th_.solutions) {
            for (int rep = 0; rep < 3; ++rep) {
                BiForm a = gen.random_biform(gen.uniform(0, th_.dim - 1), 0);
                std::vector<double> point;
                for (int mu = 0; mu < th_.dim; ++mu) point.push_back(pt(gen.rng));
                double r;
                try {
                    r = fd_check(a, sol.comps, point, opt_.h, extra);
                } catch (const EvalError&) {
                    continue; // singular sample; certified elsewhere
                }
                if (r > opt_.tol) return false;
            }
        }
        return true;
    }
};

} // namespace varform
