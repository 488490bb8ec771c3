#pragma once

#include "eulerlag.hpp"
#include "linalg.hpp"

#include <optional>
#include <tuple>

namespace varform {

// ---------------------------------------------------------------------------
// Infinitesimal symmetries and Noether's First Theorem
// ---------------------------------------------------------------------------

struct SymmetryCertificate {
    EvoField field;
    BiForm lie_of_L;            // L_{pr Z} L, a (d,0)-form
    SourceForm residual_source; // E(L_{pr Z} L); zero iff Z is a symmetry
    bool is_symmetry = false;
    std::optional<BiForm> K;    // boundary term with L_{pr Z} L = d_H K
    bool k_verified = false;    // set when K was supplied or found and checked
};

// Z is a symmetry iff the Euler image of L_{pr Z} L vanishes identically;
// row exactness then guarantees some K exists. A supplied K is additionally
// checked against the exact decomposition.
inline SymmetryCertificate check_symmetry(const EvoField& Z, const BiForm& L,
                                          const std::optional<BiForm>& K, int nfields) {
    SymmetryCertificate cert;
    cert.field = Z;
    cert.lie_of_L = L.lie_evolutionary(Z);
    cert.residual_source = euler_lagrange(cert.lie_of_L, nfields);
    cert.is_symmetry = cert.residual_source.is_zero();
    if (K) {
        if (K->dim() != L.dim() || K->p() != L.dim() - 1 || K->q() != 0)
            throw DomainError("check_symmetry: K must be a (d-1,0)-form");
        cert.K = K;
        cert.k_verified = (cert.lie_of_L - K->d_H()).is_zero();
    }
    return cert;
}

// Attempts to solve d_H K = target for a (d-1,0)-form K by a bounded linear
// ansatz: monomials over the componentwise-lower jet symbols present in the
// target, up to its polynomial degree. Returns nullopt when the ansatz is
// exhausted; a general horizontal homotopy operator is not implemented.
inline std::optional<BiForm> solve_boundary_term(const BiForm& target, size_t max_candidates = 600) {
    const int d = target.dim();
    if (target.p() != d || target.q() != 0) throw DomainError("solve_boundary_term: expected (d,0)");
    if (target.is_zero()) return BiForm(d, d - 1, 0);
    Expr density = lagrangian_density(target);

    if (density.has_function_nodes()) return std::nullopt;

    // Atom pool: every symbol present plus all componentwise-lower jets.
    std::set<Symbol> pool;
    density.for_each_symbol([&](const Symbol& s) {
        if (!s.is_jetlike()) {
            pool.insert(s);
            return;
        }
        std::vector<MultiIndex> lower{MultiIndex(d)};
        for (int mu = 0; mu < d; ++mu) {
            std::vector<MultiIndex> next;
            for (const auto& J : lower) {
                MultiIndex m = J;
                next.push_back(m);
                for (int k = 1; k <= s.index[mu]; ++k) {
                    m = m.added(mu);
                    next.push_back(m);
                }
            }
            lower = std::move(next);
        }
        for (const auto& J : lower)
            pool.insert(s.kind == SymKind::JetCoord ? Symbol::jet(s.id, J)
                                                    : Symbol::param_jet(s.id, J));
    });
    for (int mu = 0; mu < d; ++mu) pool.insert(Symbol::base_coord(mu));

    int degree = 0;
    for (const auto& [m, c] : density.terms()) {
        int deg = 0;
        for (const auto& [a, k] : m.factors) deg += std::max(k, 0);
        degree = std::max(degree, deg);
    }
    degree = std::max(degree, 1);

    // All monomials over the pool with total degree <= degree.
    std::vector<Symbol> atoms(pool.begin(), pool.end());
    std::set<Expr> monomials{Expr(1)};
    for (const Symbol& s : atoms) {
        std::set<Expr> grown = monomials;
        for (const Expr& base : monomials) {
            Expr cur = base;
            for (int k = 1; k <= degree; ++k) {
                cur = cur * Expr(s);
                int deg = 0;
                for (const auto& [m, c] : cur.terms())
                    for (const auto& [a, p] : m.factors) deg += std::max(p, 0);
                if (deg > degree) break;
                grown.insert(cur);
            }
        }
        monomials = std::move(grown);
        if (monomials.size() > max_candidates * 2) return std::nullopt;
    }
    std::vector<Expr> candidates(monomials.begin(), monomials.end());

    struct Column {
        int mu;
        Expr monomial;
        Expr image; // density contributed to d_H K per unit coefficient
    };
    std::vector<Column> columns;
    for (int mu = 0; mu < d; ++mu) {
        // sign of dx^mu ^ (vol \ mu) relative to vol, read off from a probe
        BiForm unit(d, d - 1, 0);
        std::vector<Leg> legs;
        for (int nu = 0; nu < d; ++nu)
            if (nu != mu) legs.push_back(Leg::dx(nu));
        unit.add_legs(legs, Expr(1));
        Expr sign = lagrangian_density(unit.scaled(Expr(Symbol::base_coord(mu))).d_H());
        for (const Expr& m : candidates) {
            Expr img = sign * m.total_derivative(mu);
            if (img.is_zero()) continue;
            columns.push_back({mu, m, img});
            if (columns.size() > max_candidates) return std::nullopt;
        }
    }

    // Assemble the coefficient-matching system.
    std::map<Monomial, size_t> row_of;
    auto row_index = [&](const Monomial& m) {
        auto it = row_of.find(m);
        if (it == row_of.end()) it = row_of.emplace(m, row_of.size()).first;
        return it->second;
    };
    for (const auto& col : columns)
        for (const auto& [m, c] : col.image.terms()) row_index(m);
    for (const auto& [m, c] : density.terms()) row_index(m);

    std::vector<std::vector<Rational>> A(row_of.size(),
                                         std::vector<Rational>(columns.size(), Rational(0)));
    std::vector<Rational> b(row_of.size(), Rational(0));
    for (size_t j = 0; j < columns.size(); ++j)
        for (const auto& [m, c] : columns[j].image.terms()) A[row_index(m)][j] = c;
    for (const auto& [m, c] : density.terms()) b[row_index(m)] = c;

    auto x = solve_rational(std::move(A), std::move(b));
    if (!x) return std::nullopt;

    BiForm K(d, d - 1, 0);
    for (size_t j = 0; j < columns.size(); ++j) {
        if ((*x)[j] == 0) continue;
        std::vector<Leg> legs;
        for (int nu = 0; nu < d; ++nu)
            if (nu != columns[j].mu) legs.push_back(Leg::dx(nu));
        K.add_legs(legs, Expr((*x)[j]) * columns[j].monomial);
    }
    if ((target - K.d_H()).is_zero()) return K;
    return std::nullopt;
}

struct NoetherPair {
    BiForm current; // P = K + iota_{pr Z} theta_L, a (d-1,0)-form
    EvoField field;
    BiForm certificate; // d_H P - iota_{pr Z} EL, must be zero
};

struct SymmetryError : DomainError {
    SourceForm residual;
    explicit SymmetryError(SourceForm r)
        : DomainError("not a symmetry: Euler residual of the Lie derivative is nonzero"),
          residual(std::move(r)) {}
};

// Noether's First Theorem: P_Z = K_Z + iota_{pr Z} theta_L satisfies
// d_H P_Z = iota_{pr Z} EL; the identity is verified and attached.
inline NoetherPair noether_current(const EvoField& Z, const std::optional<BiForm>& K,
                                   const BiForm& L, int nfields) {
    SymmetryCertificate cert = check_symmetry(Z, L, K, nfields);
    if (!cert.is_symmetry) throw SymmetryError(cert.residual_source);
    BiForm boundary(L.dim(), L.dim() - 1, 0);
    if (K) {
        if (!cert.k_verified) throw DomainError("noether_current: supplied K fails L_Z L = d_H K");
        boundary = *K;
    } else if (!cert.lie_of_L.is_zero()) {
        auto found = solve_boundary_term(cert.lie_of_L);
        if (!found) throw DomainError("noether_current: could not construct K, supply it explicitly");
        boundary = *found;
    }
    IbpCertificate ibp = ibp_theta(L, nfields);
    NoetherPair pair;
    pair.field = Z;
    pair.current = boundary + ibp.theta.contract_prolonged(Z);
    pair.certificate = pair.current.d_H() - ibp.source.contract(Z);
    return pair;
}

// Trivial symmetry T^{ab} EL_b for an antisymmetric coefficient table.
inline EvoField trivial_symmetry(const std::vector<std::vector<Expr>>& T, const SourceForm& el) {
    const int n = el.nfields();
    if (static_cast<int>(T.size()) != n) throw DomainError("trivial_symmetry: table size mismatch");
    for (int a = 0; a < n; ++a) {
        if (static_cast<int>(T[a].size()) != n) throw DomainError("trivial_symmetry: table size mismatch");
        for (int b = 0; b < n; ++b)
            if (!(T[a][b] + T[b][a]).is_zero())
                throw DomainError("trivial_symmetry: coefficient table is not antisymmetric");
    }
    EvoField Z(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Z.comps[static_cast<size_t>(a)] += T[a][b] * el.comps[static_cast<size_t>(b)];
    return Z;
}

// ---------------------------------------------------------------------------
// Parametrized gauge symmetries and Noether's Second Theorem
// ---------------------------------------------------------------------------

// R = sum c^beta_K R^{aK}_beta d/du^a, linear in the parameter jets; the
// coefficients live on the field jet bundle and carry no parameter jets.
struct GaugeParametrization {
    int nfields = 0;
    int nparams = 0;
    std::map<std::tuple<int, int, MultiIndex>, Expr> coeffs; // (field a, param beta, K) -> R

    void set(int field, int beta, MultiIndex K, Expr coeff) {
        if (coeff.symbols(SymKind::ParamJet).size() > 0)
            throw DomainError("gauge coefficients must not contain parameter jets");
        coeffs[{field, beta, std::move(K)}] = std::move(coeff);
    }

    int max_param_order() const {
        int best = 0;
        for (const auto& [k, e] : coeffs) best = std::max(best, std::get<2>(k).order());
        return best;
    }

    bool is_zero() const {
        for (const auto& [k, e] : coeffs)
            if (!e.is_zero()) return false;
        return true;
    }

    // Symbolic gauge field with free parameter jets c^beta_K.
    EvoField symbolic_field() const {
        EvoField Z(nfields);
        for (const auto& [key, coeff] : coeffs) {
            const auto& [a, beta, K] = key;
            Z.comps[static_cast<size_t>(a)] += Expr(Symbol::param_jet(beta, K)) * coeff;
        }
        return Z;
    }
};

// R_e for a concrete parameter section e (base coordinates and backgrounds
// only): Z^a = sum_K (d_K e^beta) R^{aK}_beta with literal base derivatives.
inline EvoField gauge_apply(const GaugeParametrization& R, const std::vector<Expr>& e) {
    if (static_cast<int>(e.size()) != R.nparams)
        throw DomainError("gauge_apply: one expression per parameter component required");
    for (const Expr& comp : e)
        if (!comp.jet_symbols().empty() || !comp.symbols(SymKind::ParamJet).empty())
            throw DomainError("gauge_apply: parameter sections depend on base coordinates only");
    EvoField Z(R.nfields);
    for (const auto& [key, coeff] : R.coeffs) {
        const auto& [a, beta, K] = key;
        Expr de = e[static_cast<size_t>(beta)];
        for (int mu = 0; mu < K.dim(); ++mu)
            for (int k = 0; k < K[mu]; ++k) de = de.partial(Symbol::base_coord(mu));
        Z.comps[static_cast<size_t>(a)] += de * coeff;
    }
    return Z;
}

struct NoetherIdentityReport {
    std::vector<Expr> identities;       // N_beta, all must normalize to zero
    SourceForm field_residual;          // E_u(L_{pr R_c} L) with symbolic parameter
    std::vector<Expr> parameter_residual; // E_c components of the same density
    BiForm parameter_boundary;          // J: <EL, R_c> vol = d_H J + sum c^beta N_beta vol
    bool gauge_symmetry = false;
    bool identities_vanish = false;
};

struct GaugeError : DomainError {
    NoetherIdentityReport report;
    GaugeError(const char* what, NoetherIdentityReport r)
        : DomainError(what), report(std::move(r)) {}
};

// Noether's Second Theorem: verifies that R parametrizes gauge symmetries by
// lifting the parameter jets to auxiliary jet coordinates, then evaluates the
// Noether identities N_beta = sum_J (-1)^|J| D_J(EL_a R^{aJ}_beta).
inline NoetherIdentityReport noether_identity(const GaugeParametrization& R, const BiForm& L,
                                              bool throw_on_failure = true) {
    const int d = L.dim();
    NoetherIdentityReport rep;

    EvoField Zc = R.symbolic_field();
    BiForm lie = L.lie_evolutionary(Zc);
    Expr lie_density = lagrangian_density(lie);

    // Euler residual over the extended bundle J^inf(E x_M F): both the field
    // components and the parameter components must vanish.
    rep.field_residual = euler_lagrange_density(lie_density, d, R.nfields);
    rep.parameter_residual.assign(static_cast<size_t>(R.nparams), Expr());
    for (const Symbol& s : lie_density.symbols(SymKind::ParamJet)) {
        Expr term = lie_density.partial(s).total_derivative_multi(s.index);
        if (s.index.order() % 2 != 0) term = -term;
        rep.parameter_residual[static_cast<size_t>(s.id)] += term;
    }
    rep.gauge_symmetry = rep.field_residual.is_zero();
    for (const Expr& e : rep.parameter_residual)
        if (!e.is_zero()) rep.gauge_symmetry = false;

    // Noether identities from the direct adjoint formula.
    SourceForm el = euler_lagrange(L, R.nfields);
    rep.identities.assign(static_cast<size_t>(R.nparams), Expr());
    for (const auto& [key, coeff] : R.coeffs) {
        const auto& [a, beta, K] = key;
        Expr term = (el.comps[static_cast<size_t>(a)] * coeff).total_derivative_multi(K);
        if (K.order() % 2 != 0) term = -term;
        rep.identities[static_cast<size_t>(beta)] += term;
    }
    rep.identities_vanish = true;
    for (const Expr& e : rep.identities)
        if (!e.is_zero()) rep.identities_vanish = false;

    // Parameter-side integration by parts of <EL, R_c> vol: peels derivatives
    // off parameter jets one at a time, producing the boundary current J.
    BiForm J(d, d - 1, 0);
    Expr G;
    for (int a = 0; a < R.nfields; ++a)
        G += el.comps[static_cast<size_t>(a)] * Zc.comps[static_cast<size_t>(a)];
    for (int guard = 0; guard < 4096; ++guard) {
        std::optional<Symbol> top;
        for (const Symbol& s : G.symbols(SymKind::ParamJet))
            if (s.index.order() >= 1 && (!top || top->index.order() < s.index.order())) top = s;
        if (!top) break;
        int mu = 0;
        while (top->index[mu] == 0) ++mu;
        MultiIndex Jlow;
        top->index.try_sub(MultiIndex(d).added(mu), Jlow);
        Expr A = G.partial(*top); // linear in parameter jets

        BiForm unit(d, d - 1, 0);
        std::vector<Leg> legs;
        for (int nu = 0; nu < d; ++nu)
            if (nu != mu) legs.push_back(Leg::dx(nu));
        unit.add_legs(legs, Expr(1));
        Expr sign = lagrangian_density(unit.scaled(Expr(Symbol::base_coord(mu))).d_H());

        BiForm eta = unit.scaled(Expr::div(A * Expr(Symbol::param_jet(top->id, Jlow)), sign));
        J += eta;
        G -= lagrangian_density(eta.d_H());
    }
    rep.parameter_boundary = J;

    if (throw_on_failure && !(rep.gauge_symmetry && rep.identities_vanish))
        throw GaugeError("not a gauge symmetry: Noether residual is nonzero", rep);
    return rep;
}

} // namespace varform
