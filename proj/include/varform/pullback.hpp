#pragma once

#include "eulerlag.hpp"

#include <cmath>

namespace varform {

// A concrete field: one expression per component, in base coordinates,
// backgrounds and free constant parameters only (no jet coordinates).
using FieldExpr = std::vector<Expr>;

inline void require_field_expr(const FieldExpr& phi) {
    for (const Expr& c : phi)
        if (!c.jet_symbols().empty() || !c.symbols(SymKind::ParamJet).empty())
            throw DomainError("field expressions must not contain jet coordinates");
}

// j^infty phi as a substitution map: u^a_I -> d_I phi^a for all |I| <= order.
inline std::map<Symbol, Expr> prolongation_map(const FieldExpr& phi, int dim, int order) {
    require_field_expr(phi);
    std::map<Symbol, Expr> out;
    for (int a = 0; a < static_cast<int>(phi.size()); ++a) {
        std::map<MultiIndex, Expr> level{{MultiIndex(dim), phi[static_cast<size_t>(a)]}};
        for (const auto& [I, e] : level) out.emplace(Symbol::jet(a, I), e);
        for (int k = 1; k <= order; ++k) {
            std::map<MultiIndex, Expr> next;
            for (const auto& [I, e] : level)
                for (int mu = 0; mu < dim; ++mu)
                    next.emplace(I.added(mu), e.partial(Symbol::base_coord(mu)));
            for (const auto& [I, e] : next) out.emplace(Symbol::jet(a, I), e);
            level = std::move(next);
        }
    }
    return out;
}

// A differential form on the base: horizontal words with coefficients in
// base coordinates (and backgrounds/parameters) only.
struct PullbackForm {
    int dim = 1;
    int p = 0;
    std::map<std::vector<int>, Expr> terms;

    bool is_zero() const {
        for (const auto& [w, c] : terms)
            if (!c.is_zero()) return false;
        return true;
    }
    bool operator==(const PullbackForm& o) const {
        return dim == o.dim && p == o.p && normalized() == o.normalized();
    }
    std::map<std::vector<int>, Expr> normalized() const {
        std::map<std::vector<int>, Expr> out;
        for (const auto& [w, c] : terms)
            if (!c.is_zero()) out.emplace(w, c);
        return out;
    }

    // Base exterior derivative, for the symbolic pullback identity.
    PullbackForm exterior_derivative() const {
        PullbackForm r{dim, p + 1, {}};
        for (const auto& [w, c] : terms) {
            for (int mu = 0; mu < dim; ++mu) {
                if (std::find(w.begin(), w.end(), mu) != w.end()) continue;
                Expr dc = c.partial(Symbol::base_coord(mu));
                if (dc.is_zero()) continue;
                std::vector<int> nw = w;
                size_t pos = 0;
                while (pos < nw.size() && nw[pos] < mu) ++pos;
                nw.insert(nw.begin() + static_cast<long>(pos), mu);
                Expr add = pos % 2 == 0 ? dc : -dc;
                auto it = r.terms.find(nw);
                if (it == r.terms.end())
                    r.terms.emplace(std::move(nw), std::move(add));
                else
                    it->second += add;
            }
        }
        return r;
    }
};

// Pullback of a horizontal form along the prolonged section of phi.
inline PullbackForm pullback_form(const BiForm& alpha, const FieldExpr& phi) {
    if (alpha.q() != 0)
        throw DomainError("pullback_form: contact forms vanish along prolonged sections; q must be 0");
    auto jets = prolongation_map(phi, alpha.dim(), alpha.max_jet_order());
    PullbackForm out{alpha.dim(), alpha.p(), {}};
    for (const auto& [w, c] : alpha.terms()) {
        Expr sub = c.substitute(jets);
        if (!sub.is_zero()) out.terms.emplace(w.horiz, std::move(sub));
    }
    return out;
}

struct OnshellReport {
    bool on_shell = false;
    std::vector<Expr> residuals;
    bool syntactic_only = false; // residual mixes function nodes; equality undecided
};

// Substitutes j^infty phi into the Euler-Lagrange components.
inline OnshellReport check_onshell_field(const FieldExpr& phi, const SourceForm& el) {
    int order = 0;
    for (const Expr& c : el.comps) order = std::max(order, c.max_jet_order());
    auto jets = prolongation_map(phi, el.dim, order);
    OnshellReport rep;
    rep.on_shell = true;
    for (const Expr& c : el.comps) {
        Expr r = c.substitute(jets);
        switch (zero_status(r)) {
            case ZeroStatus::Zero: break;
            case ZeroStatus::Nonzero: rep.on_shell = false; break;
            case ZeroStatus::NotSyntacticallyZero:
                rep.on_shell = false;
                rep.syntactic_only = true;
                break;
        }
        rep.residuals.push_back(std::move(r));
    }
    return rep;
}

// Jacobi equation (linearized field equations) for a tangent candidate b at
// an on-shell phi: sum_I dEL_a/du^b_I |_{j phi} * d_I b^b = 0.
inline OnshellReport jacobi_check(const FieldExpr& phi, const FieldExpr& b, const SourceForm& el) {
    OnshellReport base = check_onshell_field(phi, el);
    if (!base.on_shell)
        throw DomainError("jacobi_check: the base field must be on-shell");
    require_field_expr(b);
    int order = 0;
    for (const Expr& c : el.comps) order = std::max(order, c.max_jet_order());
    auto jets = prolongation_map(phi, el.dim, order);

    OnshellReport rep;
    rep.on_shell = true;
    for (const Expr& c : el.comps) {
        Expr lin;
        for (const Symbol& s : c.jet_symbols()) {
            Expr db = b[static_cast<size_t>(s.id)];
            for (int mu = 0; mu < el.dim; ++mu)
                for (int k = 0; k < s.index[mu]; ++k) db = db.partial(Symbol::base_coord(mu));
            lin += c.partial(s) * db;
        }
        Expr r = lin.substitute(jets);
        switch (zero_status(r)) {
            case ZeroStatus::Zero: break;
            case ZeroStatus::Nonzero: rep.on_shell = false; break;
            case ZeroStatus::NotSyntacticallyZero:
                rep.on_shell = false;
                rep.syntactic_only = true;
                break;
        }
        rep.residuals.push_back(std::move(r));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Numeric finite-difference oracle
// ---------------------------------------------------------------------------

inline double eval_pullback_coeff(const Expr& coeff, const std::vector<double>& point,
                                  const std::map<Symbol, double>& extra) {
    std::map<Symbol, double> vals = extra;
    for (int mu = 0; mu < static_cast<int>(point.size()); ++mu)
        vals[Symbol::base_coord(mu)] = point[static_cast<size_t>(mu)];
    return coeff.eval(vals);
}

// Compares the symbolic pullback of d_H(alpha) against second-order central
// differences of the pullback of alpha at a point. Returns the maximum
// absolute discrepancy over the (p+1)-form components.
inline double fd_check(const BiForm& alpha, const FieldExpr& phi, const std::vector<double>& point,
                       double h, const std::map<Symbol, double>& extra = {}) {
    if (alpha.q() != 0) throw DomainError("fd_check: horizontal forms only");
    const int d = alpha.dim();
    if (static_cast<int>(point.size()) != d) throw DomainError("fd_check: point dimension mismatch");

    PullbackForm pa = pullback_form(alpha, phi);
    PullbackForm pda = pullback_form(alpha.d_H(), phi);

    auto coeff_at = [&](const std::vector<int>& w, const std::vector<double>& x) {
        auto it = pa.terms.find(w);
        return it == pa.terms.end() ? 0.0 : eval_pullback_coeff(it->second, x, extra);
    };

    // enumerate all ascending words of length p+1
    std::vector<std::vector<int>> words;
    std::vector<int> cur;
    std::function<void(int)> build = [&](int start) {
        if (static_cast<int>(cur.size()) == alpha.p() + 1) {
            words.push_back(cur);
            return;
        }
        for (int mu = start; mu < d; ++mu) {
            cur.push_back(mu);
            build(mu + 1);
            cur.pop_back();
        }
    };
    build(0);

    double worst = 0.0;
    for (const auto& W : words) {
        double symbolic = 0.0;
        auto it = pda.terms.find(W);
        if (it != pda.terms.end()) symbolic = eval_pullback_coeff(it->second, point, extra);

        double estimate = 0.0;
        for (size_t k = 0; k < W.size(); ++k) {
            std::vector<int> rest;
            for (size_t j = 0; j < W.size(); ++j)
                if (j != k) rest.push_back(W[j]);
            std::vector<double> plus = point, minus = point;
            plus[static_cast<size_t>(W[k])] += h;
            minus[static_cast<size_t>(W[k])] -= h;
            double diff = (coeff_at(rest, plus) - coeff_at(rest, minus)) / (2.0 * h);
            estimate += (k % 2 == 0) ? diff : -diff;
        }
        worst = std::max(worst, std::abs(symbolic - estimate));
    }
    return worst;
}

} // namespace varform
