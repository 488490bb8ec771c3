#pragma once

#include "forms.hpp"

namespace varform {

// Source form: one component EL_a per field, understood as the (d,1)-form
// sum_a EL_a * du^a ^ vol. In canonical storage (horizontal legs first) the
// coefficient on (vol | du^a) picks up (-1)^d from the transposition.
struct SourceForm {
    int dim = 1;
    std::vector<Expr> comps;

    SourceForm() = default;
    SourceForm(int d, int nfields) : dim(d), comps(static_cast<size_t>(nfields)) {}

    int nfields() const { return static_cast<int>(comps.size()); }
    bool is_zero() const {
        for (const auto& e : comps)
            if (!e.is_zero()) return false;
        return true;
    }
    bool operator==(const SourceForm& o) const { return dim == o.dim && comps == o.comps; }

    BiForm to_biform() const {
        BiForm f(dim, dim, 1);
        for (int a = 0; a < nfields(); ++a) {
            if (comps[static_cast<size_t>(a)].is_zero()) continue;
            std::vector<Leg> legs;
            legs.push_back(Leg::dv(a, MultiIndex(dim)));
            for (int mu = 0; mu < dim; ++mu) legs.push_back(Leg::dx(mu));
            f.add_legs(std::move(legs), comps[static_cast<size_t>(a)]);
        }
        return f;
    }

    // Inverse of to_biform; fails unless every vertical leg has order 0.
    static SourceForm from_biform(const BiForm& f, int nfields) {
        if (f.q() != 1 || f.p() != f.dim())
            throw DomainError("SourceForm: expected a (d,1)-form");
        SourceForm s(f.dim(), nfields);
        int sign = f.dim() % 2 == 0 ? 1 : -1; // du ^ vol = (-1)^d vol ^ du
        for (const auto& [w, c] : f.terms()) {
            if (w.vert[0].index.order() != 0)
                throw DomainError("SourceForm: vertical leg of positive order");
            s.comps[static_cast<size_t>(w.vert[0].field)] = Expr(sign) * c;
        }
        return s;
    }

    // iota_{pr Z} of the source form: only the order-0 components of pr Z
    // contribute, giving the horizontal (d,0)-form <EL, Z>.
    BiForm contract(const EvoField& Z) const {
        Expr pairing;
        for (int a = 0; a < nfields(); ++a)
            pairing += comps[static_cast<size_t>(a)] * Z.comps[static_cast<size_t>(a)];
        return BiForm::volume(dim, pairing);
    }
};

// Interior Euler operator on (d,q)-forms, q >= 1:
//   I(w) = (1/q) du^a ^ sum_I (-1)^|I| L_{D_I}( iota_{d/du^a_I} w ).
// The sum ranges over the vertical legs actually present, which is finite.
inline BiForm interior_euler(const BiForm& w) {
    if (w.q() < 1 || w.p() != w.dim())
        throw DomainError("interior_euler: requires a (d,q)-form with q >= 1");
    BiForm acc(w.dim(), w.dim(), w.q());
    for (const VerticalLeg& leg : w.vertical_legs()) {
        BiForm inner = w.contract_coordinate(leg.field, leg.index)
                           .lie_horizontal_multi(leg.index);
        if (leg.index.order() % 2 != 0) inner = -inner;
        BiForm du(w.dim(), 0, 1);
        du.add_legs({Leg::dv(leg.field, MultiIndex(w.dim()))}, Expr(1));
        acc += wedge(du, inner);
    }
    return acc.scaled(Expr(Rational(1, w.q())));
}

// Euler-Lagrange source form by the direct coordinate formula
//   EL_a = sum_I (-1)^|I| D_I( dLbar/du^a_I ).
inline SourceForm euler_lagrange_density(const Expr& lbar, int dim, int nfields) {
    SourceForm s(dim, nfields);
    for (const Symbol& js : lbar.jet_symbols()) {
        Expr term = lbar.partial(js).total_derivative_multi(js.index);
        if (js.index.order() % 2 != 0) term = -term;
        s.comps[static_cast<size_t>(js.id)] += term;
    }
    return s;
}

// Extracts the density of a genuine (d,0)-form (single full-volume word).
inline Expr lagrangian_density(const BiForm& L) {
    if (L.p() != L.dim() || L.q() != 0)
        throw DomainError("expected a horizontal top-degree (d,0)-form");
    BasisWord vol;
    for (int mu = 0; mu < L.dim(); ++mu) vol.horiz.push_back(mu);
    return L.coeff(vol);
}

inline SourceForm euler_lagrange(const BiForm& L, int nfields) {
    return euler_lagrange_density(lagrangian_density(L), L.dim(), nfields);
}

// Second, independent route: EL = I(d_V L). Cross-checked against the direct
// formula in tests and in check-all.
inline SourceForm euler_lagrange_via_interior(const BiForm& L, int nfields) {
    return SourceForm::from_biform(interior_euler(L.d_V()), nfields);
}

// Certificate of the integration-by-parts decomposition
//   d_V L = source + d_H(theta) + residual,  residual == 0.
struct IbpCertificate {
    SourceForm source;
    BiForm theta;    // (d-1, 1)
    BiForm residual; // (d, 1), recomputed from scratch
};

// Peels derivatives off the vertical legs of d_V L one at a time, highest
// multi-index first, producing theta deterministically. Each step moves one
// derivative from a du^a_{J+mu} leg onto the coefficient through an exact
// d_H term supported on the codimension-one word vol \ {mu}.
inline IbpCertificate ibp_theta(const BiForm& L, int nfields) {
    const int d = L.dim();
    BiForm remainder = L.d_V();
    BiForm theta(d, d - 1, 1);

    // Highest-order leg first; ties resolved by the graded-lex leg order.
    auto pick = [&]() -> std::optional<std::pair<BasisWord, Expr>> {
        std::optional<std::pair<BasisWord, Expr>> best;
        for (const auto& [w, c] : remainder.terms()) {
            if (w.vert[0].index.order() == 0) continue;
            if (!best) {
                best = {w, c};
                continue;
            }
            int bo = best->first.vert[0].index.order();
            int wo = w.vert[0].index.order();
            if (wo > bo || (wo == bo && w.vert[0] < best->first.vert[0])) best = {w, c};
        }
        return best;
    };

    while (auto term = pick()) {
        const VerticalLeg& leg = term->first.vert[0];
        int mu = 0;
        while (leg.index[mu] == 0) ++mu;
        MultiIndex J;
        leg.index.try_sub(MultiIndex(d).added(mu), J);

        // Unit (d-1,1)-form on (vol \ mu | du^a_J); d_H of it reproduces the
        // target word with a definite sign plus one lower-order term.
        BiForm eta(d, d - 1, 1);
        std::vector<Leg> legs;
        for (int nu = 0; nu < d; ++nu)
            if (nu != mu) legs.push_back(Leg::dx(nu));
        legs.push_back(Leg::dv(leg.field, J));
        eta.add_legs(legs, Expr(1));

        Expr sign = eta.d_H().coeff(term->first);
        if (sign.is_zero()) throw DomainError("ibp_theta: internal schedule error");
        BiForm step = eta.scaled(Expr::div(term->second, sign));
        theta += step;
        remainder -= step.d_H();
    }

    IbpCertificate cert;
    cert.source = SourceForm::from_biform(remainder, nfields);
    cert.theta = theta;
    cert.residual = L.d_V() - cert.source.to_biform() - theta.d_H();
    return cert;
}

// Closed form of theta for first-order Lagrangians:
//   theta = - du^a ^ L_{d/du^a_mu}( iota_{d/dx^mu} L )
// which in coordinates is - sum dLbar/du^a_mu * du^a ^ (iota_mu vol).
inline BiForm ibp_theta_first_order(const BiForm& L, int nfields) {
    const int d = L.dim();
    Expr lbar = lagrangian_density(L);
    BiForm theta(d, d - 1, 1);
    for (int a = 0; a < nfields; ++a) {
        for (int mu = 0; mu < d; ++mu) {
            Expr c = lbar.partial(Symbol::jet(a, MultiIndex(d).added(mu)));
            if (c.is_zero()) continue;
            BiForm volmu = BiForm::volume(d, Expr(1)).contract_base(mu);
            BiForm du(d, 0, 1);
            du.add_legs({Leg::dv(a, MultiIndex(d))}, Expr(1));
            theta += wedge(du, volmu).scaled(-c);
        }
    }
    return theta;
}

struct ShellError : DomainError {
    using DomainError::DomainError;
};

// Substitutes a caller-supplied solved form of the leading jet coordinates,
// closing it under total derivatives on demand. Example: with u_tt -> u_xx,
// the occurrence u_ttx is rewritten via D_x of the solved relation.
inline Expr shell_reduce(const Expr& e, const std::map<Symbol, Expr>& solved) {
    Expr cur = e;
    for (int pass = 0; pass < 256; ++pass) {
        std::map<Symbol, Expr> subs;
        for (const Symbol& js : cur.jet_symbols()) {
            for (const auto& [lead, rhs] : solved) {
                if (lead.kind != SymKind::JetCoord || lead.id != js.id) continue;
                MultiIndex extra;
                if (!js.index.try_sub(lead.index, extra)) continue;
                subs.emplace(js, rhs.total_derivative_multi(extra));
                break;
            }
        }
        if (subs.empty()) return cur;
        cur = cur.substitute(subs);
    }
    throw ShellError("insufficient shell data: substitution did not terminate");
}

} // namespace varform
