#pragma once

#include "pullback.hpp"
#include "symmetry.hpp"

namespace varform {

// Presymplectic potential theta_L = boundary term of d_V L, its vertical
// differential omega_L, and the source form, with the defining identities
// verified at construction:
//   omega = d_V theta  and  d_H omega = d_V(EL-as-(d,1)-form).
struct PresymplecticData {
    BiForm theta; // (d-1, 1)
    BiForm omega; // (d-1, 2)
    SourceForm source;
};

inline PresymplecticData presymplectic_data(const BiForm& L, int nfields) {
    IbpCertificate cert = ibp_theta(L, nfields);
    if (!cert.residual.is_zero())
        throw DomainError("presymplectic_data: nonzero integration-by-parts residual");
    PresymplecticData P;
    P.theta = cert.theta;
    P.omega = cert.theta.d_V();
    P.source = cert.source;
    if (P.omega != P.theta.d_V())
        throw DomainError("presymplectic_data: omega != d_V theta");
    if (!(P.omega.d_H() - P.source.to_biform().d_V()).is_zero())
        throw DomainError("presymplectic_data: d_H omega != d_V EL");
    return P;
}

// A Hamiltonian pair (H, Z) is accepted when rho = iota_{pr Z} omega + d_V H
// is horizontally closed; row exactness then provides the witness T.
struct HamiltonianPair {
    BiForm H; // (d-1, 0)
    EvoField Z;
    BiForm rho; // (d-1, 1)
    bool verified = false;
};

inline HamiltonianPair hamiltonian_check(const BiForm& H, const EvoField& Z,
                                         const PresymplecticData& P) {
    const int d = P.omega.dim();
    if (H.dim() != d || H.p() != d - 1 || H.q() != 0)
        throw DomainError("hamiltonian_check: H must be a (d-1,0)-form");
    HamiltonianPair pair;
    pair.H = H;
    pair.Z = Z;
    pair.rho = P.omega.contract_prolonged(Z) + H.d_V();
    pair.verified = pair.rho.d_H().is_zero();
    return pair;
}

// When a (d-2,1) witness is supplied, the exact identity
// iota_Z omega + d_V H = d_H T is checked instead of mere closedness.
inline bool hamiltonian_witness_check(const HamiltonianPair& pair, const BiForm& T) {
    return (pair.rho - T.d_H()).is_zero();
}

// Bracket of Hamiltonian pairs: (-iota_{Z1} iota_{Z2} omega, [Z1, Z2]).
// The result must re-verify; a failure here indicates an engine bug, not a
// user error, for strictly verified inputs.
inline HamiltonianPair pair_bracket(const HamiltonianPair& a, const HamiltonianPair& b,
                                    const PresymplecticData& P) {
    if (!a.verified || !b.verified)
        throw DomainError("pair_bracket: both pairs must be verified first");
    BiForm H = -P.omega.contract_prolonged(b.Z).contract_prolonged(a.Z);
    EvoField Z = evo_bracket(a.Z, b.Z);
    HamiltonianPair out = hamiltonian_check(H, Z, P);
    if (!out.verified)
        throw std::logic_error("pair_bracket: bracket failed to re-verify (engine bug)");
    return out;
}

struct DegeneracyCertificate {
    BiForm rho; // (d-1,1) with free parameter jets
    bool ok = false;
};

// Gauge degeneracy of the presymplectic current: with a symbolic parameter,
// d_H( iota_{pr R_c} omega + d_V J_c ) must vanish identically, where J_c is
// the boundary current produced by the parameter-side integration by parts.
inline DegeneracyCertificate gauge_degeneracy(const GaugeParametrization& R,
                                              const PresymplecticData& P, const BiForm& L) {
    NoetherIdentityReport rep = noether_identity(R, L);
    (void)rep;
    DegeneracyCertificate cert;
    cert.rho = P.omega.contract_prolonged(R.symbolic_field()) + rep.parameter_boundary.d_V();
    cert.ok = cert.rho.d_H().is_zero();
    return cert;
}

// ---------------------------------------------------------------------------
// Transgression: both vertical legs of omega are contracted with the jet
// prolongations of two tangent fields and the result is pulled back to the
// base, giving the integrand of Omega(b1, b2) over a codimension-one
// submanifold. For mechanics (d = 1) integration degenerates to evaluation
// at a time instant.
// ---------------------------------------------------------------------------

inline PullbackForm transgression_integrand(const PresymplecticData& P, const FieldExpr& phi,
                                            const FieldExpr& b1, const FieldExpr& b2) {
    const int d = P.omega.dim();
    auto dI = [&](const FieldExpr& b, const VerticalLeg& leg) {
        Expr e = b[static_cast<size_t>(leg.field)];
        for (int mu = 0; mu < d; ++mu)
            for (int k = 0; k < leg.index[mu]; ++k) e = e.partial(Symbol::base_coord(mu));
        return e;
    };

    BiForm horizontal(d, d - 1, 0);
    for (const auto& [w, c] : P.omega.terms()) {
        const VerticalLeg& v1 = w.vert[0];
        const VerticalLeg& v2 = w.vert[1];
        Expr pairing = dI(b1, v1) * dI(b2, v2) - dI(b2, v1) * dI(b1, v2);
        BasisWord hw;
        hw.horiz = w.horiz;
        horizontal.add_term(hw, c * pairing);
    }
    return pullback_form(horizontal, phi);
}

// Evaluates a (0,2)-form on two tangent fields along a solution family at
// t = t0 (d = 1 only).
inline Expr mechanics_transgression(const PresymplecticData& P, const FieldExpr& phi,
                                    const FieldExpr& b1, const FieldExpr& b2, const Rational& t0) {
    if (P.omega.dim() != 1) throw DomainError("mechanics_transgression: supported for d = 1 only");
    PullbackForm f = transgression_integrand(P, phi, b1, b2);
    Expr acc;
    auto it = f.terms.find(std::vector<int>{});
    if (it != f.terms.end()) acc = it->second;
    return acc.substitute({{Symbol::base_coord(0), Expr(t0)}});
}

// Poisson bracket of two verified Hamiltonian pairs, transgressed at t = t0
// along a solution family: the value of -iota_{Z1} iota_{Z2} omega.
inline Expr poisson_bracket_mechanics(const HamiltonianPair& a, const HamiltonianPair& b,
                                      const PresymplecticData& P, const std::vector<Expr>& phi,
                                      const Rational& t0) {
    const int d = P.omega.dim();
    if (d != 1) throw DomainError("poisson_bracket_mechanics: supported for d = 1 only");
    if (!a.verified || !b.verified)
        throw DomainError("poisson_bracket_mechanics: pairs must be verified first");
    BiForm G = -P.omega.contract_prolonged(b.Z).contract_prolonged(a.Z);
    Expr g = G.coeff(BasisWord{});
    int order = std::max(g.max_jet_order(), 0) + 1;
    auto jets = prolongation_map(phi, 1, order);
    return g.substitute(jets).substitute({{Symbol::base_coord(0), Expr(t0)}});
}

} // namespace varform
