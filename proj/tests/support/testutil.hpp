#pragma once

#include <varform/eulerlag.hpp>
#include <varform/forms.hpp>
#include <varform/random.hpp>
#include <varform/symmetry.hpp>

#include <random>

// Shared fixtures for the unit and acceptance suites.
namespace vt {

using namespace varform;

using ExprGen = varform::FormGen;

inline Symbol jet1(int field, int n) {
    MultiIndex I(1);
    for (int k = 0; k < n; ++k) I = I.added(0);
    return Symbol::jet(field, I);
}

inline Symbol jet2(int field, int nt, int nx) {
    MultiIndex I(2);
    for (int k = 0; k < nt; ++k) I = I.added(0);
    for (int k = 0; k < nx; ++k) I = I.added(1);
    return Symbol::jet(field, I);
}

inline NameTable names1d(const std::vector<std::string>& fields = {"u"}) {
    NameTable n;
    n.coords = {"t"};
    n.fields = fields;
    n.parameters = {"c1", "c2"};
    return n;
}

inline NameTable names2d(const std::vector<std::string>& fields = {"u"}) {
    NameTable n;
    n.coords = {"t", "x"};
    n.fields = fields;
    n.parameters = {"c1", "c2"};
    return n;
}

// ---- shared model theories -------------------------------------------------

// Free particle, d = 1, one component: L = u_t^2 dt.
inline BiForm free_particle_L() {
    Expr ut{jet1(0, 1)};
    return BiForm::volume(1, ut * ut);
}

// O(2) model, d = 2, fields (u0, u1):
//   L = 1/2 sum_a (u^a_t^2 - u^a_x^2 - c2 u_a^2) dt^dx   (massless: c2 term off)
inline BiForm o2_lagrangian(bool massless) {
    Expr dens;
    for (int a = 0; a < 2; ++a) {
        Expr u{jet2(a, 0, 0)}, ut{jet2(a, 1, 0)}, ux{jet2(a, 0, 1)};
        dens += ut * ut - ux * ux;
        if (!massless) dens -= Expr(Symbol::parameter(1)) * u * u; // c2
    }
    return BiForm::volume(2, Expr(Rational(1, 2)) * dens);
}

inline EvoField o2_rotation() { return EvoField{-Expr(jet2(1, 0, 0)), Expr(jet2(0, 0, 0))}; }

// d = 2 electromagnetism in temporal-spatial potentials:
//   fields (A0, A1), L = 1/2 (A1_t - A0_x)^2 dt^dx.
inline BiForm em_lagrangian() {
    Expr f = Expr(jet2(1, 1, 0)) - Expr(jet2(0, 0, 1));
    return BiForm::volume(2, Expr(Rational(1, 2)) * f * f);
}

// Gauge parametrization A_mu -> A_mu + d_mu e: R[A0,(t)] = 1, R[A1,(x)] = 1.
inline GaugeParametrization em_gauge() {
    GaugeParametrization R;
    R.nfields = 2;
    R.nparams = 1;
    R.set(0, 0, MultiIndex{1, 0}, Expr(1));
    R.set(1, 0, MultiIndex{0, 1}, Expr(1));
    return R;
}

// Rebuilds an Expr from its term decomposition through fresh arithmetic;
// used as the idempotence check for the always-normalized representation.
inline Expr rebuild(const Expr& e) {
    Expr out;
    for (const auto& [m, c] : e.terms()) {
        Expr t{Rational(c)};
        for (const auto& [a, k] : m.factors) {
            Expr atom = a.is_symbol() ? Expr(a.symbol())
                                      : Expr::apply(a.func().fn, rebuild(*a.func().arg));
            t *= Expr::pow(atom, k);
        }
        out += t;
    }
    return out;
}

} // namespace vt
