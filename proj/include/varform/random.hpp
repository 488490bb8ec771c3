#pragma once

#include "forms.hpp"

#include <random>

namespace varform {

// Seeded generator for random polynomial expressions, bigraded forms and
// evolutionary fields at desk scale; drives the randomized invariant suites.
struct FormGen {
    std::mt19937 rng;
    int dim = 2;
    int nfields = 2;
    int max_order = 3;
    int max_terms = 4;
    int max_factors = 2;
    bool with_coords = true;

    explicit FormGen(uint32_t seed, int d = 2, int nf = 2) : rng(seed), dim(d), nfields(nf) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    MultiIndex random_index(int max_ord) {
        MultiIndex I(dim);
        int ord = uniform(0, max_ord);
        for (int k = 0; k < ord; ++k) I = I.added(uniform(0, dim - 1));
        return I;
    }

    Symbol random_symbol() {
        if (with_coords && uniform(0, 4) == 0) return Symbol::base_coord(uniform(0, dim - 1));
        return Symbol::jet(uniform(0, nfields - 1), random_index(max_order));
    }

    Expr random_expr() {
        Expr e;
        int terms = uniform(1, max_terms);
        for (int t = 0; t < terms; ++t) {
            Expr m(uniform(-3, 3));
            if (m.is_zero()) m = Expr(1);
            int nf = uniform(1, max_factors);
            for (int f = 0; f < nf; ++f) m *= Expr(random_symbol());
            e += m;
        }
        return e;
    }

    EvoField random_evo() {
        EvoField Z(nfields);
        for (int a = 0; a < nfields; ++a) Z.comps[static_cast<size_t>(a)] = random_expr();
        return Z;
    }

    BiForm random_biform(int p, int q) {
        BiForm f(dim, p, q);
        int terms = uniform(1, 3);
        for (int t = 0; t < terms; ++t) {
            std::vector<Leg> legs;
            std::vector<int> coords(static_cast<size_t>(dim));
            for (int mu = 0; mu < dim; ++mu) coords[static_cast<size_t>(mu)] = mu;
            std::shuffle(coords.begin(), coords.end(), rng);
            for (int k = 0; k < p; ++k) legs.push_back(Leg::dx(coords[static_cast<size_t>(k)]));
            for (int k = 0; k < q; ++k)
                legs.push_back(Leg::dv(uniform(0, nfields - 1), random_index(max_order)));
            f.add_legs(std::move(legs), random_expr());
        }
        return f;
    }

    BiForm random_lagrangian(int max_ord) {
        int save = max_order;
        max_order = max_ord;
        BiForm L = BiForm::volume(dim, random_expr());
        max_order = save;
        return L;
    }
};

} // namespace varform
