#include "support/testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace varform;
using vt::ExprGen;
using vt::jet1;
using vt::jet2;

namespace {

BiForm dx(int dim, int mu) {
    BiForm f(dim, 1, 0);
    f.add_legs({Leg::dx(mu)}, Expr(1));
    return f;
}
BiForm dv(int dim, int field, MultiIndex I) {
    BiForm f(dim, 0, 1);
    f.add_legs({Leg::dv(field, std::move(I))}, Expr(1));
    return f;
}

} // namespace

TEST_CASE("wedge algebra") {
    const int d = 2;
    CHECK(wedge(dx(d, 1), dx(d, 1)).is_zero());

    BiForm du = dv(d, 0, MultiIndex(2));
    BiForm dt = dx(d, 0);
    CHECK(wedge(du, dt) == -wedge(dt, du));

    Expr u{jet2(0, 0, 0)}, ut{jet2(0, 1, 0)};
    BiForm a = dt.scaled(u);
    BiForm b = du.scaled(ut);
    BiForm ab = wedge(a, b);
    BasisWord w;
    w.horiz = {0};
    w.vert = {{0, MultiIndex(2)}};
    CHECK(ab.coeff(w) == u * ut);

    CHECK_THROWS_AS(wedge(dx(1, 0), dx(1, 0)), DomainError); // beyond top degree
}

TEST_CASE("horizontal differential in coordinates") {
    const int d = 2;
    BiForm u = BiForm::scalar(d, Expr(jet2(0, 0, 0)));
    BiForm dHu = u.d_H();
    CHECK(dHu == dx(d, 0).scaled(Expr(jet2(0, 1, 0))) + dx(d, 1).scaled(Expr(jet2(0, 0, 1))));

    // d_H(du) = -du_t ^ dt - du_x ^ dx
    BiForm expected = -wedge(dv(d, 0, MultiIndex{1, 0}), dx(d, 0)) -
                      wedge(dv(d, 0, MultiIndex{0, 1}), dx(d, 1));
    CHECK(dv(d, 0, MultiIndex(2)).d_H() == expected);

    BiForm h = BiForm::scalar(d, Expr(jet2(0, 0, 0)) * Expr(jet2(0, 0, 1)));
    CHECK(h.d_H().d_H().is_zero());

    BiForm top = BiForm::volume(d, Expr(jet2(0, 1, 0)));
    BiForm above = top.d_H();
    CHECK(above.is_zero());
    CHECK(above.top_degree_overflow());
}

TEST_CASE("vertical differential in coordinates") {
    const int d = 2;
    Expr ut{jet2(0, 1, 0)};
    BiForm f = BiForm::scalar(d, ut * ut);
    CHECK(f.d_V() == dv(d, 0, MultiIndex{1, 0}).scaled(Expr(2) * ut));

    CHECK(BiForm::scalar(d, Expr(Symbol::base_coord(1))).d_V().is_zero());

    BiForm u = BiForm::scalar(d, Expr(jet2(0, 0, 0)));
    CHECK((u.d_H().d_V() + u.d_V().d_H()).is_zero());
}

TEST_CASE("contraction with prolonged evolutionary fields") {
    const int d = 1;
    Expr u{jet1(0, 0)}, ut{jet1(0, 1)};

    EvoField Zv{Expr(Symbol::parameter(0))};
    CHECK(dv(d, 0, MultiIndex(1)).contract_prolonged(Zv) ==
          BiForm::scalar(d, Expr(Symbol::parameter(0))));

    EvoField Zu{u};
    BiForm a = wedge(dv(d, 0, MultiIndex{1}), dx(d, 0));
    CHECK(a.contract_prolonged(Zu) == dx(d, 0).scaled(ut));

    EvoField Zone{Expr(1)};
    BiForm b = wedge(dv(d, 0, MultiIndex(1)), dv(d, 0, MultiIndex{1}));
    CHECK(b.contract_prolonged(Zone) == dv(d, 0, MultiIndex{1}));

    // q = 0 contracts to the zero form
    CHECK(BiForm::volume(d, u).contract_prolonged(Zu).is_zero());
}

TEST_CASE("Lie derivative along prolonged fields") {
    const int d = 1;
    Expr u{jet1(0, 0)}, ut{jet1(0, 1)};

    EvoField Zc{Expr(Symbol::parameter(0))};
    CHECK(dx(d, 0).scaled(u).lie_evolutionary(Zc) ==
          dx(d, 0).scaled(Expr(Symbol::parameter(0))));

    EvoField Zu{u};
    CHECK(dx(d, 0).scaled(ut * ut).lie_evolutionary(Zu) == dx(d, 0).scaled(Expr(2) * ut * ut));
}

TEST_CASE("evolutionary bracket") {
    Expr u{jet1(0, 0)}, ut{jet1(0, 1)};
    EvoField Z1{u}, Z2{ut};
    CHECK(evo_bracket(Z1, Z1).is_zero());
    EvoField c1{Expr(Symbol::parameter(0))}, c2{Expr(Symbol::parameter(1))};
    CHECK(evo_bracket(c1, c2).is_zero());
    CHECK(evo_bracket(Z1, Z2).is_zero()); // D_t(u) dZ2/du_t - u_t dZ1/du = u_t - u_t
}

TEST_CASE("bicomplex relations on random forms") {
    ExprGen gen(101);
    for (int i = 0; i < 60; ++i) {
        int p = gen.uniform(0, 1), q = gen.uniform(0, 2);
        BiForm a = gen.random_biform(p, q);
        CHECK(a.d_H().d_H().is_zero());
        CHECK(a.d_V().d_V().is_zero());
        CHECK((a.d_H().d_V() + a.d_V().d_H()).is_zero());
    }
}

TEST_CASE("graded Leibniz for both differentials") {
    ExprGen gen(202);
    for (int i = 0; i < 30; ++i) {
        BiForm a = gen.random_biform(gen.uniform(0, 1), gen.uniform(0, 1));
        BiForm b = gen.random_biform(0, gen.uniform(0, 1));
        int deg_a = a.p() + a.q();
        int sign = deg_a % 2 == 0 ? 1 : -1;

        BiForm lhsH = wedge(a, b).d_H();
        BiForm rhsH = wedge(a.d_H(), b) + wedge(a, b.d_H()).scaled(Expr(sign));
        CHECK(lhsH == rhsH);

        BiForm lhsV = wedge(a, b).d_V();
        BiForm rhsV = wedge(a.d_V(), b) + wedge(a, b.d_V()).scaled(Expr(sign));
        CHECK(lhsV == rhsV);
    }
}

TEST_CASE("prolonged contraction anticommutes with d_H") {
    ExprGen gen(303);
    for (int i = 0; i < 30; ++i) {
        BiForm a = gen.random_biform(gen.uniform(0, 1), gen.uniform(1, 2));
        EvoField Z = gen.random_evo();
        BiForm lhs = a.d_H().contract_prolonged(Z) + a.contract_prolonged(Z).d_H();
        CHECK(lhs.is_zero());
    }
}

TEST_CASE("double contractions anticommute") {
    ExprGen gen(404);
    for (int i = 0; i < 20; ++i) {
        BiForm a = gen.random_biform(gen.uniform(0, 2), 2);
        EvoField Z1 = gen.random_evo();
        EvoField Z2 = gen.random_evo();
        BiForm lhs = a.contract_prolonged(Z1).contract_prolonged(Z2) +
                     a.contract_prolonged(Z2).contract_prolonged(Z1);
        CHECK(lhs.is_zero());
    }
}

TEST_CASE("Lie derivative commutes with d_H and pr is a bracket homomorphism") {
    ExprGen gen(505);
    for (int i = 0; i < 20; ++i) {
        BiForm a = gen.random_biform(gen.uniform(0, 1), gen.uniform(0, 1));
        EvoField Z1 = gen.random_evo();
        EvoField Z2 = gen.random_evo();

        CHECK(a.d_H().lie_evolutionary(Z1) == a.lie_evolutionary(Z1).d_H());

        BiForm P = gen.random_biform(gen.uniform(0, 2), 0);
        BiForm lhs = P.lie_evolutionary(evo_bracket(Z1, Z2));
        BiForm rhs = P.lie_evolutionary(Z2).lie_evolutionary(Z1) -
                     P.lie_evolutionary(Z1).lie_evolutionary(Z2);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("contraction is coefficient-linear") {
    ExprGen gen(606);
    for (int i = 0; i < 20; ++i) {
        BiForm a = gen.random_biform(gen.uniform(0, 1), gen.uniform(1, 2));
        EvoField Z = gen.random_evo();
        Expr f = gen.random_expr();
        CHECK(a.scaled(f).contract_prolonged(Z) == a.contract_prolonged(Z).scaled(f));
    }
}

TEST_CASE("Jacobi identity for the evolutionary bracket") {
    ExprGen gen(707, 1, 1);
    gen.max_order = 2;
    for (int i = 0; i < 10; ++i) {
        EvoField Z1 = gen.random_evo();
        EvoField Z2 = gen.random_evo();
        EvoField Z3 = gen.random_evo();
        EvoField jac = evo_bracket(evo_bracket(Z1, Z2), Z3);
        EvoField t2 = evo_bracket(evo_bracket(Z2, Z3), Z1);
        EvoField t3 = evo_bracket(evo_bracket(Z3, Z1), Z2);
        for (int a = 0; a < jac.nfields(); ++a)
            CHECK((jac.comps[a] + t2.comps[a] + t3.comps[a]).is_zero());
    }
}
