#include "support/testutil.hpp"

#include <varform/pullback.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace varform;
using vt::ExprGen;
using vt::jet1;
using vt::jet2;

TEST_CASE("field prolongation") {
    Expr t{Symbol::base_coord(0)};
    Expr v{Symbol::parameter(0)}, c{Symbol::parameter(1)};
    FieldExpr line{v * t + c};
    auto jets = prolongation_map(line, 1, 2);
    CHECK(jets.at(jet1(0, 0)) == v * t + c);
    CHECK(jets.at(jet1(0, 1)) == v);
    CHECK(jets.at(jet1(0, 2)).is_zero());

    FieldExpr wave{Expr::apply(Func::Sin, t)};
    auto sj = prolongation_map(wave, 1, 2);
    CHECK(sj.at(jet1(0, 1)) == Expr::apply(Func::Cos, t));
    CHECK(sj.at(jet1(0, 2)) == -Expr::apply(Func::Sin, t));

    FieldExpr constant{Expr(7)};
    auto cj = prolongation_map(constant, 1, 3);
    CHECK(cj.at(jet1(0, 1)).is_zero());
    CHECK(cj.at(jet1(0, 3)).is_zero());

    CHECK_THROWS_AS(prolongation_map({Expr(jet1(0, 0))}, 1, 1), DomainError);
}

TEST_CASE("pullback of horizontal forms") {
    Expr t{Symbol::base_coord(0)};
    BiForm alpha(1, 1, 0);
    alpha.add_legs({Leg::dx(0)}, Expr(jet1(0, 1)));
    PullbackForm p = pullback_form(alpha, {t * t});
    CHECK(p.terms.at({0}) == Expr(2) * t);

    BiForm vertical(1, 0, 1);
    vertical.add_legs({Leg::dv(0, MultiIndex(1))}, Expr(1));
    CHECK_THROWS_AS(pullback_form(vertical, {t}), DomainError);
}

TEST_CASE("pullback intertwines d_H with the base differential") {
    ExprGen gen(1400);
    Expr t{Symbol::base_coord(0)}, x{Symbol::base_coord(1)};
    for (int i = 0; i < 12; ++i) {
        BiForm alpha = gen.random_biform(gen.uniform(0, 1), 0);
        FieldExpr phi{t * t + Expr(gen.uniform(-2, 2)) * x, x * t + Expr(gen.uniform(-2, 2))};
        PullbackForm lhs = pullback_form(alpha.d_H(), phi);
        PullbackForm rhs = pullback_form(alpha, phi).exterior_derivative();
        CHECK(lhs == rhs);
    }
}

TEST_CASE("on-shell checks against explicit solutions") {
    // free particle
    SourceForm el = euler_lagrange(vt::free_particle_L(), 1);
    Expr t{Symbol::base_coord(0)};
    Expr v{Symbol::parameter(0)}, c{Symbol::parameter(1)};
    CHECK(check_onshell_field({v * t + c}, el).on_shell);

    OnshellReport bad = check_onshell_field({t * t}, el);
    CHECK_FALSE(bad.on_shell);
    CHECK(bad.residuals[0] == Expr(-4));

    // massless wave: traveling solution sin(t+x)
    SourceForm wave_el = euler_lagrange(vt::o2_lagrangian(true), 2);
    Expr x{Symbol::base_coord(1)};
    FieldExpr traveling{Expr::apply(Func::Sin, t + x), Expr::apply(Func::Cos, t + x)};
    CHECK(check_onshell_field(traveling, wave_el).on_shell);
}

TEST_CASE("jacobi fields") {
    SourceForm el = euler_lagrange(vt::free_particle_L(), 1);
    Expr t{Symbol::base_coord(0)};
    Expr v{Symbol::parameter(0)}, c{Symbol::parameter(1)};
    FieldExpr line{v * t + c};

    CHECK(jacobi_check(line, {Expr(2) * t + Expr(1)}, el).on_shell);
    CHECK_FALSE(jacobi_check(line, {t * t}, el).on_shell);
    CHECK_THROWS_AS(jacobi_check({t * t}, {t}, el), DomainError);

    // for linear equations, tangency coincides with being on-shell
    SourceForm wave_el = euler_lagrange(vt::o2_lagrangian(true), 2);
    Expr x{Symbol::base_coord(1)};
    FieldExpr base{t + x, t - x};
    FieldExpr cand{t * x, x * x + t * t};
    CHECK(jacobi_check(base, cand, wave_el).on_shell ==
          check_onshell_field(cand, wave_el).on_shell);
}

TEST_CASE("conservation realized along on-shell fields") {
    // rotation current of the massless model, pulled back at a traveling wave
    BiForm L = vt::o2_lagrangian(true);
    NoetherPair pair = noether_current(vt::o2_rotation(), std::nullopt, L, 2);
    Expr t{Symbol::base_coord(0)}, x{Symbol::base_coord(1)};
    FieldExpr traveling{Expr::apply(Func::Sin, t + x), Expr::apply(Func::Cos, t + x)};
    PullbackForm dP = pullback_form(pair.current.d_H(), traveling);
    CHECK(dP.is_zero());
}

TEST_CASE("shell factorization of prolonged field equations") {
    SourceForm el = euler_lagrange(vt::o2_lagrangian(true), 2);
    Expr t{Symbol::base_coord(0)}, x{Symbol::base_coord(1)};
    FieldExpr sol{t + x, t - x};
    for (const MultiIndex& J : {MultiIndex{0, 0}, MultiIndex{1, 0}, MultiIndex{1, 1}}) {
        for (const Expr& comp : el.comps) {
            Expr prolonged = comp.total_derivative_multi(J);
            auto jets = prolongation_map(sol, 2, prolonged.max_jet_order());
            CHECK(prolonged.substitute(jets).is_zero());
        }
    }
}

TEST_CASE("finite-difference oracle") {
    Expr x{Symbol::base_coord(0)};
    FieldExpr cubic{x * x * x};

    // top-degree form: d_H vanishes and so does the discrepancy
    BiForm alpha(1, 1, 0);
    alpha.add_legs({Leg::dx(0)}, Expr(jet1(0, 0)));
    CHECK(fd_check(alpha, cubic, {1.0}, 1e-4) <= 1e-6);

    // constant form: exactly zero
    BiForm constant = BiForm::scalar(1, Expr(3));
    CHECK(fd_check(constant, cubic, {0.7}, 1e-4) == 0.0);

    // scalar form with real content: residual small and O(h^2)
    BiForm f = BiForm::scalar(1, Expr(jet1(0, 0)) * Expr(jet1(0, 1)));
    double r1 = fd_check(f, cubic, {1.0}, 1e-3);
    double r2 = fd_check(f, cubic, {1.0}, 5e-4);
    CHECK(r1 <= 1e-3);
    CHECK(fd_check(f, cubic, {1.0}, 1e-4) <= 1e-6);
    if (r1 > 1e-10) CHECK(r1 / r2 > 2.5); // halving the step quarters the error

    // random polynomial forms and fields, ten points
    ExprGen gen(1500);
    Expr t2{Symbol::base_coord(0)}, x2{Symbol::base_coord(1)};
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        BiForm a = gen.random_biform(gen.uniform(0, 1), 0);
        FieldExpr phi{t2 * t2 + x2, t2 * x2 - x2 * x2};
        CHECK(fd_check(a, phi, {pt(rng), pt(rng)}, 1e-4) <= 1e-6);
    }

    // singular evaluation reports a numeric error
    BiForm logf = BiForm::scalar(1, Expr::apply(Func::Ln, Expr(jet1(0, 0))));
    CHECK_THROWS_AS(fd_check(logf, {Expr(-1) + x * Expr()}, {0.5}, 1e-4), EvalError);
}
