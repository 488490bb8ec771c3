#include <varform/engine.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace varform;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string theories_dir() {
    return std::string(THEORY_DIR);
}

const char* kFreeParticle = R"(
theory free_particle {
  dim 1;
  coords t;
  fields u;
  param v;
  param c;
  lagrangian : u_t^2;
  solution line { u = v*t + c; }
}
)";

} // namespace

TEST_CASE("golden parse of the free particle") {
    Theory th = parse_theory(kFreeParticle);
    CHECK(th.name == "free_particle");
    CHECK(th.dim == 1);
    CHECK(th.names.coords == std::vector<std::string>{"t"});
    CHECK(th.names.fields == std::vector<std::string>{"u"});
    Expr ut{Symbol::jet(0, MultiIndex{1})};
    CHECK(th.lagrangian == ut * ut);
    REQUIRE(th.solutions.size() == 1);
    // parameter ids follow the canonical by-name order: c -> 0, v -> 1
    CHECK(th.solutions[0].comps[0] ==
          Expr(Symbol::parameter(1)) * Expr(Symbol::base_coord(0)) + Expr(Symbol::parameter(0)));

    Engine eng(th);
    CHECK(eng.el().comps[0].render(th.names) == "-2*u_tt");
}

TEST_CASE("unknown identifiers carry a source span") {
    std::string text = R"(theory broken {
  dim 1;
  coords t;
  fields u;
  lagrangian : u_t^2 + w;
}
)";
    try {
        parse_theory(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()) == "unknown identifier w at 5:24");
        CHECK(e.span.line == 5);
        CHECK(e.span.col == 24);
    }
}

TEST_CASE("whitespace and comment perturbations parse identically") {
    std::string vari = R"(
theory free_particle {   // a comment
  dim 1;

  coords t; fields u;
  param v; param c;
  // interior comment
  lagrangian :   u_t ^ 2 ;
  solution line { u = v * t + c; }
}
)";
    Theory a = parse_theory(kFreeParticle);
    Theory b = parse_theory(vari);
    CHECK(render_theory(a) == render_theory(b));
}

TEST_CASE("parse-render round trip is idempotent on the corpus") {
    for (const char* name : {"free_particle.vcth", "free_particle_n2.vcth", "o2_model.vcth",
                             "o2_model_massless.vcth", "em2d.vcth", "bg_particle.vcth"}) {
        std::string text = slurp(theories_dir() + "/" + name);
        std::string once = render_theory(parse_theory(text));
        std::string twice = render_theory(parse_theory(once));
        CHECK(once == twice);
    }
}

TEST_CASE("structured parse errors") {
    CHECK_THROWS_AS(parse_theory("theory a { dim 1; coords t; fields t; }"), ParseError);
    CHECK_THROWS_AS(parse_theory("theory a { dim 0; }"), ParseError);
    CHECK_THROWS_AS(parse_theory("theory a { dim 1; coords q, r; }"), ParseError);
    CHECK_THROWS_AS(parse_theory("theory a { dim 1; coords t; fields u; lagrangian : u@; }"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_theory("theory a { dim 1; coords t; fields u; lagrangian : u/(u + 1); }"),
        ParseError); // division requires a monomial divisor
    CHECK_THROWS_AS(parse_theory("theory a { dim 1; coords t; fields u; lagrangian : u; "
                                 "solution s { u = u; } }"),
                    ParseError); // fields are not allowed in solution bodies
    CHECK_THROWS_AS(parse_theory("theory a { dim 1; coords t; fields u; lagrangian : u^999999; }"),
                    ParseError);
}

TEST_CASE("numeric literals with leading zeros are decimal") {
    // regression: cpp_int would read "08" as broken octal
    Theory th = parse_theory("theory a { dim 1; coords t; fields u; lagrangian : 007*u + 0.50*u_t; }");
    Expr u{Symbol::jet(0, MultiIndex{0})};
    Expr ut{Symbol::jet(0, MultiIndex{1})};
    CHECK(th.lagrangian == Expr(7) * u + Expr(Rational(1, 2)) * ut);
}

TEST_CASE("division by a monomial is allowed") {
    Theory th = parse_theory("theory a { dim 1; coords t; fields u; param m; "
                             "lagrangian : u_t^2/m; }");
    Expr ut{Symbol::jet(0, MultiIndex{1})};
    CHECK(th.lagrangian == Expr::div(ut * ut, Expr(Symbol::parameter(0))));
}

TEST_CASE("kform syntax round trips") {
    std::string text = R"(theory k2 {
  dim 2;
  coords t, x;
  fields u;
  lagrangian : u_t^2;
  symmetry s { Z[u] = u_t; K = { t: u_t^2, x: 2*u }; }
}
)";
    Theory th = parse_theory(text);
    REQUIRE(th.symmetries.size() == 1);
    REQUIRE(th.symmetries[0].K.has_value());
    std::vector<Expr> comps = kform_components(*th.symmetries[0].K);
    Expr ut{Symbol::jet(0, MultiIndex{1, 0})};
    CHECK(comps[0] == ut * ut);
    CHECK(comps[1] == Expr(2) * Expr(Symbol::jet(0, MultiIndex(2))));
    std::string once = render_theory(th);
    CHECK(render_theory(parse_theory(once)) == once);
}

TEST_CASE("reports are deterministic") {
    Theory th = parse_theory(slurp(theories_dir() + "/free_particle.vcth"));
    Json a, b;
    Engine(th, Options{}).check_all(&a);
    Engine(th, Options{}).check_all(&b);
    CHECK(a.dump(2) == b.dump(2));
    Theory th2 = parse_theory(slurp(theories_dir() + "/free_particle.vcth"));
    Json c;
    Engine(th2, Options{}).check_all(&c);
    CHECK(a.dump(2) == c.dump(2));
}

TEST_CASE("check-all passes on the shipped corpus") {
    for (const char* name : {"free_particle.vcth", "free_particle_n2.vcth", "o2_model.vcth",
                             "o2_model_massless.vcth", "em2d.vcth", "bg_particle.vcth"}) {
        Theory th = parse_theory(slurp(theories_dir() + "/" + name));
        Engine eng(th, Options{});
        for (const CheckResult& c : eng.check_all()) {
            INFO(name << " :: " << c.name);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("max-order guard rejects runaway declarations") {
    std::string text = "theory a { dim 1; coords t; fields u; lagrangian : u_ttttttt^2; }";
    Theory th = parse_theory(text);
    CHECK_THROWS_AS(Engine(th, Options{}), UsageError);
    Options relaxed;
    relaxed.max_order = 8;
    CHECK_NOTHROW(Engine(th, relaxed));
}

TEST_CASE("fuzzing produces structured errors only") {
    std::string seed_text = slurp(theories_dir() + "/o2_model.vcth");
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> strategy(0, 2);
    const std::string tokens = "theory dim coords fields param lagrangian symmetry gauge solution "
                               "hamiltonian Z K R H { } ( ) [ ] : ; , = ^ + - * / u t x 0 1 2 3 "
                               "1/2 0.5 sin cos exp ln sqrt _";
    int parsed = 0, rejected = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string input;
        switch (strategy(rng)) {
            case 0: { // random bytes
                int len = rng() % 160;
                for (int k = 0; k < len; ++k) input += static_cast<char>(byte(rng));
                break;
            }
            case 1: { // token soup
                input = "theory f { dim 2; coords t, x; fields u; ";
                int len = rng() % 40;
                for (int k = 0; k < len; ++k) {
                    size_t start = rng() % tokens.size();
                    size_t end = tokens.find(' ', start);
                    input += tokens.substr(start, end == std::string::npos ? std::string::npos
                                                                           : end - start);
                    input += ' ';
                }
                break;
            }
            default: { // mutate a valid file
                input = seed_text;
                int edits = 1 + static_cast<int>(rng() % 6);
                for (int k = 0; k < edits; ++k) {
                    size_t pos = rng() % input.size();
                    input[pos] = static_cast<char>(byte(rng));
                }
                break;
            }
        }
        try {
            parse_theory(input);
            ++parsed;
        } catch (const ParseError&) {
            ++rejected;
        }
    }
    CHECK(parsed + rejected == 1000);
}
