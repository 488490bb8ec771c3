#pragma once

#include "presymplectic.hpp"

#include <cctype>
#include <sstream>

namespace varform {

// ---------------------------------------------------------------------------
// Theory declaration model
// ---------------------------------------------------------------------------

struct BackgroundDecl {
    std::string name;
    std::vector<int> deps;
    std::vector<std::string> attrs;
};

struct SymmetryDecl {
    std::string name;
    EvoField Z;
    std::optional<BiForm> K; // (d-1,0)
};

struct GaugeDecl {
    std::string name;
    std::vector<std::string> params;
    GaugeParametrization R;
};

struct SolutionDecl {
    std::string name;
    FieldExpr comps; // one per field
};

struct HamiltonianDecl {
    std::string name;
    BiForm H; // (d-1,0)
    EvoField Z;
};

struct Theory {
    std::string name;
    int dim = 0;
    NameTable names; // coords, fields, backgrounds, parameters
    std::vector<BackgroundDecl> backgrounds;
    Expr lagrangian; // density; the declared form is lagrangian * vol
    std::vector<SymmetryDecl> symmetries;
    std::vector<GaugeDecl> gauges;
    std::vector<SolutionDecl> solutions;
    std::vector<HamiltonianDecl> hamiltonians;

    int nfields() const { return static_cast<int>(names.fields.size()); }
    BiForm lagrangian_form() const { return BiForm::volume(dim, lagrangian); }

    int field_id(const std::string& fname) const {
        for (size_t i = 0; i < names.fields.size(); ++i)
            if (names.fields[i] == fname) return static_cast<int>(i);
        return -1;
    }
    int parameter_id(const std::string& pname) const {
        for (size_t i = 0; i < names.parameters.size(); ++i)
            if (names.parameters[i] == pname) return static_cast<int>(i);
        return -1;
    }

    // Rendering table for expressions inside a given gauge block.
    NameTable gauge_names(const GaugeDecl& g) const {
        NameTable t = names;
        t.gauge_params = g.params;
        return t;
    }
};

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

struct SourceSpan {
    int line = 1;
    int col = 1;
};

struct ParseError : std::runtime_error {
    SourceSpan span;
    ParseError(const std::string& msg, SourceSpan s)
        : std::runtime_error(msg + " at " + std::to_string(s.line) + ":" + std::to_string(s.col)),
          span(s) {}
};

namespace detail {

enum class Tok { Ident, Integer, Decimal, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }
    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

  private:
    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token cur_;

    int look(size_t off = 0) const {
        return pos_ + off < src_.size() ? static_cast<unsigned char>(src_[pos_ + off]) : -1;
    }
    void bump() {
        if (look() == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance() {
        for (;;) {
            while (look() >= 0 && std::isspace(look())) bump();
            if (look() == '/' && look(1) == '/') {
                while (look() >= 0 && look() != '\n') bump();
                continue;
            }
            break;
        }
        cur_.span = {line_, col_};
        int c = look();
        if (c < 0) {
            cur_ = {Tok::End, "", cur_.span};
            return;
        }
        if (std::isalpha(c) || c == '_') {
            std::string s;
            while (look() >= 0 && (std::isalnum(look()) || look() == '_')) {
                s += static_cast<char>(look());
                bump();
            }
            cur_ = {Tok::Ident, std::move(s), cur_.span};
            return;
        }
        if (std::isdigit(c)) {
            std::string s;
            bool decimal = false;
            while (look() >= 0 && std::isdigit(look())) {
                s += static_cast<char>(look());
                bump();
            }
            if (look() == '.' && look(1) >= 0 && std::isdigit(look(1))) {
                decimal = true;
                s += '.';
                bump();
                while (look() >= 0 && std::isdigit(look())) {
                    s += static_cast<char>(look());
                    bump();
                }
            }
            cur_ = {decimal ? Tok::Decimal : Tok::Integer, std::move(s), cur_.span};
            return;
        }
        static const std::string punct = "{}()[]:;,=^+-*/";
        if (punct.find(static_cast<char>(c)) != std::string::npos) {
            cur_ = {Tok::Punct, std::string(1, static_cast<char>(c)), cur_.span};
            bump();
            return;
        }
        throw ParseError("lexical error: unexpected character '" + std::string(1, static_cast<char>(c)) + "'",
                         cur_.span);
    }
};

inline const std::vector<std::string>& reserved_words() {
    static const std::vector<std::string> words = {
        "theory", "dim",      "coords",     "fields", "background", "param",
        "lagrangian", "symmetry", "gauge",  "solution", "hamiltonian",
        "Z",      "K",        "R",          "H",      "sin",        "cos",
        "exp",    "ln",       "sqrt"};
    return words;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class TheoryParser {
  public:
    explicit TheoryParser(const std::string& src) : lex_(src) {}

    Theory parse() {
        expect_ident("theory");
        th_.name = expect_name();
        expect_punct("{");
        while (!at_punct("}")) parse_decl();
        expect_punct("}");
        if (lex_.peek().kind != detail::Tok::End)
            throw ParseError("trailing input after theory block", lex_.peek().span);
        if (th_.dim == 0) throw ParseError("missing 'dim' declaration", SourceSpan{1, 1});
        return th_;
    }

  private:
    detail::Lexer lex_;
    Theory th_;
    bool lagrangian_seen_ = false;
    int depth_ = 0;

    struct DepthGuard {
        TheoryParser& p;
        explicit DepthGuard(TheoryParser& parser) : p(parser) {
            if (++p.depth_ > 200)
                throw ParseError("expression nesting too deep", p.lex_.peek().span);
        }
        ~DepthGuard() { --p.depth_; }
    };

    // Leading zeros would make cpp_int parse the literal as octal.
    static boost::multiprecision::cpp_int digits_to_int(const std::string& digits) {
        size_t first = digits.find_first_not_of('0');
        if (first == std::string::npos) return 0;
        return boost::multiprecision::cpp_int(digits.substr(first));
    }

    int safe_int(const detail::Token& t, int max_value) const {
        if (t.text.size() > 9) throw ParseError("integer literal too large", t.span);
        int v = std::stoi(t.text);
        if (v > max_value) throw ParseError("integer literal too large", t.span);
        return v;
    }

    // Expression name scope: which identifier families are admissible.
    struct Scope {
        bool fields = true;     // jet coordinates
        bool parameters = true; // coupling constants
    };

    [[noreturn]] void fail(const std::string& msg, SourceSpan s) const { throw ParseError(msg, s); }

    bool at_punct(const std::string& p) {
        return lex_.peek().kind == detail::Tok::Punct && lex_.peek().text == p;
    }
    bool at_ident(const std::string& s) {
        return lex_.peek().kind == detail::Tok::Ident && lex_.peek().text == s;
    }
    detail::Token expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("expected '" + p + "'", lex_.peek().span);
        return lex_.next();
    }
    detail::Token expect_ident(const std::string& s) {
        if (!at_ident(s)) fail("expected '" + s + "'", lex_.peek().span);
        return lex_.next();
    }
    std::string expect_name() {
        if (lex_.peek().kind != detail::Tok::Ident) fail("expected an identifier", lex_.peek().span);
        return lex_.next().text;
    }

    void check_fresh(const std::string& name, SourceSpan s) {
        for (const auto& w : detail::reserved_words())
            if (w == name) fail("reserved word '" + name + "' cannot be declared", s);
        auto used = [&](const std::vector<std::string>& v) {
            for (const auto& n : v)
                if (n == name) return true;
            return false;
        };
        if (used(th_.names.coords) || used(th_.names.fields) || used(th_.names.backgrounds) ||
            used(th_.names.parameters))
            fail("duplicate declaration of '" + name + "'", s);
    }

    int coord_index(const std::string& name) const {
        for (size_t i = 0; i < th_.names.coords.size(); ++i)
            if (th_.names.coords[i] == name) return static_cast<int>(i);
        return -1;
    }
    int field_index(const std::string& name) const {
        for (size_t i = 0; i < th_.names.fields.size(); ++i)
            if (th_.names.fields[i] == name) return static_cast<int>(i);
        return -1;
    }
    int background_index(const std::string& name) const {
        for (size_t i = 0; i < th_.names.backgrounds.size(); ++i)
            if (th_.names.backgrounds[i] == name) return static_cast<int>(i);
        return -1;
    }
    int parameter_index(const std::string& name) const {
        for (size_t i = 0; i < th_.names.parameters.size(); ++i)
            if (th_.names.parameters[i] == name) return static_cast<int>(i);
        return -1;
    }

    void parse_decl() {
        if (lex_.peek().kind != detail::Tok::Ident) fail("expected a declaration", lex_.peek().span);
        std::string kw = lex_.peek().text;
        if (kw == "dim") return parse_dim();
        if (kw == "coords") return parse_coords();
        if (kw == "fields") return parse_fields();
        if (kw == "background") return parse_background();
        if (kw == "param") return parse_param();
        if (kw == "lagrangian") return parse_lagrangian();
        if (kw == "symmetry") return parse_symmetry();
        if (kw == "gauge") return parse_gauge();
        if (kw == "solution") return parse_solution();
        if (kw == "hamiltonian") return parse_hamiltonian();
        fail("unknown declaration '" + kw + "'", lex_.peek().span);
    }

    void parse_dim() {
        lex_.next();
        if (lex_.peek().kind != detail::Tok::Integer) fail("expected an integer dimension", lex_.peek().span);
        auto t = lex_.next();
        th_.dim = safe_int(t, 8);
        if (th_.dim < 1) fail("dimension must be between 1 and 8", t.span);
        expect_punct(";");
    }

    void parse_coords() {
        auto t = lex_.next();
        if (th_.dim == 0) fail("declare 'dim' before 'coords'", t.span);
        for (;;) {
            auto n = lex_.peek();
            std::string name = expect_name();
            check_fresh(name, n.span);
            if (name.size() != 1) fail("coordinate names must be single letters", n.span);
            th_.names.coords.push_back(name);
            if (!at_punct(",")) break;
            lex_.next();
        }
        if (static_cast<int>(th_.names.coords.size()) != th_.dim)
            fail("coordinate count does not match dim", t.span);
        expect_punct(";");
    }

    void parse_fields() {
        auto t = lex_.next();
        if (th_.names.coords.empty()) fail("declare 'coords' before 'fields'", t.span);
        for (;;) {
            auto n = lex_.peek();
            std::string name = expect_name();
            check_fresh(name, n.span);
            th_.names.fields.push_back(name);
            if (!at_punct(",")) break;
            lex_.next();
        }
        expect_punct(";");
    }

    void parse_background() {
        auto t = lex_.next();
        if (lagrangian_seen_) fail("backgrounds must be declared before the lagrangian", t.span);
        if (th_.names.coords.empty()) fail("declare 'coords' before 'background'", t.span);
        auto n = lex_.peek();
        BackgroundDecl bg;
        bg.name = expect_name();
        check_fresh(bg.name, n.span);
        expect_punct("(");
        for (;;) {
            auto cn = lex_.peek();
            std::string cname = expect_name();
            int mu = coord_index(cname);
            if (mu < 0) fail("unknown coordinate '" + cname + "'", cn.span);
            bg.deps.push_back(mu);
            if (!at_punct(",")) break;
            lex_.next();
        }
        expect_punct(")");
        while (lex_.peek().kind == detail::Tok::Ident) bg.attrs.push_back(lex_.next().text);
        expect_punct(";");
        th_.names.backgrounds.push_back(bg.name);
        th_.backgrounds.push_back(std::move(bg));
    }

    void parse_param() {
        auto t = lex_.next();
        if (lagrangian_seen_) fail("parameters must be declared before the lagrangian", t.span);
        auto n = lex_.peek();
        std::string name = expect_name();
        check_fresh(name, n.span);
        th_.names.parameters.push_back(name);
        expect_punct(";");
    }

    void parse_lagrangian() {
        auto t = lex_.next();
        if (th_.names.fields.empty()) fail("declare 'fields' before 'lagrangian'", t.span);
        if (lagrangian_seen_) fail("duplicate 'lagrangian' declaration", t.span);
        freeze_auxiliary_ids();
        expect_punct(":");
        th_.lagrangian = parse_expr(Scope{});
        expect_punct(";");
        lagrangian_seen_ = true;
    }

    EvoField parse_field_assignments(const char* head) {
        EvoField Z(th_.nfields());
        std::vector<bool> seen(static_cast<size_t>(th_.nfields()), false);
        while (at_ident(head)) {
            lex_.next();
            expect_punct("[");
            auto fn = lex_.peek();
            std::string fname = expect_name();
            int a = field_index(fname);
            if (a < 0) fail("unknown field '" + fname + "'", fn.span);
            if (seen[static_cast<size_t>(a)]) fail("duplicate component for field '" + fname + "'", fn.span);
            seen[static_cast<size_t>(a)] = true;
            expect_punct("]");
            expect_punct("=");
            Z.comps[static_cast<size_t>(a)] = parse_expr(Scope{});
            expect_punct(";");
        }
        return Z;
    }

    void parse_symmetry() {
        auto t = lex_.next();
        require_lagrangian(t.span);
        SymmetryDecl decl;
        decl.name = expect_name();
        expect_punct("{");
        decl.Z = parse_field_assignments("Z");
        if (at_ident("K")) {
            lex_.next();
            expect_punct("=");
            decl.K = parse_kform();
            expect_punct(";");
        }
        expect_punct("}");
        th_.symmetries.push_back(std::move(decl));
    }

    void parse_gauge() {
        auto t = lex_.next();
        require_lagrangian(t.span);
        GaugeDecl decl;
        decl.name = expect_name();
        expect_punct("{");
        while (at_ident("param")) {
            lex_.next();
            auto pn = lex_.peek();
            std::string pname = expect_name();
            for (const auto& other : decl.params)
                if (other == pname) fail("duplicate gauge parameter '" + pname + "'", pn.span);
            decl.params.push_back(pname);
            expect_punct(";");
        }
        if (decl.params.empty()) fail("gauge block requires at least one 'param'", t.span);
        decl.R.nfields = th_.nfields();
        decl.R.nparams = static_cast<int>(decl.params.size());
        while (at_ident("R")) {
            lex_.next();
            expect_punct("[");
            auto fn = lex_.peek();
            std::string fname = expect_name();
            int a = field_index(fname);
            if (a < 0) fail("unknown field '" + fname + "'", fn.span);
            expect_punct(",");
            MultiIndex K = parse_midx();
            // with several parameter components the entry names its parameter
            int beta = 0;
            if (at_punct(",")) {
                lex_.next();
                auto pn = lex_.peek();
                std::string pname = expect_name();
                beta = -1;
                for (size_t i = 0; i < decl.params.size(); ++i)
                    if (decl.params[i] == pname) beta = static_cast<int>(i);
                if (beta < 0) fail("unknown gauge parameter '" + pname + "'", pn.span);
            } else if (decl.params.size() > 1) {
                fail("entry must name its gauge parameter: R[field, midx, param]", fn.span);
            }
            expect_punct("]");
            expect_punct("=");
            Expr coeff = parse_expr(Scope{});
            expect_punct(";");
            decl.R.set(a, beta, K, coeff);
        }
        expect_punct("}");
        th_.gauges.push_back(std::move(decl));
    }

    void parse_solution() {
        auto t = lex_.next();
        require_lagrangian(t.span);
        SolutionDecl decl;
        decl.name = expect_name();
        expect_punct("{");
        decl.comps.assign(static_cast<size_t>(th_.nfields()), Expr());
        std::vector<bool> seen(static_cast<size_t>(th_.nfields()), false);
        while (!at_punct("}")) {
            auto fn = lex_.peek();
            std::string fname = expect_name();
            int a = field_index(fname);
            if (a < 0) fail("unknown field '" + fname + "'", fn.span);
            if (seen[static_cast<size_t>(a)]) fail("duplicate component for field '" + fname + "'", fn.span);
            seen[static_cast<size_t>(a)] = true;
            expect_punct("=");
            Scope scope;
            scope.fields = false; // solution bodies live on the base
            decl.comps[static_cast<size_t>(a)] = parse_expr(scope);
            expect_punct(";");
        }
        expect_punct("}");
        for (int a = 0; a < th_.nfields(); ++a)
            if (!seen[static_cast<size_t>(a)])
                fail("solution '" + decl.name + "' misses field '" + th_.names.fields[static_cast<size_t>(a)] + "'",
                     t.span);
        th_.solutions.push_back(std::move(decl));
    }

    void parse_hamiltonian() {
        auto t = lex_.next();
        require_lagrangian(t.span);
        HamiltonianDecl decl;
        decl.name = expect_name();
        expect_punct("{");
        expect_ident("H");
        expect_punct("=");
        decl.H = parse_kform();
        expect_punct(";");
        decl.Z = parse_field_assignments("Z");
        expect_punct("}");
        th_.hamiltonians.push_back(std::move(decl));
    }

    void require_lagrangian(SourceSpan s) {
        if (!lagrangian_seen_) fail("declare 'lagrangian' before analysis blocks", s);
    }

    // Parameter and background ids follow the canonical by-name order; they
    // are frozen once the first expression can reference them.
    void freeze_auxiliary_ids() {
        std::sort(th_.names.parameters.begin(), th_.names.parameters.end());
        std::sort(th_.backgrounds.begin(), th_.backgrounds.end(),
                  [](const BackgroundDecl& a, const BackgroundDecl& b) { return a.name < b.name; });
        th_.names.backgrounds.clear();
        for (const auto& bg : th_.backgrounds) th_.names.backgrounds.push_back(bg.name);
    }

    // (d-1,0)-form written per omitted coordinate: { t: expr, x: expr };
    // for d = 1 a bare expression is accepted.
    BiForm parse_kform() {
        BiForm K(th_.dim, th_.dim - 1, 0);
        if (!at_punct("{")) {
            if (th_.dim != 1)
                fail("a (d-1,0)-form requires the '{ coord: expr, ... }' syntax for d > 1",
                     lex_.peek().span);
            return BiForm::scalar(1, parse_expr(Scope{}));
        }
        lex_.next();
        while (!at_punct("}")) {
            auto cn = lex_.peek();
            std::string cname = expect_name();
            int mu = coord_index(cname);
            if (mu < 0) fail("unknown coordinate '" + cname + "'", cn.span);
            expect_punct(":");
            Expr coeff = parse_expr(Scope{});
            K += BiForm::volume(th_.dim, Expr(1)).contract_base(mu).scaled(coeff);
            if (at_punct(","))
                lex_.next();
            else
                break;
        }
        expect_punct("}");
        return K;
    }

    // Multi-index spelled as coordinate letters ("tx"), or "0" for order zero.
    MultiIndex parse_midx() {
        MultiIndex I(th_.dim);
        auto t = lex_.peek();
        if (t.kind == detail::Tok::Integer && t.text == "0") {
            lex_.next();
            return I;
        }
        if (t.kind != detail::Tok::Ident) fail("expected a multi-index", t.span);
        lex_.next();
        for (char ch : t.text) {
            int mu = coord_index(std::string(1, ch));
            if (mu < 0) fail("unknown coordinate letter '" + std::string(1, ch) + "' in multi-index", t.span);
            I = I.added(mu);
        }
        return I;
    }

    // ---- expression grammar: + - * / ^, parentheses, calls, rationals -----

    Expr parse_expr(const Scope& scope) {
        DepthGuard guard(*this);
        return parse_sum(scope);
    }

    Expr parse_sum(const Scope& scope) {
        bool neg = false;
        while (at_punct("+") || at_punct("-")) neg ^= (lex_.next().text == "-");
        Expr acc = parse_product(scope);
        if (neg) acc = -acc;
        while (at_punct("+") || at_punct("-")) {
            bool minus = lex_.next().text == "-";
            Expr rhs = parse_product(scope);
            acc = minus ? acc - rhs : acc + rhs;
        }
        return acc;
    }

    Expr parse_product(const Scope& scope) {
        Expr acc = parse_power(scope);
        while (at_punct("*") || at_punct("/")) {
            bool div = lex_.next().text == "/";
            auto span = lex_.peek().span;
            Expr rhs = parse_power(scope);
            if (div) {
                try {
                    acc = Expr::div(acc, rhs);
                } catch (const DomainError& e) {
                    fail(e.what(), span);
                }
            } else {
                acc = acc * rhs;
            }
        }
        return acc;
    }

    Expr parse_power(const Scope& scope) {
        Expr base = parse_atom(scope);
        if (!at_punct("^")) return base;
        lex_.next();
        int expo = parse_int_exponent();
        try {
            return Expr::pow(base, expo);
        } catch (const DomainError& e) {
            fail(e.what(), lex_.peek().span);
        }
    }

    int parse_int_exponent() {
        bool neg = false;
        bool parens = at_punct("(");
        if (parens) lex_.next();
        if (at_punct("-")) {
            neg = true;
            lex_.next();
        }
        if (lex_.peek().kind != detail::Tok::Integer)
            fail("exponent must be an integer literal", lex_.peek().span);
        int v = safe_int(lex_.next(), 64);
        if (parens) expect_punct(")");
        return neg ? -v : v;
    }

    Expr parse_atom(const Scope& scope) {
        auto t = lex_.peek();
        if (at_punct("(")) {
            lex_.next();
            Expr e = parse_expr(scope);
            expect_punct(")");
            return e;
        }
        if (at_punct("-")) {
            DepthGuard guard(*this);
            lex_.next();
            return -parse_atom(scope);
        }
        if (t.kind == detail::Tok::Integer) {
            lex_.next();
            return Expr(Rational(digits_to_int(t.text)));
        }
        if (t.kind == detail::Tok::Decimal) {
            lex_.next();
            auto dot = t.text.find('.');
            std::string digits = t.text.substr(0, dot) + t.text.substr(dot + 1);
            boost::multiprecision::cpp_int num = digits_to_int(digits);
            boost::multiprecision::cpp_int den = 1;
            for (size_t k = dot + 1; k < t.text.size(); ++k) den *= 10;
            return Expr(Rational(num, den));
        }
        if (t.kind == detail::Tok::Ident) {
            for (Func f : {Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sqrt}) {
                if (t.text == func_name(f)) {
                    lex_.next();
                    expect_punct("(");
                    Expr arg = parse_expr(scope);
                    expect_punct(")");
                    return Expr::apply(f, arg);
                }
            }
            lex_.next();
            return resolve_identifier(t.text, t.span, scope);
        }
        fail("expected an expression", t.span);
    }

    Expr resolve_identifier(const std::string& name, SourceSpan span, const Scope& scope) {
        if (int mu = coord_index(name); mu >= 0) return Expr(Symbol::base_coord(mu));
        if (int a = field_index(name); a >= 0) {
            if (!scope.fields) fail("field '" + name + "' is not allowed in this context", span);
            return Expr(Symbol::jet(a, MultiIndex(th_.dim)));
        }
        if (int b = background_index(name); b >= 0)
            return Expr(Symbol::background(b, MultiIndex(th_.dim), background_mask(b)));
        if (int p = parameter_index(name); p >= 0) {
            if (!scope.parameters) fail("parameter '" + name + "' is not allowed in this context", span);
            return Expr(Symbol::parameter(p));
        }
        // jet or background-derivative suffix: head_suffix
        auto underscore = name.find('_');
        if (underscore != std::string::npos && underscore > 0 && underscore + 1 < name.size()) {
            std::string head = name.substr(0, underscore);
            std::string suffix = name.substr(underscore + 1);
            MultiIndex I(th_.dim);
            bool suffix_ok = true;
            for (char ch : suffix) {
                int mu = coord_index(std::string(1, ch));
                if (mu < 0) {
                    suffix_ok = false;
                    break;
                }
                I = I.added(mu);
            }
            if (suffix_ok) {
                if (int a = field_index(head); a >= 0) {
                    if (!scope.fields) fail("field '" + head + "' is not allowed in this context", span);
                    return Expr(Symbol::jet(a, I));
                }
                if (int b = background_index(head); b >= 0)
                    return Expr(Symbol::background(b, I, background_mask(b)));
            }
        }
        fail("unknown identifier " + name, span);
    }

    uint32_t background_mask(int b) const {
        uint32_t mask = 0;
        for (int mu : th_.backgrounds[static_cast<size_t>(b)].deps) mask |= (1u << mu);
        return mask;
    }
};

inline Theory parse_theory(const std::string& text) { return TheoryParser(text).parse(); }

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

// Components of a (d-1,0)-form per omitted coordinate; K = sum c_mu iota_mu vol.
inline std::vector<Expr> kform_components(const BiForm& K) {
    const int d = K.dim();
    std::vector<Expr> out(static_cast<size_t>(d));
    for (int mu = 0; mu < d; ++mu) {
        BiForm unit = BiForm::volume(d, Expr(1)).contract_base(mu);
        const auto& [w, sign] = *unit.terms().begin();
        out[static_cast<size_t>(mu)] = Expr::div(K.coeff(w), sign);
    }
    return out;
}

inline std::string render_kform(const BiForm& K, const NameTable& names) {
    if (K.dim() == 1) return K.coeff(BasisWord{}).render(names);
    std::string out = "{ ";
    std::vector<Expr> comps = kform_components(K);
    bool first = true;
    for (int mu = 0; mu < K.dim(); ++mu) {
        if (comps[static_cast<size_t>(mu)].is_zero() && K.dim() > 1) {
            // keep zero entries out unless everything vanishes
            bool all_zero = K.is_zero();
            if (!all_zero) continue;
            if (mu != 0) continue;
        }
        if (!first) out += ", ";
        first = false;
        out += names.coords[static_cast<size_t>(mu)] + ": " + comps[static_cast<size_t>(mu)].render(names);
    }
    out += " }";
    return out;
}

inline std::string render_theory(const Theory& th) {
    std::ostringstream os;
    const NameTable& n = th.names;
    os << "theory " << th.name << " {\n";
    os << "  dim " << th.dim << ";\n";
    os << "  coords ";
    for (size_t i = 0; i < n.coords.size(); ++i) os << (i ? ", " : "") << n.coords[i];
    os << ";\n  fields ";
    for (size_t i = 0; i < n.fields.size(); ++i) os << (i ? ", " : "") << n.fields[i];
    os << ";\n";
    for (const auto& bg : th.backgrounds) {
        os << "  background " << bg.name << "(";
        for (size_t i = 0; i < bg.deps.size(); ++i)
            os << (i ? ", " : "") << n.coords[static_cast<size_t>(bg.deps[i])];
        os << ")";
        for (const auto& a : bg.attrs) os << " " << a;
        os << ";\n";
    }
    for (const auto& p : n.parameters) os << "  param " << p << ";\n";
    os << "  lagrangian : " << th.lagrangian.render(n) << ";\n";
    for (const auto& s : th.symmetries) {
        os << "  symmetry " << s.name << " {\n";
        for (int a = 0; a < th.nfields(); ++a)
            os << "    Z[" << n.fields[static_cast<size_t>(a)]
               << "] = " << s.Z.comps[static_cast<size_t>(a)].render(n) << ";\n";
        if (s.K) os << "    K = " << render_kform(*s.K, n) << ";\n";
        os << "  }\n";
    }
    for (const auto& g : th.gauges) {
        os << "  gauge " << g.name << " {\n";
        for (const auto& p : g.params) os << "    param " << p << ";\n";
        for (const auto& [key, coeff] : g.R.coeffs) {
            const auto& [a, beta, K] = key;
            os << "    R[" << n.fields[static_cast<size_t>(a)] << ", "
               << (K.order() == 0 ? "0" : K.suffix(n.coords));
            if (g.params.size() > 1) os << ", " << g.params[static_cast<size_t>(beta)];
            os << "] = " << coeff.render(n) << ";\n";
        }
        os << "  }\n";
    }
    for (const auto& s : th.solutions) {
        os << "  solution " << s.name << " {\n";
        for (int a = 0; a < th.nfields(); ++a)
            os << "    " << n.fields[static_cast<size_t>(a)] << " = "
               << s.comps[static_cast<size_t>(a)].render(n) << ";\n";
        os << "  }\n";
    }
    for (const auto& h : th.hamiltonians) {
        os << "  hamiltonian " << h.name << " {\n";
        os << "    H = " << render_kform(h.H, n) << ";\n";
        for (int a = 0; a < th.nfields(); ++a)
            os << "    Z[" << n.fields[static_cast<size_t>(a)]
               << "] = " << h.Z.comps[static_cast<size_t>(a)].render(n) << ";\n";
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace varform
