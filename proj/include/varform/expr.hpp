#pragma once

#include "symbol.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace varform {

using Rational = boost::multiprecision::cpp_rational;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Func : uint8_t { Sin = 0, Cos, Exp, Ln, Sqrt };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}

class Expr;

// A function application; the argument is a normalized Expr held by pointer
// so atoms stay copyable. Distinct applications are opaque factors.
struct FuncApp {
    Func fn = Func::Sin;
    std::shared_ptr<const Expr> arg;
    int cmp(const FuncApp& o) const;
};

class Atom {
  public:
    Atom(Symbol s) : v_(std::move(s)) {}
    Atom(FuncApp f) : v_(std::move(f)) {}

    bool is_symbol() const { return std::holds_alternative<Symbol>(v_); }
    const Symbol& symbol() const { return std::get<Symbol>(v_); }
    const FuncApp& func() const { return std::get<FuncApp>(v_); }

    int cmp(const Atom& o) const {
        if (is_symbol() != o.is_symbol()) return is_symbol() ? -1 : 1;
        if (is_symbol()) return symbol().cmp(o.symbol());
        return func().cmp(o.func());
    }
    bool operator<(const Atom& o) const { return cmp(o) < 0; }
    bool operator==(const Atom& o) const { return cmp(o) == 0; }

  private:
    std::variant<Symbol, FuncApp> v_;
};

// Product of atom powers, sorted by the canonical atom order. Powers are
// nonzero integers; negative powers arise from ln/sqrt derivatives and exact
// monomial division.
struct Monomial {
    std::vector<std::pair<Atom, int>> factors;

    bool is_one() const { return factors.empty(); }
    int cmp(const Monomial& o) const {
        size_t n = std::min(factors.size(), o.factors.size());
        for (size_t i = 0; i < n; ++i) {
            int c = factors[i].first.cmp(o.factors[i].first);
            if (c != 0) return c;
            if (factors[i].second != o.factors[i].second)
                return factors[i].second > o.factors[i].second ? -1 : 1;
        }
        if (factors.size() != o.factors.size()) return factors.size() < o.factors.size() ? -1 : 1;
        return 0;
    }
    bool operator<(const Monomial& o) const { return cmp(o) < 0; }
    bool operator==(const Monomial& o) const { return cmp(o) == 0; }
};

// Exact symbolic scalar in normal form: a rational-linear combination of
// monomials. All operations renormalize, so two Exprs are semantically equal
// on the rational-polynomial fragment iff they compare equal.
class Expr {
  public:
    Expr() = default;
    Expr(int n) { add_term(Monomial{}, Rational(n)); }
    Expr(Rational r) { add_term(Monomial{}, std::move(r)); }
    Expr(const Symbol& s) {
        Monomial m;
        m.factors.emplace_back(Atom(s), 1);
        add_term(std::move(m), Rational(1));
    }

    static Expr zero() { return Expr(); }
    static Expr one() { return Expr(1); }

    bool is_zero() const { return terms_.empty(); }
    std::optional<Rational> as_rational() const {
        if (terms_.empty()) return Rational(0);
        if (terms_.size() == 1 && terms_.begin()->first.is_one()) return terms_.begin()->second;
        return std::nullopt;
    }
    bool is_monomial() const { return terms_.size() == 1; }
    size_t term_count() const { return terms_.size(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    // ---- arithmetic -------------------------------------------------------

    Expr& operator+=(const Expr& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Expr& operator-=(const Expr& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Expr operator+(Expr a, const Expr& b) { return a += b; }
    friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
    friend Expr operator-(const Expr& a) {
        Expr r;
        for (const auto& [m, c] : a.terms_) r.add_term(m, -c);
        return r;
    }
    friend Expr operator*(const Expr& a, const Expr& b) {
        Expr r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(mul_monomials(ma, mb), ca * cb);
        return r;
    }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    friend bool operator==(const Expr& a, const Expr& b) { return a.cmp(b) == 0; }
    friend bool operator!=(const Expr& a, const Expr& b) { return a.cmp(b) != 0; }
    bool operator<(const Expr& o) const { return cmp(o) < 0; }

    int cmp(const Expr& o) const {
        auto i = terms_.begin();
        auto j = o.terms_.begin();
        for (; i != terms_.end() && j != o.terms_.end(); ++i, ++j) {
            int c = i->first.cmp(j->first);
            if (c != 0) return c;
            if (i->second != j->second) return i->second < j->second ? -1 : 1;
        }
        if (i != terms_.end()) return 1;
        if (j != o.terms_.end()) return -1;
        return 0;
    }

    // Integer power; negative exponents require a single invertible monomial.
    static Expr pow(const Expr& base, int n) {
        if (n == 0) return Expr(1);
        if (n > 0) {
            Expr acc(1);
            Expr b = base;
            int k = n;
            while (k > 0) {
                if (k & 1) acc *= b;
                b *= b;
                k >>= 1;
            }
            return acc;
        }
        return pow(invert_monomial(base), -n);
    }

    // Exact division; the divisor must be a nonzero single monomial.
    static Expr div(const Expr& num, const Expr& den) { return num * invert_monomial(den); }

    static Expr apply(Func fn, const Expr& arg) {
        Expr r;
        Monomial m;
        m.factors.emplace_back(Atom(FuncApp{fn, std::make_shared<const Expr>(arg)}), 1);
        r.add_term(std::move(m), Rational(1));
        return r;
    }

    // ---- calculus ---------------------------------------------------------

    // Formal partial derivative; every distinct symbol is independent except
    // that backgrounds respond to their declared base coordinates.
    Expr partial(const Symbol& s) const {
        return derive([&s](const Atom& a) -> Expr {
            if (a.is_symbol()) {
                const Symbol& y = a.symbol();
                if (y == s) return Expr(1);
                if (s.kind == SymKind::BaseCoord && y.kind == SymKind::Background &&
                    y.depends_on_coord(s.id))
                    return Expr(Symbol::background(y.id, y.index.added(s.id), y.deps));
                return Expr();
            }
            Expr inner = a.func().arg->partial(s);
            if (inner.is_zero()) return Expr();
            return func_derivative(a.func()) * inner;
        });
    }

    // Total derivative D_mu = d/dx^mu + sum over jet-like symbols.
    Expr total_derivative(int mu) const {
        return derive([mu](const Atom& a) -> Expr {
            if (a.is_symbol()) {
                const Symbol& y = a.symbol();
                switch (y.kind) {
                    case SymKind::BaseCoord: return y.id == mu ? Expr(1) : Expr();
                    case SymKind::JetCoord: return Expr(Symbol::jet(y.id, y.index.added(mu)));
                    case SymKind::ParamJet: return Expr(Symbol::param_jet(y.id, y.index.added(mu)));
                    case SymKind::Background:
                        return y.depends_on_coord(mu)
                                   ? Expr(Symbol::background(y.id, y.index.added(mu), y.deps))
                                   : Expr();
                    case SymKind::Parameter: return Expr();
                }
                return Expr();
            }
            Expr inner = a.func().arg->total_derivative(mu);
            if (inner.is_zero()) return Expr();
            return func_derivative(a.func()) * inner;
        });
    }

    Expr total_derivative_multi(const MultiIndex& I) const {
        Expr e = *this;
        for (int mu = 0; mu < I.dim(); ++mu)
            for (int k = 0; k < I[mu]; ++k) e = e.total_derivative(mu);
        return e;
    }

    // ---- queries ----------------------------------------------------------

    int max_jet_order() const {
        int best = 0;
        for_each_symbol([&](const Symbol& s) {
            if (s.kind == SymKind::JetCoord) best = std::max(best, s.index.order());
        });
        return best;
    }
    int max_paramjet_order() const {
        int best = 0;
        for_each_symbol([&](const Symbol& s) {
            if (s.kind == SymKind::ParamJet) best = std::max(best, s.index.order());
        });
        return best;
    }

    void for_each_symbol(const std::function<void(const Symbol&)>& f) const {
        for (const auto& [m, c] : terms_)
            for (const auto& [a, k] : m.factors) atom_symbols(a, f);
    }

    std::set<Symbol> symbols(SymKind kind) const {
        std::set<Symbol> out;
        for_each_symbol([&](const Symbol& s) {
            if (s.kind == kind) out.insert(s);
        });
        return out;
    }
    std::set<Symbol> jet_symbols() const { return symbols(SymKind::JetCoord); }

    bool has_function_nodes() const {
        for (const auto& [m, c] : terms_)
            for (const auto& [a, k] : m.factors)
                if (!a.is_symbol()) return true;
        return false;
    }

    bool depends_on(const Symbol& s) const {
        bool found = false;
        for_each_symbol([&](const Symbol& y) {
            if (y == s) found = true;
        });
        return found;
    }

    // ---- substitution and evaluation --------------------------------------

    Expr substitute(const std::map<Symbol, Expr>& map) const {
        Expr r;
        for (const auto& [m, c] : terms_) {
            Expr t(c);
            for (const auto& [a, k] : m.factors) t *= pow(substitute_atom(a, map), k);
            r += t;
        }
        return r;
    }

    double eval(const std::map<Symbol, double>& values) const {
        double sum = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = static_cast<double>(c);
            for (const auto& [a, k] : m.factors) t *= std::pow(eval_atom(a, values), k);
            sum += t;
        }
        if (!std::isfinite(sum)) throw EvalError("expression evaluates to a non-finite value");
        return sum;
    }

    // ---- rendering --------------------------------------------------------

    std::string render(const NameTable& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational ac = c < 0 ? Rational(-c) : c;
            if (first) {
                if (c < 0) out += "-";
                first = false;
            } else {
                out += c < 0 ? " - " : " + ";
            }
            out += render_term(m, ac, names);
        }
        return out;
    }

  private:
    std::map<Monomial, Rational> terms_;

    void add_term(Monomial m, Rational c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), std::move(c));
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    static Monomial mul_monomials(const Monomial& a, const Monomial& b) {
        Monomial r;
        size_t i = 0, j = 0;
        while (i < a.factors.size() && j < b.factors.size()) {
            int c = a.factors[i].first.cmp(b.factors[j].first);
            if (c < 0) {
                r.factors.push_back(a.factors[i++]);
            } else if (c > 0) {
                r.factors.push_back(b.factors[j++]);
            } else {
                int p = a.factors[i].second + b.factors[j].second;
                if (p != 0) r.factors.emplace_back(a.factors[i].first, p);
                ++i, ++j;
            }
        }
        for (; i < a.factors.size(); ++i) r.factors.push_back(a.factors[i]);
        for (; j < b.factors.size(); ++j) r.factors.push_back(b.factors[j]);
        return r;
    }

    static Expr invert_monomial(const Expr& e) {
        if (e.terms_.size() != 1)
            throw DomainError("division requires a nonzero single-monomial divisor");
        const auto& [m, c] = *e.terms_.begin();
        Monomial inv;
        for (const auto& [a, k] : m.factors) inv.factors.emplace_back(a, -k);
        Expr r;
        r.add_term(std::move(inv), Rational(1) / c);
        return r;
    }

    static Expr func_derivative(const FuncApp& f) {
        const Expr& g = *f.arg;
        switch (f.fn) {
            case Func::Sin: return apply(Func::Cos, g);
            case Func::Cos: return -apply(Func::Sin, g);
            case Func::Exp: return apply(Func::Exp, g);
            case Func::Ln: return pow(g, -1);
            case Func::Sqrt: return div(Expr(Rational(1, 2)), apply(Func::Sqrt, g));
        }
        return Expr();
    }

    // Leibniz extension of an atom-level derivation rule.
    Expr derive(const std::function<Expr(const Atom&)>& datom) const {
        Expr r;
        for (const auto& [m, c] : terms_) {
            for (size_t i = 0; i < m.factors.size(); ++i) {
                const auto& [a, k] = m.factors[i];
                Expr da = datom(a);
                if (da.is_zero()) continue;
                Monomial rest;
                for (size_t j = 0; j < m.factors.size(); ++j) {
                    if (j == i) {
                        if (k != 1) rest.factors.emplace_back(a, k - 1);
                    } else {
                        rest.factors.push_back(m.factors[j]);
                    }
                }
                Expr base;
                base.add_term(std::move(rest), c * k);
                r += base * da;
            }
        }
        return r;
    }

    static void atom_symbols(const Atom& a, const std::function<void(const Symbol&)>& f) {
        if (a.is_symbol()) {
            f(a.symbol());
        } else {
            a.func().arg->for_each_symbol(f);
        }
    }

    static Expr substitute_atom(const Atom& a, const std::map<Symbol, Expr>& map) {
        if (a.is_symbol()) {
            auto it = map.find(a.symbol());
            if (it != map.end()) return it->second;
            return Expr(a.symbol());
        }
        return apply(a.func().fn, a.func().arg->substitute(map));
    }

    static double eval_atom(const Atom& a, const std::map<Symbol, double>& values) {
        if (a.is_symbol()) {
            auto it = values.find(a.symbol());
            if (it == values.end()) throw EvalError("no numeric value bound for a symbol");
            return it->second;
        }
        double g = a.func().arg->eval(values);
        switch (a.func().fn) {
            case Func::Sin: return std::sin(g);
            case Func::Cos: return std::cos(g);
            case Func::Exp: return std::exp(g);
            case Func::Ln:
                if (g <= 0.0) throw EvalError("ln of a non-positive value");
                return std::log(g);
            case Func::Sqrt:
                if (g < 0.0) throw EvalError("sqrt of a negative value");
                return std::sqrt(g);
        }
        throw EvalError("unknown function");
    }

    static std::string rational_str(const Rational& r) {
        std::string s = numerator(r).str();
        if (denominator(r) != 1) s += "/" + denominator(r).str();
        return s;
    }

    std::string render_term(const Monomial& m, const Rational& ac, const NameTable& names) const {
        if (m.is_one()) return rational_str(ac);
        std::string out;
        if (ac != 1) out += rational_str(ac) + "*";
        bool first = true;
        for (const auto& [a, k] : m.factors) {
            if (!first) out += "*";
            first = false;
            out += a.is_symbol() ? names.name(a.symbol())
                                 : std::string(func_name(a.func().fn)) + "(" +
                                       a.func().arg->render(names) + ")";
            if (k != 1) out += "^" + std::to_string(k);
        }
        return out;
    }
};

inline int FuncApp::cmp(const FuncApp& o) const {
    if (fn != o.fn) return fn < o.fn ? -1 : 1;
    return arg->cmp(*o.arg);
}

// Three-valued zero check: complete on the rational-polynomial fragment;
// expressions mixing function nodes are only compared syntactically.
enum class ZeroStatus { Zero, Nonzero, NotSyntacticallyZero };

inline ZeroStatus zero_status(const Expr& e) {
    if (e.is_zero()) return ZeroStatus::Zero;
    return e.has_function_nodes() ? ZeroStatus::NotSyntacticallyZero : ZeroStatus::Nonzero;
}

} // namespace varform
