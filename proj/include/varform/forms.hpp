#pragma once

#include "expr.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace varform {

// One contact-basis factor du^field_index (a theta^a_I in the usual notation).
struct VerticalLeg {
    int field = 0;
    MultiIndex index;

    int cmp(const VerticalLeg& o) const {
        if (field != o.field) return field < o.field ? -1 : 1;
        return index.cmp(o.index);
    }
    bool operator<(const VerticalLeg& o) const { return cmp(o) < 0; }
    bool operator==(const VerticalLeg& o) const { return field == o.field && index == o.index; }
};

// Canonical basis word: ascending horizontal indices first, then ascending
// vertical legs. Reordering signs are absorbed into coefficients.
struct BasisWord {
    std::vector<int> horiz;
    std::vector<VerticalLeg> vert;

    int cmp(const BasisWord& o) const {
        if (horiz != o.horiz) return horiz < o.horiz ? -1 : 1;
        size_t n = std::min(vert.size(), o.vert.size());
        for (size_t i = 0; i < n; ++i) {
            int c = vert[i].cmp(o.vert[i]);
            if (c != 0) return c;
        }
        if (vert.size() != o.vert.size()) return vert.size() < o.vert.size() ? -1 : 1;
        return 0;
    }
    bool operator<(const BasisWord& o) const { return cmp(o) < 0; }
    bool operator==(const BasisWord& o) const { return cmp(o) == 0; }
};

// A single wedge factor in unsorted position, used while assembling terms.
struct Leg {
    bool vertical = false;
    int coord = 0;    // horizontal coordinate
    VerticalLeg vleg; // vertical factor

    static Leg dx(int mu) { return Leg{false, mu, {}}; }
    static Leg dv(int field, MultiIndex I) { return Leg{true, 0, {field, std::move(I)}}; }

    bool before(const Leg& o) const {
        if (vertical != o.vertical) return !vertical;
        if (!vertical) return coord < o.coord;
        return vleg < o.vleg;
    }
    bool same(const Leg& o) const {
        if (vertical != o.vertical) return false;
        return vertical ? vleg == o.vleg : coord == o.coord;
    }
};

// Sorts a leg sequence into canonical order. Returns the permutation sign,
// or nullopt when a factor repeats (the term vanishes).
inline std::optional<int> canonicalize_legs(std::vector<Leg>& legs) {
    int sign = 1;
    for (size_t i = 1; i < legs.size(); ++i) {
        for (size_t j = i; j > 0 && legs[j].before(legs[j - 1]); --j) {
            std::swap(legs[j], legs[j - 1]);
            sign = -sign;
        }
    }
    for (size_t i = 1; i < legs.size(); ++i)
        if (legs[i].same(legs[i - 1])) return std::nullopt;
    return sign;
}

// Evolutionary vector field Z = Z^a d/du^a, one component per field.
struct EvoField {
    std::vector<Expr> comps;

    EvoField() = default;
    explicit EvoField(int nfields) : comps(static_cast<size_t>(nfields)) {}
    EvoField(std::initializer_list<Expr> c) : comps(c) {}

    int nfields() const { return static_cast<int>(comps.size()); }
    bool is_zero() const {
        for (const auto& e : comps)
            if (!e.is_zero()) return false;
        return true;
    }
    bool operator==(const EvoField& o) const { return comps == o.comps; }

    // Prolongation coefficient D_I(Z^a).
    Expr prolong(int field, const MultiIndex& I) const {
        return comps[static_cast<size_t>(field)].total_derivative_multi(I);
    }
};

// Bidegree-(p,q) differential form with Expr coefficients on the canonical
// dx / contact bases. Degrees are fixed per value; mixed-degree sums are
// kept as separate BiForms by callers.
class BiForm {
  public:
    BiForm() = default;
    BiForm(int dim, int p, int q) : dim_(dim), p_(p), q_(q) {
        if (dim <= 0) throw DomainError("BiForm: dimension must be positive");
        if (p < 0 || q < 0 || p > dim + 1) throw DomainError("BiForm: bad degree");
    }

    static BiForm scalar(int dim, Expr e) {
        BiForm f(dim, 0, 0);
        f.add_term(BasisWord{}, std::move(e));
        return f;
    }

    // The full horizontal volume word dx^0 ^ ... ^ dx^{d-1} with coefficient.
    static BiForm volume(int dim, Expr coeff) {
        BiForm f(dim, dim, 0);
        BasisWord w;
        for (int mu = 0; mu < dim; ++mu) w.horiz.push_back(mu);
        f.add_term(w, std::move(coeff));
        return f;
    }

    int dim() const { return dim_; }
    int p() const { return p_; }
    int q() const { return q_; }
    bool top_degree_overflow() const { return p_ > dim_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<BasisWord, Expr>& terms() const { return terms_; }

    bool operator==(const BiForm& o) const {
        return dim_ == o.dim_ && p_ == o.p_ && q_ == o.q_ && terms_ == o.terms_;
    }
    bool operator!=(const BiForm& o) const { return !(*this == o); }

    void add_term(const BasisWord& w, Expr coeff) {
        if (coeff.is_zero()) return;
        if (p_ > dim_) throw DomainError("BiForm: nonzero term beyond top horizontal degree");
        if (static_cast<int>(w.horiz.size()) != p_ || static_cast<int>(w.vert.size()) != q_)
            throw DomainError("BiForm: word degree mismatch");
        auto it = terms_.find(w);
        if (it == terms_.end()) {
            terms_.emplace(w, std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    void add_legs(std::vector<Leg> legs, Expr coeff) {
        if (coeff.is_zero()) return;
        auto sign = canonicalize_legs(legs);
        if (!sign) return;
        BasisWord w;
        for (const auto& l : legs) {
            if (l.vertical)
                w.vert.push_back(l.vleg);
            else
                w.horiz.push_back(l.coord);
        }
        if (*sign < 0) coeff = -coeff;
        add_term(w, std::move(coeff));
    }

    Expr coeff(const BasisWord& w) const {
        auto it = terms_.find(w);
        return it == terms_.end() ? Expr() : it->second;
    }

    // ---- linear structure --------------------------------------------------

    BiForm& operator+=(const BiForm& o) {
        require_same_degree(o);
        for (const auto& [w, c] : o.terms_) add_term(w, c);
        return *this;
    }
    BiForm& operator-=(const BiForm& o) {
        require_same_degree(o);
        for (const auto& [w, c] : o.terms_) add_term(w, -c);
        return *this;
    }
    friend BiForm operator+(BiForm a, const BiForm& b) { return a += b; }
    friend BiForm operator-(BiForm a, const BiForm& b) { return a -= b; }
    friend BiForm operator-(const BiForm& a) {
        BiForm r(a.dim_, a.p_, a.q_);
        for (const auto& [w, c] : a.terms_) r.add_term(w, -c);
        return r;
    }
    BiForm scaled(const Expr& f) const {
        BiForm r(dim_, p_, q_);
        for (const auto& [w, c] : terms_) r.add_term(w, f * c);
        return r;
    }

    static std::vector<Leg> word_legs(const BasisWord& w) {
        std::vector<Leg> legs;
        for (int mu : w.horiz) legs.push_back(Leg::dx(mu));
        for (const auto& v : w.vert) legs.push_back(Leg::dv(v.field, v.index));
        return legs;
    }

    // ---- wedge -------------------------------------------------------------

    friend BiForm wedge(const BiForm& a, const BiForm& b) {
        if (a.dim_ != b.dim_) throw DomainError("wedge: dimension mismatch");
        if (a.p_ + b.p_ > a.dim_) throw DomainError("wedge: horizontal degree exceeds dimension");
        BiForm r(a.dim_, a.p_ + b.p_, a.q_ + b.q_);
        for (const auto& [wa, ca] : a.terms_) {
            for (const auto& [wb, cb] : b.terms_) {
                std::vector<Leg> legs = word_legs(wa);
                std::vector<Leg> more = word_legs(wb);
                legs.insert(legs.end(), more.begin(), more.end());
                r.add_legs(std::move(legs), ca * cb);
            }
        }
        return r;
    }

    // ---- the two differentials ---------------------------------------------

    // d_H: coefficients via D_mu, dx^mu fixed, du^a_I -> -du^a_{I+mu} ^ dx^mu.
    // At p = d the result is the zero form one step past top degree.
    BiForm d_H() const {
        BiForm r(dim_, p_ + 1, q_);
        if (p_ >= dim_) return r;
        for (const auto& [w, c] : terms_) {
            std::vector<Leg> base = word_legs(w);
            for (int mu = 0; mu < dim_; ++mu) {
                Expr dc = c.total_derivative(mu);
                if (!dc.is_zero()) {
                    std::vector<Leg> legs;
                    legs.push_back(Leg::dx(mu));
                    legs.insert(legs.end(), base.begin(), base.end());
                    r.add_legs(std::move(legs), std::move(dc));
                }
            }
            for (size_t k = 0; k < base.size(); ++k) {
                if (!base[k].vertical) continue;
                int sign = (k % 2 == 0) ? 1 : -1;
                for (int mu = 0; mu < dim_; ++mu) {
                    std::vector<Leg> legs(base.begin(), base.begin() + static_cast<long>(k));
                    legs.push_back(Leg::dv(base[k].vleg.field, base[k].vleg.index.added(mu)));
                    legs.push_back(Leg::dx(mu));
                    legs.insert(legs.end(), base.begin() + static_cast<long>(k) + 1, base.end());
                    r.add_legs(std::move(legs), Expr(-sign) * c);
                }
            }
        }
        return r;
    }

    // d_V: coefficients only; both basis families are d_V-closed.
    BiForm d_V() const {
        BiForm r(dim_, p_, q_ + 1);
        for (const auto& [w, c] : terms_) {
            std::vector<Leg> base = word_legs(w);
            for (const Symbol& s : c.jet_symbols()) {
                Expr dc = c.partial(s);
                if (dc.is_zero()) continue;
                std::vector<Leg> legs;
                legs.push_back(Leg::dv(s.id, s.index));
                legs.insert(legs.end(), base.begin(), base.end());
                r.add_legs(std::move(legs), std::move(dc));
            }
        }
        return r;
    }

    // ---- contractions and Lie derivatives -----------------------------------

    // Interior product with pr Z; vertical leg du^a_I contributes D_I(Z^a).
    BiForm contract_prolonged(const EvoField& Z) const {
        std::map<VerticalLeg, Expr> cache;
        return contract_vertical([&](const VerticalLeg& v) {
            auto it = cache.find(v);
            if (it == cache.end()) it = cache.emplace(v, Z.prolong(v.field, v.index)).first;
            return it->second;
        });
    }

    // Interior product with the coordinate field d/du^field_I.
    BiForm contract_coordinate(int field, const MultiIndex& I) const {
        return contract_vertical([&](const VerticalLeg& v) {
            return (v.field == field && v.index == I) ? Expr(1) : Expr();
        });
    }

    // Interior product with d/dx^mu.
    BiForm contract_base(int mu) const {
        BiForm r(dim_, p_ > 0 ? p_ - 1 : 0, q_);
        if (p_ == 0) return r;
        for (const auto& [w, c] : terms_) {
            std::vector<Leg> base = word_legs(w);
            for (size_t k = 0; k < base.size(); ++k) {
                if (base[k].vertical || base[k].coord != mu) continue;
                std::vector<Leg> legs(base.begin(), base.begin() + static_cast<long>(k));
                legs.insert(legs.end(), base.begin() + static_cast<long>(k) + 1, base.end());
                r.add_legs(std::move(legs), (k % 2 == 0) ? c : -c);
            }
        }
        return r;
    }

    // Lie derivative along the horizontal lift D_mu: coefficients via D_mu,
    // dx fixed, du^a_I -> du^a_{I+mu}; a degree-0 derivation, no signs.
    BiForm lie_horizontal(int mu) const {
        BiForm r(dim_, p_, q_);
        for (const auto& [w, c] : terms_) {
            Expr dc = c.total_derivative(mu);
            if (!dc.is_zero()) r.add_term(w, std::move(dc));
            for (size_t k = 0; k < w.vert.size(); ++k) {
                BasisWord w2 = w;
                w2.vert[k].index = w2.vert[k].index.added(mu);
                std::vector<Leg> legs = word_legs(w2);
                r.add_legs(std::move(legs), c);
            }
        }
        return r;
    }

    BiForm lie_horizontal_multi(const MultiIndex& I) const {
        BiForm r = *this;
        for (int mu = 0; mu < I.dim(); ++mu)
            for (int k = 0; k < I[mu]; ++k) r = r.lie_horizontal(mu);
        return r;
    }

    // L_{pr Z} = iota_{pr Z} d_V + d_V iota_{pr Z}; on horizontal forms the
    // second summand is the zero (p,-1)-form and drops out.
    BiForm lie_evolutionary(const EvoField& Z) const {
        BiForm a = d_V().contract_prolonged(Z);
        if (q_ == 0) return a;
        return a + contract_prolonged(Z).d_V();
    }

    // Distinct vertical legs appearing in this form.
    std::vector<VerticalLeg> vertical_legs() const {
        std::vector<VerticalLeg> out;
        for (const auto& [w, c] : terms_)
            for (const auto& v : w.vert)
                if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        std::sort(out.begin(), out.end());
        return out;
    }

    int max_jet_order() const {
        int best = 0;
        for (const auto& [w, c] : terms_) {
            best = std::max(best, c.max_jet_order());
            for (const auto& v : w.vert) best = std::max(best, v.index.order());
        }
        return best;
    }

    std::string render(const NameTable& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [w, c] : terms_) {
            if (!first) out += " + ";
            first = false;
            std::string cs = c.render(names);
            bool needs_parens = c.term_count() > 1 || cs.find('-') != std::string::npos;
            out += needs_parens ? "(" + cs + ")" : cs;
            for (int mu : w.horiz) out += " d" + names.coords[static_cast<size_t>(mu)];
            for (const auto& v : w.vert)
                out += " dv(" + names.name(Symbol::jet(v.field, v.index)) + ")";
        }
        return out;
    }

  private:
    int dim_ = 1;
    int p_ = 0;
    int q_ = 0;
    std::map<BasisWord, Expr> terms_;

    void require_same_degree(const BiForm& o) const {
        if (dim_ != o.dim_ || p_ != o.p_ || q_ != o.q_)
            throw DomainError("BiForm: degree mismatch in linear combination");
    }

    BiForm contract_vertical(const std::function<Expr(const VerticalLeg&)>& factor) const {
        BiForm r(dim_, p_, q_ > 0 ? q_ - 1 : 0);
        if (q_ == 0) return r;
        for (const auto& [w, c] : terms_) {
            std::vector<Leg> base = word_legs(w);
            for (size_t k = 0; k < base.size(); ++k) {
                if (!base[k].vertical) continue;
                Expr f = factor(base[k].vleg);
                if (f.is_zero()) continue;
                std::vector<Leg> legs(base.begin(), base.begin() + static_cast<long>(k));
                legs.insert(legs.end(), base.begin() + static_cast<long>(k) + 1, base.end());
                Expr coeff = f * c;
                r.add_legs(std::move(legs), (k % 2 == 0) ? coeff : -coeff);
            }
        }
        return r;
    }
};

// [pr Z1, pr Z2] = pr Z3 with the coordinate formula from the evolutionary
// Cartan calculus.
inline EvoField evo_bracket(const EvoField& Z1, const EvoField& Z2) {
    if (Z1.nfields() != Z2.nfields()) throw DomainError("evo_bracket: field count mismatch");
    EvoField out(Z1.nfields());
    for (int a = 0; a < Z1.nfields(); ++a) {
        Expr acc;
        for (const Symbol& s : Z2.comps[static_cast<size_t>(a)].jet_symbols())
            acc += Z1.prolong(s.id, s.index) * Z2.comps[static_cast<size_t>(a)].partial(s);
        for (const Symbol& s : Z1.comps[static_cast<size_t>(a)].jet_symbols())
            acc -= Z2.prolong(s.id, s.index) * Z1.comps[static_cast<size_t>(a)].partial(s);
        out.comps[static_cast<size_t>(a)] = std::move(acc);
    }
    return out;
}

} // namespace varform
