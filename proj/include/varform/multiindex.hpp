#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace varform {

// Symmetric derivative multi-index over the d base coordinates.
// exponents[mu] counts derivatives along coordinate mu.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(int dim) : exps_(static_cast<size_t>(dim), 0) {}
    MultiIndex(std::initializer_list<int> e) : exps_(e) {
        for (int k : exps_)
            if (k < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    }
    static MultiIndex zero(int dim) { return MultiIndex(dim); }

    int dim() const { return static_cast<int>(exps_.size()); }
    int order() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }
    int operator[](int mu) const { return exps_[static_cast<size_t>(mu)]; }
    bool is_zero() const { return order() == 0; }

    MultiIndex added(int mu) const {
        check_coord(mu);
        MultiIndex r = *this;
        ++r.exps_[static_cast<size_t>(mu)];
        return r;
    }

    // Componentwise subtraction; fails if any exponent would go negative.
    bool try_sub(const MultiIndex& other, MultiIndex& out) const {
        if (other.dim() != dim()) return false;
        out = *this;
        for (size_t i = 0; i < exps_.size(); ++i) {
            out.exps_[i] -= other.exps_[i];
            if (out.exps_[i] < 0) return false;
        }
        return true;
    }

    bool contains(const MultiIndex& other) const {
        MultiIndex tmp;
        return try_sub(other, tmp);
    }

    // Graded order: lower |I| first; within a grade, more derivatives on
    // earlier coordinates first (so u_t sorts before u_x).
    int cmp(const MultiIndex& o) const {
        if (dim() != o.dim()) return dim() < o.dim() ? -1 : 1;
        int a = order(), b = o.order();
        if (a != b) return a < b ? -1 : 1;
        for (size_t i = 0; i < exps_.size(); ++i) {
            if (exps_[i] != o.exps_[i]) return exps_[i] > o.exps_[i] ? -1 : 1;
        }
        return 0;
    }
    bool operator==(const MultiIndex& o) const { return exps_ == o.exps_; }
    bool operator!=(const MultiIndex& o) const { return !(*this == o); }
    bool operator<(const MultiIndex& o) const { return cmp(o) < 0; }

    // Suffix spelling using one letter per coordinate, e.g. (1,2) -> "txx".
    std::string suffix(const std::vector<std::string>& coord_names) const {
        std::string s;
        for (size_t mu = 0; mu < exps_.size(); ++mu)
            for (int k = 0; k < exps_[mu]; ++k) s += coord_names[mu];
        return s;
    }

    const std::vector<int>& exponents() const { return exps_; }

  private:
    void check_coord(int mu) const {
        if (mu < 0 || mu >= dim()) throw std::domain_error("MultiIndex: coordinate index out of range");
    }
    std::vector<int> exps_;
};

} // namespace varform
