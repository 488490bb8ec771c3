#pragma once

#include "multiindex.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace varform {

// Symbol kinds, listed in canonical order. Rendering names live in a
// NameTable so symbols themselves stay small value types.
//
// BaseCoord   x^mu                      id = coordinate index
// JetCoord    u^a_I                     id = field index, index = I
// ParamJet    c^beta_K (gauge params)   id = parameter-field index, index = K
// Background  b_{,I}(x)                 id = background index, index = partial I
// Parameter   coupling constant         id = parameter index
enum class SymKind : uint8_t { BaseCoord = 0, JetCoord, ParamJet, Background, Parameter };

struct Symbol {
    SymKind kind = SymKind::BaseCoord;
    int id = 0;
    MultiIndex index;     // empty for BaseCoord/Parameter
    uint32_t deps = 0;    // Background only: bitmask of base coordinates it depends on

    static Symbol base_coord(int mu) { return {SymKind::BaseCoord, mu, MultiIndex(), 0}; }
    static Symbol jet(int field, MultiIndex I) { return {SymKind::JetCoord, field, std::move(I), 0}; }
    static Symbol param_jet(int beta, MultiIndex K) { return {SymKind::ParamJet, beta, std::move(K), 0}; }
    static Symbol background(int id, MultiIndex I, uint32_t deps) {
        return {SymKind::Background, id, std::move(I), deps};
    }
    static Symbol parameter(int id) { return {SymKind::Parameter, id, MultiIndex(), 0}; }

    bool is_jetlike() const { return kind == SymKind::JetCoord || kind == SymKind::ParamJet; }
    bool depends_on_coord(int mu) const { return (deps >> mu) & 1u; }

    // Canonical symbol order: BaseCoord < JetCoord < ParamJet < Background < Parameter,
    // then by id, then by multi-index (graded).
    int cmp(const Symbol& o) const {
        if (kind != o.kind) return kind < o.kind ? -1 : 1;
        if (id != o.id) return id < o.id ? -1 : 1;
        return index.cmp(o.index);
    }
    bool operator<(const Symbol& o) const { return cmp(o) < 0; }
    bool operator==(const Symbol& o) const { return kind == o.kind && id == o.id && index == o.index; }
    bool operator!=(const Symbol& o) const { return !(*this == o); }
};

// Display names per symbol family; owned by the Theory (or built ad hoc in tests).
struct NameTable {
    std::vector<std::string> coords;
    std::vector<std::string> fields;
    std::vector<std::string> gauge_params;
    std::vector<std::string> backgrounds;
    std::vector<std::string> parameters;

    std::string name(const Symbol& s) const {
        switch (s.kind) {
            case SymKind::BaseCoord: return at(coords, s.id);
            case SymKind::JetCoord: return with_suffix(at(fields, s.id), s.index);
            case SymKind::ParamJet: return with_suffix(at(gauge_params, s.id), s.index);
            case SymKind::Background: return with_suffix(at(backgrounds, s.id), s.index);
            case SymKind::Parameter: return at(parameters, s.id);
        }
        return "?";
    }

  private:
    static std::string at(const std::vector<std::string>& v, int i) {
        if (i < 0 || static_cast<size_t>(i) >= v.size()) return "#" + std::to_string(i);
        return v[static_cast<size_t>(i)];
    }
    std::string with_suffix(std::string base, const MultiIndex& I) const {
        if (I.order() == 0) return base;
        return base + "_" + I.suffix(coords);
    }
};

} // namespace varform
