#pragma once

#include "dsl.hpp"
#include "pullback.hpp"

#include <json.hpp>

namespace varform {

using Json = nlohmann::ordered_json;

// Forms are serialized as a list of terms, each with its horizontal legs,
// vertical (contact) legs, and coefficient in the canonical expression
// grammar. Map iteration order makes the output deterministic.
inline Json form_to_json(const BiForm& f, const NameTable& names) {
    Json terms = Json::array();
    for (const auto& [w, c] : f.terms()) {
        Json t;
        Json dx = Json::array();
        for (int mu : w.horiz) dx.push_back(names.coords[static_cast<size_t>(mu)]);
        Json dv = Json::array();
        for (const auto& v : w.vert) dv.push_back(names.name(Symbol::jet(v.field, v.index)));
        t["dx"] = dx;
        t["dv"] = dv;
        t["coeff"] = c.render(names);
        terms.push_back(t);
    }
    return terms;
}

inline Json source_to_json(const SourceForm& s, const NameTable& names) {
    Json out;
    for (int a = 0; a < s.nfields(); ++a)
        out[names.fields[static_cast<size_t>(a)]] = s.comps[static_cast<size_t>(a)].render(names);
    return out;
}

inline Json evo_to_json(const EvoField& Z, const NameTable& names) {
    Json out;
    for (int a = 0; a < Z.nfields(); ++a)
        out[names.fields[static_cast<size_t>(a)]] = Z.comps[static_cast<size_t>(a)].render(names);
    return out;
}

inline Json pullback_to_json(const PullbackForm& f, const NameTable& names) {
    Json terms = Json::array();
    for (const auto& [w, c] : f.terms) {
        if (c.is_zero()) continue;
        Json t;
        Json dx = Json::array();
        for (int mu : w) dx.push_back(names.coords[static_cast<size_t>(mu)]);
        t["dx"] = dx;
        t["coeff"] = c.render(names);
        terms.push_back(t);
    }
    return terms;
}

inline const char* pass_fail(bool ok) { return ok ? "pass" : "fail"; }

} // namespace varform
