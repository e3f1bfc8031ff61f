// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Adversary capability formalism: seven-entry access vectors, the
// black/grey/white-box regime classifier, the strict capability partial
// order, and the catalog of named deployment scenarios that evaluation runs
// bind to.

#ifndef SPLATMARK_THREATMODEL_HPP
#define SPLATMARK_THREATMODEL_HPP

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/attacks.hpp"
#include "splatmark/error.hpp"

namespace splatmark {

/// Binary capability vector, fixed entry order:
///   [access_M, access_Mw, access_E, access_D, oracle_D, oracle_R, key_K]
/// access_M  — the clean original model
/// access_Mw — the watermarked model itself
/// access_E  — the embedder
/// access_D  — the detector internals
/// oracle_D  — query access to a detection oracle
/// oracle_R  — query access to a rendering oracle
/// key_K     — the secret key (out of model by default)
struct AccessVector {
    std::array<int, 7> v{0, 0, 0, 0, 0, 0, 0};

    int access_m() const { return v[0]; }
    int access_mw() const { return v[1]; }
    int access_e() const { return v[2]; }
    int access_d() const { return v[3]; }
    int oracle_d() const { return v[4]; }
    int oracle_r() const { return v[5]; }
    int key_k() const { return v[6]; }

    bool operator==(const AccessVector& o) const { return v == o.v; }
    bool operator!=(const AccessVector& o) const { return v != o.v; }
};

inline void validate_access_vector(const AccessVector& a) {
    for (const int e : a.v)
        if (e != 0 && e != 1) throw ConfigError("access vector entries must be 0 or 1");
}

/// Bracket form in the fixed entry order, e.g. "[0,1,1,0,0,1,0]".
inline std::string to_string(const AccessVector& a) {
    std::string s = "[";
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a.v[i]);
    }
    return s + "]";
}

inline AccessVector access_vector_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 7)
        throw SchemaError("access vector must be a 7-entry array");
    AccessVector a;
    for (std::size_t i = 0; i < 7; ++i) a.v[i] = j.at(i).get<int>();
    validate_access_vector(a);
    return a;
}

inline nlohmann::json access_vector_to_json(const AccessVector& a) {
    return nlohmann::json(a.v);
}

enum class Regime { BLACK, GREY, WHITE };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::BLACK: return "BLACK";
        case Regime::GREY: return "GREY";
        case Regime::WHITE: return "WHITE";
    }
    return "BLACK";
}

/// Regime assignment looks only at the possession entries access_Mw/E/D;
/// oracle entries vary freely within a regime and key/original access are out
/// of model unless explicitly allowed.
inline Regime classify_regime(const AccessVector& a, bool allow_out_of_model = false) {
    validate_access_vector(a);
    if (!allow_out_of_model) {
        if (a.key_k())
            throw OutOfModelError("key_K=1 is outside the threat model: the secret key is "
                                  "never adversary-accessible");
        if (a.access_m())
            throw OutOfModelError("access_M=1 is outside the threat model: the clean original "
                                  "is never adversary-accessible");
    }
    const int mw = a.access_mw(), e = a.access_e(), d = a.access_d();
    if (mw == 0 && e == 0 && d == 0) return Regime::BLACK;
    if (mw == 1 && e == 1 && d == 1) return Regime::WHITE;
    return Regime::GREY;
}

/// Strict componentwise partial order: a < b iff a <= b everywhere and a != b.
inline bool precedes(const AccessVector& a, const AccessVector& b) {
    validate_access_vector(a);
    validate_access_vector(b);
    bool strict = false;
    for (std::size_t i = 0; i < 7; ++i) {
        if (a.v[i] > b.v[i]) return false;
        if (a.v[i] < b.v[i]) strict = true;
    }
    return strict;
}

struct Scenario {
    std::string name;
    Regime regime = Regime::BLACK;
    AccessVector vector;
    std::string description;
    std::string source; // catalog taxonomy path
    std::string note;   // non-empty when the published capability listing is ambiguous
};

/// The named deployment scenarios evaluations may bind to. Entries whose
/// capability listing is internally ambiguous in the published taxonomy carry
/// an explanatory note; the per-scenario vector is kept verbatim.
inline const std::vector<Scenario>& scenario_catalog() {
    static const std::string kGreyEmbedderNote =
        "capability listing grants embedder access although the grey-box overview "
        "describes the embedder as closed; the per-scenario vector is kept verbatim";
    static const std::vector<Scenario> catalog = {
        {"cloud-restreaming", Regime::BLACK, {{0, 0, 0, 0, 0, 1, 0}},
         "adversary re-streams rendered views from a cloud service, holding only a "
         "rendering oracle",
         "catalog/black-box/cloud", ""},
        {"passive-leakage", Regime::BLACK, {{0, 0, 0, 0, 0, 0, 0}},
         "rendered media leaks to an adversary with no interactive access at all",
         "catalog/black-box/leakage", ""},
        {"tracing-portal-probing", Regime::BLACK, {{0, 0, 0, 0, 1, 0, 0}},
         "adversary probes a tracing portal, holding only a detection oracle",
         "catalog/black-box/portal", ""},
        {"offline-forensic-tracing", Regime::GREY, {{0, 1, 1, 0, 0, 1, 0}},
         "stolen watermarked model is traced offline; adversary holds the model, the "
         "embedder and a renderer but no detector",
         "catalog/grey-box/forensic", kGreyEmbedderNote},
        {"oracle-guided-model-evasion", Regime::GREY, {{0, 1, 1, 0, 1, 0, 0}},
         "adversary perturbs the watermarked model guided by a detection oracle",
         "catalog/grey-box/evasion", kGreyEmbedderNote},
        {"fingerprint-whitebox", Regime::WHITE, {{0, 1, 1, 1, 1, 1, 0}},
         "full-access fingerprinting setting: model, embedder and detector all open",
         "catalog/white-box/fingerprint", ""},
        {"interactive-viewer", Regime::BLACK, {{0, 0, 0, 0, 0, 1, 0}},
         "published interactive viewer exposes rendered views on demand",
         "catalog/case-study/viewer", ""},
        {"broadcast", Regime::BLACK, {{0, 0, 0, 0, 0, 0, 0}},
         "one-way broadcast of rendered content; adversary can only record",
         "catalog/case-study/broadcast", ""},
        {"local-whitebox-opt", Regime::WHITE, {{0, 1, 1, 1, 0, 1, 0}},
         "local white-box optimization against the asset without a detection oracle",
         "catalog/case-study/local-opt", ""},
        {"online-whitebox-opt", Regime::WHITE, {{0, 1, 1, 1, 1, 1, 0}},
         "white-box optimization with online detector feedback",
         "catalog/case-study/online-opt", ""},
        {"offline-piracy-resale", Regime::GREY, {{0, 1, 1, 0, 0, 1, 0}},
         "pirated model resold after offline laundering attempts",
         "catalog/case-study/offline-resale", kGreyEmbedderNote},
        {"online-piracy-resale", Regime::GREY, {{0, 1, 1, 0, 1, 1, 0}},
         "pirated model resold while probing the tracing service",
         "catalog/case-study/online-resale", kGreyEmbedderNote},
    };
    return catalog;
}

inline const Scenario& find_scenario(const std::string& name) {
    for (const auto& s : scenario_catalog())
        if (s.name == name) return s;
    throw NotFoundError("unknown threat scenario '" + name + "'");
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
    return nlohmann::json{{"name", s.name},
                          {"regime", to_string(s.regime)},
                          {"vector", access_vector_to_json(s.vector)},
                          {"description", s.description},
                          {"source", s.source},
                          {"note", s.note}};
}

inline nlohmann::json catalog_to_json() {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : scenario_catalog()) arr.push_back(scenario_to_json(s));
    return nlohmann::json{{"schema", "splatmark/threat-catalog/v1"}, {"scenarios", arr}};
}

/// Refuses attack manifests whose entries exceed the declared capabilities:
/// model-level attacks require possession of the watermarked model
/// (access_Mw=1). Image-level attacks only need rendered output, which every
/// cataloged scenario grants, so they pass under any vector.
inline void validate_attack_access(const std::vector<AttackEntry>& entries,
                                   const AccessVector& declared) {
    const Regime regime = classify_regime(declared);
    for (const auto& e : entries) {
        if (e.level == "model" && declared.access_mw() == 0)
            throw ConfigError("attack '" + e.label + "' edits the watermarked model, but the "
                              "declared access vector " + to_string(declared) + " (" +
                              to_string(regime) + ") does not grant access_Mw");
    }
}

} // namespace splatmark

#endif // SPLATMARK_THREATMODEL_HPP
