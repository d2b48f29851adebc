#pragma once

#include "json.hpp"

#include "periomorph/classify.hpp"
#include "periomorph/eqrel.hpp"
#include "periomorph/morphisms.hpp"
#include "periomorph/template_analysis.hpp"

namespace periomorph {

using Json = nlohmann::ordered_json;

inline Json to_json(const OperationTable& op) {
    return Json{{"universe", op.universe}, {"arity", op.arity}, {"table", op.table}};
}

inline Json to_json(const PolyCone& c) {
    Json stages = Json::object();
    for (const auto& [k, op] : c.stages) stages[std::to_string(k)] = op.table;
    return Json{{"universe", c.base.size}, {"stages", stages}};
}

inline Json to_json(const EqRelation& r) {
    Json patterns = Json::array();
    for (const Partition& p : r.patterns) patterns.push_back(p.to_string());
    return Json{{"arity", r.arity}, {"patterns", patterns}};
}

inline Json to_json(const HullResult& h) {
    Json tuples = Json::array();
    for (const auto& t : h.tuples) tuples.push_back(t);
    return Json{{"arity", h.arity}, {"arity_bound", h.arity_bound}, {"tuples", tuples}};
}

inline std::string witness_status_name(WitnessStatus s) {
    switch (s) {
        case WitnessStatus::NotSearched: return "not-searched";
        case WitnessStatus::NotApplicable: return "not-applicable";
        case WitnessStatus::Found: return "found";
        case WitnessStatus::NotFound: return "not-found";
    }
    return "?";
}

inline Json to_json(const ComplexityVerdict& v, const std::string& template_name) {
    Json evidence = Json::array();
    for (const RelationEvidence& e : v.evidence) {
        Json row{{"relation", e.symbol},
                 {"arity", e.patterns.arity},
                 {"patterns", to_json(e.patterns)["patterns"]},
                 {"negative", e.negative},
                 {"positive", e.positive}};
        if (e.non_negative_witness)
            row["non_negative_witness"] = e.non_negative_witness->to_string();
        if (e.non_positive_witness)
            row["non_positive_witness"] =
                Json{{"member", e.non_positive_witness->first.to_string()},
                     {"missing_coarsening", e.non_positive_witness->second.to_string()}};
        evidence.push_back(std::move(row));
    }
    Json out{{"schema", 1},
             {"template", template_name},
             {"class", to_string(v.cls)},
             {"evidence", evidence},
             {"witness_status", witness_status_name(v.witness_status)}};
    if (!v.witness_target.empty()) out["witness_target"] = v.witness_target;
    if (v.witness) out["witness"] = v.witness->to_string();
    if (!v.note.empty()) out["note"] = v.note;
    return out;
}

} // namespace periomorph
