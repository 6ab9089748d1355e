#pragma once
// io.hpp - JSON renderings of traces, verdicts, audits and errors. Keys come out sorted
// (nlohmann::json stores objects in std::map), so equal values serialize byte-identically.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cantor.hpp"
#include "choice.hpp"
#include "error.hpp"
#include "hitting.hpp"
#include "interval.hpp"
#include "ml_tests.hpp"

namespace layerwise {

using Json = nlohmann::json;

inline Json to_json(const Dyadic& d) { return d.to_string(); }

inline Json to_json(const Interval& x) { return Json{{"lo", x.lo().to_string()}, {"hi", x.hi().to_string()}}; }

inline Json to_json(const TraceEvent& e) {
    return Json{{"phase", e.phase}, {"consumed", e.consumed}, {"emitted", e.emitted}, {"note", e.note}};
}

inline Json to_json(const TransducerTrace& t) {
    Json events = Json::array();
    for (const auto& e : t.events) events.push_back(to_json(e));
    return Json{{"events", std::move(events)}, {"mind_changes", t.mind_changes}};
}

/// [{claim, witness?, at_fuel}]; witness omitted for the opening claim.
inline Json to_json(const MindChangeStream& s) {
    Json out = Json::array();
    for (const auto& e : s.events) {
        Json j{{"claim", e.claim}, {"at_fuel", e.at_fuel}};
        if (e.witness) j["witness"] = e.witness->empty() ? "-" : e.witness->str();
        out.push_back(std::move(j));
    }
    return out;
}

inline Json to_json(const AuditReport& r) {
    Json levels = Json::array();
    for (const auto& l : r.levels) {
        levels.push_back(Json{{"level", l.level}, {"measure", l.measure.to_string()},
                              {"bound", l.bound.to_string()}, {"pass", l.pass}});
    }
    return Json{{"levels", std::move(levels)}, {"all_pass", r.all_pass()}, {"failing_levels", r.failing_levels()}};
}

inline Json to_json(const LayerVerdict& v) {
    Json ex = Json::object();
    for (const auto& [n, w] : v.excluded_levels) ex[std::to_string(n)] = describe_word(w);
    return Json{{"excluded_levels", std::move(ex)}, {"candidate_rd", v.candidate_rd},
                {"fuel_used", v.fuel_used}, {"levels_scanned", v.levels_scanned}};
}

inline Json to_json(const std::vector<Insertion>& ins) {
    Json out = Json::array();
    for (const auto& i : ins) {
        out.push_back(Json{{"value", i.value}, {"position", i.position}, {"length", i.block.size()},
                           {"block", describe_word(i.block)}});
    }
    return out;
}

/// A finite gadget output: the hex of q's first `bits` bits and the word list of V.
inline Json gadget_export(const BitStream& q, std::size_t bits, const CylinderUnion& v) {
    Json words = Json::array();
    for (const Word& w : v.words()) words.push_back(w.empty() ? "-" : w.str());
    return Json{{"q_prefix_bits", bits}, {"q_prefix_hex", to_hex(q.prefix(bits))}, {"V", std::move(words)}};
}

inline Json error_json(ErrorCode code, const std::string& message) {
    return Json{{"error", std::string(to_string(code))}, {"message", message}};
}

/// The message drops the "Code: " prefix that Error::what() carries.
inline Json error_json(const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    return error_json(e.code(), msg);
}

/// SHA-256 of the input bits a run actually read.
inline std::string input_digest(const BitStream& p, std::size_t bits) { return sha256_hex(p.prefix(bits)); }

/// Common envelope of a CLI run.
inline Json report(const std::string& op, const std::string& digest, Json parameters, Json events, Json verdict) {
    return Json{{"operator", op}, {"input_digest", digest}, {"parameters", std::move(parameters)},
                {"events", std::move(events)}, {"verdict", std::move(verdict)}};
}

}  // namespace layerwise
