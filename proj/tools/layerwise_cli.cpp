// layerwise - experiment runner, gadget demonstrator, test auditor and report emitter.
//
// Every run is a pure function of its configuration: a bit source (seed, hex or file), the
// command's parameters and the output format. JSON and CSV artifacts are byte-identical
// across runs of the same configuration.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <layerwise/layerwise.hpp>

#include "derived_examples.hpp"

namespace lw = layerwise;
using lw::Json;

namespace {

struct Config {
    // bit source
    std::uint64_t seed = 7;
    std::string hex;
    std::string bits_file;
    // shared
    std::size_t fuel = 100000;
    std::int64_t precision = 20;
    std::string out;
    std::string format;
    std::string config;
    // brownian-path
    std::size_t grid = 5;
    std::size_t stage = 7;
    std::optional<std::size_t> layer_bound;
    std::int64_t modulus_offset = 10;
    // limit laws
    std::size_t length = 1000;
    std::size_t start = 3;
    std::size_t k = 2;
    std::string convention = "bit";
    std::string sequence;
    // hitting-demo
    std::string words = "11";
    std::string closed_words;
    std::size_t block_bound = 4;
    std::string members = "1,3";
    std::string avoid = "0,1,2";
    // gadget-run
    std::string which;
    std::string bound_set = "0,1,2";
    std::size_t gap = 2;
    // test-audit
    std::size_t depth = 10;
    std::optional<std::size_t> max_word_length;
    bool strict = false;
    // oracle-suite
    std::string module;
};

struct Artifact {
    std::string text;
    bool ok = true;  // false turns into exit status 1 (a failed audit or oracle)
};

std::vector<std::size_t> parse_naturals(const std::string& list) {
    std::vector<std::size_t> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        if (item.find_first_not_of("0123456789") != std::string::npos) {
            lw::fail(lw::ErrorCode::ParseError, "not a natural number: " + item);
        }
        out.push_back(std::stoull(item));
    }
    return out;
}

std::vector<mpq_class> parse_rationals(const std::string& list) {
    std::vector<mpq_class> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        mpq_class q;
        if (q.set_str(item, 10) != 0 || q.get_den() == 0) lw::fail(lw::ErrorCode::ParseError, "not a rational: " + item);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

/// Members each preceded by `gap` blanks, then `gap` trailing blanks.
lw::EventStream spaced_events(const std::vector<std::size_t>& members, std::size_t gap) {
    lw::EventStream ev;
    for (const std::size_t v : members) {
        ev.insert(ev.end(), gap, std::nullopt);
        ev.emplace_back(v);
    }
    ev.insert(ev.end(), gap, std::nullopt);
    return ev;
}

std::vector<lw::Word> word_list(const std::string& text) { return lw::parse_words(text).words(); }

struct Source {
    lw::BitStream p;
    Json descriptor;
};

Source make_source(const Config& c) {
    if (!c.hex.empty()) return {lw::BitStream::from_hex(c.hex), Json{{"hex", c.hex}}};
    if (!c.bits_file.empty()) return {lw::BitStream::from_file(c.bits_file), Json{{"bits_file", c.bits_file}}};
    return {lw::BitStream::seeded(c.seed), Json{{"seed", c.seed}}};
}

lw::Precision precision_of(const Config& c) { return lw::Precision{c.precision, 4096}; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// The envelope with the digest of every input bit the run read.
Json finish(const std::string& op, const Source& src, Json params, Json events, Json verdict) {
    params["source"] = src.descriptor;
    return lw::report(op, lw::sha256_hex(src.p.cached()), std::move(params), std::move(events), std::move(verdict));
}

void require_format(const std::string& format, std::initializer_list<const char*> allowed, const std::string& cmd) {
    for (const char* a : allowed) {
        if (format == a) return;
    }
    lw::fail(lw::ErrorCode::InvalidArgument, "format " + format + " is not available for " + cmd);
}

lw::SignConvention convention_of(const std::string& name) {
    if (name == "bit") return lw::SignConvention::PowerOfBit;
    if (name == "complement") return lw::SignConvention::PowerOfComplement;
    lw::fail(lw::ErrorCode::InvalidArgument, "convention must be bit or complement, got " + name);
}

// ----- commands

Artifact brownian_path(const Config& c) {
    const std::string format = c.format.empty() ? "csv" : c.format;
    require_format(format, {"csv", "json", "svg"}, "brownian-path");
    Source src = make_source(c);
    const lw::ModulusPolicy policy{c.modulus_offset};
    const auto path = lw::path_enclosure(src.p, c.grid, c.stage, c.layer_bound, precision_of(c), policy);
    if (format == "csv") return {lw::path_csv(path)};
    if (format == "svg") return {lw::path_svg(path)};
    Json values = Json::array();
    for (std::size_t m = 0; m < path.values.size(); ++m) {
        values.push_back(Json{{"t", path.time(m).to_string()}, {"value", lw::to_json(path.values[m])}});
    }
    Json verdict{{"values", std::move(values)}, {"stage_used", path.stage_used}};
    if (path.tube) {
        const lw::Interval mx = lw::path_max(path);
        verdict["tube"] = lw::to_json(*path.tube);
        verdict["max"] = lw::to_json(mx);
        verdict["greater_nat"] = lw::greater_nat(mx);
    }
    Json params{{"grid", c.grid}, {"stage", c.stage}, {"precision", c.precision}, {"modulus_offset", c.modulus_offset}};
    if (c.layer_bound) params["layer_bound"] = *c.layer_bound;
    return {dump(finish("brownian-path", src, std::move(params), Json::array(), std::move(verdict)))};
}

Artifact lil_run(const Config& c) {
    const std::string format = c.format.empty() ? "json" : c.format;
    require_format(format, {"csv", "json"}, "lil-run");
    Source src = make_source(c);
    const auto walk = lw::WalkPrefix::of(src.p.prefix(c.length));
    if (format == "csv") return {lw::lil_csv(walk, precision_of(c))};
    const auto v = lw::lil_verify(walk, c.start, c.length, lw::Precision{std::min<std::int64_t>(c.precision, 8), 4096});
    Json verdict{{"holds", v.holds}, {"index", v.index}, {"max_bits", v.max_bits}};
    if (!v.holds) {
        verdict["S_n"] = walk.sum(v.index);
        verdict["margin"] = lw::to_json(lw::lil_margin(v.index, precision_of(c)));
    }
    return {dump(finish("lil-run", src, Json{{"length", c.length}, {"start", c.start}}, Json::array(), std::move(verdict)))};
}

Artifact birkhoff_run(const Config& c) {
    const std::string format = c.format.empty() ? "json" : c.format;
    require_format(format, {"csv", "json"}, "birkhoff-run");
    if (c.length < 2) lw::fail(lw::ErrorCode::InvalidArgument, "birkhoff-run needs length >= 2");
    Source src = make_source(c);
    const lw::Word w = src.p.prefix(c.length);
    const std::size_t horizon = c.length - 1;
    if (format == "csv") {
        std::string out = "n,ones,average,deviates\n";
        std::size_t ones = 0;
        for (std::size_t n = 0; n <= horizon; ++n) {
            ones += static_cast<std::size_t>(w[n]);
            out += std::to_string(n) + "," + std::to_string(ones) + "," + rational_string(lw::birkhoff_average(w, n)) +
                   "," + (lw::detail::deviates(ones, n + 1, c.k) ? "1" : "0") + "\n";
        }
        return {out};
    }
    const auto v = lw::birkhoff_verify(w, c.k, c.start, horizon);
    Json verdict{{"holds", v.holds}, {"index", v.index}};
    if (!v.holds) verdict["average"] = rational_string(lw::birkhoff_average(w, v.index));
    return {dump(finish("birkhoff-run", src, Json{{"length", c.length}, {"start", c.start}, {"k", c.k}}, Json::array(),
                        std::move(verdict)))};
}

Json harmonic_run_json(const lw::HarmonicRun& run) {
    Json triggers = Json::array();
    for (const auto& t : run.triggers) {
        triggers.push_back(Json{{"at", t.at}, {"partial", rational_string(t.partial)}, {"target", rational_string(t.target)},
                                {"flipped", t.js}, {"boost", rational_string(t.boost)}});
    }
    const lw::Interval fin(lw::Dyadic::floor_of(run.final_partial, 64), lw::Dyadic::ceil_of(run.final_partial, 64));
    return Json{{"triggers", std::move(triggers)}, {"flips", run.flips.size()}, {"final_partial", lw::to_json(fin)}};
}

Artifact harmonic_run(const Config& c) {
    const std::string format = c.format.empty() ? "json" : c.format;
    require_format(format, {"csv", "json"}, "harmonic-run");
    if (c.length < 1) lw::fail(lw::ErrorCode::InvalidArgument, "harmonic-run needs length >= 1");
    Source src = make_source(c);
    const lw::SignConvention conv = convention_of(c.convention);
    if (format == "csv") {
        std::string out = "N,partial_lo,partial_hi\n";
        mpq_class s = 0;
        for (std::size_t n = 1; n <= c.length; ++n) {
            s += mpq_class(lw::harmonic_sign(src.p.bit(n), conv), static_cast<unsigned long>(n));
            out += std::to_string(n) + "," + lw::Dyadic::floor_of(s, 64).to_string() + "," +
                   lw::Dyadic::ceil_of(s, 64).to_string() + "\n";
        }
        return {out};
    }
    const auto partial = lw::harmonic_partial(src.p, c.length, conv);
    const lw::Interval enc(lw::Dyadic::floor_of(partial.sum, 64), lw::Dyadic::ceil_of(partial.sum, 64));
    Json verdict{{"partial", lw::to_json(enc)}};
    Json events = Json::array();
    Json params{{"length", c.length}, {"convention", lw::to_string(conv)}};
    if (!c.sequence.empty()) {
        const lw::RationalSequence a{parse_rationals(c.sequence)};
        const auto run = lw::harmonic_gadget(src.p, a, {c.length, std::size_t{1} << 22, conv});
        verdict["gadget"] = harmonic_run_json(run);
        events = lw::to_json(run.trace)["events"];
        params["sequence"] = c.sequence;
    }
    return {dump(finish("harmonic-run", src, std::move(params), std::move(events), std::move(verdict)))};
}

Json avoid_json(const lw::AvoidSet& g) {
    Json wit = Json::array();
    for (const auto& [v, w] : g.witnesses) wit.push_back(Json{{"v", v}, {"word", w.str()}});
    return Json{{"values", g.values}, {"witnesses", std::move(wit)}, {"complement_measure", g.complement_measure.to_string()},
                {"measure_bound", g.measure_bound.to_string()}, {"lower_bound", g.lower_bound.to_string()}};
}

Artifact hitting_demo(const Config& c) {
    require_format(c.format.empty() ? "json" : c.format, {"json"}, "hitting-demo");
    Source src = make_source(c);
    const std::vector<lw::Word> words = word_list(c.words);
    Json verdict;

    const auto open = lw::hit_open(src.p, lw::CylinderUnion(words), c.fuel);
    verdict["open"] = open ? Json{{"n", open->n}, {"witness", open->witness.str()}} : Json(nullptr);
    const bool one_length = !words.empty() && std::all_of(words.begin(), words.end(), [&](const lw::Word& w) {
        return w.size() == words.front().size();
    });
    if (one_length) {
        try {
            verdict["clopen"] = lw::hit_clopen(src.p, lw::CylinderUnion(words), c.fuel);
        } catch (const lw::Error& e) {
            if (e.code() != lw::ErrorCode::NeverHitWithinFuel) throw;
            verdict["clopen"] = nullptr;
        }
    }

    const std::vector<lw::Word> complement = c.closed_words.empty() ? words : word_list(c.closed_words);
    const auto closed = lw::hit_closed_mindchange(src.p, lw::ClosedCantorSet{lw::CylinderUnion(complement)}, c.fuel);
    verdict["closed"] = Json{{"mind_changes", lw::to_json(closed)}, {"final_claim", closed.final_claim()},
                             {"stabilized", closed.exhausted_complement}};

    const auto members = parse_naturals(c.members);
    const auto block = lw::block_encode(c.block_bound, std::set<std::size_t>(members.begin(), members.end()), src.p);
    const auto block_hit = lw::hit_open(block.q, block.v, block.head.size() + 1);
    std::size_t tail = 64;  // a finite source caps the exported tail
    while (tail > 0 && !src.p.available(tail)) --tail;
    verdict["block"] = Json{{"b", block.b}, {"digits", block.digits}, {"block_len", block.block_len},
                            {"hit", block_hit ? Json(block_hit->n) : Json(nullptr)},
                            {"decoded", block_hit ? Json(block.decode(block_hit->n)) : Json(nullptr)},
                            {"export", lw::gadget_export(block.q, block.head.size() + tail, block.v)}};

    const auto avoid = lw::avoid_set_gadget(src.p, spaced_events(parse_naturals(c.avoid), 0));
    verdict["avoid_set"] = avoid_json(avoid);

    Json params{{"words", c.words}, {"closed_words", c.closed_words.empty() ? c.words : c.closed_words},
                {"block_bound", c.block_bound}, {"members", c.members}, {"avoid", c.avoid}, {"fuel", c.fuel}};
    return {dump(finish("hitting-demo", src, std::move(params), lw::to_json(closed), std::move(verdict)))};
}

// ----- gadget-run: each transducer followed by an independent re-check of its postcondition

struct GadgetOutcome {
    Json trace;
    Json details;
    std::vector<std::string> failures;
    std::optional<Json> exported;

    void check(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

/// q continues with p verbatim after the spliced prefix.
bool verbatim_tail(const lw::SplicedStream& s, const lw::BitStream& p) {
    const std::size_t n0 = s.prefix.size();
    return s.q.prefix(n0 + 256).substr(n0, 256) == lw::shift(p, s.tail_offset).prefix(256);
}

GadgetOutcome run_lay(const lw::OpenNatSet& i, const std::vector<std::size_t>& members, const lw::BitStream& p,
                      const Config& c) {
    GadgetOutcome g;
    const auto r = lw::bound_to_lay_transducer(i, p);
    g.trace = lw::to_json(r.out.trace);
    const std::size_t top = members.empty() ? 0 : *std::max_element(members.begin(), members.end());
    // the level-n word for a prefix w has shortlex index below 2^(|w|+1)
    std::size_t fuel = std::max<std::size_t>(c.fuel, 1);
    for (const auto& ins : r.out.insertions) {
        if (ins.position >= 63) {
            g.check(false, "insertion at " + std::to_string(ins.position) + " lies beyond the indexable enumeration");
            continue;
        }
        fuel = std::max(fuel, std::size_t{1} << (ins.position + 1));
    }
    const auto v = lw::lay_exclusions(r.out.q, lw::DilutionTest{}, fuel, top + 2);
    for (const std::size_t n : members) g.check(v.excluded_levels.count(n) == 1, "level " + std::to_string(n) + " not excluded");
    g.check(members.empty() || lw::BoundToLay::decode(v) > top, "candidate layer below max I");
    g.check(verbatim_tail(r.out, p), "tail of q is not p");
    g.details = Json{{"insertions", lw::to_json(r.out.insertions)}, {"lay", lw::to_json(v)},
                     {"decoded_bound", lw::BoundToLay::decode(v)}};
    return g;
}

GadgetOutcome run_kol(const lw::OpenNatSet& i, const lw::BitStream& p) {
    GadgetOutcome g;
    const lw::LzCodec codec;
    const auto r = lw::kol_padding_gadget(i, p, codec);
    g.trace = lw::to_json(r.out.trace);
    Json pads = Json::array();
    for (const auto& pad : r.paddings) {
        const std::size_t len = lw::checked_clen(codec, r.out.q.prefix(pad.n + pad.k));
        g.check(len + pad.c < pad.n + pad.k, "padding for c = " + std::to_string(pad.c) + " fails on q");
        pads.push_back(Json{{"c", pad.c}, {"n", pad.n}, {"k", pad.k}, {"clen", len}});
    }
    g.check(verbatim_tail(r.out, p), "tail of q is not p");
    g.details = Json{{"insertions", lw::to_json(r.out.insertions)}, {"paddings", std::move(pads)}, {"codec", codec.name()}};
    return g;
}

GadgetOutcome run_phi(const lw::OpenNatSet& i, const std::vector<std::size_t>& members, const lw::BitStream& p,
                      const Config& c) {
    GadgetOutcome g;
    lw::PhiReductionOptions opts;
    opts.layer_bound = c.layer_bound.value_or(0);
    opts.policy = lw::ModulusPolicy{c.modulus_offset};
    opts.prec = precision_of(c);
    const auto r = lw::phi_reduction_transducer(i, p, opts);
    g.trace = lw::to_json(r.out.trace);
    Json certs = Json::array();
    for (std::size_t k = 0; k < r.certificates.size(); ++k) {
        const auto& cert = r.certificates[k];
        const std::size_t target = r.out.insertions[k].value;
        const lw::Interval again = lw::phi_dyadic(r.out.q, cert.t, cert.stage, opts.prec);
        g.check(again.lo() > lw::Dyadic(static_cast<long>(target)), "certificate " + std::to_string(k) + " fails on q");
        certs.push_back(Json{{"target", target}, {"t", cert.t.to_string()}, {"stage", cert.stage},
                             {"enclosure", lw::to_json(again)}});
    }
    const std::size_t top = members.empty() ? 0 : *std::max_element(members.begin(), members.end());
    g.check(r.readout >= top, "readout below max I");
    g.check(verbatim_tail(r.out, p), "tail of q is not p");
    g.details = Json{{"insertions", lw::to_json(r.out.insertions)}, {"certificates", std::move(certs)},
                     {"max", lw::to_json(r.max_enclosure)}, {"readout", r.readout}};
    return g;
}

GadgetOutcome run_lil(const lw::OpenNatSet& i, const lw::BitStream& p) {
    GadgetOutcome g;
    const auto r = lw::lil_transducer(i, p);
    g.trace = lw::to_json(r.out.trace);
    Json gadgets = Json::array();
    for (std::size_t k = 0; k < r.gadgets.size(); ++k) {
        const auto& [big_n, gad] = r.gadgets[k];
        const auto walk = lw::WalkPrefix::of(r.out.q.prefix(gad.n));
        const auto v = lw::lil_verify(walk, std::max<std::size_t>(3, big_n + 1), gad.n);
        g.check(!v.holds && v.index > big_n, "no certified violation past " + std::to_string(big_n));
        gadgets.push_back(Json{{"N", big_n}, {"l", gad.l}, {"violation_at", v.index}, {"escalations", gad.escalations}});
    }
    g.check(verbatim_tail(r.out, p), "tail of q is not p");
    g.details = Json{{"insertions", lw::to_json(r.out.insertions)}, {"gadgets", std::move(gadgets)}};
    return g;
}

GadgetOutcome run_birkhoff(const lw::OpenNatSet& i, const lw::BitStream& p, const Config& c) {
    GadgetOutcome g;
    const auto r = lw::birkhoff_transducer(i, p, c.k);
    g.trace = lw::to_json(r.out.trace);
    Json gadgets = Json::array();
    for (const auto& [big_n, gad] : r.gadgets) {
        const lw::Word w = r.out.q.prefix(gad.index + 2);
        const auto v = lw::birkhoff_verify(w, c.k, gad.index, gad.index);
        g.check(!v.holds && gad.index + 1 >= big_n, "no deviation at index " + std::to_string(gad.index));
        gadgets.push_back(Json{{"N", big_n}, {"l", gad.l}, {"deviation_at", gad.index},
                               {"average", rational_string(lw::birkhoff_average(w, gad.index))}});
    }
    g.check(verbatim_tail(r.out, p), "tail of q is not p");
    g.details = Json{{"insertions", lw::to_json(r.out.insertions)}, {"gadgets", std::move(gadgets)}, {"k", c.k}};
    return g;
}

GadgetOutcome run_harmonic(const lw::EventStream& ev, const lw::BitStream& p, const Config& c) {
    GadgetOutcome g;
    // a_N = max of the values enumerated by step N
    lw::RationalSequence a;
    std::size_t best = 0;
    for (const auto& e : ev) {
        if (e) best = std::max(best, *e);
        a.values.emplace_back(static_cast<unsigned long>(best));
    }
    if (a.values.empty()) a.values.emplace_back(0);
    const lw::SignConvention conv = convention_of(c.convention);
    const auto run = lw::harmonic_gadget(p, a, {c.length, std::size_t{1} << 22, conv});
    g.trace = lw::to_json(run.trace);
    const int negative_bit = conv == lw::SignConvention::PowerOfBit ? 1 : 0;
    for (const std::size_t j : run.flips) {
        g.check(p.bit(j) == negative_bit && run.q.bit(j) == 1 - negative_bit, "flip at " + std::to_string(j));
    }
    for (const auto& t : run.triggers) g.check(t.boost > 1, "trigger at " + std::to_string(t.at) + " raises by <= 1");
    const bool settled = run.flips.empty() || run.flips.back() <= c.length;
    g.check(!settled || run.final_partial >= a.at(c.length), "partial below sup a at the horizon");
    g.details = harmonic_run_json(run);
    g.details["settled"] = settled;
    return g;
}

GadgetOutcome run_hitting_open(const lw::OpenNatSet& i, const std::vector<std::size_t>& members, const lw::BitStream& p) {
    GadgetOutcome g;
    const auto r = lw::min_via_hitting(i, p);
    const auto& e = r.encoding;
    g.trace = Json{{"events", Json::array({Json{{"phase", "encode"}, {"consumed", 0}, {"emitted", e.head.str()},
                                                {"note", "b = " + std::to_string(r.bound)}},
                                           Json{{"phase", "hit"}, {"consumed", 0}, {"emitted", std::to_string(r.hit)},
                                                {"note", "decoded " + std::to_string(r.value)}}})},
                   {"mind_changes", 0}};
    const std::size_t want = *std::min_element(members.begin(), members.end());
    g.check(r.value == want, "decoded " + std::to_string(r.value) + ", min is " + std::to_string(want));
    g.details = Json{{"bound", r.bound}, {"hit", r.hit}, {"value", r.value}, {"digits", e.digits},
                     {"block_len", e.block_len}};
    std::size_t tail = 64;
    while (tail > 0 && !p.available(tail)) --tail;
    g.exported = lw::gadget_export(e.q, e.head.size() + tail, e.v);
    return g;
}

GadgetOutcome run_hitting_closed(const lw::EventStream& ev, const std::vector<std::size_t>& members,
                                 const lw::BitStream& p, const Config& c) {
    GadgetOutcome g;
    const auto a = lw::avoid_set_gadget(p, ev);
    for (const auto& [v, w] : a.witnesses) {
        const auto s = lw::hit_closed_mindchange(lw::shift(p, v), a.a, std::max<std::size_t>(c.fuel, 1));
        g.check(s.events.size() >= 2, "T^" + std::to_string(v) + " p not excluded");
    }
    g.check(a.lower_bound > lw::Dyadic(0), "lambda(A) lower bound not positive");
    const auto stream = lw::hit_closed_mindchange(p, a.a, std::max<std::size_t>(c.fuel, 1));
    // T^v p avoids A for every v in I, so the hitting time is no member of I
    g.check(std::find(members.begin(), members.end(), stream.final_claim()) == members.end(), "hitting time lies in I");
    g.trace = Json{{"events", lw::to_json(stream)}, {"mind_changes", stream.events.size() - 1}};
    g.details = avoid_json(a);
    g.details["hitting_time"] = stream.final_claim();
    g.details["stabilized"] = stream.exhausted_complement;
    std::size_t bits = 64;
    for (const std::size_t v : a.values) bits = std::max(bits, 2 * v + 1);
    g.exported = lw::gadget_export(p, bits, a.a.complement);
    return g;
}

Artifact gadget_run(const Config& c) {
    if (c.which.empty()) lw::fail(lw::ErrorCode::ParseError, "--which is required");
    require_format(c.format.empty() ? "json" : c.format, {"json"}, "gadget-run");
    Source src = make_source(c);
    const auto members = parse_naturals(c.bound_set);
    const lw::EventStream ev = spaced_events(members, c.gap);
    const lw::OpenNatSet i{ev};
    GadgetOutcome g;
    if (c.which == "lay") g = run_lay(i, members, src.p, c);
    else if (c.which == "kol") g = run_kol(i, src.p);
    else if (c.which == "phi") g = run_phi(i, members, src.p, c);
    else if (c.which == "lil") g = run_lil(i, src.p);
    else if (c.which == "birkhoff") g = run_birkhoff(i, src.p, c);
    else if (c.which == "harmonic") g = run_harmonic(ev, src.p, c);
    else if (c.which == "hitting-open") g = run_hitting_open(i, members, src.p);
    else if (c.which == "hitting-closed") g = run_hitting_closed(ev, members, src.p, c);
    else lw::fail(lw::ErrorCode::InvalidArgument, "unknown gadget " + c.which);

    const bool pass = g.failures.empty();
    Json verdict{{"verification", pass ? "PASS" : "FAIL"}, {"failures", g.failures}, {"details", std::move(g.details)}};
    if (g.exported) verdict["export"] = std::move(*g.exported);
    Json params{{"which", c.which}, {"bound_set", c.bound_set}, {"gap", c.gap}};
    if (c.which == "birkhoff") params["k"] = c.k;
    if (c.which == "harmonic") {
        params["length"] = c.length;
        params["convention"] = c.convention;
    }
    if (c.which == "phi") params["precision"] = c.precision;
    Json events = g.trace.contains("events") ? g.trace["events"] : Json::array();
    Json out = finish("gadget-run", src, std::move(params), std::move(events), std::move(verdict));
    out["mind_changes"] = g.trace.value("mind_changes", 0);
    return {dump(out), pass};
}

Artifact test_audit(const Config& c) {
    const std::string format = c.format.empty() ? "json" : c.format;
    require_format(format, {"csv", "json"}, "test-audit");
    const std::size_t max_len = c.max_word_length.value_or(c.depth);
    if (max_len > 20) lw::fail(lw::ErrorCode::InvalidArgument, "max word length above 20 is not materialised");
    const auto r = lw::audit_test(lw::DilutionTest(max_len), c.depth,
                                  c.strict ? lw::AuditMode::Strict : lw::AuditMode::Report);
    if (format == "csv") {
        std::string out = "level,measure,bound,pass\n";
        for (const auto& l : r.levels) {
            out += std::to_string(l.level) + "," + l.measure.to_string() + "," + l.bound.to_string() + "," +
                   (l.pass ? "1" : "0") + "\n";
        }
        return {out, r.all_pass()};
    }
    Json j{{"test", "DilutionTest"}, {"depth", c.depth}, {"max_word_length", max_len}};
    j["audit"] = lw::to_json(r);
    return {dump(j), r.all_pass()};
}

Artifact oracle_suite(const Config& c) {
    const std::string format = c.format.empty() ? "table" : c.format;
    require_format(format, {"table", "csv", "json"}, "oracle-suite");
    std::vector<oracle::ExampleResult> results;
    for (const auto& ex : oracle::derived_examples()) {
        if (!c.module.empty() && ex.module != c.module) continue;
        results.push_back(oracle::run_example(ex));
    }
    if (results.empty()) lw::fail(lw::ErrorCode::InvalidArgument, "no examples for module " + c.module);
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    if (format == "json") {
        Json arr = Json::array();
        for (const auto& r : results) {
            arr.push_back(Json{{"module", r.module}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        }
        return {dump(Json{{"results", std::move(arr)}, {"all_pass", ok}}), ok};
    }
    std::string out;
    if (format == "csv") {
        out = "module,example,result,detail\n";
        auto quote = [](const std::string& s) {
            std::string q = "\"";
            for (const char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        };
        for (const auto& r : results) {
            out += r.module + "," + quote(r.name) + "," + (r.pass ? "PASS" : "FAIL") + "," + quote(r.detail) + "\n";
        }
        return {out, ok};
    }
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.module.size() + r.name.size() + 3);
    std::size_t passed = 0;
    for (const auto& r : results) {
        std::string label = r.module + " | " + r.name;
        label.resize(width, ' ');
        out += label + " | " + (r.pass ? "PASS" : "FAIL") + (r.detail.empty() ? "" : " (" + r.detail + ")") + "\n";
        passed += r.pass ? 1 : 0;
    }
    out += std::to_string(passed) + "/" + std::to_string(results.size()) + " examples pass\n";
    return {out, ok};
}

// ----- configuration file: keys are long flag names; flags on the command line win

std::optional<std::string> config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) lw::fail(lw::ErrorCode::ParseError, "cannot open config " + path);
    try {
        Json j = Json::parse(in);
        if (!j.is_object()) lw::fail(lw::ErrorCode::ParseError, "config must be a JSON object");
        return j;
    } catch (const Json::parse_error& e) {
        lw::fail(lw::ErrorCode::ParseError, std::string("config: ") + e.what());
    }
}

std::string scalar_text(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : ",") + scalar_text(e, key);
        return out;
    }
    lw::fail(lw::ErrorCode::ParseError, "config key " + key + " needs a string, integer, boolean or list");
}

/// Fills options the command line left unset. A bit source on the command line replaces the
/// file's source as a whole.
void apply_config(const Json& file, CLI::App& app, CLI::App& sub) {
    const std::set<std::string> sources{"seed", "hex", "bits-file"};
    bool cli_source = false;
    for (const auto& s : sources) cli_source = cli_source || app.get_option("--" + s)->count() > 0;
    std::size_t file_sources = 0;
    for (const auto& [key, value] : file.items()) {
        if (key == "command") {
            if (value != sub.get_name()) lw::fail(lw::ErrorCode::InvalidArgument, "config is for " + value.dump());
            continue;
        }
        if (key == "config") lw::fail(lw::ErrorCode::ParseError, "config files do not nest");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr) opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr) lw::fail(lw::ErrorCode::InvalidArgument, "config key " + key + " does not apply to " + sub.get_name());
        if (sources.count(key)) {
            ++file_sources;
            if (cli_source) continue;
        }
        if (opt->count() > 0) continue;
        opt->add_result(scalar_text(value, key));
        opt->run_callback();
    }
    if (!cli_source && file_sources > 1) lw::fail(lw::ErrorCode::InvalidArgument, "config names more than one bit source");
}

}  // namespace

int main(int argc, char** argv) {
    Config c;
    CLI::App app{"Layerwise computability experiments: Brownian paths, limit laws, hitting times, "
                 "prefix gadgets, randomness-test audits and oracle checks."};
    app.require_subcommand(1);
    app.fallthrough();

    auto* seed = app.add_option("--seed", c.seed, "PRNG seed for the input bits (ChaCha20 keystream)");
    auto* hex = app.add_option("--hex", c.hex, "input bits as hex digits, 4 bits each, big-endian");
    auto* file = app.add_option("--bits-file", c.bits_file, "input bits from the bytes of a file, big-endian");
    seed->excludes(hex, file);
    hex->excludes(file);
    app.add_option("--fuel", c.fuel, "search budget for enumerations and scans")->capture_default_str();
    app.add_option("--precision", c.precision, "target enclosure width 2^-E")->capture_default_str();
    app.add_option("--out", c.out, "write the artifact here instead of stdout");
    app.add_option("--format", c.format, "csv, json or svg (table for oracle-suite)");
    app.add_option("--config", c.config, "JSON file of flag values; command-line flags win");

    auto* bp = app.add_subcommand("brownian-path", "enclosures of Phi(p) on the grid m/2^j");
    bp->add_option("--grid", c.grid, "grid level j")->capture_default_str();
    bp->add_option("--stage", c.stage, "allocation stage k")->capture_default_str();
    bp->add_option("--layer-bound", c.layer_bound, "layer bound d; certifies the modulus tube");
    bp->add_option("--modulus-offset", c.modulus_offset, "threshold h0(d) = 2^-(d + offset)")->capture_default_str();

    auto* lil = app.add_subcommand("lil-run", "iterated-logarithm margin check of the walk of p");
    lil->add_option("--length", c.length, "bits read (horizon)")->capture_default_str();
    lil->add_option("--start", c.start, "first index checked")->capture_default_str();

    auto* bk = app.add_subcommand("birkhoff-run", "running averages of p against 1/2 +- 2^-k");
    bk->add_option("--length", c.length, "bits read")->capture_default_str();
    bk->add_option("--start", c.start, "first index checked")->capture_default_str();
    bk->add_option("--k", c.k, "tolerance exponent")->capture_default_str();

    auto* hm = app.add_subcommand("harmonic-run", "exact partial sums of the random harmonic series");
    hm->add_option("--length", c.length, "partial sum index N (gadget horizon)")->capture_default_str();
    hm->add_option("--convention", c.convention, "bit: (-1)^p(n); complement: (-1)^(1-p(n))")->capture_default_str();
    hm->add_option("--sequence", c.sequence, "increasing rationals a_0,a_1,...; runs the flipping gadget");

    auto* hd = app.add_subcommand("hitting-demo", "hitting times in open, closed and clopen sets, with gadgets");
    hd->add_option("--words", c.words, "open set U as comma-separated words")->capture_default_str();
    hd->add_option("--closed-words", c.closed_words, "complement of the closed set (default: --words)");
    hd->add_option("--block-bound", c.block_bound, "b for the block encoding")->capture_default_str();
    hd->add_option("--members", c.members, "member set for the block encoding")->capture_default_str();
    hd->add_option("--avoid", c.avoid, "values enumerated into the avoid-set gadget")->capture_default_str();

    auto* gr = app.add_subcommand("gadget-run", "a prefix-extension transducer with trace and re-verification");
    // required, but checked after a config file has filled it in
    gr->add_option("--which", c.which, "gadget (required)")
        ->check(CLI::IsMember({"lay", "kol", "phi", "lil", "birkhoff", "harmonic", "hitting-open", "hitting-closed"}));
    gr->add_option("--bound-set", c.bound_set, "enumerated set I, in enumeration order")->capture_default_str();
    gr->add_option("--gap", c.gap, "blanks before each member and at the end")->capture_default_str();
    gr->add_option("--k", c.k, "birkhoff tolerance exponent")->capture_default_str();
    gr->add_option("--length", c.length, "harmonic horizon")->capture_default_str();
    gr->add_option("--convention", c.convention, "harmonic sign convention")->capture_default_str();
    gr->add_option("--layer-bound", c.layer_bound, "phi: layer bound fixing the readout grid");
    gr->add_option("--modulus-offset", c.modulus_offset, "phi: modulus threshold offset")->capture_default_str();

    auto* ta = app.add_subcommand("test-audit", "exact level measures of the dilution test");
    ta->add_option("--depth", c.depth, "levels 0..depth")->capture_default_str();
    ta->add_option("--max-word-length", c.max_word_length, "truncate base words (default: depth)");
    ta->add_flag("--strict", c.strict, "raise MeasureBoundViolated on a failing level");

    auto* os = app.add_subcommand("oracle-suite", "every worked example against its independent oracle");
    os->add_option("--module", c.module, "run one module's examples only");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        const auto cfg_file = config_path(args);
        std::optional<Json> cfg;
        if (cfg_file) {
            cfg = load_config(*cfg_file);
            const bool has_sub = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
                return app.get_subcommand_no_throw(a) != nullptr;
            });
            if (!has_sub && cfg->contains("command")) args.insert(args.begin(), (*cfg)["command"].get<std::string>());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
        CLI::App* sub = app.get_subcommands().front();
        if (cfg) apply_config(*cfg, app, *sub);

        Artifact a;
        const std::string name = sub->get_name();
        if (name == "brownian-path") a = brownian_path(c);
        else if (name == "lil-run") a = lil_run(c);
        else if (name == "birkhoff-run") a = birkhoff_run(c);
        else if (name == "harmonic-run") a = harmonic_run(c);
        else if (name == "hitting-demo") a = hitting_demo(c);
        else if (name == "gadget-run") a = gadget_run(c);
        else if (name == "test-audit") a = test_audit(c);
        else a = oracle_suite(c);

        if (c.out.empty()) {
            std::cout << a.text;
        } else {
            std::ofstream out(c.out, std::ios::binary);
            if (!out) lw::fail(lw::ErrorCode::InvalidArgument, "cannot write " + c.out);
            out << a.text;
        }
        return a.ok ? 0 : 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << lw::error_json(lw::ErrorCode::ParseError, e.what()).dump() << "\n";
        return 2;
    } catch (const lw::Error& e) {
        std::cerr << lw::error_json(e).dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << lw::error_json(lw::ErrorCode::InvalidArgument, e.what()).dump() << "\n";
        return 2;
    }
}
