#pragma once
// choice.hpp - stream transducers for the closed-choice representatives and the
// prefix-extension reductions (copy the random input, splice in a finite gadget word
// whenever a new number is enumerated, resume copying).

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cantor.hpp"
#include "codec.hpp"
#include "ml_tests.hpp"

namespace layerwise {

/// Finite prefix of a stream of naturals-or-blanks (nullopt = blank).
using EventStream = std::vector<std::optional<std::size_t>>;

/// Decodes a raw name p(i) in {0 = blank, n + 1 = the value n}.
inline EventStream decode_raw(const std::vector<std::size_t>& raw) {
    EventStream out;
    out.reserve(raw.size());
    for (const std::size_t v : raw) out.push_back(v == 0 ? std::nullopt : std::optional<std::size_t>(v - 1));
    return out;
}

/// A closed subset of N named by its exclusions: value n in the stream means n is not in A.
struct ClosedNatSet {
    EventStream exclusions;

    [[nodiscard]] std::set<std::size_t> excluded(std::size_t steps) const {
        std::set<std::size_t> out;
        for (std::size_t i = 0; i < steps && i < exclusions.size(); ++i) {
            if (exclusions[i]) out.insert(*exclusions[i]);
        }
        return out;
    }
};

/// An open subset of N named by an enumeration of its members.
struct OpenNatSet {
    EventStream members;

    [[nodiscard]] std::set<std::size_t> enumerated(std::size_t steps) const {
        std::set<std::size_t> out;
        for (std::size_t i = 0; i < steps && i < members.size(); ++i) {
            if (members[i]) out.insert(*members[i]);
        }
        return out;
    }
    [[nodiscard]] std::set<std::size_t> enumerated() const { return enumerated(members.size()); }
};

struct TraceEvent {
    std::string phase;
    std::size_t consumed = 0;  // input events consumed so far
    std::string emitted;       // output produced at this step
    std::string note;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct TransducerTrace {
    std::vector<TraceEvent> events;
    std::size_t mind_changes = 0;

    void add(std::string phase, std::size_t consumed, std::string emitted, std::string note = {}) {
        events.push_back({std::move(phase), consumed, std::move(emitted), std::move(note)});
    }
    friend bool operator==(const TransducerTrace&, const TransducerTrace&) = default;
};

/// Compact rendering of a word for traces: runs of one symbol as b^k.
inline std::string describe_word(const Word& w) {
    if (w.empty()) return "eps";
    if (w.size() > 1 && (w.count_ones() == 0 || w.count_ones() == w.size())) {
        return std::string(1, w[0] ? '1' : '0') + "^" + std::to_string(w.size());
    }
    return w.size() <= 32 ? w.str() : w.prefix(24).str() + "...(" + std::to_string(w.size()) + " bits)";
}

// ----- closed choice representatives

struct OpenOutput {
    OpenNatSet set;
    TransducerTrace trace;
};

/// U_{<=A} = { n : n <= every m in A }: n is emitted once every m < n has been excluded.
inline OpenOutput u_leq_a(const ClosedNatSet& a) {
    OpenOutput out;
    std::set<std::size_t> excluded;
    std::size_t next = 0;  // least value not yet emitted
    auto emit_ready = [&](std::size_t consumed) {
        // n is ready when all of 0..n-1 are excluded
        while (next == 0 || excluded.count(next - 1)) {
            out.set.members.emplace_back(next);
            out.trace.add("emit", consumed, std::to_string(next));
            ++next;
        }
    };
    emit_ready(0);
    for (std::size_t i = 0; i < a.exclusions.size(); ++i) {
        if (a.exclusions[i]) excluded.insert(*a.exclusions[i]);
        const std::size_t before = out.set.members.size();
        emit_ready(i + 1);
        if (out.set.members.size() == before) out.set.members.emplace_back(std::nullopt);
    }
    return out;
}

struct ArgmaxOutput {
    ClosedNatSet indices;              // exclusions of enumeration indices
    std::vector<std::size_t> values;   // the blank-free enumeration p(0), p(1), ...
    TransducerTrace trace;

    /// p(k) for the least surviving index k; nullopt before the first value arrives.
    [[nodiscard]] std::optional<std::size_t> max_value() const {
        const std::set<std::size_t> gone = indices.excluded(indices.exclusions.size());
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (!gone.count(k)) return values[k];
        }
        return std::nullopt;
    }
};

/// A = { n : p(m) <= p(n) for all m } as a closed set of enumeration indices. Blanks before
/// the first member are skipped; later blanks repeat the first member, so p is total.
inline ArgmaxOutput max_via_argmax(const OpenNatSet& u, std::size_t fuel) {
    ArgmaxOutput out;
    std::optional<std::size_t> first;
    std::size_t best = 0;
    std::set<std::size_t> excluded;
    const std::size_t steps = std::min(fuel, u.members.size());
    for (std::size_t i = 0; i < steps; ++i) {
        const auto& e = u.members[i];
        if (!first && !e) continue;
        if (!first) first = e;
        const std::size_t v = e ? *e : *first;
        const std::size_t m = out.values.size();
        out.values.push_back(v);
        if (v > best || m == 0) {
            for (std::size_t k = 0; k < m; ++k) {
                if (out.values[k] < v && excluded.insert(k).second) {
                    out.indices.exclusions.emplace_back(k);
                    out.trace.add("exclude", i + 1, std::to_string(k), "value " + std::to_string(out.values[k]));
                }
            }
            best = v;
        } else if (v < best) {
            excluded.insert(m);
            out.indices.exclusions.emplace_back(m);
            out.trace.add("exclude", i + 1, std::to_string(m), "value " + std::to_string(v));
        }
    }
    return out;
}

struct UniqueChoice {
    std::size_t value = 0;
    std::size_t consumed = 0;
    TransducerTrace trace;
};

/// For A = {n} and a bound b >= n: waits until all but one k <= b are excluded.
/// FuelExhausted if that never happens within the given exclusion prefix.
inline UniqueChoice ucn_via_bound(const ClosedNatSet& singleton, std::size_t bound, std::size_t fuel) {
    std::set<std::size_t> open;
    for (std::size_t k = 0; k <= bound; ++k) open.insert(k);
    UniqueChoice out;
    const std::size_t steps = std::min(fuel, singleton.exclusions.size());
    for (std::size_t i = 0; i <= steps; ++i) {
        if (open.size() == 1) {
            out.value = *open.begin();
            out.consumed = i;
            out.trace.add("answer", i, std::to_string(out.value));
            return out;
        }
        if (i < steps && singleton.exclusions[i]) {
            if (open.erase(*singleton.exclusions[i])) out.trace.add("exclude", i + 1, std::to_string(*singleton.exclusions[i]));
        }
    }
    fail(ErrorCode::FuelExhausted, std::to_string(open.size()) + " candidates left after " + std::to_string(steps) + " events");
}

// ----- prefix-extension transducers

struct Insertion {
    std::size_t value = 0;     // the enumerated number that triggered it
    std::size_t position = 0;  // output length before the block
    Word block;
};

/// q = prefix . p[tail_offset ..]; prefix holds every copied bit and every inserted block.
struct SplicedStream {
    BitStream q = BitStream::finite(Word());
    Word prefix;
    std::size_t tail_offset = 0;
    std::vector<Insertion> insertions;
    TransducerTrace trace;
};

/// Given the output written so far and a new number, the finite word to splice in.
using Gadget = std::function<Word(const Word& written, std::size_t value)>;

/// Runs the copy/splice discipline: a blank copies one bit of p; a value not seen before
/// appends gadget(prefix, value); repeated values are ignored.
inline SplicedStream splice_transducer(const EventStream& events, const BitStream& p, const Gadget& gadget,
                                       std::string_view phase) {
    SplicedStream s;
    std::set<std::size_t> seen;
    std::size_t copy_from = 0;
    auto flush_copy = [&](std::size_t consumed) {
        if (s.tail_offset > copy_from) {
            s.trace.add("copy", consumed,
                        "p[" + std::to_string(copy_from) + ".." + std::to_string(s.tail_offset) + ")");
        }
        copy_from = s.tail_offset;
    };
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!events[i]) {
            s.prefix.push_back(p.bit(s.tail_offset++));
            continue;
        }
        const std::size_t v = *events[i];
        if (!seen.insert(v).second) continue;
        flush_copy(i);
        Insertion ins{v, s.prefix.size(), gadget(s.prefix, v)};
        s.prefix += ins.block;
        s.trace.add(std::string(phase), i + 1, describe_word(ins.block),
                    "value " + std::to_string(v) + " at " + std::to_string(ins.position));
        s.insertions.push_back(std::move(ins));
    }
    flush_copy(events.size());
    s.trace.add("tail", events.size(), "p[" + std::to_string(s.tail_offset) + "..)");
    s.q = BitStream::concat(s.prefix, shift(p, s.tail_offset));
    return s;
}

/// Bound x d_MLR <= LAY against the dilution test: for a new n with output w so far,
/// splice in 0^(|w|+n+2). Since w 0^(|w|+n+2) extends w 0^(|w|+m+2) for m <= n, q lands in
/// every level m <= n.
struct BoundToLay {
    SplicedStream out;

    /// Post-processor: a verified LAY candidate for q is a valid Bound answer.
    [[nodiscard]] static std::size_t decode(const LayerVerdict& v) { return v.candidate_rd; }
};

inline BoundToLay bound_to_lay_transducer(const OpenNatSet& i_set, const BitStream& p) {
    return {splice_transducer(i_set.members, p, [](const Word& w, std::size_t n) {
        return Word::zeros(dilution_witness(w, n));
    }, "dilute")};
}

struct KolPadding {
    std::size_t c = 0;
    std::size_t n = 0;  // |w| when c arrived
    std::size_t k = 0;  // zeros written
    std::size_t clen = 0;
};

struct KolOutput {
    SplicedStream out;
    std::vector<KolPadding> paddings;
};

/// Bound x d_MLR <= Kol: for a new c with output w (|w| = n), doubles k until
/// clen(w 0^k) + c < n + k, then writes 0^k. FuelExhausted past 2^max_doublings.
template <LosslessCodec C>
KolOutput kol_padding_gadget(const OpenNatSet& i_set, const BitStream& p, const C& codec,
                             std::size_t max_doublings = 24) {
    KolOutput result;
    result.out = splice_transducer(i_set.members, p, [&](const Word& w, std::size_t c) {
        for (std::size_t d = 0; d <= max_doublings; ++d) {
            const std::size_t k = std::size_t{1} << d;
            const std::size_t len = checked_clen(codec, w + Word::zeros(k));
            if (len + c < w.size() + k) {
                result.paddings.push_back({c, w.size(), k, len});
                return Word::zeros(k);
            }
        }
        fail(ErrorCode::FuelExhausted, codec.name() + " never met clen(w0^k) + c < n + k");
    }, "pad");
    return result;
}

}  // namespace layerwise
