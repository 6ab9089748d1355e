#pragma once
// hitting.hpp - hitting times of the shift orbit T^n p in open, closed and clopen sets, the
// block encoding that turns min over an open set of naturals into a hitting time, and the
// avoid-set gadget for the closed case.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cantor.hpp"
#include "choice.hpp"

namespace layerwise {

namespace detail {

/// w prefixes T^offset p; false when p ends first.
inline bool matches_at(const BitStream& p, std::size_t offset, const Word& w) {
    if (!p.available(offset + w.size())) return false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (p.bit(offset + i) != w[i]) return false;
    }
    return true;
}

}  // namespace detail

struct Hit {
    std::size_t n = 0;
    Word witness;  // prefixes T^n p and lies in the union

    friend bool operator==(const Hit&, const Hit&) = default;
};

/// min { n : T^n p in U }, minimal among the pairs (shift < fuel, word < fuel) examined.
/// Exact for a finite U (all words, shifts < fuel); for an enumerated U no finite search can
/// rule out a later word hitting an earlier shift. nullopt = unknown.
inline std::optional<Hit> hit_open(const BitStream& p, const CylinderUnion& u, std::size_t fuel) {
    std::vector<Word> words;
    if (u.is_finite()) {
        words = u.words();
    } else {
        for (std::size_t i = 0; i < fuel; ++i) {
            auto w = u.word(i);
            if (!w) break;
            words.push_back(std::move(*w));
        }
    }
    for (std::size_t n = 0; n < fuel; ++n) {
        for (const Word& w : words) {
            if (detail::matches_at(p, n, w)) return Hit{n, w};
        }
        if (!p.available(n + 1)) break;
    }
    return std::nullopt;
}

// ----- open case: block encoding

struct BlockEncoding {
    std::size_t b = 0;
    std::size_t digits = 0;     // D = max(1, ceil(log2(b + 1)))
    std::size_t block_len = 0;  // 2 + 2D
    std::set<std::size_t> members;
    Word head;                  // w_0 w_1 ... w_b
    BitStream q = BitStream::finite(Word());
    CylinderUnion v;

    [[nodiscard]] std::size_t decode(std::size_t j) const { return j / block_len; }
};

/// w_i = 11 0 d_1 0 d_2 ... 0 d_D with d the D-digit binary code of i, most significant first.
/// Every other payload bit is 0, so "11" starts a window only at a block boundary.
inline Word block_word(std::size_t i, std::size_t digits) {
    Word w("11");
    for (std::size_t k = digits; k-- > 0;) {
        w.push_back(0);
        w.push_back(static_cast<int>((i >> k) & 1U));
    }
    return w;
}

inline std::size_t block_digits(std::size_t b) {
    std::size_t d = 1;
    while ((std::size_t{1} << d) < b + 1) ++d;
    return d;
}

inline BlockEncoding block_encode(std::size_t b, const std::set<std::size_t>& members, const BitStream& p) {
    if (b < 1) fail(ErrorCode::InvalidArgument, "block encoding needs b >= 1");
    if (members.empty()) fail(ErrorCode::InvalidArgument, "member set must be nonempty");
    if (*members.rbegin() > b) fail(ErrorCode::InvalidArgument, "members must lie in 0..b");
    BlockEncoding e;
    e.b = b;
    e.digits = block_digits(b);
    e.block_len = 2 + 2 * e.digits;
    e.members = members;
    std::vector<Word> cyl;
    for (std::size_t i = 0; i <= b; ++i) {
        const Word w = block_word(i, e.digits);
        e.head += w;
        if (members.count(i)) cyl.push_back(w);
    }
    e.q = BitStream::concat(e.head, p);
    e.v = CylinderUnion(std::move(cyl));
    return e;
}

/// min U for an open U of naturals: waits for a member b, encodes {i <= b in U}, reads the hit.
struct MinViaHitting {
    std::size_t value = 0;
    std::size_t bound = 0;   // first member seen
    std::size_t hit = 0;     // shift index in q
    BlockEncoding encoding;
};

inline MinViaHitting min_via_hitting(const OpenNatSet& u, const BitStream& p) {
    const std::set<std::size_t> all = u.enumerated();
    std::optional<std::size_t> b;
    for (const auto& e : u.members) {
        if (e) {
            b = *e;
            break;
        }
    }
    if (!b) fail(ErrorCode::FuelExhausted, "no member enumerated yet");
    std::set<std::size_t> below;
    for (const std::size_t m : all) {
        if (m <= *b) below.insert(m);
    }
    MinViaHitting out{0, *b, 0, block_encode(std::max<std::size_t>(*b, 1), below, p)};
    const auto h = hit_open(out.encoding.q, out.encoding.v, out.encoding.head.size() + 1);
    if (!h) fail(ErrorCode::NeverHitWithinFuel, "encoded union not hit inside the header");
    out.hit = h->n;
    out.value = out.encoding.decode(h->n);
    return out;
}

// ----- closed case

/// A closed set named by its open complement.
struct ClosedCantorSet {
    CylinderUnion complement;
};

struct MindChangeEvent {
    std::size_t claim = 0;
    std::optional<Word> witness;  // complement word that refuted the previous claim
    std::size_t at_fuel = 0;

    friend bool operator==(const MindChangeEvent&, const MindChangeEvent&) = default;
};

struct MindChangeStream {
    std::vector<MindChangeEvent> events;
    bool exhausted_complement = false;  // finite complement fully checked: the last claim is final

    [[nodiscard]] std::size_t final_claim() const { return events.back().claim; }
};

/// Claims 0, then retracts to n + 1 whenever T^n p is found in the complement. Step s checks
/// the current claim against complement words < s; a finite complement is finished when no
/// word refutes the claim.
inline MindChangeStream hit_closed_mindchange(const BitStream& p, const ClosedCantorSet& a, std::size_t fuel) {
    MindChangeStream out;
    out.events.push_back({0, std::nullopt, 0});
    std::size_t claim = 0;
    for (std::size_t s = 1; s <= fuel; ++s) {
        bool refuted = true;
        while (refuted) {
            refuted = false;
            for (std::size_t i = 0; i < s; ++i) {
                const auto w = a.complement.word(i);
                if (!w) break;
                if (detail::matches_at(p, claim, *w)) {
                    ++claim;
                    out.events.push_back({claim, *w, s});
                    refuted = true;
                    break;
                }
            }
        }
        if (a.complement.is_finite() && s >= a.complement.words().size()) {
            out.exhausted_complement = true;
            break;
        }
    }
    return out;
}

struct AvoidSet {
    ClosedCantorSet a;
    std::set<std::size_t> values;             // deduplicated enumeration
    std::vector<std::pair<std::size_t, Word>> witnesses;  // v -> p[v, 2v+1), a prefix of T^v p
    Dyadic complement_measure;                // exact, after normalization
    Dyadic measure_bound;                     // sum 2^-(v+1)
    Dyadic lower_bound;                       // 1 - measure_bound <= lambda(A)
};

/// A = complement of the union of the cylinders p[v, 2v+1) (length v+1) over enumerated v.
inline AvoidSet avoid_set_gadget(const BitStream& p, const EventStream& q) {
    AvoidSet out;
    for (const auto& e : q) {
        if (e) out.values.insert(*e);
    }
    std::vector<Word> words;
    for (const std::size_t v : out.values) {
        Word w = p.prefix(2 * v + 1).substr(v, v + 1);
        out.measure_bound += Dyadic::pow2(-static_cast<std::int64_t>(v + 1));
        out.witnesses.emplace_back(v, w);
        words.push_back(std::move(w));
    }
    out.a.complement = CylinderUnion(std::move(words));
    out.complement_measure = measure(out.a.complement);
    out.lower_bound = Dyadic(1) - out.measure_bound;
    if (out.complement_measure > out.measure_bound) {
        fail(ErrorCode::MeasureBoundViolated, "complement measure above the geometric bound");
    }
    return out;
}

// ----- clopen case

/// min n with p[n, n+m) in C for a finite union of words of one length m; a plain scan.
inline std::size_t hit_clopen(const BitStream& p, const CylinderUnion& c, std::size_t fuel) {
    const auto& words = c.words();
    if (words.empty()) fail(ErrorCode::InvalidArgument, "clopen set must be nonempty");
    const std::size_t m = words.front().size();
    std::set<std::string> table;
    for (const Word& w : words) {
        if (w.size() != m) fail(ErrorCode::InvalidArgument, "clopen words must share one length");
        table.insert(w.str());
    }
    std::string window;  // p[n, n+m)
    for (std::size_t n = 0; n < fuel && p.available(n + m); ++n) {
        while (window.size() < m) window.push_back(p.bit(n + window.size()) ? '1' : '0');
        if (table.count(window)) return n;
        if (m > 0) window.erase(0, 1);
    }
    fail(ErrorCode::NeverHitWithinFuel, "no hit among shifts < " + std::to_string(fuel));
}

}  // namespace layerwise
