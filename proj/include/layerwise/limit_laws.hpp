#pragma once
// limit_laws.hpp - the iterated-logarithm margin, Birkhoff averages of the first bit and the
// random harmonic series, each with its prefix-extension gadget and copy/splice transducer.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cantor.hpp"
#include "choice.hpp"
#include "interval.hpp"

namespace layerwise {

// ----- law of the iterated logarithm

/// S_n = sum_{i<n} (2 bit(i) - 1) for n = 0..|bits|.
struct WalkPrefix {
    Word bits;
    std::vector<long> partial_sums;  // size |bits| + 1, partial_sums[0] = 0

    static WalkPrefix of(const Word& w) {
        WalkPrefix out{w, {0}};
        out.partial_sums.reserve(w.size() + 1);
        for (std::size_t i = 0; i < w.size(); ++i) out.partial_sums.push_back(out.partial_sums.back() + (w[i] ? 1 : -1));
        return out;
    }
    [[nodiscard]] long sum(std::size_t n) const { return partial_sums.at(n); }
};

/// Enclosure of sqrt(2 n ln ln n), natural logarithms; n >= 3 so ln ln n > 0.
inline Interval lil_margin(std::size_t n, const Precision& prec = {}) {
    if (n < 3) fail(ErrorCode::DomainTooSmall, "lil margin needs n >= 3, got " + std::to_string(n));
    const Interval nn(Dyadic(mpz_class(static_cast<unsigned long>(n)), 0));
    // 2n ln ln n < 2n^2, so n's bit length of headroom keeps the sqrt inside the target
    const auto head = static_cast<std::int64_t>(mpz_sizeinbase(nn.lo().numerator().get_mpz_t(), 2)) + 8;
    const Precision inner = prec.refined(head + 8);
    const Interval lnln = iv_log(iv_log(nn, inner.refined(8)), inner);
    return iv_sqrt((nn.scaled(1) * lnln).rounded(inner.target_width_exponent + head), prec);
}

/// Outcome of a horizon check: holds on the whole range, or the least offending index.
struct HorizonVerdict {
    bool holds = true;
    std::size_t index = 0;  // horizon when holds, else the least offending n
    std::int64_t max_bits = 0;  // finest margin precision needed (LIL only)

    friend bool operator==(const HorizonVerdict&, const HorizonVerdict&) = default;
};

namespace detail {

/// -1: |S| < margin(n), +1: |S| > margin(n); refines until the integer leaves the enclosure.
inline int lil_compare(long s, std::size_t n, const Precision& prec, std::int64_t& bits_used) {
    const Dyadic a(std::labs(s));
    for (Precision p = prec; p.target_width_exponent <= 256; p = p.refined(std::max<std::int64_t>(16, p.target_width_exponent))) {
        const Interval m = lil_margin(n, p);
        bits_used = std::max(bits_used, p.target_width_exponent);
        if (a < m.lo()) return -1;
        if (a > m.hi()) return 1;
    }
    fail(ErrorCode::PersistentStraddle, "|S_" + std::to_string(n) + "| = " + std::to_string(std::labs(s)) +
                                            " still inside the margin enclosure at 256 bits");
}

}  // namespace detail

/// Checks |S_n| < sqrt(2 n ln ln n) for N <= n <= horizon; violations are certified strict.
inline HorizonVerdict lil_verify(const WalkPrefix& w, std::size_t first, std::size_t horizon,
                                 const Precision& prec = Precision{8, 4096}) {
    if (first < 3) fail(ErrorCode::DomainTooSmall, "lil_verify needs N >= 3");
    if (horizon > w.bits.size()) fail(ErrorCode::PrefixTooShort, "horizon beyond the walk prefix");
    HorizonVerdict v{true, horizon, 0};
    for (std::size_t n = first; n <= horizon; ++n) {
        if (detail::lil_compare(w.sum(n), n, prec, v.max_bits) > 0) {
            v.holds = false;
            v.index = n;
            return v;
        }
    }
    return v;
}

struct LilGadget {
    Word v;
    std::size_t l = 0;
    std::size_t n = 0;  // |uv|, the certified violation index
    std::size_t escalations = 0;
};

/// v = 1^(k+l), l = max{20, 2k, N-k+1} raised until |S_|uv|| > margin(|uv|) is certified.
inline LilGadget lil_gadget(const Word& u, std::size_t big_n, const Precision& prec = Precision{8, 4096}) {
    const std::size_t k = u.size();
    std::size_t l = std::max<std::size_t>({20, 2 * k, big_n + 1 > k ? big_n + 1 - k : 0});
    const long su = WalkPrefix::of(u).sum(k);
    LilGadget g;
    for (;; ++l, ++g.escalations) {
        const std::size_t n = 2 * k + l;
        const long s = su + static_cast<long>(k + l);
        std::int64_t bits = 0;
        if (n > big_n && detail::lil_compare(s, n, prec, bits) > 0) {
            g.v = Word::ones(k + l);
            g.l = l;
            g.n = n;
            return g;
        }
    }
}

struct LilRun {
    SplicedStream out;
    std::vector<std::pair<std::size_t, LilGadget>> gadgets;  // (N, gadget) per insertion
};

/// Copies p; a new N splices in lil_gadget(prefix, N), so q violates the margin past N.
inline LilRun lil_transducer(const OpenNatSet& i_set, const BitStream& p) {
    LilRun run;
    run.out = splice_transducer(i_set.members, p, [&](const Word& w, std::size_t big_n) {
        LilGadget g = lil_gadget(w, big_n);
        Word v = g.v;
        run.gadgets.emplace_back(big_n, std::move(g));
        return v;
    }, "lil");
    return run;
}

/// Rows n, S_n, margin_lo, margin_hi for 3 <= n <= |w|; margins as exact "m/2^e" endpoints.
inline std::string lil_csv(const WalkPrefix& w, const Precision& prec = {}) {
    std::string out = "n,S_n,margin_lo,margin_hi\n";
    for (std::size_t n = 3; n <= w.bits.size(); ++n) {
        const Interval m = lil_margin(n, prec);
        out += std::to_string(n) + "," + std::to_string(w.sum(n)) + "," + m.lo().to_string() + "," + m.hi().to_string() + "\n";
    }
    return out;
}

// ----- Birkhoff averages of the first-bit projection

/// (1/(n+1)) sum_{i<=n} w(i), exact.
inline mpq_class birkhoff_average(const Word& w, std::size_t n) {
    if (n >= w.size()) fail(ErrorCode::PrefixTooShort, "average index " + std::to_string(n) + " needs " +
                                                           std::to_string(n + 1) + " bits");
    mpq_class avg(static_cast<unsigned long>(w.prefix(n + 1).count_ones()), static_cast<unsigned long>(n + 1));
    avg.canonicalize();
    return avg;
}

namespace detail {

/// |ones/count - 1/2| >= 2^-k, exact: |2 ones - count| 2^k >= 2 count.
inline bool deviates(std::size_t ones, std::size_t count, std::size_t k) {
    mpz_class lhs = mpz_class(static_cast<unsigned long>(2 * ones)) - static_cast<unsigned long>(count);
    lhs = abs(lhs);
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return lhs >= mpz_class(static_cast<unsigned long>(2 * count));
}

}  // namespace detail

/// deviation_at(n) for the least N <= n <= horizon with |avg(n) - 1/2| >= 2^-k.
inline HorizonVerdict birkhoff_verify(const Word& w, std::size_t k, std::size_t first, std::size_t horizon) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "birkhoff tolerance needs k >= 1");
    if (horizon >= w.size()) fail(ErrorCode::PrefixTooShort, "horizon " + std::to_string(horizon) + " needs " +
                                                                 std::to_string(horizon + 1) + " bits");
    std::size_t ones = 0;
    for (std::size_t n = 0; n <= horizon; ++n) {
        ones += static_cast<std::size_t>(w[n]);
        if (n >= first && detail::deviates(ones, n + 1, k)) return {false, n, 0};
    }
    return {true, horizon, 0};
}

struct BirkhoffGadget {
    Word v;
    std::size_t l = 0;
    std::size_t index = 0;  // |uv| - 1, where the deviation sits
};

/// v = 0^l for the least l >= 1 with |uv| >= N and a deviation >= 2^-k at |uv| - 1.
inline BirkhoffGadget birkhoff_gadget(const Word& u, std::size_t k, std::size_t big_n) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "birkhoff tolerance needs k >= 1");
    const std::size_t ones = u.count_ones();
    // at k = 1 only an average of exactly 0 deviates, and zeros never cancel a 1
    if (k == 1 && ones > 0) {
        fail(ErrorCode::UnachievableTolerance, "k = 1 needs average 0, but u contains a 1");
    }
    for (std::size_t l = 1;; ++l) {
        const std::size_t count = u.size() + l;
        if (count >= big_n && detail::deviates(ones, count, k)) return {Word::zeros(l), l, count - 1};
    }
}

struct BirkhoffRun {
    SplicedStream out;
    std::vector<std::pair<std::size_t, BirkhoffGadget>> gadgets;
};

/// Copies p; a new N splices in birkhoff_gadget(prefix, k, N).
inline BirkhoffRun birkhoff_transducer(const OpenNatSet& i_set, const BitStream& p, std::size_t k = 2) {
    if (k < 2) fail(ErrorCode::UnachievableTolerance, "the transducer needs k >= 2 to splice after arbitrary prefixes");
    BirkhoffRun run;
    run.out = splice_transducer(i_set.members, p, [&](const Word& w, std::size_t big_n) {
        BirkhoffGadget g = birkhoff_gadget(w, k, big_n);
        Word v = g.v;
        run.gadgets.emplace_back(big_n, std::move(g));
        return v;
    }, "birkhoff");
    return run;
}

// ----- random harmonic series

/// Which bit value makes the term 1/n negative.
enum class SignConvention {
    PowerOfBit,         // (-1)^p(n): bit 1 is negative
    PowerOfComplement,  // (-1)^(1-p(n)): bit 0 is negative
};

inline std::string to_string(SignConvention c) {
    return c == SignConvention::PowerOfBit ? "(-1)^p(n)" : "(-1)^(1-p(n))";
}

inline int harmonic_sign(int bit, SignConvention c) {
    const bool negative = c == SignConvention::PowerOfBit ? bit == 1 : bit == 0;
    return negative ? -1 : 1;
}

struct HarmonicPartial {
    std::size_t upto = 0;
    mpq_class sum;
};

namespace detail {

/// sum_{lo <= n < hi} sign(n)/n by binary splitting, returned as (numerator, denominator).
inline std::pair<mpz_class, mpz_class> harmonic_split(const BitStream& p, std::size_t lo, std::size_t hi,
                                                      SignConvention c) {
    if (hi - lo == 1) return {mpz_class(harmonic_sign(p.bit(lo), c)), mpz_class(static_cast<unsigned long>(lo))};
    const std::size_t mid = lo + (hi - lo) / 2;
    auto [a, b] = harmonic_split(p, lo, mid, c);
    auto [x, y] = harmonic_split(p, mid, hi, c);
    return {a * y + x * b, b * y};
}

}  // namespace detail

/// sum_{n=1}^{N} sign(p(n))/n exactly; bit 0 of p carries no term.
inline HarmonicPartial harmonic_partial(const BitStream& p, std::size_t big_n,
                                        SignConvention c = SignConvention::PowerOfBit) {
    if (big_n < 1) fail(ErrorCode::InvalidArgument, "harmonic partial needs N >= 1");
    auto [num, den] = detail::harmonic_split(p, 1, big_n + 1, c);
    HarmonicPartial out{big_n, mpq_class(num, den)};
    out.sum.canonicalize();
    return out;
}

/// An increasing sequence with finite range; a_N = values.back() for N past the listed prefix.
struct RationalSequence {
    std::vector<mpq_class> values;

    [[nodiscard]] const mpq_class& at(std::size_t n) const { return values[std::min(n, values.size() - 1)]; }
};

struct HarmonicTrigger {
    std::size_t at = 0;           // N where the partial fell below a_N
    mpq_class partial;            // sum_{n<=N} for q
    mpq_class target;             // a_N + 1
    std::vector<std::size_t> js;  // flipped positions, increasing, all > N
    mpq_class boost;              // 2 sum 1/j: the increase of the limit
};

struct HarmonicRun {
    BitStream q = BitStream::finite(Word());
    Word prefix;                  // q(0..horizon]
    SignConvention convention = SignConvention::PowerOfBit;
    std::vector<HarmonicTrigger> triggers;
    std::vector<std::size_t> flips;  // Hamming support of p vs q
    mpq_class final_partial;         // sum_{n<=horizon} for q
    TransducerTrace trace;
};

struct HarmonicOptions {
    std::size_t horizon = 2000;            // positions N checked
    std::size_t max_position = 1u << 22;   // search limit for a batch
    SignConvention convention = SignConvention::PowerOfBit;
};

/// Flips finitely many negative terms of p to positive ones so the limit clears sup a.
/// At each N (outside a pending batch) with partial < a_N, picks the next negative positions
/// j > N until partial + 2 sum 1/j > a_N + 1; q copies p elsewhere.
inline HarmonicRun harmonic_gadget(const BitStream& p, const RationalSequence& a, const HarmonicOptions& opts = {}) {
    if (a.values.empty()) fail(ErrorCode::InvalidArgument, "empty sequence a");
    for (std::size_t i = 1; i < a.values.size(); ++i) {
        if (a.values[i] < a.values[i - 1]) fail(ErrorCode::InvalidArgument, "sequence a must be increasing");
    }
    HarmonicRun run;
    run.convention = opts.convention;
    const int negative_bit = harmonic_sign(1, opts.convention) < 0 ? 1 : 0;
    std::set<std::size_t> pending;  // chosen flips not yet written
    std::size_t batch_end = 0;
    mpq_class partial = 0;
    run.prefix.push_back(p.bit(0));
    for (std::size_t n = 1; n <= opts.horizon; ++n) {
        const int bit = pending.erase(n) ? 1 - negative_bit : p.bit(n);
        run.prefix.push_back(bit);
        partial += mpq_class(harmonic_sign(bit, opts.convention), static_cast<unsigned long>(n));
        if (n < batch_end || partial >= a.at(n)) continue;
        HarmonicTrigger t{n, partial, a.at(n) + 1, {}, 0};
        for (std::size_t j = n + 1; partial + t.boost <= t.target; ++j) {
            if (j > opts.max_position) fail(ErrorCode::FuelExhausted, "no flip batch below position " + std::to_string(j));
            if (p.bit(j) != negative_bit) continue;
            t.js.push_back(j);
            t.boost += mpq_class(2, static_cast<unsigned long>(j));
        }
        t.boost.canonicalize();
        batch_end = t.js.back();
        pending.insert(t.js.begin(), t.js.end());
        run.flips.insert(run.flips.end(), t.js.begin(), t.js.end());
        run.trace.add("flip", n, std::to_string(t.js.size()) + " positions in (" + std::to_string(n) + ", " +
                                     std::to_string(batch_end) + "]",
                      "partial " + t.partial.get_str() + " < a_N " + a.at(n).get_str());
        ++run.trace.mind_changes;
        run.triggers.push_back(std::move(t));
    }
    // flips chosen past the horizon belong to the last batch; write them out
    Word tail;
    for (std::size_t n = opts.horizon + 1; n <= batch_end; ++n) tail.push_back(pending.count(n) ? 1 - negative_bit : p.bit(n));
    run.final_partial = partial;
    run.trace.add("tail", opts.horizon, "p[" + std::to_string(run.prefix.size() + tail.size()) + "..)");
    run.q = BitStream::concat(run.prefix + tail, shift(p, run.prefix.size() + tail.size()));
    return run;
}

enum class SumAprAnswer { Zero, One, Unknown };

inline std::string to_string(SumAprAnswer a) {
    switch (a) {
        case SumAprAnswer::Zero: return "0";
        case SumAprAnswer::One: return "1";
        case SumAprAnswer::Unknown: return "unknown";
    }
    return "unknown";
}

/// 0 when sum < q + 2^-k, 1 when sum > q, certified from partial(horizon) + tail_bound.
inline SumAprAnswer sum_apr(const BitStream& p, const mpq_class& q, std::size_t k, std::size_t horizon,
                            const std::optional<Interval>& tail_bound,
                            SignConvention c = SignConvention::PowerOfBit) {
    if (horizon < 1) fail(ErrorCode::InvalidArgument, "sum_apr needs horizon >= 1");
    if (!tail_bound) return SumAprAnswer::Unknown;
    const mpq_class s = harmonic_partial(p, horizon, c).sum;
    const mpq_class lo = s + tail_bound->lo().to_rational();
    const mpq_class hi = s + tail_bound->hi().to_rational();
    if (lo > q) return SumAprAnswer::One;
    if (hi < q + Dyadic::pow2(-static_cast<std::int64_t>(k)).to_rational()) return SumAprAnswer::Zero;
    return SumAprAnswer::Unknown;
}

/// |remainder| <= 1/(N+1) for a series whose signs alternate from N+1 on; outward at `bits`.
inline Interval alternating_remainder(std::size_t big_n, std::int64_t bits = 64) {
    const Dyadic r = Dyadic::ceil_of(mpq_class(1, static_cast<unsigned long>(big_n + 1)), bits);
    return {-r, r};
}

}  // namespace layerwise
