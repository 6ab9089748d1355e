#pragma once
// brownian.hpp - the map from bit streams to certified Brownian-path enclosures.
//
// Element indexing: 0 is alpha_0, 1 is alpha_1, 2^j + n is alpha_{j,n} (j >= 1). The point
// (2n+1)/2^L (L >= 1) is driven by element 2^(L-1) + n; alpha_1 is the L = 1 case, so stage k
// (elements of level <= k) resolves every dyadic point of level <= k + 1.
//
// Bit allocation: stage s fills a fresh segment starting at base(s) = 4(s-1) 2^s. Newly
// introduced elements first get positions 0 .. 4(s-1)-1 (position-major, element order),
// then every element gets positions 4(s-1) .. 4s-1, again position-major.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cantor.hpp"
#include "choice.hpp"
#include "normal.hpp"

namespace layerwise {

// ----- allocation

inline std::size_t pow2_size(std::size_t k) { return std::size_t{1} << k; }

/// Stage that introduces element e.
inline std::size_t introduced_stage(std::size_t e) {
    if (e < 2) return 1;
    std::size_t j = 0;
    while ((e >> (j + 1)) != 0) ++j;
    return std::max<std::size_t>(1, j);
}

/// Bits of the stream consumed through stage k: 4k 2^(k+1).
inline std::size_t stage_bits(std::size_t k) { return 4 * k * pow2_size(k + 1); }

/// Offset of the stage-s segment.
inline std::size_t stage_base(std::size_t s) { return s == 0 ? 0 : stage_bits(s - 1); }

/// Stream index holding bit `pos` of element e.
inline std::size_t alpha_source_index(std::size_t e, std::size_t pos) {
    const std::size_t s = std::max(introduced_stage(e), pos / 4 + 1);
    const std::size_t half = pow2_size(s);
    const std::size_t carried = 4 * (s - 1);  // positions a new element catches up on
    if (pos < carried) return stage_base(s) + pos * half + (e - half);
    return stage_base(s) + carried * half + (pos - carried) * 2 * half + e;
}

struct AlphaSlot {
    std::size_t element = 0;
    std::size_t position = 0;
};

/// Inverse of alpha_source_index.
inline AlphaSlot alpha_slot(std::size_t index) {
    std::size_t s = 1;
    while (index >= stage_bits(s)) ++s;
    const std::size_t half = pow2_size(s);
    const std::size_t carried = 4 * (s - 1);
    const std::size_t off = index - stage_base(s);
    if (off < carried * half) return {half + off % half, off / half};
    const std::size_t rest = off - carried * half;
    return {rest % (2 * half), carried + rest / (2 * half)};
}

/// First 4k bits of element e at stage k.
inline Word alpha_element(const BitStream& p, std::size_t e, std::size_t k) {
    if (introduced_stage(e) > k) {
        fail(ErrorCode::StageTooShallow, "element " + std::to_string(e) + " needs stage " +
                                             std::to_string(introduced_stage(e)));
    }
    Word w;
    for (std::size_t pos = 0; pos < 4 * k; ++pos) w.push_back(p.bit(alpha_source_index(e, pos)));
    return w;
}

struct AlphaDecomposition {
    std::size_t stage = 0;
    std::vector<Word> elements;  // 2^(stage+1) words of 4 * stage bits
    std::size_t consumed = 0;
};

inline AlphaDecomposition allocate_bits(const BitStream& p, std::size_t k) {
    if (k == 0) fail(ErrorCode::InvalidArgument, "allocation stage starts at 1");
    AlphaDecomposition a;
    a.stage = k;
    a.consumed = stage_bits(k);
    const Word bits = p.prefix(a.consumed);
    std::vector<std::string> raw(pow2_size(k + 1), std::string(4 * k, '0'));
    for (std::size_t i = 0; i < a.consumed; ++i) {
        const AlphaSlot slot = alpha_slot(i);
        raw[slot.element][slot.position] = bits[i] ? '1' : '0';
    }
    a.elements.reserve(raw.size());
    for (const auto& r : raw) a.elements.emplace_back(r);
    return a;
}

// ----- eta

/// g over the cylinder of `bits`: quantile of [0.bits, 0.bits + 2^-m]. All-zero and all-one
/// words touch 0 or 1, where g is unbounded.
inline Interval eta(const Word& bits, const Precision& prec) {
    if (bits.empty()) fail(ErrorCode::InvalidArgument, "eta of the empty word");
    const std::size_t ones = bits.count_ones();
    if (ones == 0 || ones == bits.size()) {
        fail(ErrorCode::QuantileDomainDegenerate, "eta of the constant word " + describe_word(bits));
    }
    const Dyadic lo = bits.as_fraction();
    return normal_quantile(Interval(lo, lo + Dyadic::pow2(-static_cast<std::int64_t>(bits.size()))), prec);
}

/// Lower bound of g over the cylinder of `bits`; needs some 1 in the word.
inline Dyadic eta_lower(const Word& bits, const Precision& prec) {
    if (bits.count_ones() == 0) fail(ErrorCode::QuantileDomainDegenerate, "eta lower bound of " + describe_word(bits));
    return detail::quantile_bound(bits.as_fraction(), false, prec);
}

// ----- dyadic points

/// Level of t = m/2^L in lowest terms (0 for t in {0, 1}).
inline std::size_t dyadic_level(const Dyadic& t) {
    if (t.sign() < 0 || t > Dyadic(1)) fail(ErrorCode::InvalidArgument, "time outside [0,1]: " + t.to_string());
    return t.exponent() > 0 ? static_cast<std::size_t>(t.exponent()) : 0;
}

/// Element driving the level-L point t (L >= 1).
inline std::size_t point_element(const Dyadic& t) {
    const std::size_t level = dyadic_level(t);
    const std::size_t n = static_cast<std::size_t>(t.scaled(static_cast<std::int64_t>(level) - 1).floor_int().get_ui());
    return pow2_size(level - 1) + n;
}

/// Elements whose tent is nonzero at t: alpha_0 and the cells containing t strictly inside.
inline std::vector<std::size_t> chain_elements(const Dyadic& t) {
    std::vector<std::size_t> out{0};
    const std::size_t level = dyadic_level(t);
    for (std::size_t l = 1; l <= level; ++l) {
        const std::size_t n =
            static_cast<std::size_t>(t.scaled(static_cast<std::int64_t>(l) - 1).floor_int().get_ui());
        out.push_back(pow2_size(l - 1) + n);
    }
    return out;
}

namespace detail {

inline std::int64_t path_bits(const Precision& prec) { return prec.target_width_exponent + 16; }

/// 2^-((L-1)/2) * eta, rounded outward.
inline Interval tent_term(const Interval& eta_value, std::size_t level, std::int64_t bits) {
    return (pow2_half(static_cast<std::int64_t>(level) - 1, bits + 8) * eta_value).rounded(bits);
}

/// (c + left + right) / 2 on the grid: the recursion step.
inline Interval recursion_step(const Interval& term, const Interval& left, const Interval& right, std::int64_t bits) {
    return (term + left + right).scaled(-1).rounded(bits);
}

}  // namespace detail

/// Enclosure of Phi(alpha)(t) from stage-k bits, by the dyadic recursion.
inline Interval phi_dyadic(const BitStream& p, const Dyadic& t, std::size_t k, const Precision& prec) {
    const std::size_t level = dyadic_level(t);
    if (k == 0 || level > k + 1) {
        fail(ErrorCode::StageTooShallow, "level " + std::to_string(level) + " point needs stage >= " +
                                             std::to_string(std::max<std::size_t>(1, level == 0 ? 1 : level - 1)));
    }
    const std::int64_t bits = detail::path_bits(prec);
    if (t.is_zero()) return Interval(0);
    const Interval eta0 = eta(alpha_element(p, 0, k), prec).rounded(bits);
    std::map<Dyadic, Interval> memo{{Dyadic(0), Interval(0)}, {Dyadic(1), eta0}};
    auto eval = [&](auto&& self, const Dyadic& x) -> Interval {
        if (auto it = memo.find(x); it != memo.end()) return it->second;
        const std::size_t l = dyadic_level(x);
        const Dyadic half_cell = Dyadic::pow2(-static_cast<std::int64_t>(l));
        const Interval term = detail::tent_term(eta(alpha_element(p, point_element(x), k), prec), l, bits);
        const Interval v = detail::recursion_step(term, self(self, x - half_cell), self(self, x + half_cell), bits);
        memo.emplace(x, v);
        return v;
    };
    return eval(eval, t);
}

/// The same value as the truncated Haar-Schauder series: eta_0 t + sum of eta_e Delta_e(t)
/// over the elements whose tent is nonzero at t.
inline Interval phi_series(const BitStream& p, const Dyadic& t, std::size_t k, const Precision& prec) {
    const std::size_t level = dyadic_level(t);
    if (k == 0 || level > k + 1) fail(ErrorCode::StageTooShallow, "series at level " + std::to_string(level));
    if (t.is_zero()) return Interval(0);
    const std::int64_t bits = detail::path_bits(prec);
    Interval sum = (eta(alpha_element(p, 0, k), prec) * Interval(t)).rounded(bits);
    const auto chain = chain_elements(t);
    for (std::size_t l = 1; l < chain.size(); ++l) {
        // Haar level j = l - 1: Delta = 2^(j/2) min(t - left, right - t) on a cell of width 2^-j
        const std::int64_t j = static_cast<std::int64_t>(l) - 1;
        const std::size_t n = chain[l] - pow2_size(l - 1);
        const Dyadic left = Dyadic(mpz_class(static_cast<unsigned long>(n)), j);
        const Dyadic dist = min(t - left, left + Dyadic::pow2(-j) - t);
        const Interval delta = (pow2_half(j, bits + 8).scaled(j) * Interval(dist)).rounded(bits + 4);
        sum += (eta(alpha_element(p, chain[l], k), prec) * delta).rounded(bits);
    }
    return sum;
}

// ----- modulus of continuity

/// Threshold below which the modulus bound is applied for layer bound d: h0(d) = 2^-(d + offset).
/// A configurable stand-in: the true threshold is asserted to exist, not given.
struct ModulusPolicy {
    std::int64_t offset = 10;

    [[nodiscard]] Dyadic threshold(std::size_t d) const { return Dyadic::pow2(-(static_cast<std::int64_t>(d) + offset)); }
    [[nodiscard]] std::size_t grid_level(std::size_t d) const { return d + static_cast<std::size_t>(offset); }
};

/// Enclosure of sqrt(3 h ln(1/h)).
inline Interval modulus_tube(const Dyadic& h, std::size_t d, const ModulusPolicy& policy = {},
                             const Precision& prec = {}) {
    if (h.sign() <= 0) fail(ErrorCode::InvalidArgument, "modulus step must be positive");
    const Dyadic h0 = policy.threshold(d);
    if (h > h0) fail(ErrorCode::HNotSmallEnough, "h = " + h.to_string() + " above threshold " + h0.to_string());
    // the tube is about sqrt(h): ask for width relative to it
    const Precision out = prec.refined(-h.log2_floor() / 2 + 4);
    const Precision inner = out.refined(-h.log2_floor() / 2 + 8);
    const Interval log_inv = -iv_log(Interval(h), inner);
    return iv_sqrt((Interval(h) * log_inv).rounded(inner.target_width_exponent + 8) * Interval(3), out);
}

// ----- paths

struct PathEnclosure {
    std::size_t grid_level = 0;
    std::vector<Interval> values;  // values[m] encloses Phi(m / 2^grid_level)
    std::optional<Interval> tube;  // modulus over one grid cell; absent when uncertified
    std::size_t stage_used = 0;
    std::optional<std::size_t> layer_bound;

    [[nodiscard]] Dyadic time(std::size_t m) const {
        return Dyadic(mpz_class(static_cast<unsigned long>(m)), static_cast<std::int64_t>(grid_level));
    }
};

/// All values on the grid m / 2^j from stage-k bits; the tube is certified only with a layer bound.
inline PathEnclosure path_enclosure(const BitStream& p, std::size_t j, std::size_t k,
                                    std::optional<std::size_t> layer_bound = std::nullopt,
                                    const Precision& prec = {}, const ModulusPolicy& policy = {}) {
    if (k == 0 || j > k + 1) {
        fail(ErrorCode::StageTooShallow, "grid level " + std::to_string(j) + " at stage " + std::to_string(k));
    }
    const std::int64_t bits = detail::path_bits(prec);
    PathEnclosure out;
    out.grid_level = j;
    out.stage_used = k;
    out.layer_bound = layer_bound;
    const std::size_t cells = pow2_size(j);
    out.values.assign(cells + 1, Interval(0));
    out.values[cells] = eta(alpha_element(p, 0, k), prec).rounded(bits);
    for (std::size_t l = 1; l <= j; ++l) {
        const std::size_t stride = pow2_size(j - l);  // grid distance to the level-l neighbours
        for (std::size_t n = 0; n < pow2_size(l - 1); ++n) {
            const std::size_t m = (2 * n + 1) * stride;
            const Interval term = detail::tent_term(eta(alpha_element(p, pow2_size(l - 1) + n, k), prec), l, bits);
            out.values[m] = detail::recursion_step(term, out.values[m - stride], out.values[m + stride], bits);
        }
    }
    if (layer_bound) out.tube = modulus_tube(Dyadic::pow2(-static_cast<std::int64_t>(j)), *layer_bound, policy, prec);
    return out;
}

/// max over [0,1]: at least every grid lower end, at most the highest grid upper end plus the tube.
inline Interval path_max(const PathEnclosure& path) {
    if (!path.tube) fail(ErrorCode::UncertifiedTube, "path_max needs a layer bound for the modulus");
    Dyadic lo = path.values.front().lo();
    Dyadic hi = path.values.front().hi();
    for (const auto& v : path.values) {
        lo = max(lo, v.lo());
        hi = max(hi, v.hi());
    }
    return {lo, hi + path.tube->hi()};
}

/// Some n >= x, namely max(0, ceil(x.hi)).
inline std::size_t greater_nat(const Interval& x) {
    if (x.hi().sign() <= 0) return 0;
    return static_cast<std::size_t>(x.hi().ceil_int().get_ui());
}

// ----- sup forcing

struct SupCertificate {
    Word w;
    Dyadic t;                // the forced point
    std::size_t stage = 0;   // stage whose bits certify it (all inside v w)
    Interval enclosure;      // two-sided enclosure of Phi(t) for every continuation of v w
    std::size_t stages_tried = 0;
};

struct ForceSupOptions {
    std::size_t max_stage = 14;
    std::size_t max_point_level = 8;
};

/// w such that every stream extending v w has an enclosure of Phi at one dyadic point with
/// lo > target. Fresh bits of the chosen point's chain elements are pinned to 1 (the last
/// fresh bit to 0, keeping the word off the degenerate end); every other fresh bit follows
/// 1010... by position.
inline SupCertificate force_sup_gadget(std::size_t target, const Word& v, const Precision& prec = {},
                                       const ForceSupOptions& opts = {}) {
    const Dyadic goal(static_cast<long>(target));
    const std::int64_t bits = detail::path_bits(prec);
    std::size_t first_stage = 1;
    while (stage_base(first_stage) < v.size()) ++first_stage;  // every element has fresh bits
    SupCertificate cert;
    for (std::size_t k = first_stage; k <= opts.max_stage; ++k) {
        ++cert.stages_tried;
        const std::size_t top = std::min(k + 1, opts.max_point_level);
        const std::size_t last = 4 * k - 1;
        auto chain_bit = [&](std::size_t e, std::size_t pos) {
            const std::size_t i = alpha_source_index(e, pos);
            if (i < v.size()) return v[i];
            return pos == last ? 0 : 1;
        };
        // lower bounds with every element pinned as a chain element; Phi(t) reads only chain(t)
        std::unordered_map<std::string, Dyadic> cache;
        auto eta_lo = [&](std::size_t e) {
            Word w;
            for (std::size_t pos = 0; pos < 4 * k; ++pos) w.push_back(chain_bit(e, pos));
            auto it = cache.find(w.str());
            if (it == cache.end()) it = cache.emplace(w.str(), eta_lower(w, prec)).first;
            return it->second;
        };
        const std::size_t cells = pow2_size(top);
        std::vector<Dyadic> lo(cells + 1);
        lo[cells] = eta_lo(0).floor_to(bits);
        for (std::size_t l = 1; l <= top; ++l) {
            const std::size_t stride = pow2_size(top - l);
            for (std::size_t n = 0; n < pow2_size(l - 1); ++n) {
                const std::size_t m = (2 * n + 1) * stride;
                const Interval term = detail::tent_term(Interval(eta_lo(pow2_size(l - 1) + n)), l, bits);
                lo[m] = detail::recursion_step(term, Interval(lo[m - stride]), Interval(lo[m + stride]), bits).lo();
            }
        }
        const std::size_t best = static_cast<std::size_t>(std::max_element(lo.begin(), lo.end()) - lo.begin());
        if (lo[best] <= goal) continue;

        const Dyadic t(mpz_class(static_cast<unsigned long>(best)), static_cast<std::int64_t>(top));
        const auto chain = chain_elements(t);
        std::vector<bool> on_chain(pow2_size(k + 1), false);
        for (const std::size_t e : chain) on_chain[e] = true;
        Word w;
        for (std::size_t i = v.size(); i < stage_bits(k); ++i) {
            const AlphaSlot s = alpha_slot(i);
            w.push_back(on_chain[s.element] ? chain_bit(s.element, s.position) : (s.position % 2 == 0 ? 1 : 0));
        }
        const Interval enclosure = phi_dyadic(BitStream::finite(v + w), t, k, prec);
        if (enclosure.lo() <= goal) continue;  // two-sided bound lost to rounding; go deeper
        cert.w = std::move(w);
        cert.t = t;
        cert.stage = k;
        cert.enclosure = enclosure;
        return cert;
    }
    fail(ErrorCode::WorkBudgetExhausted, "no stage <= " + std::to_string(opts.max_stage) +
                                             " forces Phi above " + std::to_string(target));
}

struct PhiReduction {
    SplicedStream out;                    // beta = prefix . p[tail_offset ..]
    std::vector<SupCertificate> certificates;
    std::optional<PathEnclosure> path;    // the readout path
    Interval max_enclosure;
    std::size_t readout = 0;
};

struct PhiReductionOptions {
    std::size_t layer_bound = 0;  // supplied bound on the layer, fixes the modulus grid
    ModulusPolicy policy;
    Precision prec;
    ForceSupOptions sup;
};

/// Bound x d_MLR <= Phi: copy p, splice in a sup-forcing word for each new k in I, then read
/// greater_nat(max Phi(beta)) off a certified path enclosure.
inline PhiReduction phi_reduction_transducer(const OpenNatSet& i_set, const BitStream& p,
                                             const PhiReductionOptions& opts = {}) {
    PhiReduction r;
    r.out = splice_transducer(i_set.members, p, [&](const Word& written, std::size_t value) {
        SupCertificate c = force_sup_gadget(value, written, opts.prec, opts.sup);
        Word w = c.w;
        r.certificates.push_back(std::move(c));
        return w;
    }, "force-sup");
    const std::size_t j = opts.policy.grid_level(opts.layer_bound);
    std::size_t k = std::max<std::size_t>(1, j - 1);
    for (const auto& c : r.certificates) k = std::max(k, c.stage);
    r.path = path_enclosure(r.out.q, j, k, opts.layer_bound, opts.prec, opts.policy);
    r.max_enclosure = path_max(*r.path);
    r.readout = greater_nat(r.max_enclosure);
    return r;
}

// ----- export

/// Rows t_numerator, t_denominator_exp, lo, hi, tube_lo, tube_hi with exact "m/2^e" endpoints;
/// tube columns empty when uncertified.
inline std::string path_csv(const PathEnclosure& path) {
    std::string out = "t_numerator,t_denominator_exp,lo,hi,tube_lo,tube_hi\n";
    for (std::size_t m = 0; m < path.values.size(); ++m) {
        out += std::to_string(m) + "," + std::to_string(path.grid_level) + "," + path.values[m].lo().to_string() + "," +
               path.values[m].hi().to_string() + ",";
        if (path.tube) out += path.tube->lo().to_string() + "," + path.tube->hi().to_string();
        else out += ",";
        out += "\n";
    }
    return out;
}

/// The enclosure band (inflated by the tube when certified) as a standalone SVG.
inline std::string path_svg(const PathEnclosure& path, int width = 800, int height = 400) {
    const double tube = path.tube ? path.tube->hi().to_double() : 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    for (const auto& v : path.values) {
        y_min = std::min(y_min, v.lo().to_double() - tube);
        y_max = std::max(y_max, v.hi().to_double() + tube);
    }
    if (y_max - y_min < 1e-9) y_max = y_min + 1.0;
    const double last = static_cast<double>(path.values.size() - 1);
    auto point = [&](std::size_t m, double y) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f,%.3f ", width * static_cast<double>(m) / last,
                      height * (y_max - y) / (y_max - y_min));
        return std::string(buf);
    };
    std::string band;
    std::string mid;
    for (std::size_t m = 0; m < path.values.size(); ++m) band += point(m, path.values[m].hi().to_double() + tube);
    for (std::size_t m = path.values.size(); m-- > 0;) band += point(m, path.values[m].lo().to_double() - tube);
    for (std::size_t m = 0; m < path.values.size(); ++m) mid += point(m, path.values[m].midpoint().to_double());
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                      std::to_string(height) + "\">\n";
    out += "<polygon points=\"" + band + "\" fill=\"#9ecae1\" stroke=\"none\"/>\n";
    out += "<polyline points=\"" + mid + "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1\"/>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace layerwise
