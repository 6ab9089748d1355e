#pragma once
// ml_tests.hpp - Martin-Loef test objects, exact level audits, layer exclusions and the
// compression-based deficiency proxy.

#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor.hpp"
#include "codec.hpp"

namespace layerwise {

/// An indexed family n -> U_n of cylinder unions.
template <class T>
concept MLTest = requires(const T& t, std::size_t n) {
    { t.level(n) } -> std::convertible_to<CylinderUnion>;
};

/// Finitely many explicitly listed levels; every other level is empty.
class FiniteMLTest {
public:
    FiniteMLTest() = default;
    explicit FiniteMLTest(std::vector<CylinderUnion> levels) : levels_(std::move(levels)) {}

    [[nodiscard]] CylinderUnion level(std::size_t n) const {
        return n < levels_.size() ? levels_[n] : CylinderUnion{};
    }
    [[nodiscard]] std::size_t listed_levels() const noexcept { return levels_.size(); }

private:
    std::vector<CylinderUnion> levels_;
};

/// Level n = { w 0^(|w|+n+2) : w any word }, words enumerated in shortlex order of w.
/// With max_word_length set, only |w| <= max_word_length is listed and levels are finite.
class DilutionTest {
public:
    DilutionTest() = default;
    explicit DilutionTest(std::size_t max_word_length) : max_word_length_(max_word_length) {}

    static std::size_t witness_depth(const Word& w, std::size_t n) { return w.size() + n + 2; }

    /// The i-th w in shortlex order: length floor(log2(i+1)).
    static Word base_word(std::size_t i) {
        std::size_t len = 0;
        while (((i + 1) >> (len + 1)) != 0) ++len;
        return Word::binary(i + 1 - (std::size_t{1} << len), len);
    }
    static Word level_word(std::size_t i, std::size_t n) {
        const Word w = base_word(i);
        return w + Word::zeros(witness_depth(w, n));
    }

    [[nodiscard]] CylinderUnion level(std::size_t n) const {
        if (!max_word_length_) {
            return CylinderUnion::enumerated([n](std::size_t i) -> std::optional<Word> { return level_word(i, n); });
        }
        std::vector<Word> words;
        const std::size_t count = (std::size_t{1} << (*max_word_length_ + 1)) - 1;
        words.reserve(count);
        for (std::size_t i = 0; i < count; ++i) words.push_back(level_word(i, n));
        return CylinderUnion(std::move(words));
    }

    /// Same answer as member(level(n), p, fuel), computed from run lengths instead of by
    /// materialising words.
    [[nodiscard]] Membership member_at(std::size_t n, const BitStream& p, std::size_t fuel) const {
        Membership m;
        for (std::size_t len = 0; len < std::numeric_limits<std::size_t>::digits; ++len) {
            const std::size_t first = (std::size_t{1} << len) - 1;  // shortlex index of 0^len
            if (first >= fuel) break;
            if (max_word_length_ && len > *max_word_length_) break;
            const std::size_t word_len = 2 * len + n + 2;
            const std::size_t in_level = std::size_t{1} << len;
            const std::size_t examinable = std::min(in_level, fuel - first);
            if (word_len > fuel || !p.available(word_len)) {
                m.words_examined += examinable;
                continue;
            }
            m.bits_read = std::max(m.bits_read, word_len);
            const Word head = p.prefix(len);
            const std::size_t index = first + static_cast<std::size_t>(head.empty() ? 0 : mpz_class(head.str(), 2).get_ui());
            if (index >= fuel) {
                m.words_examined += examinable;
                continue;
            }
            bool zeros = true;
            for (std::size_t j = len; j < word_len && zeros; ++j) zeros = p.bit(j) == 0;
            if (zeros) {
                m.words_examined += index - first + 1;
                m.witness = p.prefix(word_len);
                return m;
            }
            m.words_examined += examinable;
        }
        return m;
    }

private:
    std::optional<std::size_t> max_word_length_;
};

/// k = |w| + n + 2: the cylinder of w 0^k lies inside DilutionTest level n.
inline std::size_t dilution_witness(const Word& w, std::size_t n) { return DilutionTest::witness_depth(w, n); }

// ----- audit

struct LevelAudit {
    std::size_t level = 0;
    Dyadic measure;
    Dyadic bound;  // 2^-level
    bool pass = false;
};

struct AuditReport {
    std::vector<LevelAudit> levels;

    [[nodiscard]] bool all_pass() const {
        for (const auto& l : levels) {
            if (!l.pass) return false;
        }
        return true;
    }
    [[nodiscard]] std::vector<std::size_t> failing_levels() const {
        std::vector<std::size_t> out;
        for (const auto& l : levels) {
            if (!l.pass) out.push_back(l.level);
        }
        return out;
    }
};

enum class AuditMode { Report, Strict };

/// Exact measure of levels 0..n_max against 2^-n. Strict mode raises MeasureBoundViolated
/// naming every offending level.
template <MLTest T>
AuditReport audit_test(const T& test, std::size_t n_max, AuditMode mode = AuditMode::Report) {
    AuditReport r;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const CylinderUnion u = test.level(n);
        if (!u.is_finite()) fail(ErrorCode::InvalidArgument, "level " + std::to_string(n) + " is not materialised");
        LevelAudit a;
        a.level = n;
        a.measure = measure(u);
        a.bound = Dyadic::pow2(-static_cast<std::int64_t>(n));
        a.pass = a.measure <= a.bound;
        r.levels.push_back(std::move(a));
    }
    if (mode == AuditMode::Strict && !r.all_pass()) {
        std::string which;
        for (const std::size_t n : r.failing_levels()) which += (which.empty() ? "" : ",") + std::to_string(n);
        fail(ErrorCode::MeasureBoundViolated, "levels " + which);
    }
    return r;
}

// ----- layers

struct LayerVerdict {
    std::map<std::size_t, Word> excluded_levels;  // level -> witness word prefixing p
    std::size_t candidate_rd = 0;                 // least level not excluded (provisional)
    std::size_t fuel_used = 0;                    // words examined + bits read, all levels
    std::size_t levels_scanned = 0;
};

template <MLTest T>
Membership level_member(const T& test, std::size_t n, const BitStream& p, std::size_t fuel) {
    if constexpr (requires { test.member_at(n, p, fuel); }) {
        return test.member_at(n, p, fuel);
    } else {
        return member(test.level(n), p, fuel);
    }
}

/// Verified exclusions n with p in U_n (each with a witness), plus the least level not yet
/// excluded. Levels 0..max_levels-1 are scanned with `fuel` per level.
template <MLTest T>
LayerVerdict lay_exclusions(const BitStream& p, const T& test, std::size_t fuel, std::size_t max_levels = 64) {
    if (fuel == 0) fail(ErrorCode::InvalidArgument, "lay_exclusions needs fuel > 0");
    LayerVerdict v;
    for (std::size_t n = 0; n < max_levels; ++n) {
        const Membership m = level_member(test, n, p, fuel);
        v.fuel_used += m.words_examined + m.bits_read;
        if (m.inside()) v.excluded_levels.emplace(n, *m.witness);
    }
    v.levels_scanned = max_levels;
    while (v.excluded_levels.count(v.candidate_rd)) ++v.candidate_rd;
    return v;
}

// ----- deficiency proxy

/// max over prefixes v of w of |v| - clen(v), clipped at 0. A heuristic stand-in for the
/// Kolmogorov deficiency; no soundness claim against true prefix complexity.
template <LosslessCodec C>
std::size_t k_deficiency_upper(const Word& w, const C& codec) {
    std::size_t best = 0;
    for (std::size_t n = 1; n <= w.size(); ++n) {
        const std::size_t c = checked_clen(codec, w.prefix(n));
        if (n > c) best = std::max(best, n - c);
    }
    return best;
}

}  // namespace layerwise
