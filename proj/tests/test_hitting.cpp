#include <gtest/gtest.h>

#include <random>

#include "layerwise/hitting.hpp"

namespace {

using layerwise::BitStream;
using layerwise::ClosedCantorSet;
using layerwise::CylinderUnion;
using layerwise::Dyadic;
using layerwise::ErrorCode;
using layerwise::Word;

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const layerwise::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

Word random_word(std::mt19937_64& rng, std::size_t n) {
    Word w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(static_cast<int>(rng() & 1));
    return w;
}

// Window comparison on a materialized prefix; shares no code with the library scan.
bool brute_in(const std::string& bits, std::size_t n, const std::vector<Word>& words) {
    for (const Word& w : words) {
        if (n + w.size() <= bits.size() && bits.compare(n, w.size(), w.str()) == 0) return true;
    }
    return false;
}

std::optional<std::size_t> brute_hit(const BitStream& p, const std::vector<Word>& words, std::size_t shifts) {
    const std::string bits = p.prefix(shifts + 64).str();
    for (std::size_t n = 0; n < shifts; ++n) {
        if (brute_in(bits, n, words)) return n;
    }
    return std::nullopt;
}

CylinderUnion as_enumerated(const std::vector<Word>& words) {
    return CylinderUnion::enumerated([words](std::size_t i) -> std::optional<Word> {
        if (i < words.size()) return words[i];
        return std::nullopt;
    });
}

// ----- open sets

TEST(HitOpen, Examples) {
    const BitStream p = BitStream::seeded(1);
    EXPECT_EQ(layerwise::hit_open(p, CylinderUnion({""}), 10), (layerwise::Hit{0, Word()}));
    const BitStream q = BitStream::concat(Word("001"), p);
    EXPECT_EQ(layerwise::hit_open(q, CylinderUnion({"1"}), 10), (layerwise::Hit{2, Word("1")}));
    EXPECT_FALSE(layerwise::hit_open(BitStream::periodic(Word(), Word("0")), CylinderUnion({"1"}), 100));
    EXPECT_FALSE(layerwise::hit_open(BitStream::finite(Word("0000")), CylinderUnion({"1"}), 100));
}

TEST(HitOpen, ExhaustiveSingleWordsMatchBruteForce) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const BitStream p = BitStream::seeded(200 + seed);
        for (std::size_t len = 0; len <= 5; ++len) {
            for (std::uint64_t m = 0; m < (1ULL << len); ++m) {
                const std::vector<Word> words{Word::binary(m, len)};
                const auto got = layerwise::hit_open(p, CylinderUnion(words), 65);
                const auto want = brute_hit(p, words, 65);
                ASSERT_EQ(got.has_value(), want.has_value());
                if (got) {
                    ASSERT_EQ(got->n, *want);
                }
            }
        }
    }
}

TEST(HitOpen, RandomUnionsMatchBruteForce) {
    std::mt19937_64 rng(50);
    for (int i = 0; i < 200; ++i) {
        const BitStream p = BitStream::seeded(300 + static_cast<std::uint64_t>(i));
        std::vector<Word> words;
        const std::size_t count = 1 + rng() % 4;
        for (std::size_t k = 0; k < count; ++k) words.push_back(random_word(rng, 1 + rng() % 5));
        const auto want = brute_hit(p, words, 65);
        const auto got = layerwise::hit_open(p, CylinderUnion(words), 65);
        ASSERT_EQ(got.has_value(), want.has_value()) << i;
        if (!got) continue;
        ASSERT_EQ(got->n, *want) << i;
        ASSERT_TRUE(brute_in(p.prefix(got->n + 8).str(), got->n, {got->witness}));
        // the dovetailed search over the same words as an enumeration agrees
        const auto dove = layerwise::hit_open(p, as_enumerated(words), 70);
        ASSERT_TRUE(dove.has_value());
        ASSERT_EQ(dove->n, *want) << i;
    }
}

// ----- block encoding

TEST(BlockEncode, TwoMembersExample) {
    const BitStream p = BitStream::seeded(2);
    const auto e = layerwise::block_encode(2, {1}, p);
    EXPECT_EQ(e.digits, 2U);
    EXPECT_EQ(e.block_len, 6U);
    EXPECT_EQ(e.head, Word("110000" "110001" "110100"));
    const auto h = layerwise::hit_open(e.q, e.v, 100);
    ASSERT_TRUE(h);
    EXPECT_EQ(h->n, 6U);
    EXPECT_EQ(e.decode(h->n), 1U);
    EXPECT_EQ(layerwise::hit_open(layerwise::block_encode(2, {0, 2}, p).q, layerwise::block_encode(2, {0, 2}, p).v, 100)->n, 0U);
    const auto one = layerwise::block_encode(1, {1}, p);
    EXPECT_EQ(one.head, Word("1100" "1101"));
    EXPECT_EQ(code_of([&] { layerwise::block_encode(0, {0}, p); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { layerwise::block_encode(2, {}, p); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { layerwise::block_encode(2, {3}, p); }), ErrorCode::InvalidArgument);
}

TEST(BlockEncode, ExhaustiveUpToFour) {
    for (std::size_t b = 1; b <= 4; ++b) {
        for (std::uint64_t mask = 1; mask < (1ULL << (b + 1)); ++mask) {
            std::set<std::size_t> members;
            for (std::size_t i = 0; i <= b; ++i) {
                if (mask >> i & 1U) members.insert(i);
            }
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const auto e = layerwise::block_encode(b, members, BitStream::seeded(400 + seed));
                const auto h = layerwise::hit_open(e.q, e.v, 200);
                ASSERT_TRUE(h);
                ASSERT_EQ(e.decode(h->n), *members.begin());
                ASSERT_EQ(h->n % e.block_len, 0U);
                const std::vector<Word>& words = e.v.words();
                const std::string bits = e.q.prefix(e.head.size() + 64).str();
                for (std::size_t j = 0; j <= e.block_len * b; ++j) {
                    const bool aligned = j % e.block_len == 0 && members.count(j / e.block_len);
                    ASSERT_EQ(brute_in(bits, j, words), aligned) << b << " " << mask << " " << j;
                }
            }
        }
    }
}

TEST(BlockEncode, MinViaHittingMatchesMinimum) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 100; ++i) {
        layerwise::OpenNatSet u;
        std::set<std::size_t> truth;
        const std::size_t steps = 1 + rng() % 12;
        for (std::size_t s = 0; s < steps; ++s) {
            if (rng() % 3 == 0) {
                u.members.emplace_back(std::nullopt);
            } else {
                const std::size_t v = rng() % 20;
                u.members.emplace_back(v);
                truth.insert(v);
            }
        }
        if (truth.empty()) {
            EXPECT_EQ(code_of([&] { layerwise::min_via_hitting(u, BitStream::seeded(1)); }), ErrorCode::FuelExhausted);
            continue;
        }
        const auto r = layerwise::min_via_hitting(u, BitStream::seeded(500 + static_cast<std::uint64_t>(i)));
        ASSERT_EQ(r.value, *truth.begin()) << i;
    }
}

// ----- closed sets

std::size_t brute_closed_hit(const BitStream& p, const std::vector<Word>& complement) {
    const std::string bits = p.prefix(4096).str();
    for (std::size_t n = 0;; ++n) {
        if (!brute_in(bits, n, complement)) return n;
    }
}

TEST(HitClosed, Examples) {
    const BitStream p = BitStream::seeded(3);
    const auto whole = layerwise::hit_closed_mindchange(p, ClosedCantorSet{CylinderUnion()}, 10);
    ASSERT_EQ(whole.events.size(), 1U);
    EXPECT_EQ(whole.final_claim(), 0U);
    EXPECT_TRUE(whole.exhausted_complement);

    const std::vector<Word> c{p.prefix(3)};
    const auto s = layerwise::hit_closed_mindchange(p, ClosedCantorSet{CylinderUnion(c)}, 10);
    ASSERT_GE(s.events.size(), 2U);
    EXPECT_EQ(s.events[1].claim, 1U);
    EXPECT_EQ(s.events[1].witness, p.prefix(3));
    EXPECT_EQ(s.final_claim(), brute_closed_hit(p, c));
    EXPECT_EQ(s.events.size(), s.final_claim() + 1);
}

TEST(HitClosed, SeededInstancesStabilizeAtTheHittingTime) {
    std::mt19937_64 rng(52);
    int nontrivial = 0;
    for (int i = 0; i < 50; ++i) {
        const BitStream p = BitStream::seeded(600 + static_cast<std::uint64_t>(i));
        std::vector<Word> c;
        // words read off p's orbit force retractions; random ones fill in
        for (std::size_t k = 0; k < 1 + rng() % 4; ++k) c.push_back(p.prefix(k + 4 + rng() % 4).substr(k, 1 + rng() % 3));
        for (std::size_t k = 0; k < rng() % 3; ++k) c.push_back(random_word(rng, 2 + rng() % 4));
        if (layerwise::measure(CylinderUnion(c)) >= Dyadic(1)) continue;  // needs lambda(A) > 0
        const auto s = layerwise::hit_closed_mindchange(p, ClosedCantorSet{CylinderUnion(c)}, 100);
        ASSERT_TRUE(s.exhausted_complement);
        ASSERT_EQ(s.events.size(), s.final_claim() + 1) << i;
        for (std::size_t k = 0; k < s.events.size(); ++k) {
            ASSERT_EQ(s.events[k].claim, k);
            if (k > 0) {
                ASSERT_TRUE(layerwise::detail::matches_at(p, k - 1, *s.events[k].witness));
            }
        }
        ASSERT_EQ(s.final_claim(), brute_closed_hit(p, c)) << i;
        // an enumerated complement reaches the same claim with enough fuel
        const auto e = layerwise::hit_closed_mindchange(p, ClosedCantorSet{as_enumerated(c)}, 60);
        ASSERT_EQ(e.final_claim(), s.final_claim()) << i;
        nontrivial += s.final_claim() > 0;
    }
    EXPECT_GE(nontrivial, 25);
}

TEST(AvoidSet, Examples) {
    const BitStream p = BitStream::seeded(4);
    const auto one = layerwise::avoid_set_gadget(p, {0});
    ASSERT_EQ(one.a.complement.words().size(), 1U);
    EXPECT_EQ(one.a.complement.words()[0], p.prefix(1));
    EXPECT_EQ(one.complement_measure, Dyadic::pow2(-1));
    EXPECT_EQ(one.lower_bound, Dyadic::pow2(-1));
    const auto three = layerwise::avoid_set_gadget(p, {2, std::nullopt, 0, 1, 1, 0});
    EXPECT_EQ(three.values, (std::set<std::size_t>{0, 1, 2}));
    EXPECT_EQ(three.measure_bound, Dyadic(mpz_class(7), 3));
    EXPECT_EQ(three.lower_bound, Dyadic::pow2(-3));
    EXPECT_LE(three.complement_measure, three.measure_bound);
    EXPECT_EQ(three.witnesses[2].second, p.prefix(5).substr(2, 3));
}

TEST(AvoidSet, InitialSegmentsUpToSix) {
    for (std::size_t big_n = 0; big_n <= 6; ++big_n) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const BitStream p = BitStream::seeded(700 + seed);
            std::mt19937_64 rng(seed);
            layerwise::EventStream q;
            for (std::size_t v = 0; v <= big_n; ++v) q.emplace_back(v);
            for (int k = 0; k < 5; ++k) q.emplace_back(rng() % (big_n + 1));  // repeats
            std::shuffle(q.begin(), q.end(), rng);
            const auto g = layerwise::avoid_set_gadget(p, q);
            const Dyadic ceiling = Dyadic(1) - Dyadic::pow2(-static_cast<std::int64_t>(big_n + 1));
            ASSERT_LE(g.complement_measure, ceiling);
            ASSERT_EQ(g.measure_bound, ceiling);
            ASSERT_GT(g.lower_bound, Dyadic(0));
            ASSERT_EQ(g.witnesses.size(), big_n + 1);
            for (const auto& [v, w] : g.witnesses) {
                ASSERT_EQ(w.size(), v + 1);
                ASSERT_TRUE(layerwise::detail::matches_at(p, v, w));
                // T^v p is not in A: the mind-change stream retracts claim 0 for the shifted input
                const auto s = layerwise::hit_closed_mindchange(layerwise::shift(p, v), g.a, 64);
                ASSERT_GE(s.events.size(), 2U);
                ASSERT_TRUE(s.events[1].witness->is_prefix_of(layerwise::shift(p, v).prefix(16)));
            }
        }
    }
}

// ----- clopen sets

TEST(HitClopen, Examples) {
    const BitStream p = BitStream::concat(Word("0101101"), BitStream::seeded(5));
    EXPECT_EQ(layerwise::hit_clopen(p, CylinderUnion({"0", "1"}), 10), 0U);
    EXPECT_EQ(layerwise::hit_clopen(p, CylinderUnion({"11"}), 10), 3U);  // bits 3 and 4
    EXPECT_EQ(code_of([&] { layerwise::hit_clopen(p, CylinderUnion({"11", "0"}), 10); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { layerwise::hit_clopen(p, CylinderUnion(), 10); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { layerwise::hit_clopen(BitStream::periodic(Word(), Word("0")), CylinderUnion({"1"}), 50); }),
              ErrorCode::NeverHitWithinFuel);
}

TEST(HitClopen, AgreesWithHitOpen) {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 200; ++i) {
        const BitStream p = BitStream::seeded(800 + static_cast<std::uint64_t>(i));
        const std::size_t m = 1 + rng() % 6;
        std::vector<Word> words;
        for (std::size_t k = 0; k < 1 + rng() % 3; ++k) words.push_back(random_word(rng, m));
        const auto open = layerwise::hit_open(p, CylinderUnion(words), 4096);
        ASSERT_TRUE(open);
        ASSERT_EQ(layerwise::hit_clopen(p, CylinderUnion(words), 4096), open->n) << i;
    }
}

}  // namespace
