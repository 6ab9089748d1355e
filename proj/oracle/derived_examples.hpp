#pragma once
// derived_examples.hpp - the worked examples of every module, each checked against an
// independent oracle (brute force, direct arithmetic or MPFR). Shared by the CLI's
// oracle-suite command and the test suite.

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <layerwise/brownian.hpp>
#include <layerwise/choice.hpp>
#include <layerwise/hitting.hpp>
#include <layerwise/limit_laws.hpp>
#include <layerwise/ml_tests.hpp>
#include <layerwise/normal.hpp>

#include "oracle.hpp"

namespace oracle {

/// Records the first failed expectation of a case.
class Probe {
public:
    void check(bool ok, const std::string& what) {
        if (!ok && failure_.empty()) failure_ = what;
    }
    [[nodiscard]] const std::string& failure() const { return failure_; }

private:
    std::string failure_;
};

struct ExampleCase {
    std::string module;
    std::string name;
    std::function<void(Probe&)> run;
};

struct ExampleResult {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;  // first failed expectation or the error raised
};

namespace examples {

using namespace layerwise;

inline Dyadic dy(long m, std::int64_t e) { return Dyadic(mpz_class(m), e); }

inline EventStream values(std::initializer_list<std::size_t> vs) {
    EventStream out;
    for (const std::size_t v : vs) out.emplace_back(v);
    return out;
}

/// Least n with some word of c prefixing T^n p, by direct comparison of bit strings.
inline std::optional<std::size_t> brute_hit(const Word& prefix, const std::vector<Word>& c) {
    for (std::size_t n = 0; n < prefix.size(); ++n) {
        for (const Word& w : c) {
            if (n + w.size() <= prefix.size() && prefix.substr(n, w.size()) == w) return n;
        }
    }
    return std::nullopt;
}

inline mpq_class direct_harmonic(const Word& bits, std::size_t n, SignConvention c) {
    mpq_class s = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const bool negative = c == SignConvention::PowerOfBit ? bits[i] == 1 : bits[i] == 0;
        s += mpq_class(negative ? -1 : 1, static_cast<unsigned long>(i));
    }
    return s;
}

inline Real lil_oracle(std::size_t n) {
    const Real x(static_cast<unsigned long>(n));
    return boost::multiprecision::sqrt(2 * x * boost::multiprecision::log(boost::multiprecision::log(x)));
}

inline std::vector<ExampleCase> cantor_cases() {
    return {
        {"cantor_core", "shift composes on a 64-bit prefix", [](Probe& t) {
             const BitStream p = BitStream::seeded(1);
             const Word direct = p.prefix(67).substr(3, 64);
             t.check(shift(shift(p, 1), 2).prefix(64) == direct, "shift(shift(p,1),2) != p[3..67)");
             t.check(shift(p, 3).prefix(64) == direct, "shift(p,3) != p[3..67)");
         }},
        {"cantor_core", "measure of {0, 01, 111} is 5/8", [](Probe& t) {
             const std::vector<Word> u{Word("0"), Word("01"), Word("111")};
             long inside = 0;
             for (std::uint64_t x = 0; x < 8; ++x) {
                 const Word w = Word::binary(x, 3);
                 inside += std::any_of(u.begin(), u.end(), [&](const Word& c) { return c.is_prefix_of(w); });
             }
             t.check(measure(CylinderUnion(u)) == dy(inside, 3), "measure differs from the depth-3 count");
             t.check(inside == 5, "brute force count is not 5");
         }},
        {"cantor_core", "enumerated 0^k 1 union contains 0001...", [](Probe& t) {
             const auto u = CylinderUnion::enumerated([](std::size_t k) -> std::optional<Word> {
                 Word w = Word::zeros(k);
                 w.push_back(1);
                 return w;
             });
             const BitStream p = BitStream::concat(Word("0001"), BitStream::seeded(2));
             const Membership m = member(u, p, 4);
             t.check(m.inside() && *m.witness == Word("0001"), "witness is not 0001");
         }},
    };
}

inline std::vector<ExampleCase> arith_cases() {
    return {
        {"rigor_arith", "sqrt[2,2] contains sqrt 2", [](Probe& t) {
             t.check(encloses(iv_sqrt(Interval(2), Precision{60}), boost::multiprecision::sqrt(Real(2))), "sqrt 2 missing");
         }},
        {"rigor_arith", "log of an e enclosure contains 1", [](Probe& t) {
             const Interval e = fuzz(boost::multiprecision::exp(Real(1)));
             t.check(iv_log(e, Precision{60}).contains(Dyadic(1)), "1 missing");
         }},
        {"rigor_arith", "normal_cdf(1) contains 0.841344746...", [](Probe& t) {
             t.check(encloses(normal_cdf(Interval(1), Precision{60}), cdf(Real(1))), "oracle value missing");
         }},
        {"rigor_arith", "quantile of the cdf(1) enclosure contains 1", [](Probe& t) {
             const Interval a = normal_cdf(Interval(1), Precision{60});
             t.check(normal_quantile(a, Precision{40}).contains(Dyadic(1)), "1 missing");
         }},
    };
}

inline std::vector<ExampleCase> ml_cases() {
    return {
        {"ml_tests", "truncated DilutionTest level 3 passes", [](Probe& t) {
             const auto r = audit_test(DilutionTest(10), 3);
             // geometric sum over |w| <= 10 with no overlap credit
             mpq_class bound = 0;
             for (int l = 0; l <= 10; ++l) bound += mpq_class(1, 1UL << (l + 5));
             t.check(r.all_pass(), "audit failed");
             t.check(r.levels[3].measure.to_rational() <= bound, "measure above the geometric sum");
             t.check(r.levels[3].measure <= Dyadic::pow2(-4), "measure above 2^-4");
         }},
        {"ml_tests", "quiet PRNG seed has no exclusion", [](Probe& t) {
             const auto v = lay_exclusions(BitStream::seeded(7), DilutionTest{}, 100000);
             t.check(v.candidate_rd == 0, "candidate_rd " + std::to_string(v.candidate_rd));
         }},
        {"ml_tests", "dilution witness depths", [](Probe& t) {
             t.check(dilution_witness(Word(), 0) == 2, "(eps,0) != 2");
             t.check(dilution_witness(Word("101"), 4) == 9, "(101,4) != 9");
         }},
        {"ml_tests", "deficiency of 0^1000 is at least 900", [](Probe& t) {
             const LzCodec codec;
             const Word z = Word::zeros(1000);
             const std::size_t direct = z.size() - std::min(z.size(), checked_clen(codec, z));
             t.check(direct >= 900, "codec output too long");
             t.check(k_deficiency_upper(z, codec) >= direct, "proxy below the whole-word deficiency");
         }},
    };
}

inline std::vector<ExampleCase> choice_cases() {
    return {
        {"choice_gadgets", "argmax of 3,1,3,2 points at 3", [](Probe& t) {
             const auto r = max_via_argmax(OpenNatSet{values({3, 1, 3, 2})}, 100);
             const std::vector<std::size_t> seq{3, 1, 3, 2};
             const std::size_t mx = *std::max_element(seq.begin(), seq.end());
             const auto gone = r.indices.excluded(100);
             for (std::size_t k = 0; k < seq.size(); ++k) {
                 t.check(gone.count(k) == (seq[k] < mx ? 1U : 0U), "index " + std::to_string(k));
             }
         }},
        {"choice_gadgets", "argmax of 0..9 keeps the index of 9", [](Probe& t) {
             const auto r = max_via_argmax(OpenNatSet{values({0, 1, 2, 3, 4, 5, 6, 7, 8, 9})}, 100);
             const auto gone = r.indices.excluded(100);
             t.check(gone.size() == 9 && !gone.count(9), "survivors are not {9}");
         }},
        {"choice_gadgets", "unique choice on shuffled singletons", [](Probe& t) {
             std::mt19937_64 rng(6);
             for (int trial = 0; trial < 50; ++trial) {
                 const std::size_t n = rng() % 51;
                 std::vector<std::size_t> others;
                 for (std::size_t k = 0; k < 80; ++k) {
                     if (k != n) others.push_back(k);
                 }
                 std::shuffle(others.begin(), others.end(), rng);
                 ClosedNatSet a;
                 for (const std::size_t k : others) a.exclusions.emplace_back(k);
                 t.check(ucn_via_bound(a, n + rng() % 20, 1000).value == n, "wrong singleton");
             }
         }},
        {"choice_gadgets", "bound-to-lay with I = {0,1,2} up front", [](Probe& t) {
             const BitStream p = BitStream::seeded(7);
             const auto r = bound_to_lay_transducer(OpenNatSet{values({0, 1, 2})}, p);
             // k0 = 0+0+2, k1 = 2+1+2, k2 = 7+2+2
             t.check(r.out.q.prefix(218) == Word::zeros(18) + p.prefix(200), "q != 0^18 p");
             const auto v = lay_exclusions(r.out.q, DilutionTest{}, std::size_t{1} << 62, 8);
             for (std::size_t n = 0; n < 3; ++n) t.check(v.excluded_levels.count(n) == 1, "level not excluded");
         }},
        {"choice_gadgets", "bound-to-lay with I = {3} after 10 bits", [](Probe& t) {
             const BitStream p = BitStream::seeded(7);
             EventStream ev(10, std::nullopt);
             ev.emplace_back(3);
             const auto r = bound_to_lay_transducer(OpenNatSet{ev}, p);
             t.check(r.out.q.prefix(125) == p.prefix(10) + Word::zeros(15) + shift(p, 10).prefix(100), "layout");
             const Word block_end = r.out.q.prefix(25);
             const auto m = member(DilutionTest{}.level(3), BitStream::finite(block_end), std::size_t{1} << 20);
             t.check(m.inside(), "inserted block does not complete a level-3 word");
         }},
        {"choice_gadgets", "kol padding for c = 5 after 64 bits", [](Probe& t) {
             const LzCodec codec;
             EventStream ev(64, std::nullopt);
             ev.emplace_back(5);
             const auto r = kol_padding_gadget(OpenNatSet{ev}, BitStream::seeded(12), codec);
             t.check(r.paddings.size() == 1, "one padding expected");
             for (const auto& pad : r.paddings) {
                 const Word w = r.out.q.prefix(pad.n + pad.k);
                 t.check(checked_clen(codec, w) + pad.c < pad.n + pad.k, "inequality fails on q's prefix");
             }
         }},
        {"choice_gadgets", "kol padding for c = 3 then 6", [](Probe& t) {
             const LzCodec codec;
             EventStream ev(40, std::nullopt);
             ev.emplace_back(3);
             ev.insert(ev.end(), 30, std::nullopt);
             ev.emplace_back(6);
             const auto r = kol_padding_gadget(OpenNatSet{ev}, BitStream::seeded(13), codec);
             t.check(r.paddings.size() == 2, "two paddings expected");
             if (r.paddings.size() == 2) {
                 t.check(r.paddings[1].n == 40 + r.paddings[0].k + 30, "second k not against the longer prefix");
                 for (const auto& pad : r.paddings) {
                     t.check(checked_clen(codec, r.out.q.prefix(pad.n + pad.k)) + pad.c < pad.n + pad.k, "inequality");
                 }
             }
         }},
    };
}

inline std::vector<ExampleCase> brownian_cases() {
    return {
        {"brownian_phi", "eta(0111) lies in (-inf, 0] and holds g(7/16)", [](Probe& t) {
             const Interval e = eta(Word("0111"), Precision{24});
             t.check(e.hi() <= Dyadic(0), "upper end above 0");
             t.check(encloses(e, quantile(to_real(dy(7, 4)))), "g(7/16) missing");
             t.check(e.contains(Dyadic(0)), "g(1/2) = 0 missing");
         }},
        {"brownian_phi", "Phi(3/4) at stage 1: recursion and series overlap", [](Probe& t) {
             const BitStream p = BitStream::seeded(7);
             const Precision prec{};
             const auto a = allocate_bits(p, 1);
             const Interval e0 = eta(a.elements[0], prec);
             const Interval e1 = eta(a.elements[1], prec);
             const Interval e11 = eta(a.elements[3], prec);
             const Interval by_hand = (pow2_half(1, 80) * e11 + e0 + (e0 + e1).scaled(-1)).scaled(-1);
             const Interval rec = phi_dyadic(p, dy(3, 2), 1, prec);
             t.check(rec.contains(by_hand), "recursion misses the hand evaluation");
             t.check(rec.overlaps(phi_series(p, dy(3, 2), 1, prec)), "series disagrees");
         }},
        {"brownian_phi", "modulus at h = 2^-20", [](Probe& t) {
             const Real h = boost::multiprecision::ldexp(Real(1), -20);
             const Interval tube = modulus_tube(Dyadic::pow2(-20), 0);
             t.check(encloses(tube, boost::multiprecision::sqrt(3 * h * boost::multiprecision::log(1 / h))), "oracle");
         }},
        {"brownian_phi", "j = 4 path narrows from stage 4 to 6", [](Probe& t) {
             const BitStream p = BitStream::seeded(7);
             const auto k4 = path_enclosure(p, 4, 4);
             const auto k6 = path_enclosure(p, 4, 6);
             t.check(k6.values.size() == 17, "17 values expected");
             for (std::size_t m = 1; m <= 16 && m < k6.values.size(); ++m) {
                 t.check(k4.values[m].contains(k6.values[m]) && k6.values[m].width() < k4.values[m].width(),
                         "no refinement at m = " + std::to_string(m));
             }
         }},
        {"brownian_phi", "greater_nat(path_max) dominates the grid", [](Probe& t) {
             const auto path = path_enclosure(BitStream::seeded(7), 5, 7, 0, Precision{}, ModulusPolicy{5});
             const auto n = static_cast<long>(greater_nat(path_max(path)));
             for (const auto& v : path.values) t.check(Dyadic(n) >= v.lo(), "grid value above the readout");
         }},
        {"brownian_phi", "force_sup K = 0 and K = 2 on fresh continuations", [](Probe& t) {
             const Word v = BitStream::seeded(21).prefix(16);
             for (const auto& [target, head] : {std::pair<std::size_t, Word>{0, Word()}, {2, v}}) {
                 const auto c = force_sup_gadget(target, head);
                 const BitStream beta = BitStream::concat(head + c.w, BitStream::seeded(99));
                 t.check(phi_dyadic(beta, c.t, c.stage, Precision{}).lo() > Dyadic(static_cast<long>(target)),
                         "certificate lost at K = " + std::to_string(target));
             }
         }},
        {"brownian_phi", "force_sup effort for K = 3 at least K = 1", [](Probe& t) {
             const Word v = BitStream::seeded(0).prefix(16);
             t.check(force_sup_gadget(3, v).w.size() >= force_sup_gadget(1, v).w.size(), "regression");
         }},
        {"brownian_phi", "Phi reduction readouts for {1} and {1,3}", [](Probe& t) {
             const BitStream p = BitStream::seeded(41);
             const auto one = phi_reduction_transducer(OpenNatSet{{std::nullopt, 1}}, p);
             t.check(one.certificates.size() == 1 && one.readout >= 1, "I = {1}");
             EventStream ev{1};
             ev.insert(ev.end(), 20, std::nullopt);
             ev.emplace_back(3);
             const auto two = phi_reduction_transducer(OpenNatSet{ev}, p);
             t.check(two.certificates.size() == 2 && two.readout >= 3, "I = {1,3}");
         }},
    };
}

inline std::vector<ExampleCase> limit_cases() {
    return {
        {"limit_laws", "lil margin at 20", [](Probe& t) {
             t.check(encloses(lil_margin(20), lil_oracle(20)), "oracle value missing");
         }},
        {"limit_laws", "1^25 violates the margin", [](Probe& t) {
             const auto v = lil_verify(WalkPrefix::of(Word::ones(25)), 3, 25);
             t.check(!v.holds, "no violation");
             t.check(Real(static_cast<unsigned long>(v.index)) > lil_oracle(v.index), "reported index not a violation");
         }},
        {"limit_laws", "lil gadget closed forms", [](Probe& t) {
             const auto a = lil_gadget(Word(), 0);
             t.check(a.v == Word::ones(20) && Real(20) > lil_oracle(20), "u = eps");
             const auto b = lil_gadget(Word::zeros(10), 0);
             t.check(b.v == Word::ones(30) && Real(20) > lil_oracle(40), "u = 0^10");
             const Word u = BitStream::seeded(3).prefix(25);
             const auto c = lil_gadget(u, 0);
             const auto w = WalkPrefix::of(u + c.v);
             t.check(Real(std::labs(w.sum(c.n))) > lil_oracle(c.n), "k = 25 postcondition");
         }},
        {"limit_laws", "lil transducer for {5} and {5,40}", [](Probe& t) {
             for (const auto& ev : {values({5}), values({5, 40})}) {
                 const auto run = lil_transducer(OpenNatSet{ev}, BitStream::seeded(9));
                 const std::size_t big_n = *ev.back();
                 const std::size_t end = run.out.prefix.size();
                 const auto walk = WalkPrefix::of(run.out.q.prefix(end));
                 bool later = false;
                 for (std::size_t n = big_n + 1; n <= end; ++n) {
                     later = later || Real(std::labs(walk.sum(n))) > lil_oracle(n);
                 }
                 t.check(later, "no violation past " + std::to_string(big_n));
             }
         }},
        {"limit_laws", "birkhoff average of 1101000010", [](Probe& t) {
             const std::string bits = "1101000010";
             const Word w(bits);
             mpq_class want(static_cast<unsigned long>(std::count(bits.begin(), bits.end(), '1')), 10UL);
             want.canonicalize();
             t.check(birkhoff_average(w, 9) == want && want == mpq_class(2, 5), "not 4/10");
         }},
        {"limit_laws", "(10)^20 stays within 1/4 from n = 4", [](Probe& t) {
             Word w;
             for (int i = 0; i < 20; ++i) w += Word("10");
             t.check(birkhoff_verify(w, 2, 4, 39).holds, "N = 4");
             const auto v = birkhoff_verify(w, 2, 0, 39);
             t.check(!v.holds && v.index == 0, "N = 0");
         }},
        {"limit_laws", "birkhoff gadget examples", [](Probe& t) {
             t.check(birkhoff_gadget(Word("1"), 2, 1).v == Word("000"), "u = 1");
             const auto g = birkhoff_gadget(Word("1111"), 2, 0);
             for (std::size_t l = 1; l < g.l; ++l) {
                 const mpq_class avg(4, static_cast<unsigned long>(4 + l));
                 t.check(abs(avg - mpq_class(1, 2)) < mpq_class(1, 4), "smaller l also deviates");
             }
             t.check(abs(mpq_class(4, static_cast<unsigned long>(4 + g.l)) - mpq_class(1, 2)) >= mpq_class(1, 4), "no deviation");
         }},
        {"limit_laws", "alternating partial through 4", [](Probe& t) {
             const BitStream p = BitStream::periodic(Word(), Word("01"));
             const Word bits = p.prefix(5);
             for (const auto c : {SignConvention::PowerOfBit, SignConvention::PowerOfComplement}) {
                 t.check(harmonic_partial(p, 4, c).sum == direct_harmonic(bits, 4, c), to_string(c));
             }
             t.check(harmonic_partial(p, 4, SignConvention::PowerOfComplement).sum == mpq_class(7, 12), "7/12");
         }},
        {"limit_laws", "harmonic gadget with a = {2}", [](Probe& t) {
             const BitStream p = BitStream::periodic(Word(), Word("10"));
             const auto run = harmonic_gadget(p, {{mpq_class(2)}}, {2000, 1u << 20, SignConvention::PowerOfBit});
             t.check(run.triggers.size() == 1 && run.triggers[0].at == 1, "one trigger at the first check");
             for (const std::size_t j : run.flips) t.check(p.bit(j) == 1 && run.q.bit(j) == 0, "flip direction");
             t.check(run.final_partial > mpq_class(2), "limit not raised");
         }},
        {"limit_laws", "sum_apr on the alternating series", [](Probe& t) {
             const BitStream alt = BitStream::periodic(Word(), Word("10"));
             const auto tail = alternating_remainder(1000);
             t.check(sum_apr(alt, 0, 1, 1000, tail) == SumAprAnswer::One, "q = 0");
             t.check(sum_apr(alt, 10, 1, 1000, tail) == SumAprAnswer::Zero, "q = 10");
         }},
    };
}

inline std::vector<ExampleCase> hitting_cases() {
    return {
        {"hitting_time", "hit_open on random small unions", [](Probe& t) {
             std::mt19937_64 rng(50);
             for (int i = 0; i < 50; ++i) {
                 const BitStream p = BitStream::seeded(900 + static_cast<std::uint64_t>(i));
                 std::vector<Word> u;
                 for (std::size_t k = 0; k < 1 + rng() % 4; ++k) u.push_back(Word::binary(rng(), 1 + rng() % 5));
                 const Word head = p.prefix(64 + 5);
                 const auto raw = brute_hit(head, u);
                 const std::size_t want = raw ? *raw : 65;
                 const auto got = hit_open(p, CylinderUnion(u), 65);
                 const bool same = want <= 64 ? (got && got->n == want) : !got;
                 t.check(same, "case " + std::to_string(i));
             }
         }},
        {"hitting_time", "block encoding with b = 2, members {1}", [](Probe& t) {
             const auto e = block_encode(2, {1}, BitStream::seeded(2));
             const auto h = hit_open(e.q, e.v, 100);
             t.check(h && h->n == 6 && e.decode(h->n) == 1, "hit at 6 decoding to 1");
         }},
        {"hitting_time", "block encoding exhaustive for b <= 4", [](Probe& t) {
             for (std::size_t b = 1; b <= 4; ++b) {
                 for (unsigned mask = 1; mask < (1U << (b + 1)); ++mask) {
                     std::set<std::size_t> m;
                     for (std::size_t i = 0; i <= b; ++i) {
                         if (mask & (1U << i)) m.insert(i);
                     }
                     const auto e = block_encode(b, m, BitStream::seeded(mask));
                     const auto h = hit_open(e.q, e.v, e.head.size() + 1);
                     t.check(h && e.decode(h->n) == *m.begin(), "b = " + std::to_string(b));
                 }
             }
         }},
        {"hitting_time", "closed set: retraction past p's first three bits", [](Probe& t) {
             const BitStream p = BitStream::seeded(3);
             const std::vector<Word> c{p.prefix(3)};
             const auto s = hit_closed_mindchange(p, ClosedCantorSet{CylinderUnion(c)}, 10);
             // least n with T^n p escaping the cylinder
             const Word head = p.prefix(200);
             std::size_t want = 0;
             while (head.substr(want, 3) == c[0]) ++want;
             t.check(s.events.size() >= 2 && s.events[1].witness == c[0], "claim 0 not retracted with a witness");
             t.check(s.final_claim() == want, "final claim " + std::to_string(s.final_claim()));
         }},
        {"hitting_time", "avoid set for {0} and {0,1,2}", [](Probe& t) {
             const BitStream p = BitStream::seeded(4);
             const auto one = avoid_set_gadget(p, {0});
             t.check(one.a.complement.words() == std::vector<Word>{p.prefix(1)}, "complement is not p(0)");
             t.check(Dyadic(1) - one.complement_measure == Dyadic::pow2(-1), "lambda(A) != 1/2");
             const auto three = avoid_set_gadget(p, {0, 1, 2});
             t.check(three.complement_measure <= dy(7, 3) && three.lower_bound == Dyadic::pow2(-3), "7/8");
         }},
        {"hitting_time", "avoid set excludes every T^v p for v <= 5", [](Probe& t) {
             const BitStream p = BitStream::seeded(5);
             const auto g = avoid_set_gadget(p, values({0, 1, 2, 3, 4, 5}));
             for (std::size_t v = 0; v <= 5; ++v) {
                 const auto s = hit_closed_mindchange(shift(p, v), g.a, 64);
                 t.check(s.events.size() >= 2, "T^" + std::to_string(v) + " p in A");
             }
         }},
        {"hitting_time", "first 11 in 0101101 at index 3", [](Probe& t) {
             const Word head("0101101");
             const auto want = brute_hit(head, {Word("11")});
             const BitStream p = BitStream::concat(head, BitStream::seeded(5));
             t.check(want && hit_clopen(p, CylinderUnion({"11"}), 10) == *want && *want == 3, "index");
         }},
        {"hitting_time", "clopen scan agrees with hit_open", [](Probe& t) {
             std::mt19937_64 rng(53);
             for (int i = 0; i < 50; ++i) {
                 const BitStream p = BitStream::seeded(800 + static_cast<std::uint64_t>(i));
                 const std::size_t m = 1 + rng() % 6;
                 std::vector<Word> words;
                 for (std::size_t k = 0; k < 1 + rng() % 3; ++k) words.push_back(Word::binary(rng(), m));
                 const auto open = hit_open(p, CylinderUnion(words), 4096);
                 t.check(open && hit_clopen(p, CylinderUnion(words), 4096) == open->n, "case " + std::to_string(i));
             }
         }},
    };
}

}  // namespace examples

inline std::vector<ExampleCase> derived_examples() {
    std::vector<ExampleCase> all;
    for (auto part : {examples::cantor_cases(), examples::arith_cases(), examples::ml_cases(),
                      examples::choice_cases(), examples::brownian_cases(), examples::limit_cases(),
                      examples::hitting_cases()}) {
        for (auto& c : part) all.push_back(std::move(c));
    }
    return all;
}

inline ExampleResult run_example(const ExampleCase& c) {
    ExampleResult r{c.module, c.name, false, {}};
    try {
        Probe probe;
        c.run(probe);
        r.pass = probe.failure().empty();
        r.detail = probe.failure();
    } catch (const std::exception& e) {
        r.detail = e.what();
    }
    return r;
}

}  // namespace oracle
