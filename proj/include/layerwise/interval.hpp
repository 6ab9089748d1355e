#pragma once
// interval.hpp - outward-rounded dyadic interval arithmetic and certified
// sqrt / log / exp / pi / sqrt(2) enclosures.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <ostream>
#include <string>

#include "dyadic.hpp"
#include "error.hpp"

namespace layerwise {

/// Requested accuracy: results aim for width <= 2^-target_width_exponent.
/// max_work bounds iterative refinement loops (bisection steps, series terms, escalations).
struct Precision {
    std::int64_t target_width_exponent = 20;
    std::size_t max_work = 4096;

    [[nodiscard]] Precision refined(std::int64_t extra_bits) const {
        return {target_width_exponent + extra_bits, max_work};
    }
};

class Interval {
public:
    Interval() = default;
    Interval(Dyadic point) : lo_(point), hi_(std::move(point)) {}  // NOLINT(google-explicit-constructor)
    Interval(int point) : Interval(Dyadic(point)) {}                // NOLINT(google-explicit-constructor)
    Interval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (hi_ < lo_) fail(ErrorCode::InvalidArgument, "interval with lo > hi");
    }

    [[nodiscard]] const Dyadic& lo() const noexcept { return lo_; }
    [[nodiscard]] const Dyadic& hi() const noexcept { return hi_; }
    [[nodiscard]] Dyadic width() const { return hi_ - lo_; }
    [[nodiscard]] Dyadic midpoint() const { return (lo_ + hi_).scaled(-1); }
    [[nodiscard]] bool is_point() const { return lo_ == hi_; }

    [[nodiscard]] bool contains(const Dyadic& x) const { return lo_ <= x && x <= hi_; }
    [[nodiscard]] bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    [[nodiscard]] bool overlaps(const Interval& o) const { return !(hi_ < o.lo_ || o.hi_ < lo_); }
    [[nodiscard]] bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }

    /// Rounds endpoints outward onto the grid 2^-bits.
    [[nodiscard]] Interval rounded(std::int64_t bits) const {
        return {lo_.floor_to(bits), hi_.ceil_to(bits)};
    }
    /// Rounds endpoints outward keeping `bits` significant bits.
    [[nodiscard]] Interval rounded_rel(std::int64_t bits) const {
        return {lo_.floor_rel(bits), hi_.ceil_rel(bits)};
    }
    [[nodiscard]] Interval scaled(std::int64_t k) const { return {lo_.scaled(k), hi_.scaled(k)}; }

    [[nodiscard]] Interval operator-() const { return {-hi_, -lo_}; }
    friend Interval operator+(const Interval& a, const Interval& b) {
        return {a.lo_ + b.lo_, a.hi_ + b.hi_};
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return {a.lo_ - b.hi_, a.hi_ - b.lo_};
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        if (a.lo_.sign() >= 0 && b.lo_.sign() >= 0) return {a.lo_ * b.lo_, a.hi_ * b.hi_};
        Dyadic c[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
        return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    }
    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

    [[nodiscard]] std::string to_string() const {
        return "[" + lo_.to_string() + ", " + hi_.to_string() + "]";
    }
    friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
        return os << "[" << x.lo_.to_double() << ", " << x.hi_.to_double() << "]";
    }

private:
    Dyadic lo_;
    Dyadic hi_;
};

inline Interval hull(const Interval& a, const Interval& b) {
    return {min(a.lo(), b.lo()), max(a.hi(), b.hi())};
}

inline Interval abs(const Interval& x) {
    if (x.lo().sign() >= 0) return x;
    if (x.hi().sign() <= 0) return -x;
    return {Dyadic(), max(-x.lo(), x.hi())};
}

inline Interval iv_add(const Interval& a, const Interval& b) { return a + b; }
inline Interval iv_sub(const Interval& a, const Interval& b) { return a - b; }
inline Interval iv_mul(const Interval& a, const Interval& b) { return a * b; }
inline Interval iv_scale_pow2(const Interval& x, std::int64_t k) { return x.scaled(k); }

namespace detail {

// floor / ceil of (a / b) on the grid 2^-bits, b != 0.
inline Dyadic quotient(const Dyadic& a, const Dyadic& b, std::int64_t bits, bool up) {
    // a/b = (an / bn) * 2^(be - ae); scale numerator by 2^(bits + be - ae).
    mpz_class n = a.numerator();
    mpz_class d = b.numerator();
    const std::int64_t shift = bits + b.exponent() - a.exponent();
    if (shift >= 0) mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    else mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    mpz_class q;
    if (up) mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    else mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return Dyadic(std::move(q), bits);
}

inline mpz_class isqrt_ceil(const mpz_class& n) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    if (r * r < n) ++r;
    return r;
}

}  // namespace detail

/// Outward-rounded quotient on the grid 2^-bits. Divisor must not contain zero.
inline Interval iv_div(const Interval& a, const Interval& b, std::int64_t bits) {
    if (b.contains_zero()) fail(ErrorCode::InvalidArgument, "division by interval containing zero");
    const Dyadic cands[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()}, {a.hi(), b.lo()}, {a.hi(), b.hi()}};
    Dyadic lo = detail::quotient(cands[0][0], cands[0][1], bits, false);
    Dyadic hi = detail::quotient(cands[0][0], cands[0][1], bits, true);
    for (int i = 1; i < 4; ++i) {
        lo = min(lo, detail::quotient(cands[i][0], cands[i][1], bits, false));
        hi = max(hi, detail::quotient(cands[i][0], cands[i][1], bits, true));
    }
    return {lo, hi};
}

inline Interval iv_div(const Interval& a, long divisor, std::int64_t bits) {
    return iv_div(a, Interval(Dyadic(divisor)), bits);
}

/// Enclosure of sqrt(x); the negative part of a straddling interval is clipped.
inline Interval iv_sqrt(const Interval& x, const Precision& prec) {
    if (x.hi().sign() < 0) fail(ErrorCode::NegativeDomain, "sqrt of " + x.to_string());
    const std::int64_t p = prec.target_width_exponent + 2;
    auto root = [p](const Dyadic& v, bool up) {
        if (v.sign() <= 0) return Dyadic();
        // sqrt(v) * 2^p = sqrt(v * 2^(2p))
        const Dyadic scaled = v.scaled(2 * p);
        if (up) return Dyadic(detail::isqrt_ceil(scaled.ceil_int()), p);
        mpz_class r;
        const mpz_class f = scaled.floor_int();
        mpz_sqrt(r.get_mpz_t(), f.get_mpz_t());
        return Dyadic(std::move(r), p);
    };
    return {root(x.lo(), false), root(x.hi(), true)};
}

namespace detail {

// 2 * atanh(z) = 2 * sum z^(2i+1) / (2i+1) for a point-ish interval |z| <= 1/2.
inline Interval two_atanh(const Interval& z, std::int64_t bits, std::size_t max_terms) {
    const Dyadic zmax = max(abs(z.lo()), abs(z.hi()));
    const Interval z2 = (z * z).rounded(bits + 8);
    Interval power = z;
    Interval sum(0);
    const Dyadic eps = Dyadic::pow2(-(bits + 4));
    for (std::size_t i = 0; i < max_terms; ++i) {
        const long denom = static_cast<long>(2 * i + 1);
        sum += iv_div(power, denom, bits + 8);
        power = (power * z2).rounded(bits + 8);
        // Remaining terms: |z|^(2i+3) / ((2i+3)(1 - z^2)) <= 2 |z|^(2i+3) since |z| <= 1/2.
        const Dyadic pmax = max(abs(power.lo()), abs(power.hi()));
        if (pmax <= eps || zmax.is_zero()) {
            const Dyadic tail = pmax.scaled(1);
            sum += Interval(-tail, tail);
            return sum.scaled(1);
        }
    }
    fail(ErrorCode::WorkBudgetExhausted, "atanh series did not converge");
}

}  // namespace detail

/// ln 2 enclosure of width about 2^-bits, cached per precision.
inline Interval ln2_enclosure(std::int64_t bits) {
    static std::mutex mu;
    static std::map<std::int64_t, Interval> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(bits); it != cache.end()) return it->second;
    // ln 2 = 2 atanh(1/3)
    const Interval third = iv_div(Interval(1), 3L, bits + 8);
    Interval v = detail::two_atanh(third, bits + 4, 100000).rounded(bits + 2);
    cache.emplace(bits, v);
    return v;
}

/// Natural logarithm, monotone endpoint evaluation.
inline Interval iv_log(const Interval& x, const Precision& prec) {
    if (x.lo().sign() <= 0) fail(ErrorCode::NonpositiveDomain, "log of " + x.to_string());
    auto at = [&](const Dyadic& a) -> Interval {
        // a = f * 2^k with f in [1/sqrt2, sqrt2)
        std::int64_t k = a.log2_floor();
        Dyadic f = a.scaled(-k);  // [1, 2)
        if (f > Dyadic(mpz_class(181), 7)) {  // 181/128 > sqrt 2 - 0.0002; any split near sqrt2 works
            f = f.scaled(-1);
            ++k;
        }
        const std::int64_t kbits = k == 0 ? 0 : Dyadic(static_cast<long>(k < 0 ? -k : k)).log2_floor() + 1;
        const std::int64_t bits = prec.target_width_exponent + 8 + kbits;
        const Interval z = iv_div(Interval(f - Dyadic(1)), Interval(f + Dyadic(1)), bits + 4);
        Interval r = detail::two_atanh(z, bits + 2, prec.max_work);
        if (k != 0) r += ln2_enclosure(bits + 2) * Interval(Dyadic(static_cast<long>(k)));
        return r;
    };
    const std::int64_t out = prec.target_width_exponent + 2;
    if (x.is_point()) return at(x.lo()).rounded(out);
    return Interval(at(x.lo()).lo(), at(x.hi()).hi()).rounded(out);
}

/// exp(x) with about `prec.target_width_exponent` significant bits (relative accuracy).
inline Interval iv_exp(const Interval& x, const Precision& prec) {
    auto at = [&](const Dyadic& y) -> Interval {
        if (y.is_zero()) return Interval(1);
        // r = y / 2^s with |r| <= 1/2, exp(y) = exp(r)^(2^s)
        const std::int64_t s = std::max<std::int64_t>(0, y.log2_floor() + 2);
        const Dyadic r = y.scaled(-s);
        const std::int64_t bits = prec.target_width_exponent + s + 12;
        Interval sum(1);
        Interval term(1);
        const Dyadic eps = Dyadic::pow2(-(bits + 2));
        bool done = false;
        for (std::size_t n = 1; n <= prec.max_work; ++n) {
            term = iv_div(term * Interval(r), static_cast<long>(n), bits + 4);
            sum += term;
            const Dyadic tmax = max(abs(term.lo()), abs(term.hi()));
            if (tmax <= eps) {
                // Tail after term n is at most |term_n| * sum (1/2)^i <= 2 |term_n|.
                const Dyadic tail = tmax.scaled(1);
                sum += Interval(-tail, tail);
                done = true;
                break;
            }
        }
        if (!done) fail(ErrorCode::WorkBudgetExhausted, "exp series did not converge");
        sum = sum.rounded(bits + 4);
        for (std::int64_t i = 0; i < s; ++i) sum = (sum * sum).rounded_rel(bits + 4);
        return sum;
    };
    const std::int64_t out = prec.target_width_exponent + 4;
    if (x.is_point()) return at(x.lo()).rounded_rel(out);
    return Interval(at(x.lo()).lo(), at(x.hi()).hi()).rounded_rel(out);
}

namespace detail {

// floor(pi * 2^128) and floor(sqrt(2) * 2^128).
inline const char* const kPiFloor128 = "1069028584064966747859680373161870783300";
inline const char* const kSqrt2Floor128 = "481231938336009023090067544955250113854";

// atan(1/m) for integer m >= 2 on the grid 2^-bits.
inline Interval atan_inv(long m, std::int64_t bits) {
    const Interval x = iv_div(Interval(1), m, bits + 8);
    const Interval x2 = (x * x).rounded(bits + 8);
    Interval power = x;
    Interval sum(0);
    const Dyadic eps = Dyadic::pow2(-(bits + 4));
    for (long i = 0;; ++i) {
        Interval term = iv_div(power, 2 * i + 1, bits + 8);
        sum += (i % 2 == 0) ? term : -term;
        power = (power * x2).rounded(bits + 8);
        if (power.hi() <= eps) {
            // alternating with decreasing terms: |tail| <= next term
            sum += Interval(-power.hi(), power.hi());
            return sum;
        }
    }
}

}  // namespace detail

/// pi enclosure of width <= 2^-bits; 128-bit table, Machin's formula beyond.
inline Interval pi_enclosure(std::int64_t bits) {
    if (bits <= 126) {
        const Dyadic lo(mpz_class(detail::kPiFloor128), 128);
        return Interval(lo, lo + Dyadic::pow2(-128)).rounded(bits);
    }
    static std::mutex mu;
    static std::map<std::int64_t, Interval> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(bits); it != cache.end()) return it->second;
    // pi = 16 atan(1/5) - 4 atan(1/239)
    Interval v = (detail::atan_inv(5, bits + 8).scaled(4) - detail::atan_inv(239, bits + 8).scaled(2))
                     .rounded(bits + 2);
    cache.emplace(bits, v);
    return v;
}

/// sqrt(2) enclosure of width <= 2^-bits.
inline Interval sqrt2_enclosure(std::int64_t bits) {
    if (bits <= 126) {
        const Dyadic lo(mpz_class(detail::kSqrt2Floor128), 128);
        return Interval(lo, lo + Dyadic::pow2(-128)).rounded(bits);
    }
    return iv_sqrt(Interval(2), Precision{bits});
}

/// 2^(-j/2) for any integer j >= 0; exact for even j.
inline Interval pow2_half(std::int64_t j, std::int64_t bits) {
    if (j % 2 == 0) return Interval(Dyadic::pow2(-j / 2));
    // 2^(-j/2) = 2^(-(j+1)/2) * sqrt 2
    return sqrt2_enclosure(bits + j).scaled(-(j + 1) / 2);
}

}  // namespace layerwise
