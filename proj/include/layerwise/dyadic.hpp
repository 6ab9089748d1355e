#pragma once
// dyadic.hpp - exact dyadic rationals m * 2^-e over GMP integers.

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>

#include "error.hpp"

namespace layerwise {

/// Exact value numerator * 2^-exponent. Canonical: numerator odd, or zero with exponent 0.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long value) : num_(value) { canonicalize(); }  // NOLINT(google-explicit-constructor)
    Dyadic(int value) : num_(value) { canonicalize(); }   // NOLINT(google-explicit-constructor)
    Dyadic(mpz_class numerator, std::int64_t exponent)
        : num_(std::move(numerator)), exp_(exponent) {
        canonicalize();
    }

    static Dyadic pow2(std::int64_t k) { return Dyadic(mpz_class(1), -k); }

    [[nodiscard]] const mpz_class& numerator() const noexcept { return num_; }
    [[nodiscard]] std::int64_t exponent() const noexcept { return exp_; }
    [[nodiscard]] int sign() const noexcept { return sgn(num_); }
    [[nodiscard]] bool is_zero() const noexcept { return num_ == 0; }

    /// floor(log2 |x|) for x != 0.
    [[nodiscard]] std::int64_t log2_floor() const {
        if (is_zero()) fail(ErrorCode::InvalidArgument, "log2_floor of zero");
        return static_cast<std::int64_t>(mpz_sizeinbase(num_.get_mpz_t(), 2)) - 1 - exp_;
    }

    [[nodiscard]] Dyadic scaled(std::int64_t k) const {  // x * 2^k
        if (is_zero()) return {};
        return Dyadic(num_, exp_ - k);
    }

    [[nodiscard]] Dyadic operator-() const { return Dyadic(-num_, exp_); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.exp_ == b.exp_) return Dyadic(a.num_ + b.num_, a.exp_);
        if (a.exp_ > b.exp_) return Dyadic(a.num_ + shl(b.num_, a.exp_ - b.exp_), a.exp_);
        return Dyadic(shl(a.num_, b.exp_ - a.exp_) + b.num_, b.exp_);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_);
    }
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        const int c = cmp(a.aligned_with(b), b.aligned_with(a));
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    /// Largest multiple of 2^-bits that is <= *this.
    [[nodiscard]] Dyadic floor_to(std::int64_t bits) const {
        if (exp_ <= bits) return *this;
        mpz_class q;
        mpz_fdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_ - bits));
        return Dyadic(std::move(q), bits);
    }
    /// Smallest multiple of 2^-bits that is >= *this.
    [[nodiscard]] Dyadic ceil_to(std::int64_t bits) const {
        if (exp_ <= bits) return *this;
        mpz_class q;
        mpz_cdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_ - bits));
        return Dyadic(std::move(q), bits);
    }
    /// Round toward -inf keeping at most `bits` significant bits.
    [[nodiscard]] Dyadic floor_rel(std::int64_t bits) const {
        if (is_zero()) return *this;
        return floor_to(bits - 1 - log2_floor());
    }
    [[nodiscard]] Dyadic ceil_rel(std::int64_t bits) const {
        if (is_zero()) return *this;
        return ceil_to(bits - 1 - log2_floor());
    }

    [[nodiscard]] mpz_class floor_int() const {
        if (exp_ <= 0) return shl(num_, -exp_);
        mpz_class q;
        mpz_fdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
        return q;
    }
    [[nodiscard]] mpz_class ceil_int() const {
        if (exp_ <= 0) return shl(num_, -exp_);
        mpz_class q;
        mpz_cdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
        return q;
    }

    [[nodiscard]] mpq_class to_rational() const {
        mpq_class q;
        if (exp_ >= 0) {
            q = mpq_class(num_, shl(mpz_class(1), exp_));
        } else {
            q = mpq_class(shl(num_, -exp_));
        }
        q.canonicalize();
        return q;
    }

    /// Nearest double (informational only; never used in a certified path).
    [[nodiscard]] double to_double() const {
        if (is_zero()) return 0.0;
        long e2 = 0;
        const double mant = mpz_get_d_2exp(&e2, num_.get_mpz_t());
        return std::ldexp(mant, static_cast<int>(e2 - exp_));
    }

    /// "m/2^e" with e >= 0 when the value is not an integer, otherwise the integer.
    [[nodiscard]] std::string to_string() const {
        if (exp_ <= 0) return floor_int().get_str();
        return num_.get_str() + "/2^" + std::to_string(exp_);
    }

    /// Decimal with `digits` fractional digits, rounded toward -inf (or +inf when round_up).
    [[nodiscard]] std::string to_decimal(int digits, bool round_up = false) const {
        mpz_class ten_pow;
        mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(digits));
        const mpq_class scaled = to_rational() * ten_pow;
        mpz_class q;
        if (round_up) mpz_cdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
        else mpz_fdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
        const bool negative = q < 0;
        std::string s = mpz_class(abs(q)).get_str();
        if (digits > 0) {
            if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
            s.insert(s.size() - static_cast<std::size_t>(digits), ".");
        }
        return negative ? "-" + s : s;
    }

    /// floor(q * 2^bits) * 2^-bits.
    static Dyadic floor_of(const mpq_class& q, std::int64_t bits) {
        return Dyadic(scaled_div(q, bits, false), bits);
    }
    static Dyadic ceil_of(const mpq_class& q, std::int64_t bits) {
        return Dyadic(scaled_div(q, bits, true), bits);
    }

    /// Parses "m" or "m/2^e".
    static Dyadic parse(const std::string& text) {
        const auto slash = text.find("/2^");
        try {
            if (slash != std::string::npos) {
                return Dyadic(mpz_class(text.substr(0, slash)),
                              std::stoll(text.substr(slash + 3)));
            }
            return Dyadic(mpz_class(text), 0);
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, "not a dyadic literal: " + text);
        }
    }

private:
    static mpz_class shl(const mpz_class& x, std::int64_t k) {
        mpz_class r;
        mpz_mul_2exp(r.get_mpz_t(), x.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
        return r;
    }

    static mpz_class scaled_div(const mpq_class& q, std::int64_t bits, bool up) {
        mpz_class n = q.get_num();
        mpz_class d = q.get_den();
        if (bits >= 0) n = shl(n, bits); else d = shl(d, -bits);
        mpz_class r;
        if (up) mpz_cdiv_q(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        else mpz_fdiv_q(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
        return r;
    }

    [[nodiscard]] mpz_class aligned_with(const Dyadic& other) const {
        return other.exp_ > exp_ ? shl(num_, other.exp_ - exp_) : num_;
    }

    void canonicalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        const auto tz = mpz_scan1(num_.get_mpz_t(), 0);
        if (tz > 0) {
            mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), tz);
            exp_ -= static_cast<std::int64_t>(tz);
        }
    }

    mpz_class num_{0};
    std::int64_t exp_ = 0;
};

inline Dyadic abs(const Dyadic& x) { return x.sign() < 0 ? -x : x; }
inline const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

}  // namespace layerwise
