#pragma once
// normal.hpp - certified enclosures of the standard normal CDF and its inverse.
//
// |x| <= 4: Taylor series of the CDF around 0 with a geometric remainder bound.
// |x| > 4:  the tail pair phi(x)(1/x - 1/x^3) <= 1 - CDF(x) <= phi(x)/x.
// The quantile bisects on a fixed dyadic grid over [-64, 64]; because the grid and the
// CDF precision depend only on `prec`, the result is monotone in its argument, so
// nested input intervals give nested quantile enclosures.

#include <map>
#include <mutex>

#include "interval.hpp"

namespace layerwise {

namespace detail {

/// 1/sqrt(2 pi) on the grid 2^-bits.
inline Interval inv_sqrt_two_pi(std::int64_t bits) {
    static std::mutex mu;
    static std::map<std::int64_t, Interval> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(bits); it != cache.end()) return it->second;
    const Interval two_pi = pi_enclosure(bits + 8).scaled(1);
    const Interval root = iv_sqrt(two_pi, Precision{bits + 8});
    Interval v = iv_div(Interval(1), root, bits + 4);
    cache.emplace(bits, v);
    return v;
}

inline const Dyadic& quantile_bracket() {
    static const Dyadic b(64);
    return b;
}

inline const Dyadic& taylor_limit() {
    static const Dyadic four(4);
    return four;
}

// CDF at a dyadic point via the alternating Taylor series.
inline Interval cdf_taylor(const Dyadic& u, std::int64_t bits, std::size_t max_terms) {
    const Dyadic u2 = u * u;
    const std::int64_t w = bits + 16;  // u^2 <= 16 costs at most ~12 bits to cancellation
    Interval power(u);                // u^(2n+1) / (2^n n!)
    Interval sum(0);
    const Dyadic eps = Dyadic::pow2(-(bits + 2));
    for (std::size_t n = 0; n < max_terms; ++n) {
        const Interval term = iv_div(power, static_cast<long>(2 * n + 1), w);
        sum += (n % 2 == 0) ? term : -term;
        power = iv_div(power * Interval(u2), static_cast<long>(2 * (n + 1)), w);
        // Once 2(n+1) >= 2u^2 the ratio of consecutive |power| is <= 1/2: tail <= 2 |power|.
        const Dyadic pmax = max(abs(power.lo()), abs(power.hi()));
        if (Dyadic(static_cast<long>(n + 1)) >= u2 && pmax <= eps) {
            const Dyadic tail = pmax.scaled(1);
            sum += Interval(-tail, tail);
            return Interval(Dyadic(mpz_class(1), 1)) + sum * inv_sqrt_two_pi(w);
        }
    }
    fail(ErrorCode::WorkBudgetExhausted, "normal CDF series budget exhausted");
}

// Upper tail Q(u) = 1 - CDF(u) for u > 4, relative accuracy ~ 2^-bits on each bound.
inline Interval upper_tail(const Dyadic& u, std::int64_t bits, std::size_t max_work) {
    const Interval uu(u);
    const Interval density =
        iv_exp(Interval(-(u * u).scaled(-1)), Precision{bits + 4, max_work}) * inv_sqrt_two_pi(bits + 8);
    const Interval inv_u = iv_div(Interval(1), uu, bits + 8);
    const Interval inv_u3 = iv_div(Interval(1), uu * uu * uu, bits + 8);
    const Interval lower = density * (inv_u - inv_u3);
    const Interval upper = density * inv_u;
    return Interval(lower.lo(), upper.hi()).rounded_rel(bits + 4);
}

inline Interval clamp_unit(const Interval& x) {
    const Dyadic zero;
    const Dyadic one(1);
    return {max(zero, min(one, x.lo())), max(zero, min(one, x.hi()))};
}

inline Interval cdf_point_uncached(const Dyadic& u, const Precision& prec) {
    const std::int64_t bits = prec.target_width_exponent + 4;
    if (abs(u) <= taylor_limit()) {
        return clamp_unit(cdf_taylor(u, bits + 24, prec.max_work).rounded(bits + 24));
    }
    const Interval tail = upper_tail(abs(u), bits + 24, prec.max_work);
    if (u.sign() < 0) return clamp_unit(tail);
    // 1 - tail keeps the tail's relative accuracy on a grid capped at 8192 extra bits.
    const std::int64_t depth = tail.hi().is_zero() ? 0 : -tail.hi().log2_floor();
    const std::int64_t grid = bits + 24 + std::clamp<std::int64_t>(depth, 0, 8192);
    const Interval coarse(tail.lo().floor_to(grid), tail.hi().ceil_to(grid));
    return clamp_unit(Interval(1) - coarse);
}

/// Memoised on coarse points: every quantile bisection from the fixed bracket visits the
/// same first midpoints, all with exponent <= 10.
inline Interval cdf_point(const Dyadic& u, const Precision& prec) {
    if (u.exponent() > 10 || abs(u) > quantile_bracket()) return cdf_point_uncached(u, prec);
    static std::mutex mu;
    static std::map<std::pair<std::int64_t, Dyadic>, Interval> cache;
    const std::pair<std::int64_t, Dyadic> key{prec.target_width_exponent, u};
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Interval v = cdf_point_uncached(u, prec);
    std::lock_guard lock(mu);
    cache.emplace(key, v);
    return v;
}

}  // namespace detail

/// Enclosure of the standard normal CDF over x. For |x| > 4 the width is governed by the
/// tail pair and may exceed 2^-prec.
inline Interval normal_cdf(const Interval& x, const Precision& prec) {
    if (x.is_point()) return detail::cdf_point(x.lo(), prec);
    return {detail::cdf_point(x.lo(), prec).lo(), detail::cdf_point(x.hi(), prec).hi()};
}

namespace detail {

// Largest grid point x with CDF(x) <= a certified (so x <= g(a)), or the smallest grid
// point with CDF(x) >= a certified (so x >= g(a)).
inline Dyadic quantile_bound(const Dyadic& a, bool upper, const Precision& prec) {
    const std::int64_t grid = prec.target_width_exponent + 2;
    const Precision cdf_prec = prec.refined(12);
    auto pred = [&](const Dyadic& x) {
        const Interval c = cdf_point(x, cdf_prec);
        return upper ? c.lo() >= a : c.hi() <= a;
    };
    Dyadic left = -quantile_bracket();
    Dyadic right = quantile_bracket();
    if (upper) {
        if (pred(left)) return left;
        if (!pred(right)) fail(ErrorCode::WorkBudgetExhausted, "quantile beyond bracket at " + a.to_string());
    } else {
        if (pred(right)) return right;
        if (!pred(left)) fail(ErrorCode::WorkBudgetExhausted, "quantile beyond bracket at " + a.to_string());
    }
    const Dyadic step = Dyadic::pow2(-grid);
    std::size_t work = 0;
    while (right - left > step && work++ < prec.max_work) {
        const Dyadic mid = (left + right).scaled(-1);
        if (pred(mid) != upper) left = mid; else right = mid;
    }
    return upper ? right : left;
}

}  // namespace detail

/// Enclosure of g(u) = CDF^-1(u) for every u in a. Requires 0 < a.lo <= a.hi < 1.
inline Interval normal_quantile(const Interval& a, const Precision& prec) {
    if (a.lo().sign() <= 0 || a.hi() >= Dyadic(1)) {
        fail(ErrorCode::DomainNotInUnitInterval, "quantile argument " + a.to_string());
    }
    return {detail::quantile_bound(a.lo(), false, prec), detail::quantile_bound(a.hi(), true, prec)};
}

}  // namespace layerwise
