#pragma once
// oracle.hpp - independent high-precision reference values (MPFR via Boost.Multiprecision).
// Used by the tests, the acceptance run and the CLI's oracle-suite; the library never links MPFR.

#include <boost/multiprecision/mpfr.hpp>

#include <layerwise/brownian.hpp>
#include <layerwise/interval.hpp>

namespace oracle {

// 80 decimal digits, about 266 bits.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<80>>;

inline Real to_real(const layerwise::Dyadic& x) {
    Real r(x.numerator().get_str());
    return boost::multiprecision::ldexp(r, static_cast<int>(-x.exponent()));
}

/// The exact dyadic value of an MPFR number.
inline layerwise::Dyadic to_dyadic(const Real& r) {
    mpz_class z;
    const long e = mpfr_get_z_2exp(z.get_mpz_t(), r.backend().data());
    return layerwise::Dyadic(z, -e);
}

/// Interval of half-width 2^-250 * max(1, |v|) around v; absorbs the oracle's own rounding.
inline layerwise::Interval fuzz(const Real& v) {
    const Real mag = boost::multiprecision::abs(v) > 1 ? Real(boost::multiprecision::abs(v)) : Real(1);
    const Real eps = boost::multiprecision::ldexp(mag, -250);
    return {to_dyadic(v - eps), to_dyadic(v + eps)};
}

/// True when x overlaps the fuzzed oracle value.
inline bool encloses(const layerwise::Interval& x, const Real& v) { return x.overlaps(fuzz(v)); }

inline Real cdf(const Real& x) { return boost::multiprecision::erfc(-x / boost::multiprecision::sqrt(Real(2))) / 2; }

/// Inverse CDF by bisection on the oracle CDF; accurate to about 2^-200.
inline Real quantile(const Real& a) {
    Real lo = -40;
    Real hi = 40;
    for (int i = 0; i < 220; ++i) {
        const Real mid = (lo + hi) / 2;
        if (cdf(mid) < a) lo = mid; else hi = mid;
    }
    return (lo + hi) / 2;
}

/// g at the midpoint of the element's cylinder: inside every eta enclosure of that word.
inline Real midpoint_eta(const layerwise::Word& w) {
    const layerwise::Dyadic mid = w.as_fraction() + layerwise::Dyadic::pow2(-static_cast<std::int64_t>(w.size()) - 1);
    return quantile(to_real(mid));
}

/// Truncated Schauder series at t from stage-k elements, with MPFR tents and midpoint etas.
inline Real phi_series_midpoint(const layerwise::BitStream& p, const layerwise::Dyadic& t, std::size_t k) {
    const Real tr = to_real(t);
    Real sum = midpoint_eta(layerwise::alpha_element(p, 0, k)) * tr;
    const auto chain = layerwise::chain_elements(t);
    for (std::size_t l = 1; l < chain.size(); ++l) {
        const int j = static_cast<int>(l) - 1;
        const Real width = boost::multiprecision::ldexp(Real(1), -j);
        const Real left = width * Real(static_cast<unsigned long>(chain[l] - (std::size_t{1} << j)));
        const Real dist = boost::multiprecision::min(Real(tr - left), Real(left + width - tr));
        const Real delta = boost::multiprecision::pow(Real(2), Real(j) / 2) * dist;
        sum += midpoint_eta(layerwise::alpha_element(p, chain[l], k)) * delta;
    }
    return sum;
}

}  // namespace oracle
