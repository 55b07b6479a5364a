#ifndef ALGPATH_TESTS_CONFORMANCE_HPP
#define ALGPATH_TESTS_CONFORMANCE_HPP

#include <cstdint>
#include <string>

#include "algpath/homotopy.hpp"
#include "algpath/interval.hpp"
#include "rational.hpp"

namespace algpath::testsupport {

// Exact unit roundoff of a context as a rational.
inline Rat u_prec_rat(const PrecisionContext& ctx) {
    if (ctx.mode == PrecMode::Fixed64) return Rat::pow2(-51);
    return Rat::pow2(1 - ctx.bits);
}

template <class N>
Rat endpoint_rat(const N& v) {
    if constexpr (std::is_same_v<N, double>) {
        return Rat::from_double(v);
    } else {
        return Rat::from_dyadic(v);
    }
}

struct ConformanceReport {
    long checked = 0;
    long enclosure_violations = 0;
    long bound_violations = 0;
    bool ok() const { return enclosure_violations == 0 && bound_violations == 0; }
};

// Draws `samples` random interval pairs in [-M, M] and verifies, in exact
// rational arithmetic, both the enclosure property and the adaptive-precision
// error bounds: add within M*u_prec, mul within M^2*u_prec of the exact
// endpoints.
template <class N>
ConformanceReport check_addmul_conformance(const PrecisionContext& ctx, double m, int samples,
                                           std::uint64_t seed) {
    using S = ScalarOps<N>;
    SplitMix64 rng(seed);
    auto draw = [&] { return (2 * rng.uniform01() - 1) * m; };
    ConformanceReport rep;
    const Rat u = u_prec_rat(ctx);
    const Rat m_rat = Rat::from_double(m);
    const Rat add_tol = m_rat * u;
    const Rat mul_tol = m_rat * m_rat * u;
    for (int i = 0; i < samples; ++i) {
        double a = draw(), b = draw(), c = draw(), d = draw();
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        RealInterval<N> x(S::from_double(a), S::from_double(b));
        RealInterval<N> y(S::from_double(c), S::from_double(d));
        Rat ra = Rat::from_double(a), rb = Rat::from_double(b);
        Rat rc = Rat::from_double(c), rd = Rat::from_double(d);

        ++rep.checked;
        {
            RealInterval<N> s = iadd(x, y, ctx);
            Rat lo = endpoint_rat(s.lo), hi = endpoint_rat(s.hi);
            Rat exact_lo = ra + rc, exact_hi = rb + rd;
            if (!(lo <= exact_lo && exact_hi <= hi)) ++rep.enclosure_violations;
            if (!((exact_lo - lo) <= add_tol && (hi - exact_hi) <= add_tol)) ++rep.bound_violations;
        }
        {
            RealInterval<N> p = imul(x, y, ctx);
            Rat lo = endpoint_rat(p.lo), hi = endpoint_rat(p.hi);
            Rat exact_lo = rat_min4(ra * rc, ra * rd, rb * rc, rb * rd);
            Rat exact_hi = rat_max4(ra * rc, ra * rd, rb * rc, rb * rd);
            if (!(lo <= exact_lo && exact_hi <= hi)) ++rep.enclosure_violations;
            if (!((exact_lo - lo) <= mul_tol && (hi - exact_hi) <= mul_tol)) ++rep.bound_violations;
        }
    }
    return rep;
}

}  // namespace algpath::testsupport

#endif
