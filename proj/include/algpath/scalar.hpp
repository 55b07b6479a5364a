#ifndef ALGPATH_SCALAR_HPP
#define ALGPATH_SCALAR_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

#include "algpath/dyadic.hpp"

namespace algpath {

struct PrecisionExhausted : std::runtime_error {
    PrecisionExhausted() : std::runtime_error("working precision cannot be raised") {}
    explicit PrecisionExhausted(const char* what) : std::runtime_error(what) {}
};

struct StepBudgetExceeded : std::runtime_error {
    explicit StepBudgetExceeded(const char* what) : std::runtime_error(what) {}
};

struct SingularJacobian : std::runtime_error {
    SingularJacobian() : std::runtime_error("numerically singular Jacobian") {}
};

enum class PrecMode { Fixed64, Dyadic };

// Working-precision descriptor passed to every interval operation.
//
// Fixed64 is hardware binary64 with outward rounding; its per-operation
// bound constant is 2^-51 (one ulp of the top binade for operands in
// [-M, M], see the rounding notes in interval.hpp). Dyadic rounds outward
// at bits+1 significand bits so that the contract u_prec = 2^(1-bits)
// holds with a strict inequality.
struct PrecisionContext {
    PrecMode mode = PrecMode::Fixed64;
    int bits = 53;              // significand bits (Dyadic only)
    int max_bits = 1 << 16;     // safety limit for precision raising

    static PrecisionContext fixed64() { return PrecisionContext{PrecMode::Fixed64, 53, 1 << 16}; }
    static PrecisionContext dyadic(int bits) { return PrecisionContext{PrecMode::Dyadic, bits, 1 << 16}; }

    double u_prec() const {
        if (mode == PrecMode::Fixed64) return 0x1p-51;
        return std::ldexp(1.0, 1 - bits);  // may underflow to 0 for display only
    }

    // Doubling policy: strictly decreases u_prec. Fixed64 cannot be raised.
    PrecisionContext raised() const {
        if (mode == PrecMode::Fixed64) throw PrecisionExhausted("fixed 64-bit precision cannot be raised");
        if (bits > max_bits / 2) throw PrecisionExhausted("dyadic precision limit reached");
        PrecisionContext c = *this;
        c.bits = bits * 2;
        return c;
    }
};

template <class N>
struct ScalarOps;  // specialized below for double and Dyadic

// ---------------------------------------------------------------------------
// Fixed64 backend: IEEE binary64 endpoints with exact directed rounding.
// Error-free transformations (2Sum / fma) recover the rounding error sign, so
// each endpoint is the correctly rounded directed result except in the
// subnormal range, where we fall back to a one-ulp outward nudge.
// ---------------------------------------------------------------------------
template <>
struct ScalarOps<double> {
    using num = double;
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static constexpr double kMax = std::numeric_limits<double>::max();

    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_double(double d) { return d; }
    static double from_int(long v) { return static_cast<double>(v); }
    static double to_double(double d) { return d; }
    static bool is_finite(double d) { return std::isfinite(d); }
    static double pos_inf() { return kInf; }
    static double abs(double d) { return std::fabs(d); }
    static int cmp(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }
    static double ldexp2(double a, long k) { return std::ldexp(a, static_cast<int>(k)); }

    static double cap_down(double s) {
        if (std::isnan(s)) return -kInf;
        if (s == kInf) return kMax;  // exact value exceeds the format
        return s;
    }
    static double cap_up(double s) {
        if (std::isnan(s)) return kInf;
        if (s == -kInf) return -kMax;
        return s;
    }

    static double add_down(double a, double b, const PrecisionContext&) {
        double s = a + b;
        if (!std::isfinite(s)) return cap_down(s);
        double t = s - a;
        double err = (a - (s - t)) + (b - t);
        if (!std::isfinite(err)) return std::nextafter(s, -kInf);
        return err < 0 ? std::nextafter(s, -kInf) : s;
    }
    static double add_up(double a, double b, const PrecisionContext&) {
        double s = a + b;
        if (!std::isfinite(s)) return cap_up(s);
        double t = s - a;
        double err = (a - (s - t)) + (b - t);
        if (!std::isfinite(err)) return std::nextafter(s, kInf);
        return err > 0 ? std::nextafter(s, kInf) : s;
    }
    static double sub_down(double a, double b, const PrecisionContext& c) { return add_down(a, -b, c); }
    static double sub_up(double a, double b, const PrecisionContext& c) { return add_up(a, -b, c); }

    static double mul_down(double a, double b, const PrecisionContext&) {
        double p = a * b;
        if (!std::isfinite(p)) return cap_down(p);
        if (std::fabs(p) < 0x1p-1000) return p == 0.0 && exact_zero(a, b) ? 0.0 : std::nextafter(p, -kInf);
        double err = std::fma(a, b, -p);
        return err < 0 ? std::nextafter(p, -kInf) : p;
    }
    static double mul_up(double a, double b, const PrecisionContext&) {
        double p = a * b;
        if (!std::isfinite(p)) return cap_up(p);
        if (std::fabs(p) < 0x1p-1000) return p == 0.0 && exact_zero(a, b) ? 0.0 : std::nextafter(p, kInf);
        double err = std::fma(a, b, -p);
        return err > 0 ? std::nextafter(p, kInf) : p;
    }

    // Reciprocal endpoints; callers only pass r > 0.
    static double recip_down(double r, const PrecisionContext&) {
        double q = 1.0 / r;
        if (!std::isfinite(q)) return cap_down(q);
        double resid = std::fma(q, r, -1.0);
        // resid > 0 means q*r > 1 i.e. q too large.
        return resid > 0 ? std::nextafter(q, -kInf) : q;
    }
    static double recip_up(double r, const PrecisionContext&) {
        double q = 1.0 / r;
        if (!std::isfinite(q)) return cap_up(q);
        double resid = std::fma(q, r, -1.0);
        if (resid < 0) return std::nextafter(q, kInf);
        return q;
    }

    // Unchecked point arithmetic.
    static double add_n(double a, double b, const PrecisionContext&) { return a + b; }
    static double sub_n(double a, double b, const PrecisionContext&) { return a - b; }
    static double mul_n(double a, double b, const PrecisionContext&) { return a * b; }
    static double div_n(double a, double b, const PrecisionContext&) { return a / b; }

    static double midpoint2(double lo, double hi, const PrecisionContext&) {
        double m = lo + 0.5 * (hi - lo);
        if (!std::isfinite(m)) m = 0.5 * lo + 0.5 * hi;
        if (m < lo) m = lo;
        if (m > hi) m = hi;
        return m;
    }

    static double u_prec(const PrecisionContext&) { return 0x1p-51; }
    static bool u_prec_leq(const PrecisionContext& ctx, double bound) { return u_prec(ctx) <= bound; }

private:
    static bool exact_zero(double a, double b) { return a == 0.0 || b == 0.0; }
};

// ---------------------------------------------------------------------------
// Dyadic backend: exact bigint arithmetic rounded outward at bits+1
// significand bits. One guard bit keeps every directed result within
// M * u_prec of the exact endpoint for operands in [-M, M].
// ---------------------------------------------------------------------------
template <>
struct ScalarOps<Dyadic> {
    using num = Dyadic;

    static Dyadic zero() { return Dyadic{}; }
    static Dyadic one() { return Dyadic(1, 0); }
    static Dyadic from_double(double d) { return Dyadic::from_double(d); }
    static Dyadic from_int(long v) { return Dyadic(v, 0); }
    static double to_double(const Dyadic& d) { return d.to_double(); }
    static bool is_finite(const Dyadic&) { return true; }
    static Dyadic pos_inf() = delete;  // dyadic values never overflow
    static Dyadic abs(const Dyadic& d) { return d.abs(); }
    static int cmp(const Dyadic& a, const Dyadic& b) { return algpath::cmp(a, b); }
    static Dyadic ldexp2(const Dyadic& a, long k) { return a.ldexp2(k); }

    static int round_bits(const PrecisionContext& ctx) { return ctx.bits + 1; }

    static Dyadic add_down(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a + b).round(round_bits(ctx), RoundDir::Down);
    }
    static Dyadic add_up(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a + b).round(round_bits(ctx), RoundDir::Up);
    }
    static Dyadic sub_down(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a - b).round(round_bits(ctx), RoundDir::Down);
    }
    static Dyadic sub_up(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a - b).round(round_bits(ctx), RoundDir::Up);
    }
    static Dyadic mul_down(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a * b).round(round_bits(ctx), RoundDir::Down);
    }
    static Dyadic mul_up(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a * b).round(round_bits(ctx), RoundDir::Up);
    }
    static Dyadic recip_down(const Dyadic& r, const PrecisionContext& ctx) {
        return dy_div(one(), r, round_bits(ctx), RoundDir::Down);
    }
    static Dyadic recip_up(const Dyadic& r, const PrecisionContext& ctx) {
        return dy_div(one(), r, round_bits(ctx), RoundDir::Up);
    }

    static Dyadic add_n(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a + b).round(ctx.bits, RoundDir::Nearest);
    }
    static Dyadic sub_n(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a - b).round(ctx.bits, RoundDir::Nearest);
    }
    static Dyadic mul_n(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return (a * b).round(ctx.bits, RoundDir::Nearest);
    }
    static Dyadic div_n(const Dyadic& a, const Dyadic& b, const PrecisionContext& ctx) {
        return dy_div(a, b, ctx.bits, RoundDir::Nearest);
    }

    static Dyadic midpoint2(const Dyadic& lo, const Dyadic& hi, const PrecisionContext& ctx) {
        Dyadic m = (lo + hi).ldexp2(-1).round(4 * ctx.bits, RoundDir::Down);
        if (m < lo) return lo;
        if (m > hi) return hi;
        return m;
    }

    static Dyadic u_prec(const PrecisionContext& ctx) { return Dyadic::one_shl(1 - ctx.bits); }
    static bool u_prec_leq(const PrecisionContext& ctx, const Dyadic& bound) {
        return u_prec(ctx) <= bound;
    }
};

}  // namespace algpath

#endif
