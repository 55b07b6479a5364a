#include "algpath/dyadic.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace algpath {

namespace {

// Strip trailing zero bits of the mantissa into the exponent.
void normalize(Dyadic& d) {
    if (d.mant.is_zero()) {
        d.exp = 0;
        return;
    }
    std::size_t tz = 0;
    while (!d.mant.bit(tz)) ++tz;
    if (tz) {
        d.mant = d.mant.shr(tz);
        d.exp += static_cast<std::int64_t>(tz);
    }
}

}  // namespace

Dyadic::Dyadic(std::int64_t m, std::int64_t e) : mant(m), exp(e) { normalize(*this); }

Dyadic Dyadic::from_double(double d) {
    assert(std::isfinite(d));
    Dyadic r;
    if (d == 0.0) return r;
    int e = 0;
    double m = std::frexp(d, &e);  // d = m * 2^e, |m| in [0.5, 1)
    auto mi = static_cast<std::int64_t>(std::ldexp(m, 53));
    r.mant = BigInt(mi);
    r.exp = e - 53;
    normalize(r);
    return r;
}

std::int64_t Dyadic::top_exp() const {
    assert(!is_zero());
    return exp + static_cast<std::int64_t>(mant.bit_length()) - 1;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Dyadic r;
    if (a.exp == b.exp) {
        r.mant = a.mant + b.mant;
        r.exp = a.exp;
    } else {
        const Dyadic& lo = a.exp < b.exp ? a : b;
        const Dyadic& hi = a.exp < b.exp ? b : a;
        r.mant = hi.mant.shl(static_cast<std::size_t>(hi.exp - lo.exp)) + lo.mant;
        r.exp = lo.exp;
    }
    normalize(r);
    return r;
}

Dyadic Dyadic::operator-() const {
    Dyadic r = *this;
    r.mant = -r.mant;
    return r;
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    Dyadic r;
    r.mant = a.mant * b.mant;
    r.exp = a.is_zero() || b.is_zero() ? 0 : a.exp + b.exp;
    normalize(r);
    return r;
}

Dyadic Dyadic::ldexp2(std::int64_t k) const {
    if (is_zero()) return *this;
    Dyadic r = *this;
    r.exp += k;
    return r;
}

Dyadic Dyadic::abs() const {
    Dyadic r = *this;
    if (r.mant.sign < 0) r.mant.sign = 1;
    return r;
}

Dyadic Dyadic::round(int sig_bits, RoundDir dir) const {
    assert(sig_bits >= 1);
    std::size_t len = mant.bit_length();
    if (len <= static_cast<std::size_t>(sig_bits)) return *this;
    std::size_t drop = len - static_cast<std::size_t>(sig_bits);
    bool sticky = false;
    Dyadic r;
    r.mant = mant.shr(drop, &sticky);
    r.exp = exp + static_cast<std::int64_t>(drop);
    if (sticky) {
        bool bump_mag;
        switch (dir) {
            case RoundDir::Down: bump_mag = (mant.sign < 0); break;
            case RoundDir::Up: bump_mag = (mant.sign > 0); break;
            case RoundDir::Nearest:
            default:
                // Guard-bit rounding; ties cannot occur here since sticky
                // includes the guard bit. Bump when the dropped part >= half.
                bump_mag = mant.bit(drop - 1);
                break;
        }
        if (bump_mag) {
            BigInt one(1);
            one.sign = r.mant.sign;
            r.mant = r.mant + one;
        }
    }
    normalize(r);
    return r;
}

int cmp(const Dyadic& a, const Dyadic& b) {
    if (a.mant.sign != b.mant.sign) return a.mant.sign < b.mant.sign ? -1 : 1;
    if (a.mant.sign == 0) return 0;
    // Same sign: compare leading-bit exponents first.
    std::int64_t ta = a.top_exp(), tb = b.top_exp();
    if (ta != tb) return (ta < tb ? -1 : 1) * a.mant.sign;
    Dyadic d = a - b;
    return d.mant.sign;
}

Dyadic dy_div(const Dyadic& a, const Dyadic& b, int sig_bits, RoundDir dir) {
    if (b.is_zero()) throw std::domain_error("dyadic division by zero");
    if (a.is_zero()) return Dyadic{};
    // Binary long division producing sig_bits + 1 quotient bits plus a sticky
    // remainder flag.
    BigInt num = a.mant;
    num.sign = 1;
    BigInt den = b.mant;
    den.sign = 1;
    std::int64_t num_len = static_cast<std::int64_t>(num.bit_length());
    std::int64_t den_len = static_cast<std::int64_t>(den.bit_length());
    int want = sig_bits + 1;
    // Shift numerator so the integer quotient has at least `want` bits.
    std::int64_t shift = den_len - num_len + want;
    if (shift > 0)
        num = num.shl(static_cast<std::size_t>(shift));
    else
        shift = 0;
    BigInt q;
    q.sign = 1;
    BigInt rem = num;
    std::int64_t qbits = static_cast<std::int64_t>(num.bit_length()) - den_len + 1;
    if (qbits < 1) qbits = 1;
    q.limbs.assign(static_cast<std::size_t>((qbits + 63) / 64), 0);
    for (std::int64_t i = qbits - 1; i >= 0; --i) {
        BigInt shifted = den.shl(static_cast<std::size_t>(i));
        if (BigInt::cmp_mag(rem, shifted) >= 0) {
            rem = rem - shifted;
            q.limbs[static_cast<std::size_t>(i) / 64] |= std::uint64_t(1) << (i % 64);
        }
    }
    while (!q.limbs.empty() && q.limbs.back() == 0) q.limbs.pop_back();
    if (q.limbs.empty()) q.sign = 0;
    bool inexact = !rem.is_zero();
    Dyadic out;
    out.mant = q;
    out.mant.sign = q.is_zero() ? 0 : a.mant.sign * b.mant.sign;
    out.exp = a.exp - b.exp - shift;
    if (inexact) {
        // Fold the sticky remainder into a final half-ulp nudge consistent
        // with the requested direction, then round to sig_bits.
        bool bump_mag;
        switch (dir) {
            case RoundDir::Down: bump_mag = (out.mant.sign < 0); break;
            case RoundDir::Up: bump_mag = (out.mant.sign > 0); break;
            case RoundDir::Nearest:
            default: bump_mag = false; break;  // quotient has a guard bit already
        }
        if (bump_mag && dir != RoundDir::Nearest) {
            // Work on a one-extra-bit mantissa so the nudge stays below 1 ulp
            // of the final precision.
            out.mant = out.mant.shl(1);
            out.exp -= 1;
            BigInt one(1);
            one.sign = out.mant.sign;
            out.mant = out.mant + one;
        }
    }
    normalize(out);
    return out.round(sig_bits, dir);
}

double Dyadic::to_double() const {
    if (is_zero()) return 0.0;
    std::size_t len = mant.bit_length();
    if (len <= 63) {
        double m = static_cast<double>(mant.limbs[0]);
        double v = std::ldexp(m, static_cast<int>(std::max<std::int64_t>(
                                     std::min<std::int64_t>(exp, 40000), -40000)));
        return mant.sign < 0 ? -v : v;
    }
    // Round to odd at 55 bits, then let the uint64->double conversion finish
    // the rounding; two extra bits make the double rounding exact.
    bool sticky = false;
    std::uint64_t top = mant.top_bits(55, &sticky);
    if (sticky) top |= 1;
    std::int64_t e = exp + static_cast<std::int64_t>(len) - 55;
    double m = static_cast<double>(top);
    if (e > 40000) return mant.sign < 0 ? -HUGE_VAL : HUGE_VAL;
    if (e < -40000) e = -40000;
    double v = std::ldexp(m, static_cast<int>(e));
    return mant.sign < 0 ? -v : v;
}

std::string Dyadic::to_string() const {
    return mant.to_string() + "*2^" + std::to_string(exp);
}

}  // namespace algpath
