#ifndef ALGPATH_DYADIC_HPP
#define ALGPATH_DYADIC_HPP

#include <cstdint>
#include <string>

#include "algpath/bigint.hpp"

namespace algpath {

enum class RoundDir { Down, Up, Nearest };

// Dyadic rational mant * 2^exp with arbitrary-size mantissa. Normalized so
// that the mantissa is odd (or zero, with exp == 0). Arithmetic is exact;
// precision control happens through explicit rounding to a significand width.
struct Dyadic {
    BigInt mant;
    std::int64_t exp = 0;

    Dyadic() = default;
    Dyadic(std::int64_t m, std::int64_t e);  // m * 2^e
    static Dyadic from_double(double d);     // d must be finite
    static Dyadic one_shl(std::int64_t e) { return Dyadic(1, e); }  // 2^e

    bool is_zero() const { return mant.is_zero(); }
    int sign() const { return mant.sign; }
    // Exponent of the leading bit: value in [2^e, 2^(e+1)) for e = top_exp().
    std::int64_t top_exp() const;

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    Dyadic operator-() const;

    Dyadic ldexp2(std::int64_t k) const;  // exact scale by 2^k
    Dyadic abs() const;

    // Round to at most `sig_bits` significand bits in the given direction.
    Dyadic round(int sig_bits, RoundDir dir) const;

    double to_double() const;  // round to nearest
    std::string to_string() const;

    friend int cmp(const Dyadic& a, const Dyadic& b);
};

int cmp(const Dyadic& a, const Dyadic& b);

// Quotient a/b rounded to `sig_bits` significand bits. b must be nonzero.
Dyadic dy_div(const Dyadic& a, const Dyadic& b, int sig_bits, RoundDir dir);

inline bool operator==(const Dyadic& a, const Dyadic& b) { return cmp(a, b) == 0; }
inline bool operator!=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) != 0; }
inline bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
inline bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
inline bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
inline bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }

}  // namespace algpath

#endif
