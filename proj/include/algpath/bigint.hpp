#ifndef ALGPATH_BIGINT_HPP
#define ALGPATH_BIGINT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace algpath {

// Sign-magnitude arbitrary-size integer. Little-endian 64-bit limbs,
// no leading zero limb, sign == 0 iff value == 0.
struct BigInt {
    int sign = 0;
    std::vector<std::uint64_t> limbs;

    BigInt() = default;
    explicit BigInt(std::int64_t v);
    static BigInt from_u64(std::uint64_t v);

    bool is_zero() const { return sign == 0; }
    // Number of bits of the magnitude; 0 for zero.
    std::size_t bit_length() const;
    bool bit(std::size_t i) const;

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    BigInt operator-() const;

    // Shift magnitude; sign preserved.
    BigInt shl(std::size_t k) const;
    // Right shift of the magnitude. If `sticky` is given, receives true when
    // any dropped bit was nonzero.
    BigInt shr(std::size_t k, bool* sticky = nullptr) const;

    // -1, 0, +1 by signed value.
    friend int cmp(const BigInt& a, const BigInt& b);
    static int cmp_mag(const BigInt& a, const BigInt& b);

    // Top `n` bits of the magnitude as an integer (n <= 64).
    std::uint64_t top_bits(unsigned n, bool* sticky) const;

    std::string to_string() const;  // decimal, for diagnostics
};

int cmp(const BigInt& a, const BigInt& b);

inline bool operator==(const BigInt& a, const BigInt& b) { return cmp(a, b) == 0; }
inline bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }

}  // namespace algpath

#endif
