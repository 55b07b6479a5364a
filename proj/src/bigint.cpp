#include "algpath/bigint.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace algpath {

namespace {

void trim(std::vector<std::uint64_t>& l) {
    while (!l.empty() && l.back() == 0) l.pop_back();
}

// |a| + |b|
std::vector<std::uint64_t> add_mag(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b) {
    const auto& big = a.size() >= b.size() ? a : b;
    const auto& small = a.size() >= b.size() ? b : a;
    std::vector<std::uint64_t> out(big.size() + 1, 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < big.size(); ++i) {
        unsigned __int128 s = carry + big[i] + (i < small.size() ? small[i] : 0);
        out[i] = static_cast<std::uint64_t>(s);
        carry = s >> 64;
    }
    out[big.size()] = static_cast<std::uint64_t>(carry);
    trim(out);
    return out;
}

// |a| - |b|, requires |a| >= |b|
std::vector<std::uint64_t> sub_mag(const std::vector<std::uint64_t>& a,
                                   const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> out(a.size(), 0);
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        unsigned __int128 bi = (i < b.size() ? b[i] : 0);
        unsigned __int128 av = a[i];
        unsigned __int128 sub = bi + (borrow ? 1u : 0u);
        if (av >= sub) {
            out[i] = static_cast<std::uint64_t>(av - sub);
            borrow = 0;
        } else {
            out[i] = static_cast<std::uint64_t>((av + ((unsigned __int128)1 << 64)) - sub);
            borrow = 1;
        }
    }
    assert(borrow == 0);
    trim(out);
    return out;
}

int cmp_mag_vec(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

}  // namespace

BigInt::BigInt(std::int64_t v) {
    if (v == 0) return;
    sign = v < 0 ? -1 : 1;
    std::uint64_t mag = v < 0 ? (~static_cast<std::uint64_t>(v) + 1) : static_cast<std::uint64_t>(v);
    limbs.push_back(mag);
}

BigInt BigInt::from_u64(std::uint64_t v) {
    BigInt r;
    if (v != 0) {
        r.sign = 1;
        r.limbs.push_back(v);
    }
    return r;
}

std::size_t BigInt::bit_length() const {
    if (limbs.empty()) return 0;
    std::uint64_t top = limbs.back();
    std::size_t bits = (limbs.size() - 1) * 64;
    while (top) {
        ++bits;
        top >>= 1;
    }
    return bits;
}

bool BigInt::bit(std::size_t i) const {
    std::size_t limb = i / 64;
    if (limb >= limbs.size()) return false;
    return (limbs[limb] >> (i % 64)) & 1u;
}

int BigInt::cmp_mag(const BigInt& a, const BigInt& b) { return cmp_mag_vec(a.limbs, b.limbs); }

int cmp(const BigInt& a, const BigInt& b) {
    if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
    if (a.sign == 0) return 0;
    return a.sign * cmp_mag_vec(a.limbs, b.limbs);
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    BigInt r;
    if (a.sign == b.sign) {
        r.sign = a.sign;
        r.limbs = add_mag(a.limbs, b.limbs);
    } else {
        int c = cmp_mag_vec(a.limbs, b.limbs);
        if (c == 0) return BigInt{};
        const BigInt& big = c > 0 ? a : b;
        const BigInt& small = c > 0 ? b : a;
        r.sign = big.sign;
        r.limbs = sub_mag(big.limbs, small.limbs);
    }
    if (r.limbs.empty()) r.sign = 0;
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    r.sign = -r.sign;
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.sign == 0 || b.sign == 0) return BigInt{};
    BigInt r;
    r.sign = a.sign * b.sign;
    r.limbs.assign(a.limbs.size() + b.limbs.size(), 0);
    for (std::size_t i = 0; i < a.limbs.size(); ++i) {
        unsigned __int128 carry = 0;
        for (std::size_t j = 0; j < b.limbs.size(); ++j) {
            unsigned __int128 cur = r.limbs[i + j];
            cur += (unsigned __int128)a.limbs[i] * b.limbs[j];
            cur += carry;
            r.limbs[i + j] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        r.limbs[i + b.limbs.size()] += static_cast<std::uint64_t>(carry);
    }
    trim(r.limbs);
    if (r.limbs.empty()) r.sign = 0;
    return r;
}

BigInt BigInt::shl(std::size_t k) const {
    if (sign == 0 || k == 0) return *this;
    BigInt r;
    r.sign = sign;
    std::size_t limb_shift = k / 64, bit_shift = k % 64;
    r.limbs.assign(limbs.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs.size(); ++i) {
        r.limbs[i + limb_shift] |= limbs[i] << bit_shift;
        if (bit_shift) r.limbs[i + limb_shift + 1] |= limbs[i] >> (64 - bit_shift);
    }
    trim(r.limbs);
    return r;
}

BigInt BigInt::shr(std::size_t k, bool* sticky) const {
    if (sticky) *sticky = false;
    if (sign == 0) return *this;
    if (k == 0) return *this;
    std::size_t limb_shift = k / 64, bit_shift = k % 64;
    if (sticky) {
        for (std::size_t i = 0; i < limb_shift && i < limbs.size(); ++i)
            if (limbs[i] != 0) { *sticky = true; break; }
        if (!*sticky && bit_shift && limb_shift < limbs.size())
            if (limbs[limb_shift] & ((std::uint64_t(1) << bit_shift) - 1)) *sticky = true;
    }
    if (limb_shift >= limbs.size()) {
        if (sticky && !limbs.empty()) *sticky = true;
        return BigInt{};
    }
    BigInt r;
    r.limbs.assign(limbs.size() - limb_shift, 0);
    for (std::size_t i = 0; i < r.limbs.size(); ++i) {
        r.limbs[i] = limbs[i + limb_shift] >> bit_shift;
        if (bit_shift && i + limb_shift + 1 < limbs.size())
            r.limbs[i] |= limbs[i + limb_shift + 1] << (64 - bit_shift);
    }
    trim(r.limbs);
    r.sign = r.limbs.empty() ? 0 : sign;
    return r;
}

std::uint64_t BigInt::top_bits(unsigned n, bool* sticky) const {
    assert(n <= 64);
    std::size_t len = bit_length();
    if (len <= n) {
        if (sticky) *sticky = false;
        std::uint64_t v = 0;
        for (std::size_t i = len; i-- > 0;)
            v = (v << 1) | (bit(i) ? 1u : 0u);
        return v;
    }
    bool st = false;
    BigInt t = shr(len - n, &st);
    if (sticky) *sticky = st;
    return t.limbs.empty() ? 0 : t.limbs[0];
}

std::string BigInt::to_string() const {
    if (sign == 0) return "0";
    // Repeated division by 1e18; slow path, diagnostics only.
    std::vector<std::uint64_t> work = limbs;
    std::string out;
    const std::uint64_t base = 1000000000000000000ull;
    while (!work.empty()) {
        unsigned __int128 rem = 0;
        for (std::size_t i = work.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | work[i];
            work[i] = static_cast<std::uint64_t>(cur / base);
            rem = cur % base;
        }
        trim(work);
        std::string chunk = std::to_string(static_cast<std::uint64_t>(rem));
        if (!work.empty())
            chunk = std::string(18 - chunk.size(), '0') + chunk;
        out = chunk + out;
    }
    return (sign < 0 ? "-" : "") + out;
}

}  // namespace algpath
