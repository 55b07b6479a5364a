#ifndef ALGPATH_INTERVAL_HPP
#define ALGPATH_INTERVAL_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "algpath/scalar.hpp"

namespace algpath {

// ---------------------------------------------------------------------------
// Complex points (unchecked arithmetic)
// ---------------------------------------------------------------------------

template <class N>
struct CPoint {
    N re{}, im{};
};

template <class N>
using PointVec = std::vector<CPoint<N>>;

template <class N>
struct PointMat {
    std::size_t n = 0;
    std::vector<CPoint<N>> data;  // row-major n x n

    PointMat() = default;
    explicit PointMat(std::size_t dim) : n(dim), data(dim * dim) {}
    CPoint<N>& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
    const CPoint<N>& at(std::size_t i, std::size_t j) const { return data[i * n + j]; }

    static PointMat identity(std::size_t dim) {
        PointMat m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i).re = ScalarOps<N>::one();
        return m;
    }
};

template <class N>
CPoint<N> cp_add(const CPoint<N>& a, const CPoint<N>& b, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::add_n(a.re, b.re, ctx), S::add_n(a.im, b.im, ctx)};
}

template <class N>
CPoint<N> cp_sub(const CPoint<N>& a, const CPoint<N>& b, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::sub_n(a.re, b.re, ctx), S::sub_n(a.im, b.im, ctx)};
}

template <class N>
CPoint<N> cp_mul(const CPoint<N>& a, const CPoint<N>& b, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::sub_n(S::mul_n(a.re, b.re, ctx), S::mul_n(a.im, b.im, ctx), ctx),
            S::add_n(S::mul_n(a.re, b.im, ctx), S::mul_n(a.im, b.re, ctx), ctx)};
}

template <class N>
CPoint<N> cp_neg(const CPoint<N>& a) {
    using S = ScalarOps<N>;
    return {S::sub_n(S::zero(), a.re, PrecisionContext{}), S::sub_n(S::zero(), a.im, PrecisionContext{})};
}

// Smith's formula; denominators scaled by the dominant part.
template <class N>
CPoint<N> cp_div(const CPoint<N>& a, const CPoint<N>& b, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    N abs_re = S::abs(b.re), abs_im = S::abs(b.im);
    if (S::cmp(abs_re, abs_im) >= 0) {
        if (S::cmp(abs_re, S::zero()) == 0) throw SingularJacobian();
        N r = S::div_n(b.im, b.re, ctx);
        N den = S::add_n(b.re, S::mul_n(b.im, r, ctx), ctx);
        return {S::div_n(S::add_n(a.re, S::mul_n(a.im, r, ctx), ctx), den, ctx),
                S::div_n(S::sub_n(a.im, S::mul_n(a.re, r, ctx), ctx), den, ctx)};
    }
    N r = S::div_n(b.re, b.im, ctx);
    N den = S::add_n(S::mul_n(b.re, r, ctx), b.im, ctx);
    return {S::div_n(S::add_n(S::mul_n(a.re, r, ctx), a.im, ctx), den, ctx),
            S::div_n(S::sub_n(S::mul_n(a.im, r, ctx), a.re, ctx), den, ctx)};
}

// Real infinity-norm of a complex point: max(|re|, |im|).
template <class N>
N cp_norm(const CPoint<N>& a) {
    using S = ScalarOps<N>;
    N r = S::abs(a.re), i = S::abs(a.im);
    return S::cmp(r, i) >= 0 ? r : i;
}

template <class N>
N point_norm(const PointVec<N>& v) {
    using S = ScalarOps<N>;
    N m = S::zero();
    for (const auto& c : v) {
        N n = cp_norm(c);
        if (S::cmp(n, m) > 0) m = n;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Real intervals
// ---------------------------------------------------------------------------

template <class N>
struct RealInterval {
    N lo{}, hi{};

    RealInterval() = default;
    RealInterval(N l, N h) : lo(std::move(l)), hi(std::move(h)) {}
    static RealInterval singleton(const N& v) { return RealInterval(v, v); }
};

template <class N>
bool is_bounded(const RealInterval<N>& x) {
    using S = ScalarOps<N>;
    return S::is_finite(x.lo) && S::is_finite(x.hi);
}

template <class N>
bool contains(const RealInterval<N>& x, const N& v) {
    using S = ScalarOps<N>;
    return S::cmp(x.lo, v) <= 0 && S::cmp(v, x.hi) <= 0;
}

template <class N>
RealInterval<N> whole_line() {
    if constexpr (std::is_same_v<N, double>) {
        return RealInterval<N>(-ScalarOps<double>::kInf, ScalarOps<double>::kInf);
    } else {
        throw std::logic_error("unbounded interval is not representable in this backend");
    }
}

template <class N>
RealInterval<N> iadd(const RealInterval<N>& x, const RealInterval<N>& y, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::add_down(x.lo, y.lo, ctx), S::add_up(x.hi, y.hi, ctx)};
}

template <class N>
RealInterval<N> isub(const RealInterval<N>& x, const RealInterval<N>& y, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::sub_down(x.lo, y.hi, ctx), S::sub_up(x.hi, y.lo, ctx)};
}

template <class N>
RealInterval<N> ineg(const RealInterval<N>& x) {
    using S = ScalarOps<N>;
    PrecisionContext c;  // negation is exact
    return {S::sub_n(S::zero(), x.hi, c), S::sub_n(S::zero(), x.lo, c)};
}

template <class N>
RealInterval<N> imul(const RealInterval<N>& x, const RealInterval<N>& y, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    if constexpr (std::is_same_v<N, double>) {
        if (!is_bounded(x) || !is_bounded(y)) return whole_line<N>();
    }
    N lo = S::mul_down(x.lo, y.lo, ctx);
    N hi = S::mul_up(x.lo, y.lo, ctx);
    auto widen = [&](const N& a, const N& b) {
        N d = S::mul_down(a, b, ctx);
        N u = S::mul_up(a, b, ctx);
        if (S::cmp(d, lo) < 0) lo = d;
        if (S::cmp(u, hi) > 0) hi = u;
    };
    widen(x.lo, y.hi);
    widen(x.hi, y.lo);
    widen(x.hi, y.hi);
    return {lo, hi};
}

// Enclosure of 1/r for a representable r > 0.
template <class N>
RealInterval<N> irecip_pos(const N& r, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::recip_down(r, ctx), S::recip_up(r, ctx)};
}

// ---------------------------------------------------------------------------
// Complex boxes
// ---------------------------------------------------------------------------

template <class N>
struct ComplexBox {
    RealInterval<N> re, im;

    ComplexBox() = default;
    ComplexBox(RealInterval<N> r, RealInterval<N> i) : re(std::move(r)), im(std::move(i)) {}
    static ComplexBox singleton(const CPoint<N>& p) {
        return ComplexBox(RealInterval<N>::singleton(p.re), RealInterval<N>::singleton(p.im));
    }
};

template <class N>
bool is_bounded(const ComplexBox<N>& z) {
    return is_bounded(z.re) && is_bounded(z.im);
}

template <class N>
bool contains(const ComplexBox<N>& z, const CPoint<N>& p) {
    return contains(z.re, p.re) && contains(z.im, p.im);
}

template <class N>
ComplexBox<N> cadd(const ComplexBox<N>& z, const ComplexBox<N>& w, const PrecisionContext& ctx) {
    return {iadd(z.re, w.re, ctx), iadd(z.im, w.im, ctx)};
}

template <class N>
ComplexBox<N> csub(const ComplexBox<N>& z, const ComplexBox<N>& w, const PrecisionContext& ctx) {
    return {isub(z.re, w.re, ctx), isub(z.im, w.im, ctx)};
}

template <class N>
ComplexBox<N> cneg(const ComplexBox<N>& z) {
    return {ineg(z.re), ineg(z.im)};
}

template <class N>
ComplexBox<N> cmul(const ComplexBox<N>& z, const ComplexBox<N>& w, const PrecisionContext& ctx) {
    return {isub(imul(z.re, w.re, ctx), imul(z.im, w.im, ctx), ctx),
            iadd(imul(z.re, w.im, ctx), imul(z.im, w.re, ctx), ctx)};
}

// Magnitude sup over one complex box: exact (absolute values of representable
// endpoints are representable).
template <class N>
N box_mag(const ComplexBox<N>& z) {
    using S = ScalarOps<N>;
    N m = S::abs(z.re.lo);
    for (const N* e : {&z.re.hi, &z.im.lo, &z.im.hi}) {
        N a = S::abs(*e);
        if (S::cmp(a, m) > 0) m = a;
    }
    return m;
}

template <class N>
N box_width(const ComplexBox<N>& z, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    N wr = S::sub_up(z.re.hi, z.re.lo, ctx);
    N wi = S::sub_up(z.im.hi, z.im.lo, ctx);
    return S::cmp(wr, wi) >= 0 ? wr : wi;
}

// ---------------------------------------------------------------------------
// Box vectors and matrices
// ---------------------------------------------------------------------------

template <class N>
using BoxVector = std::vector<ComplexBox<N>>;

template <class N>
struct BoxMatrix {
    std::size_t n = 0;
    std::vector<ComplexBox<N>> data;  // row-major n x n

    BoxMatrix() = default;
    explicit BoxMatrix(std::size_t dim) : n(dim), data(dim * dim) {}
    ComplexBox<N>& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
    const ComplexBox<N>& at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

template <class N>
bool is_bounded(const BoxVector<N>& v) {
    for (const auto& z : v)
        if (!is_bounded(z)) return false;
    return true;
}

template <class N>
N width(const BoxVector<N>& v, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    N m = S::zero();
    for (const auto& z : v) {
        N w = box_width(z, ctx);
        if (S::cmp(w, m) > 0) m = w;
    }
    return m;
}

template <class N>
N magnitude(const BoxVector<N>& v) {
    using S = ScalarOps<N>;
    N m = S::zero();
    for (const auto& z : v) {
        N a = box_mag(z);
        if (S::cmp(a, m) > 0) m = a;
    }
    return m;
}

template <class N>
CPoint<N> box_mid(const ComplexBox<N>& z, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    return {S::midpoint2(z.re.lo, z.re.hi, ctx), S::midpoint2(z.im.lo, z.im.hi, ctx)};
}

template <class N>
PointVec<N> midpoint(const BoxVector<N>& v, const PrecisionContext& ctx) {
    PointVec<N> out;
    out.reserve(v.size());
    for (const auto& z : v) out.push_back(box_mid(z, ctx));
    return out;
}

// Hausdorff distance between interval endpoints: max over components and
// re/im parts of max(|lo-lo'|, |hi-hi'|), rounded up.
template <class N>
N hausdorff(const BoxVector<N>& x, const BoxVector<N>& y, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    if (x.size() != y.size()) throw std::invalid_argument("hausdorff: dimension mismatch");
    auto abs_diff_up = [&](const N& a, const N& b) {
        N d1 = S::sub_up(a, b, ctx);
        N d2 = S::sub_up(b, a, ctx);
        return S::cmp(d1, d2) >= 0 ? d1 : d2;
    };
    N m = S::zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (auto [a, b] : {std::pair{&x[i].re, &y[i].re}, std::pair{&x[i].im, &y[i].im}}) {
            N d = abs_diff_up(a->lo, b->lo);
            if (S::cmp(d, m) > 0) m = d;
            d = abs_diff_up(a->hi, b->hi);
            if (S::cmp(d, m) > 0) m = d;
        }
    }
    return m;
}

template <class N>
BoxVector<N> mat_vec(const BoxMatrix<N>& m, const BoxVector<N>& v, const PrecisionContext& ctx) {
    if (m.n != v.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
    BoxVector<N> out(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        ComplexBox<N> acc = cmul(m.at(i, 0), v[0], ctx);
        for (std::size_t j = 1; j < m.n; ++j)
            acc = cadd(acc, cmul(m.at(i, j), v[j], ctx), ctx);
        out[i] = acc;
    }
    return out;
}

// Point matrix applied to a box vector (entries taken as singleton boxes).
template <class N>
BoxVector<N> pmat_vec(const PointMat<N>& a, const BoxVector<N>& v, const PrecisionContext& ctx) {
    if (a.n != v.size()) throw std::invalid_argument("pmat_vec: dimension mismatch");
    BoxVector<N> out(a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        ComplexBox<N> acc = cmul(ComplexBox<N>::singleton(a.at(i, 0)), v[0], ctx);
        for (std::size_t j = 1; j < a.n; ++j)
            acc = cadd(acc, cmul(ComplexBox<N>::singleton(a.at(i, j)), v[j], ctx), ctx);
        out[i] = acc;
    }
    return out;
}

// I - A * E for a point matrix A and box matrix E.
template <class N>
BoxMatrix<N> identity_minus_pmat_bmat(const PointMat<N>& a, const BoxMatrix<N>& e,
                                      const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    if (a.n != e.n) throw std::invalid_argument("identity_minus: dimension mismatch");
    BoxMatrix<N> out(a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t j = 0; j < a.n; ++j) {
            ComplexBox<N> acc = cmul(ComplexBox<N>::singleton(a.at(i, 0)), e.at(0, j), ctx);
            for (std::size_t k = 1; k < a.n; ++k)
                acc = cadd(acc, cmul(ComplexBox<N>::singleton(a.at(i, k)), e.at(k, j), ctx), ctx);
            CPoint<N> id{};
            if (i == j) id.re = S::one();
            out.at(i, j) = csub(ComplexBox<N>::singleton(id), acc, ctx);
        }
    }
    return out;
}

// The closed unit ball of the real infinity norm: every component
// [-1,1] + [-1,1]i.
template <class N>
BoxVector<N> unit_ball(std::size_t n) {
    using S = ScalarOps<N>;
    N mone = ScalarOps<N>::from_int(-1);
    RealInterval<N> u(mone, S::one());
    return BoxVector<N>(n, ComplexBox<N>(u, u));
}

// x + rB componentwise, outward rounded.
template <class N>
BoxVector<N> ball_around(const PointVec<N>& x, const N& r, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    BoxVector<N> out;
    out.reserve(x.size());
    for (const auto& c : x) {
        out.push_back(ComplexBox<N>(
            RealInterval<N>(S::sub_down(c.re, r, ctx), S::add_up(c.re, r, ctx)),
            RealInterval<N>(S::sub_down(c.im, r, ctx), S::add_up(c.im, r, ctx))));
    }
    return out;
}

template <class N>
BoxVector<N> singleton_vec(const PointVec<N>& x) {
    BoxVector<N> out;
    out.reserve(x.size());
    for (const auto& c : x) out.push_back(ComplexBox<N>::singleton(c));
    return out;
}

}  // namespace algpath

#endif
