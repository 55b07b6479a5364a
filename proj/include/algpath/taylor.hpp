#ifndef ALGPATH_TAYLOR_HPP
#define ALGPATH_TAYLOR_HPP

#include "algpath/circuit.hpp"
#include "algpath/interval.hpp"

namespace algpath {

// Order-nu Taylor model in one variable eta on a domain interval containing
// 0: a polynomial a_0 + a_1 eta + ... + a_{nu+1} eta^{nu+1} with complex box
// coefficients. The top coefficient absorbs truncation remainders.
template <class N>
struct TaylorModel {
    std::vector<ComplexBox<N>> coeffs;  // order + 2 entries
    RealInterval<N> domain;             // contains 0
    int order = 0;

    TaylorModel() = default;
    TaylorModel(RealInterval<N> dom, int nu)
        : coeffs(static_cast<std::size_t>(nu) + 2), domain(std::move(dom)), order(nu) {}

    static TaylorModel constant(const ComplexBox<N>& c, const RealInterval<N>& dom, int nu) {
        TaylorModel m(dom, nu);
        m.coeffs[0] = c;
        return m;
    }
};

namespace detail {
template <class N>
void require_compatible(const TaylorModel<N>& p, const TaylorModel<N>& q) {
    using S = ScalarOps<N>;
    if (p.order != q.order) throw std::invalid_argument("taylor: order mismatch");
    if (S::cmp(p.domain.lo, q.domain.lo) != 0 || S::cmp(p.domain.hi, q.domain.hi) != 0)
        throw std::invalid_argument("taylor: domain mismatch");
}
}  // namespace detail

template <class N>
TaylorModel<N> tm_add(const TaylorModel<N>& p, const TaylorModel<N>& q, const PrecisionContext& ctx) {
    detail::require_compatible(p, q);
    TaylorModel<N> r(p.domain, p.order);
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = cadd(p.coeffs[i], q.coeffs[i], ctx);
    return r;
}

// Order reduction: replace a_nu eta^nu + a_{nu+1} eta^{nu+1} by
// (a_nu + a_{nu+1} * I) eta^nu, I the domain.
template <class N>
TaylorModel<N> squeeze(const TaylorModel<N>& p, const PrecisionContext& ctx) {
    if (p.order < 0 || p.coeffs.size() < 2) throw std::invalid_argument("squeeze: nothing to fold");
    TaylorModel<N> r(p.domain, p.order - 1);
    for (std::size_t i = 0; i + 2 < p.coeffs.size(); ++i) r.coeffs[i] = p.coeffs[i];
    ComplexBox<N> dom_box(p.domain, RealInterval<N>::singleton(ScalarOps<N>::zero()));
    std::size_t top = p.coeffs.size() - 1;
    r.coeffs[top - 1] = cadd(p.coeffs[top - 1], cmul(p.coeffs[top], dom_box, ctx), ctx);
    return r;
}

// Interval convolution to order 2*nu+1 followed by nu+1 squeezes.
template <class N>
TaylorModel<N> tm_mul(const TaylorModel<N>& p, const TaylorModel<N>& q, const PrecisionContext& ctx) {
    detail::require_compatible(p, q);
    const int nu = p.order;
    TaylorModel<N> full(p.domain, 2 * nu + 1);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        for (std::size_t j = 0; j < q.coeffs.size(); ++j) {
            ComplexBox<N> prod = cmul(p.coeffs[i], q.coeffs[j], ctx);
            full.coeffs[i + j] = cadd(full.coeffs[i + j], prod, ctx);
        }
    }
    TaylorModel<N> r = std::move(full);
    for (int k = 0; k < nu + 1; ++k) r = squeeze(r, ctx);
    return r;
}

// Horner evaluation over a subinterval J of the domain.
template <class N>
ComplexBox<N> tm_range(const TaylorModel<N>& p, const RealInterval<N>& j, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    if (S::cmp(j.lo, p.domain.lo) < 0 || S::cmp(j.hi, p.domain.hi) > 0)
        throw std::invalid_argument("tm_range: interval outside the model domain");
    ComplexBox<N> jbox(j, RealInterval<N>::singleton(S::zero()));
    ComplexBox<N> acc = p.coeffs.back();
    for (std::size_t i = p.coeffs.size() - 1; i-- > 0;)
        acc = cadd(cmul(acc, jbox, ctx), p.coeffs[i], ctx);
    return acc;
}

template <class N>
ComplexBox<N> tm_eval_point(const TaylorModel<N>& p, const N& e, const PrecisionContext& ctx) {
    return tm_range(p, RealInterval<N>::singleton(e), ctx);
}

// Coefficientwise scaling by a constant box (constant in eta); order
// unchanged, no squeezing needed.
template <class N>
TaylorModel<N> tm_scale(const ComplexBox<N>& c, const TaylorModel<N>& p, const PrecisionContext& ctx) {
    TaylorModel<N> r(p.domain, p.order);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) r.coeffs[i] = cmul(c, p.coeffs[i], ctx);
    return r;
}

// ---------------------------------------------------------------------------
// Circuit evaluation domain
// ---------------------------------------------------------------------------

template <class N>
struct TmDomain {
    using value_type = TaylorModel<N>;
    PrecisionContext ctx;
    RealInterval<N> domain;
    int order;

    value_type from_const(double re, double im) const {
        using S = ScalarOps<N>;
        ComplexBox<N> c(RealInterval<N>::singleton(S::from_double(re)),
                        RealInterval<N>::singleton(S::from_double(im)));
        return TaylorModel<N>::constant(c, domain, order);
    }
    value_type add(const value_type& a, const value_type& b) const { return tm_add(a, b, ctx); }
    value_type mul(const value_type& a, const value_type& b) const { return tm_mul(a, b, ctx); }
};

// The model t + eta used to specialize the parameter input.
template <class N>
TaylorModel<N> tm_parameter(const N& t, const RealInterval<N>& dom, int order) {
    using S = ScalarOps<N>;
    TaylorModel<N> m(dom, order);
    m.coeffs[0] = ComplexBox<N>(RealInterval<N>::singleton(t),
                                RealInterval<N>::singleton(S::zero()));
    m.coeffs[1] = ComplexBox<N>(RealInterval<N>::singleton(S::one()),
                                RealInterval<N>::singleton(S::zero()));
    return m;
}

}  // namespace algpath

#endif
