#ifndef ALGPATH_MOORE_HPP
#define ALGPATH_MOORE_HPP

#include "algpath/circuit.hpp"
#include "algpath/interval.hpp"

namespace algpath {

// A contraction certificate for a regular zero: if certify(...) holds, the
// ball x + rB contains a unique zero of the system.
template <class N>
struct MooreBox {
    PointVec<N> x;
    N r{};
    PointMat<N> A;
    double rho = 0.875;

    std::size_t dim() const { return x.size(); }
};

// Interval view of a tracking system at a fixed parameter enclosure
// (or none, for non-parametric systems).
template <class N>
struct SystemView {
    const TrackingSystem* sys = nullptr;
    std::optional<ComplexBox<N>> param;

    BoxVector<N> f(const BoxVector<N>& x, const PrecisionContext& ctx) const {
        return eval_f_box(*sys, param, x, ctx);
    }
    BoxMatrix<N> df(const BoxVector<N>& x, const PrecisionContext& ctx) const {
        return eval_df_box(*sys, param, x, ctx);
    }
};

template <class N>
SystemView<N> view_at(const TrackingSystem& sys, const N& t) {
    using S = ScalarOps<N>;
    SystemView<N> v{&sys, std::nullopt};
    if (sys.parametric)
        v.param = ComplexBox<N>(RealInterval<N>::singleton(t),
                                RealInterval<N>::singleton(S::zero()));
    return v;
}

template <class N>
SystemView<N> view_over(const TrackingSystem& sys, const RealInterval<N>& t_range) {
    using S = ScalarOps<N>;
    if (!sys.parametric) throw std::logic_error("view_over: system is not parametric");
    return SystemView<N>{&sys, ComplexBox<N>(t_range, RealInterval<N>::singleton(S::zero()))};
}

// K = -r^{-1} A f(x) + (I - A df(x + rB)) B, computed in interval
// arithmetic. The reciprocal of r enters through a two-sided enclosure.
template <class N, class FBox, class DFBox>
BoxVector<N> krawczyk_image(FBox&& f_box, DFBox&& df_box, const PointVec<N>& x, const N& r,
                            const PointMat<N>& a, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    const std::size_t n = x.size();
    BoxVector<N> fx = f_box(singleton_vec(x));
    BoxVector<N> afx = pmat_vec(a, fx, ctx);
    ComplexBox<N> neg_rinv(ineg(irecip_pos(r, ctx)),
                           RealInterval<N>::singleton(S::zero()));
    BoxMatrix<N> e = df_box(ball_around(x, r, ctx));
    BoxMatrix<N> g = identity_minus_pmat_bmat(a, e, ctx);
    BoxVector<N> gb = mat_vec(g, unit_ball<N>(n), ctx);
    BoxVector<N> k(n);
    for (std::size_t i = 0; i < n; ++i)
        k[i] = cadd(cmul(neg_rinv, afx[i], ctx), gb[i], ctx);
    return k;
}

template <class N>
BoxVector<N> krawczyk_image(const SystemView<N>& view, const PointVec<N>& x, const N& r,
                            const PointMat<N>& a, const PrecisionContext& ctx) {
    return krawczyk_image(
        [&](const BoxVector<N>& b) { return view.f(b, ctx); },
        [&](const BoxVector<N>& b) { return view.df(b, ctx); }, x, r, a, ctx);
}

// Moore's criterion: one-sided test. True certifies existence and uniqueness
// of a zero in x + rB; unbounded intermediates fail the test.
template <class N, class FBox, class DFBox>
bool certify(FBox&& f_box, DFBox&& df_box, const PointVec<N>& x, const N& r, const PointMat<N>& a,
             double rho, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    BoxVector<N> k = krawczyk_image(std::forward<FBox>(f_box), std::forward<DFBox>(df_box), x, r,
                                    a, ctx);
    if (!is_bounded(k)) return false;
    return S::cmp(magnitude(k), S::from_double(rho)) <= 0;
}

template <class N>
bool certify(const SystemView<N>& view, const MooreBox<N>& box, double rho,
             const PrecisionContext& ctx) {
    return certify(
        [&](const BoxVector<N>& b) { return view.f(b, ctx); },
        [&](const BoxVector<N>& b) { return view.df(b, ctx); }, box.x, box.r, box.A, rho, ctx);
}

// Certifies the box simultaneously for every parameter value in t_range.
template <class N>
bool certify_over_interval(const TrackingSystem& sys, const RealInterval<N>& t_range,
                           const MooreBox<N>& box, double rho, const PrecisionContext& ctx) {
    return certify(view_over(sys, t_range), box, rho, ctx);
}

}  // namespace algpath

#endif
