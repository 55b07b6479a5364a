#ifndef ALGPATH_REFINE_HPP
#define ALGPATH_REFINE_HPP

#include "algpath/moore.hpp"

namespace algpath {

// Constants of the refinement loop. Correctness requires alpha + rho_in < 1,
// (rho_in + beta) / (1 - beta) < 1 and lambda < 1.
struct RefineConstants {
    static constexpr double rho_in = 7.0 / 8.0;
    static constexpr double alpha = 1.0 / 64.0;
    static constexpr double lambda = 1.0 / 2.0;
    static constexpr double beta = 1.0 / 40.0;
    static constexpr double shrink_floor_factor = 1.0 / 16.0;
};
static_assert(RefineConstants::alpha + RefineConstants::rho_in < 1.0);
static_assert((RefineConstants::rho_in + RefineConstants::beta) / (1.0 - RefineConstants::beta) < 1.0);
static_assert(RefineConstants::lambda < 1.0);

struct RefineOptions {
    // Two guarded quasi-Newton iterations before the first criterion check.
    bool warmup = true;
    // The pseudocode computes delta with the entry matrix A throughout; set
    // false to use the running inverse U instead.
    bool delta_uses_entry_matrix = true;
    long max_iterations = 1000000;
};

template <class N>
struct RefineTrace {
    std::vector<PointVec<N>> newton_iterates;  // y after each quasi-Newton step
    long iterations = 0;
    long precision_raises = 0;
};

// Gauss-Jordan inverse with partial pivoting in unchecked point arithmetic.
template <class N>
PointMat<N> point_inverse(const PointMat<N>& m, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    const std::size_t n = m.n;
    PointMat<N> a = m;
    PointMat<N> inv = PointMat<N>::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        N best = cp_norm(a.at(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            N mag = cp_norm(a.at(i, col));
            if (S::cmp(mag, best) > 0) {
                best = mag;
                piv = i;
            }
        }
        if (S::cmp(best, S::zero()) == 0 || !S::is_finite(best)) throw SingularJacobian();
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a.at(piv, j), a.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        }
        CPoint<N> d = a.at(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a.at(col, j) = cp_div(a.at(col, j), d, ctx);
            inv.at(col, j) = cp_div(inv.at(col, j), d, ctx);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            CPoint<N> factor = a.at(i, col);
            if (S::cmp(factor.re, S::zero()) == 0 && S::cmp(factor.im, S::zero()) == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a.at(i, j) = cp_sub(a.at(i, j), cp_mul(factor, a.at(col, j), ctx), ctx);
                inv.at(i, j) = cp_sub(inv.at(i, j), cp_mul(factor, inv.at(col, j), ctx), ctx);
            }
        }
    }
    return inv;
}

// mid(box matrix)^{-1}; no enclosure claimed.
template <class N>
PointMat<N> midpoint_inverse(const BoxMatrix<N>& m, const PrecisionContext& ctx) {
    PointMat<N> mid(m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) mid.at(i, j) = box_mid(m.at(i, j), ctx);
    return point_inverse(mid, ctx);
}

template <class N>
struct QuasiNewtonStep {
    BoxVector<N> delta;          // A * box_f(y)
    BoxVector<N> y_minus_delta;  // interval difference, width feeds the precision check
    PointVec<N> y_new;           // mid(y - delta)
};

template <class N>
QuasiNewtonStep<N> quasi_newton_step(const SystemView<N>& view, const PointVec<N>& y,
                                     const PointMat<N>& a, const PrecisionContext& ctx) {
    QuasiNewtonStep<N> st;
    st.delta = pmat_vec(a, view.f(singleton_vec(y), ctx), ctx);
    st.y_minus_delta.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        st.y_minus_delta.push_back(csub(ComplexBox<N>::singleton(y[i]), st.delta[i], ctx));
    st.y_new = midpoint(st.y_minus_delta, ctx);
    return st;
}

// Refinement of a Moore box: turns a 7/8-certified box into a tau-certified
// one with the same associated zero, adjusting the working precision as
// demanded. `ctx` is updated in place when precision is raised.
template <class N>
MooreBox<N> refine(const SystemView<N>& view, const MooreBox<N>& box, double tau,
                   PrecisionContext& ctx, const RefineOptions& opt = {},
                   RefineTrace<N>* trace = nullptr) {
    using S = ScalarOps<N>;
    PointVec<N> y = box.x;
    N s = box.r;
    PointMat<N> u = box.A;
    const N tau_n = S::from_double(tau);
    const N forty = S::from_int(40);

    auto delta_matrix = [&]() -> const PointMat<N>& {
        return opt.delta_uses_entry_matrix ? box.A : u;
    };
    // alpha = 1/64 and the shrink floor 1/16 are exact power-of-two scalings.
    auto alpha_threshold = [&]() { return S::ldexp2(S::mul_n(tau_n, s, ctx), -6); };
    auto width_check_fails = [&](const QuasiNewtonStep<N>& st) {
        N w = width(st.y_minus_delta, ctx);
        return S::cmp(S::mul_n(forty, w, ctx), magnitude(st.delta)) > 0;
    };
    auto do_newton = [&](const QuasiNewtonStep<N>& st) {
        y = st.y_new;
        u = midpoint_inverse(view.df(singleton_vec(y), ctx), ctx);
        if (trace) trace->newton_iterates.push_back(y);
    };
    auto raise = [&] {
        ctx = ctx.raised();
        if (trace) ++trace->precision_raises;
    };

    if (opt.warmup) {
        for (int k = 0; k < 2; ++k) {
            QuasiNewtonStep<N> st = quasi_newton_step(view, y, delta_matrix(), ctx);
            if (S::cmp(magnitude(st.delta), alpha_threshold()) <= 0) break;
            if (width_check_fails(st)) {
                raise();
                continue;
            }
            do_newton(st);
        }
    }

    long iter = 0;
    while (true) {
        if (iter++ >= opt.max_iterations)
            throw StepBudgetExceeded("refine: iteration cap exceeded");
        if (trace) trace->iterations = iter;
        MooreBox<N> cand{y, s, u, tau};
        if (certify(view, cand, tau, ctx)) break;
        QuasiNewtonStep<N> st = quasi_newton_step(view, y, delta_matrix(), ctx);
        if (S::cmp(magnitude(st.delta), alpha_threshold()) <= 0) {
            s = S::ldexp2(s, -1);
            N floor = S::ldexp2(S::mul_n(tau_n, box.r, ctx), -4);
            if (S::cmp(s, floor) < 0) {
                // Demand u_prec = o(s), realized as u_prec <= s^2.
                N s2 = S::mul_n(s, s, ctx);
                while (!S::u_prec_leq(ctx, s2)) raise();
            }
        } else if (width_check_fails(st)) {
            raise();
        } else {
            do_newton(st);
        }
    }

    // Growth pass around the final center.
    while (true) {
        N s2 = S::ldexp2(s, 1);
        if (S::cmp(s2, S::one()) > 0) break;
        MooreBox<N> cand{y, s2, u, tau};
        if (!certify(view, cand, tau, ctx)) break;
        s = s2;
    }
    return MooreBox<N>{std::move(y), std::move(s), std::move(u), tau};
}

}  // namespace algpath

#endif
