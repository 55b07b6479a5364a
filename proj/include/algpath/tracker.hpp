#ifndef ALGPATH_TRACKER_HPP
#define ALGPATH_TRACKER_HPP

#include <complex>
#include <functional>

#include "algpath/refine.hpp"
#include "algpath/taylor.hpp"

namespace algpath {

enum class PredictorKind { None, Tangent, Hermite };

enum class PathStatus { Certified, PrecisionFailure, BudgetExhausted, SingularJacobian };

inline const char* to_string(PathStatus s) {
    switch (s) {
        case PathStatus::Certified: return "certified";
        case PathStatus::PrecisionFailure: return "precision_failure";
        case PathStatus::BudgetExhausted: return "budget_exhausted";
        case PathStatus::SingularJacobian: return "singular_jacobian";
    }
    return "?";
}

struct TrackBudget {
    long max_steps = 100000;    // accepted steps
    long max_trials = 1000000;  // rejected trials
};

struct TrackOptions {
    TrackBudget budget;
    int tangent_order = 2;  // Taylor model order for the tangent predictor
    int hermite_order = 3;  // and for the Hermite predictor
    RefineOptions refine;
};

template <class N>
struct PathResult {
    PathStatus status = PathStatus::BudgetExhausted;
    long steps = 0;     // accepted steps
    long rejected = 0;  // rejected trials
    double t_reached = 0;
    std::optional<MooreBox<N>> final_box;  // present iff Certified
};

// One record per accepted or rejected trial, for traces and test harnesses.
// `x_next` carries the accepted center (empty on rejections); the serialized
// trace keeps only the scalar fields.
struct TrialRecord {
    double t = 0, h = 0;
    bool accepted = false;
    double r = 0, mag_k = 0;
    std::vector<std::complex<double>> x_next;
};
using TrackObserver = std::function<void(const TrialRecord&)>;

// v = mid(-A * box_Fdot_t(x)), the speed of the tracked zero.
template <class N>
PointVec<N> speed_vector(const TrackingSystem& sys, const N& t, const PointVec<N>& x,
                         const PointMat<N>& a, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    ComplexBox<N> param(RealInterval<N>::singleton(t), RealInterval<N>::singleton(S::zero()));
    BoxVector<N> fdot = eval_fdot_box(sys, std::optional<ComplexBox<N>>(param), singleton_vec(x), ctx);
    BoxVector<N> afd = pmat_vec(a, fdot, ctx);
    PointVec<N> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = box_mid(cneg(afd[i]), ctx);
    return v;
}

// X(eta) = x + v eta, singleton coefficients.
template <class N>
std::vector<TaylorModel<N>> predict_tangent(const PointVec<N>& x, const PointVec<N>& v,
                                            const RealInterval<N>& dom, int order) {
    std::vector<TaylorModel<N>> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        TaylorModel<N> m(dom, order);
        m.coeffs[0] = ComplexBox<N>::singleton(x[i]);
        m.coeffs[1] = ComplexBox<N>::singleton(v[i]);
        out.push_back(std::move(m));
    }
    return out;
}

// Cubic with X(0) = x, X'(0) = v, X(-h_prev) = x_prev, X'(-h_prev) = v_prev:
//   X = x + v eta + (v + w - 3 dx) eta^2 / h_prev + (w - 2 dx) eta^3 / h_prev^2,
// where w = v + v_prev and dx = (x - x_prev) / h_prev. Coefficients are
// computed in unchecked point arithmetic and wrapped as singletons.
template <class N>
std::vector<TaylorModel<N>> predict_hermite(const PointVec<N>& x, const PointVec<N>& v,
                                            const PointVec<N>& x_prev, const PointVec<N>& v_prev,
                                            const N& h_prev, const RealInterval<N>& dom, int order,
                                            const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    if (S::cmp(h_prev, S::zero()) <= 0) throw std::invalid_argument("predict_hermite: h_prev <= 0");
    auto div_real = [&](const CPoint<N>& a, const N& d) {
        return CPoint<N>{S::div_n(a.re, d, ctx), S::div_n(a.im, d, ctx)};
    };
    std::vector<TaylorModel<N>> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        CPoint<N> w = cp_add(v[i], v_prev[i], ctx);
        CPoint<N> dx = div_real(cp_sub(x[i], x_prev[i], ctx), h_prev);
        CPoint<N> three_dx{S::mul_n(S::from_int(3), dx.re, ctx), S::mul_n(S::from_int(3), dx.im, ctx)};
        CPoint<N> two_dx{S::ldexp2(dx.re, 1), S::ldexp2(dx.im, 1)};
        CPoint<N> a2 = div_real(cp_sub(cp_add(v[i], w, ctx), three_dx, ctx), h_prev);
        CPoint<N> a3 = div_real(div_real(cp_sub(w, two_dx, ctx), h_prev), h_prev);
        TaylorModel<N> m(dom, order);
        m.coeffs[0] = ComplexBox<N>::singleton(x[i]);
        m.coeffs[1] = ComplexBox<N>::singleton(v[i]);
        m.coeffs[2] = ComplexBox<N>::singleton(a2);
        m.coeffs[3] = ComplexBox<N>::singleton(a3);
        out.push_back(std::move(m));
    }
    return out;
}

// K = -r^{-1} A box_F_{t+eta}(X) + [I - A box_dF_{t+eta}(X + rB)] B in Taylor
// model arithmetic on the predictor domain. Outer combinations are constant
// scalings, so no extra squeezing happens here.
template <class N>
std::vector<TaylorModel<N>> krawczyk_taylor(const TrackingSystem& sys, const N& t,
                                            const std::vector<TaylorModel<N>>& pred, const N& r,
                                            const PointMat<N>& a, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    const std::size_t n = pred.size();
    const RealInterval<N>& dom = pred[0].domain;
    const int order = pred[0].order;
    TmDomain<N> tm_dom{ctx, dom, order};

    std::vector<TaylorModel<N>> inputs;
    inputs.reserve(n + 1);
    inputs.push_back(tm_parameter(t, dom, order));
    for (const auto& p : pred) inputs.push_back(p);
    auto tape_f = evaluate_tape(sys.aug, tm_dom, std::span<const TaylorModel<N>>(inputs),
                                &sys.mask_f);

    // Widen the centers by rB for the Jacobian term.
    RealInterval<N> pm_r(S::sub_n(S::zero(), r, ctx), r);
    ComplexBox<N> rball(pm_r, pm_r);
    for (std::size_t i = 0; i < n; ++i)
        inputs[i + 1].coeffs[0] = cadd(inputs[i + 1].coeffs[0], rball, ctx);
    auto tape_df = evaluate_tape(sys.aug, tm_dom, std::span<const TaylorModel<N>>(inputs),
                                 &sys.mask_df);

    ComplexBox<N> neg_rinv(ineg(irecip_pos(r, ctx)), RealInterval<N>::singleton(S::zero()));
    ComplexBox<N> unit(RealInterval<N>(S::from_int(-1), S::one()),
                       RealInterval<N>(S::from_int(-1), S::one()));

    std::vector<TaylorModel<N>> k;
    k.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // -r^{-1} (A F)_i
        TaylorModel<N> acc = tm_scale(ComplexBox<N>::singleton(a.at(i, 0)), tape_f[sys.out_f(0)], ctx);
        for (std::size_t j = 1; j < n; ++j)
            acc = tm_add(acc, tm_scale(ComplexBox<N>::singleton(a.at(i, j)), tape_f[sys.out_f(j)], ctx),
                         ctx);
        acc = tm_scale(neg_rinv, acc, ctx);
        // + sum_j (I - A dF)_{ij} * B_j
        for (std::size_t j = 0; j < n; ++j) {
            TaylorModel<N> adf = tm_scale(ComplexBox<N>::singleton(a.at(i, 0)),
                                          tape_df[sys.out_df(0, j)], ctx);
            for (std::size_t l = 1; l < n; ++l)
                adf = tm_add(adf, tm_scale(ComplexBox<N>::singleton(a.at(i, l)),
                                           tape_df[sys.out_df(l, j)], ctx),
                             ctx);
            TaylorModel<N> gij = tm_scale(ComplexBox<N>::singleton(CPoint<N>{
                                              S::from_int(-1), S::zero()}),
                                          adf, ctx);
            if (i == j) {
                TaylorModel<N> one_m = TaylorModel<N>::constant(
                    ComplexBox<N>(RealInterval<N>::singleton(S::one()),
                                  RealInterval<N>::singleton(S::zero())),
                    dom, order);
                gij = tm_add(gij, one_m, ctx);
            }
            acc = tm_add(acc, tm_scale(unit, gij, ctx), ctx);
        }
        k.push_back(std::move(acc));
    }
    return k;
}

template <class N>
N tm_vector_range_mag(const std::vector<TaylorModel<N>>& k, const RealInterval<N>& j,
                      const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    N m = S::zero();
    bool bounded = true;
    for (const auto& p : k) {
        ComplexBox<N> range = tm_range(p, j, ctx);
        if (!is_bounded(range)) bounded = false;
        N a = box_mag(range);
        if (S::cmp(a, m) > 0) m = a;
    }
    if constexpr (std::is_same_v<N, double>) {
        if (!bounded) return ScalarOps<double>::kInf;
    }
    (void)bounded;
    return m;
}

namespace detail {

template <class N>
struct BudgetGuard {
    const TrackBudget& budget;
    long accepted = 0, rejected = 0;
    void count_accept() {
        if (++accepted > budget.max_steps) throw StepBudgetExceeded("step budget exhausted");
    }
    void count_reject() {
        if (++rejected > budget.max_trials) throw StepBudgetExceeded("trial budget exhausted");
    }
};

template <class N>
PathResult<N> fail_result(PathStatus st, long steps, long rejected, double t) {
    PathResult<N> r;
    r.status = st;
    r.steps = steps;
    r.rejected = rejected;
    r.t_reached = t;
    return r;
}

}  // namespace detail

// Algorithm-style plain tracking: refine to tau = 1/8, then certify over the
// widest interval [t, t+h] that passes, doubling h optimistically and halving
// on failure.
template <class N>
PathResult<N> track_plain(const TrackingSystem& sys, const MooreBox<N>& start,
                          PrecisionContext ctx, const TrackOptions& opt = {},
                          const TrackObserver& observer = {}) {
    using S = ScalarOps<N>;
    if (!sys.parametric) throw std::logic_error("track: system is not parametric");
    MooreBox<N> box = start;
    N t = S::zero();
    N one = S::one();
    N h = one;
    detail::BudgetGuard<N> guard{opt.budget};
    try {
        while (S::cmp(t, one) < 0) {
            box = refine(view_at(sys, t), box, 0.125, ctx, opt.refine);
            h = S::ldexp2(h, 1);
            N remain = S::sub_up(one, t, ctx);
            if (S::cmp(h, remain) > 0) h = remain;
            while (true) {
                N t_next = S::add_n(t, h, ctx);
                if (S::cmp(t_next, one) >= 0) t_next = one;
                RealInterval<N> t_range(t, t_next);
                bool ok = certify_over_interval(sys, t_range, box, 0.875, ctx);
                if (observer) {
                    TrialRecord rec{S::to_double(t), S::to_double(h), ok, S::to_double(box.r), 0.0, {}};
                    if (ok)
                        for (const auto& p : box.x)
                            rec.x_next.emplace_back(S::to_double(p.re), S::to_double(p.im));
                    observer(rec);
                }
                if (ok) {
                    guard.count_accept();
                    t = t_next;
                    box.rho = 0.875;
                    break;
                }
                guard.count_reject();
                h = S::ldexp2(h, -1);
                while (!S::u_prec_leq(ctx, h)) ctx = ctx.raised();
            }
        }
        // Endpoint check at exactly t = 1.
        if (!certify(view_at(sys, one), box, 0.875, ctx))
            return detail::fail_result<N>(PathStatus::PrecisionFailure, guard.accepted,
                                          guard.rejected, S::to_double(t));
        PathResult<N> res;
        res.status = PathStatus::Certified;
        res.steps = guard.accepted;
        res.rejected = guard.rejected;
        res.t_reached = 1.0;
        res.final_box = box;
        return res;
    } catch (const PrecisionExhausted&) {
        return detail::fail_result<N>(PathStatus::PrecisionFailure, guard.accepted, guard.rejected,
                                      S::to_double(t));
    } catch (const StepBudgetExceeded&) {
        return detail::fail_result<N>(PathStatus::BudgetExhausted, guard.accepted, guard.rejected,
                                      S::to_double(t));
    } catch (const SingularJacobian&) {
        return detail::fail_result<N>(PathStatus::SingularJacobian, guard.accepted, guard.rejected,
                                      S::to_double(t));
    }
}

// Taylor-model-validated tracking with the tangent or Hermite predictor.
// Steps advance only by the amount whose Krawczyk range was certified.
template <class N>
PathResult<N> track(const TrackingSystem& sys, const MooreBox<N>& start, PredictorKind predictor,
                    PrecisionContext ctx, const TrackOptions& opt = {},
                    const TrackObserver& observer = {}) {
    using S = ScalarOps<N>;
    if (predictor == PredictorKind::None) return track_plain(sys, start, ctx, opt, observer);
    if (!sys.parametric) throw std::logic_error("track: system is not parametric");
    const int order = predictor == PredictorKind::Hermite ? opt.hermite_order : opt.tangent_order;
    const double rho_path = 0.875;

    MooreBox<N> box = start;
    N t = S::zero();
    N one = S::one();
    N h = S::ldexp2(one, -1);
    struct History {
        PointVec<N> x_prev, v_prev;
        N h_prev;
    };
    std::optional<History> hist;
    detail::BudgetGuard<N> guard{opt.budget};

    try {
        while (S::cmp(t, one) < 0) {
            box = refine(view_at(sys, t), box, 0.125, ctx, opt.refine);
            // Try growing the step size, clamped to land on t = 1.
            h = S::mul_n(h, S::from_double(1.25), ctx);
            N remain = S::sub_up(one, t, ctx);
            if (S::cmp(h, remain) > 0) h = remain;

            PointVec<N> v = speed_vector(sys, t, box.x, box.A, ctx);
            RealInterval<N> dom(S::zero(), h);
            std::vector<TaylorModel<N>> pred;
            if (predictor == PredictorKind::Hermite && hist) {
                pred = predict_hermite(box.x, v, hist->x_prev, hist->v_prev, hist->h_prev, dom,
                                       order, ctx);
            } else {
                pred = predict_tangent(box.x, v, dom, order);
            }
            std::vector<TaylorModel<N>> k = krawczyk_taylor(sys, t, pred, box.r, box.A, ctx);

            N h_half = S::ldexp2(h, -1);
            N mag_full = tm_vector_range_mag(k, RealInterval<N>(S::zero(), h), ctx);
            N h_step;
            N mag_used = mag_full;
            bool accepted = false;
            if (S::is_finite(mag_full) && S::cmp(mag_full, S::from_double(rho_path)) <= 0) {
                h_step = h;
                accepted = true;
            } else {
                N mag_half = tm_vector_range_mag(k, RealInterval<N>(S::zero(), h_half), ctx);
                if (S::is_finite(mag_half) && S::cmp(mag_half, S::from_double(rho_path)) <= 0) {
                    h_step = h_half;
                    h = h_half;
                    mag_used = mag_half;
                    accepted = true;
                }
            }
            auto reject = [&](const N& mag) {
                if (observer)
                    observer(TrialRecord{S::to_double(t), S::to_double(h), false,
                                         S::to_double(box.r),
                                         S::is_finite(mag) ? S::to_double(mag)
                                                           : std::numeric_limits<double>::infinity(),
                                         {}});
                guard.count_reject();
                h = h_half;
                while (!S::u_prec_leq(ctx, h)) ctx = ctx.raised();
            };
            if (!accepted) {
                reject(mag_used);
                continue;
            }

            // Advance by the certified amount; on the last step evaluate the
            // predictor over an enclosure of the exact remaining gap.
            N t_next = S::add_n(t, h_step, ctx);
            RealInterval<N> eval_at(h_step, h_step);
            if (S::cmp(t_next, one) >= 0) {
                t_next = one;
                N lo = S::sub_down(one, t, ctx);
                if (S::cmp(lo, S::zero()) < 0) lo = S::zero();
                N hi = S::sub_up(one, t, ctx);
                if (S::cmp(hi, h_step) > 0) hi = h_step;
                if (S::cmp(lo, hi) > 0) lo = hi;
                eval_at = RealInterval<N>(lo, hi);
            }
            BoxVector<N> landing(box.dim());
            for (std::size_t i = 0; i < box.dim(); ++i) landing[i] = tm_range(pred[i], eval_at, ctx);
            // Keep the same-zero argument valid: the recentering error must
            // stay below (1 - rho) r.
            if (S::cmp(width(landing, ctx), S::ldexp2(box.r, -3)) > 0) {
                reject(mag_used);
                continue;
            }
            PointVec<N> x_new = midpoint(landing, ctx);
            if (observer) {
                TrialRecord rec{S::to_double(t), S::to_double(h_step), true, S::to_double(box.r),
                                S::to_double(mag_used), {}};
                for (const auto& p : x_new)
                    rec.x_next.emplace_back(S::to_double(p.re), S::to_double(p.im));
                observer(rec);
            }
            guard.count_accept();
            hist = History{box.x, v, h_step};
            box.x = std::move(x_new);
            box.rho = rho_path;
            t = t_next;
        }
        box = refine(view_at(sys, one), box, 0.125, ctx, opt.refine);
        if (!certify(view_at(sys, one), box, 0.875, ctx))
            return detail::fail_result<N>(PathStatus::PrecisionFailure, guard.accepted,
                                          guard.rejected, S::to_double(t));
        box.rho = 0.875;
        PathResult<N> res;
        res.status = PathStatus::Certified;
        res.steps = guard.accepted;
        res.rejected = guard.rejected;
        res.t_reached = 1.0;
        res.final_box = box;
        return res;
    } catch (const PrecisionExhausted&) {
        return detail::fail_result<N>(PathStatus::PrecisionFailure, guard.accepted, guard.rejected,
                                      S::to_double(t));
    } catch (const StepBudgetExceeded&) {
        return detail::fail_result<N>(PathStatus::BudgetExhausted, guard.accepted, guard.rejected,
                                      S::to_double(t));
    } catch (const SingularJacobian&) {
        return detail::fail_result<N>(PathStatus::SingularJacobian, guard.accepted, guard.rejected,
                                      S::to_double(t));
    }
}

}  // namespace algpath

#endif
