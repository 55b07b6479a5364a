#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "algpath/homotopy.hpp"
#include "algpath/refine.hpp"
#include "support/newton_oracle.hpp"

using namespace algpath;
using namespace algpath::testsupport;

namespace {

const PrecisionContext kFixed = PrecisionContext::fixed64();

MooreBox<double> box1(double x, double r, double a) {
    MooreBox<double> b;
    b.x = {{x, 0}};
    b.r = r;
    b.A = PointMat<double>(1);
    b.A.at(0, 0) = {a, 0};
    b.rho = 0.875;
    return b;
}

}  // namespace

TEST_CASE("quasi newton step") {
    TrackingSystem lin = build_tracking_system(parse_system("vars: x\nx - 1\n"));
    auto v = view_at(lin, 0.0);
    PointMat<double> a1 = PointMat<double>::identity(1);
    auto st = quasi_newton_step(v, PointVec<double>{{2, 0}}, a1, kFixed);
    CHECK(std::abs(st.y_new[0].re - 1.0) <= 1e-12);

    TrackingSystem sq = build_tracking_system(parse_system("vars: x\nx^2 - 2\n"));
    auto vs = view_at(sq, 0.0);
    PointMat<double> a3(1);
    a3.at(0, 0) = {1.0 / 3.0, 0};
    auto st2 = quasi_newton_step(vs, PointVec<double>{{1.5, 0}}, a3, kFixed);
    CHECK(std::abs(st2.y_new[0].re - (1.5 - 0.25 / 3.0)) <= 1e-12);

    double root = std::sqrt(2.0);
    auto st3 = quasi_newton_step(vs, PointVec<double>{{root, 0}}, a3, kFixed);
    CHECK(ScalarOps<double>::to_double(magnitude(st3.delta)) <= 1e-15);
    CHECK(std::abs(st3.y_new[0].re - root) <= 1e-15);
}

TEST_CASE("midpoint inverse") {
    BoxMatrix<double> id(2);
    id.at(0, 0) = ComplexBox<double>::singleton({1, 0});
    id.at(1, 1) = ComplexBox<double>::singleton({1, 0});
    auto inv = midpoint_inverse(id, kFixed);
    CHECK(inv.at(0, 0).re == 1.0);
    CHECK(inv.at(0, 1).re == 0.0);

    BoxMatrix<double> diag(2);
    diag.at(0, 0) = ComplexBox<double>::singleton({2, 0});
    diag.at(1, 1) = ComplexBox<double>::singleton({4, 0});
    auto dinv = midpoint_inverse(diag, kFixed);
    CHECK(dinv.at(0, 0).re == 0.5);
    CHECK(dinv.at(1, 1).re == 0.25);

    // Random well-conditioned 5x5: residual of U * mid(M) - I.
    SplitMix64 rng(77);
    BoxMatrix<double> m(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            double re = (i == j ? 4.0 : 0.0) + (2 * rng.uniform01() - 1);
            double im = 0.5 * (2 * rng.uniform01() - 1);
            m.at(i, j) = ComplexBox<double>::singleton({re, im});
        }
    auto u = midpoint_inverse(m, kFixed);
    double worst = 0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            CPoint<double> acc{i == j ? -1.0 : 0.0, 0.0};
            for (std::size_t k = 0; k < 5; ++k)
                acc = cp_add(acc, cp_mul(u.at(i, k), box_mid(m.at(k, j), kFixed), kFixed), kFixed);
            worst = std::max(worst, cp_norm(acc));
        }
    CHECK(worst <= 1e-12);

    BoxMatrix<double> sing(2);
    sing.at(0, 0) = ComplexBox<double>::singleton({1, 0});
    sing.at(0, 1) = ComplexBox<double>::singleton({2, 0});
    sing.at(1, 0) = ComplexBox<double>::singleton({2, 0});
    sing.at(1, 1) = ComplexBox<double>::singleton({4, 0});
    CHECK_THROWS_AS((void)midpoint_inverse(sing, kFixed), SingularJacobian);
}

TEST_CASE("refine on a linear map grows the radius") {
    TrackingSystem lin = build_tracking_system(parse_system("vars: x\nx - 1\n"));
    auto v = view_at(lin, 0.0);
    PrecisionContext ctx = kFixed;
    MooreBox<double> out = refine(v, box1(1.0, 0.25, 1.0), 0.125, ctx);
    CHECK(certify(v, out, 0.125, kFixed));
    CHECK(std::abs(out.x[0].re - 1.0) <= 1e-12);
    CHECK(out.r >= 0.5);
    CHECK(out.r <= 1.0);
}

TEST_CASE("refine converges to sqrt2 and keeps the zero") {
    TrackingSystem sq = build_tracking_system(parse_system("vars: x\nx^2 - 2\n"));
    auto v = view_at(sq, 0.0);
    for (bool entry_matrix : {true, false}) {
        RefineOptions opt;
        opt.delta_uses_entry_matrix = entry_matrix;
        PrecisionContext ctx = kFixed;
        MooreBox<double> out = refine(v, box1(1.5, 0.25, 1.0 / 3.0), 0.125, ctx, opt);
        CHECK(certify(v, out, 0.125, kFixed));
        CHECK(out.r <= 1.0);
        double root = std::sqrt(2.0);
        CHECK(std::abs(out.x[0].re - root) <= out.r);
        CHECK(std::abs(out.x[0].im) <= out.r);
    }
}

TEST_CASE("refine in two dimensions hits both roots") {
    TrackingSystem sys = build_tracking_system(parse_system("vars: x y\nx^2 - 2\ny^2 - 3\n"));
    auto v = view_at(sys, 0.0);
    MooreBox<double> in;
    in.x = {{1.5, 0}, {1.7, 0}};
    in.r = 0.1;
    in.A = PointMat<double>(2);
    in.A.at(0, 0) = {1.0 / 3.0, 0};
    in.A.at(1, 1) = {1.0 / 3.4, 0};
    in.rho = 0.875;
    PrecisionContext ctx = kFixed;
    MooreBox<double> out = refine(v, in, 0.125, ctx);
    CHECK(certify(v, out, 0.125, kFixed));
    CHECK(std::abs(out.x[0].re - std::sqrt(2.0)) <= out.r);
    CHECK(std::abs(out.x[1].re - std::sqrt(3.0)) <= out.r);
}

TEST_CASE("refine contraction trace against the oracle") {
    TrackingSystem sq = build_tracking_system(parse_system("vars: x\nx^2 - 2\n"));
    auto v = view_at(sq, 0.0);
    auto oracle = newton_oracle(sq, std::nullopt, {{1.5, 0.0}});
    REQUIRE(oracle.converged);

    RefineTrace<double> trace;
    RefineOptions opt;
    opt.warmup = false;  // bare loop conformance
    PrecisionContext ctx = kFixed;
    MooreBox<double> out = refine(v, box1(1.5, 0.25, 1.0 / 3.0), 0.015625, ctx, opt, &trace);
    CHECK(certify(v, out, 0.015625, kFixed));
    double prev = dist_to_root(PointVec<double>{{1.5, 0}}, oracle.root);
    for (const auto& y : trace.newton_iterates) {
        double cur = dist_to_root(y, oracle.root);
        CHECK(cur <= (12.0 / 13.0) * prev + 1e-13);
        prev = cur;
    }
    CHECK(trace.newton_iterates.size() >= 1);

    // Oracle root stays inside the output box.
    CHECK(dist_to_root(out.x, oracle.root) <= ScalarOps<double>::to_double(out.r));
}

TEST_CASE("dyadic refine makes progress from a wide range of radii") {
    TrackingSystem sq = build_tracking_system(parse_system("vars: x\nx^2 - 2\n"));
    auto v = view_at(sq, Dyadic(0, 0));
    using S = ScalarOps<Dyadic>;
    for (int k : {2, 6, 10, 15, 20}) {
        PrecisionContext ctx = PrecisionContext::dyadic(53);
        MooreBox<Dyadic> in;
        in.x = {{S::from_double(1.5), S::zero()}};
        in.r = Dyadic::one_shl(-k);
        in.A = PointMat<Dyadic>(1);
        in.A.at(0, 0) = {S::from_double(1.0 / 3.0), S::zero()};
        in.rho = 0.875;
        RefineTrace<Dyadic> trace;
        MooreBox<Dyadic> out = refine(v, in, 0.125, ctx, RefineOptions{}, &trace);
        CHECK(trace.iterations <= 200);
        CHECK(certify(v, out, 0.125, ctx));
        CHECK(std::abs(S::to_double(out.x[0].re) - std::sqrt(2.0)) <= S::to_double(out.r));
    }
}

TEST_CASE("fixed precision refine aborts when the demand is too fine") {
    // Two roots 1e-9 apart force radii whose squared size is below the
    // fixed-precision unit roundoff.
    TrackingSystem sys = build_tracking_system(
        parse_system("vars: x\nx^2 - 2.000000001*x + 1.000000001\n"));
    auto v = view_at(sys, 0.0);
    PrecisionContext ctx = kFixed;
    // Entry box straddles both roots; certification can never hold at this
    // scale so the loop shrinks s until the precision demand fires.
    CHECK_THROWS_AS((void)refine(v, box1(1.0 + 5e-10, 1e-3, 0.5e9), 0.125, ctx), PrecisionExhausted);
}

TEST_CASE("refine respects the iteration cap") {
    TrackingSystem sys = build_tracking_system(parse_system("vars: x\nx^2\n"));
    auto v = view_at(sys, Dyadic(0, 0));
    RefineOptions opt;
    opt.max_iterations = 50;
    PrecisionContext ctx = PrecisionContext::dyadic(53);
    MooreBox<Dyadic> bad;
    bad.x = {{ScalarOps<Dyadic>::from_double(0.1), ScalarOps<Dyadic>::zero()}};
    bad.r = ScalarOps<Dyadic>::from_double(0.5);
    bad.A = PointMat<Dyadic>(1);
    bad.A.at(0, 0) = {ScalarOps<Dyadic>::from_double(5.0), ScalarOps<Dyadic>::zero()};
    bad.rho = 0.875;
    CHECK_THROWS_AS((void)refine(v, bad, 0.125, ctx, opt), StepBudgetExceeded);
}
