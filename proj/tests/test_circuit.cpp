#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "algpath/circuit.hpp"
#include "algpath/homotopy.hpp"
#include "algpath/taylor.hpp"
#include "support/conformance.hpp"
#include "support/rational.hpp"

using namespace algpath;
using namespace algpath::testsupport;

namespace {

const PrecisionContext kFixed = PrecisionContext::fixed64();

CPoint<double> pt(double re, double im = 0) { return {re, im}; }

std::vector<CPoint<double>> eval_point(const Circuit& c, std::vector<CPoint<double>> in) {
    PointDomain<double> dom{kFixed};
    return evaluate(c, dom, std::span<const CPoint<double>>(in));
}

// Complex rationals for the monomial-expansion oracle.
struct RatC {
    Rat re, im;
    friend RatC operator+(const RatC& a, const RatC& b) { return {a.re + b.re, a.im + b.im}; }
    friend RatC operator*(const RatC& a, const RatC& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
};

struct Monomial {
    long cre, cim;
    std::vector<int> exps;
};
using Poly = std::vector<Monomial>;

RatC eval_poly_rat(const Poly& p, const std::vector<RatC>& x) {
    RatC acc{Rat(0), Rat(0)};
    for (const auto& m : p) {
        RatC term{Rat(m.cre), Rat(m.cim)};
        for (std::size_t v = 0; v < m.exps.size(); ++v)
            for (int e = 0; e < m.exps[v]; ++e) term = term * x[v];
        acc = acc + term;
    }
    return acc;
}

std::string poly_source(const std::vector<Poly>& system, int n_vars) {
    std::ostringstream out;
    out << "vars:";
    for (int i = 1; i <= n_vars; ++i) out << " x" << i;
    out << "\n";
    for (const auto& p : system) {
        bool first = true;
        for (const auto& m : p) {
            out << (first ? "" : " + ") << "(" << m.cre << (m.cim >= 0 ? "+" : "-")
                << std::abs(m.cim) << "i)";
            for (std::size_t v = 0; v < m.exps.size(); ++v) {
                if (m.exps[v] == 0) continue;
                out << "*x" << (v + 1);
                if (m.exps[v] > 1) out << "^" << m.exps[v];
            }
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("parse and evaluate simple systems") {
    Circuit c = parse_system("vars: x\nx^2 - 2\n");
    CHECK(c.n_inputs == 1);
    CHECK(!c.parametric);
    auto r = eval_point(c, {pt(1, 1)});
    CHECK(r.size() == 1);
    CHECK(r[0].re == -2.0);
    CHECK(r[0].im == 2.0);

    Circuit c2 = parse_system("vars: x y\nx*y\nx + y\n");
    auto r2 = eval_point(c2, {pt(2), pt(3)});
    CHECK(r2[0].re == 6.0);
    CHECK(r2[1].re == 5.0);

    // Comments, whitespace, leading signs, bare constants.
    Circuit c3 = parse_system("# heading\nvars: x\n-x + 3  # trailing\n");
    auto r3 = eval_point(c3, {pt(2)});
    CHECK(r3[0].re == 1.0);
}

TEST_CASE("parse errors carry position") {
    CHECK_THROWS_AS((void)parse_system("vars: x\nx + z\n"), ParseError);
    CHECK_THROWS_AS((void)parse_system("x + 1\n"), ParseError);  // missing vars line
    CHECK_THROWS_AS((void)parse_system("vars: x\n"), ParseError);  // no polynomials
    CHECK_THROWS_AS((void)parse_system("vars: x\nx ^\n"), ParseError);
    try {
        (void)parse_system("vars: x\nx + z*x\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col >= 4);
    }
}

TEST_CASE("katsura-5 circuit size is in the expected range") {
    Circuit f = parse_system(katsura_source(5));
    CHECK(f.n_inputs == 5);
    CHECK(f.outputs.size() == 5);
    // Circuit size is measured on the parametric homotopy system (the
    // tracked circuit) plus the extra nodes its derivative needs; the
    // reference counts are 192 / 98 and we stay within 2x of both.
    TotalDegreeHomotopy hom = make_total_degree(f, 0);
    CHECK(hom.family.size() >= 96);
    CHECK(hom.family.size() <= 384);
    TrackingSystem sys = build_tracking_system(hom.family);
    CHECK(sys.df_added >= 49);
    CHECK(sys.df_added <= 196);
    // Bezout number of the family: one linear equation, four quadrics.
    auto degs = output_degrees(f);
    std::size_t paths = 1;
    for (auto d : degs) paths *= d;
    CHECK(paths == 16);
    CHECK(hom.path_count() == 16);
}

TEST_CASE("box evaluation is an interval extension") {
    Circuit c = parse_system("vars: x\nx^2 - 2\n");
    auto r = eval_point(c, {pt(1.5)});
    CHECK(r[0].re == 0.25);

    BoxDomain<double> dom{kFixed};
    std::vector<ComplexBox<double>> in{ComplexBox<double>(
        RealInterval<double>(1.4, 1.5), RealInterval<double>::singleton(0.0))};
    auto rb = evaluate(c, dom, std::span<const ComplexBox<double>>(in));
    CHECK(rb[0].re.lo <= -0.04);
    CHECK(rb[0].re.hi >= 0.25);
    CHECK(rb[0].re.lo >= -0.04 - 1e-12);
    CHECK(rb[0].re.hi <= 0.25 + 1e-12);

    // Point evaluations land inside singleton-box evaluations.
    SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        CPoint<double> x{2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1};
        auto rp = eval_point(c, {x});
        std::vector<ComplexBox<double>> sin{ComplexBox<double>::singleton(x)};
        auto rs = evaluate(c, dom, std::span<const ComplexBox<double>>(sin));
        CHECK(contains(rs[0], rp[0]));
    }
}

TEST_CASE("forward derivatives match expected values") {
    Circuit c = parse_system("vars: x\nx^2 - 2\n");
    std::uint32_t wrt[] = {0};
    Circuit d = differentiate(c, wrt);
    CHECK(d.outputs.size() == 2);
    auto r = eval_point(d, {pt(3)});
    CHECK(r[0].re == 7.0);
    CHECK(r[1].re == 6.0);

    Circuit c2 = parse_system("vars: x y\nx*y\n");
    std::uint32_t wrt2[] = {0};
    auto d2 = differentiate(c2, wrt2);
    auto r2 = eval_point(d2, {pt(2), pt(3)});
    CHECK(r2[1].re == 3.0);
}

TEST_CASE("autodiff agrees with central finite differences") {
    std::string src = dense_system_source(2, 3, 11);
    Circuit c = parse_system(src);
    std::uint32_t wrt[] = {0, 1};
    Circuit d = differentiate(c, wrt);
    SplitMix64 rng(17);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CPoint<double>> x{{2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1},
                                      {2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1}};
        auto vals = eval_point(d, x);
        for (int v = 0; v < 2; ++v) {
            auto xp = x, xm = x;
            xp[v].re += h;
            xm[v].re -= h;
            auto fp = eval_point(c, xp);
            auto fm = eval_point(c, xm);
            for (int j = 0; j < 2; ++j) {
                std::complex<double> fd((fp[j].re - fm[j].re) / (2 * h),
                                        (fp[j].im - fm[j].im) / (2 * h));
                std::complex<double> ad(vals[2 + v * 2 + j].re, vals[2 + v * 2 + j].im);
                double denom = std::max(1.0, std::abs(ad));
                CHECK(std::abs(fd - ad) / denom <= 1e-6);
            }
        }
    }
}

TEST_CASE("parameter specialization in all three domains") {
    Circuit f = parse_system("vars: x\nparam: t\nx^2 - 1 - t\n");
    CHECK(f.parametric);

    // Point binding.
    Circuit f0 = bind_parameter(f, 0, 0);
    CHECK(!f0.parametric);
    auto r = eval_point(f0, {pt(1)});
    CHECK(r[0].re == 0.0);
    CHECK_THROWS_AS((void)bind_parameter(f0, 0, 0), std::logic_error);

    // Interval binding: T = [0,1] at x = 1 gives an enclosure of [-1, 0].
    TrackingSystem sys = build_tracking_system(f);
    SystemView<double> over = view_over(sys, RealInterval<double>(0.0, 1.0));
    BoxVector<double> x1{ComplexBox<double>::singleton(pt(1))};
    auto fb = over.f(x1, kFixed);
    CHECK(fb[0].re.lo <= -1.0);
    CHECK(fb[0].re.hi >= 0.0);
    CHECK(fb[0].re.lo >= -1.0 - 1e-12);
    CHECK(fb[0].re.hi <= 0.0 + 1e-12);

    // Taylor-model binding: F(1) = -t - eta as a model in eta at t = 0.
    RealInterval<double> dom(0.0, 0.5);
    TmDomain<double> tmdom{kFixed, dom, 2};
    std::vector<TaylorModel<double>> inputs{
        tm_parameter(0.0, dom, 2),
        TaylorModel<double>::constant(ComplexBox<double>::singleton(pt(1)), dom, 2)};
    auto tape = evaluate_tape(sys.aug, tmdom, std::span<const TaylorModel<double>>(inputs),
                              &sys.mask_f);
    const TaylorModel<double>& out = tape[sys.out_f(0)];
    CHECK(contains(out.coeffs[0], pt(0)));
    CHECK(contains(out.coeffs[1], pt(-1)));
    CHECK(box_mag(out.coeffs[0]) <= 1e-12);
    CHECK(std::abs(out.coeffs[1].re.lo + 1.0) <= 1e-12);
}

TEST_CASE("lipschitz bound values and soundness") {
    Circuit add = parse_system("vars: x y\nx + y\n");
    CHECK(lipschitz_bound(add, 1.0) == 2.0);          // max(p, q) = max(2, 2M)
    CHECK(lipschitz_bound(add, 1.0) <= 1.0 + 2.0);    // within the coarse 2 + M form
    CHECK(lipschitz_bound(add, 4.0) == 8.0);

    Circuit mul = parse_system("vars: x y\nx*y\n");
    CHECK(lipschitz_bound(mul, 1.0) == 4.0);  // complex product constant

    Circuit sq = parse_system("vars: x\nx^2 - 2\n");
    double l = lipschitz_bound(sq, 4.0);
    CHECK(std::isfinite(l));

    // Empirical width ratios never exceed the bound.
    SplitMix64 rng(23);
    BoxDomain<double> dom{kFixed};
    const double u = kFixed.u_prec();
    for (int i = 0; i < 1000; ++i) {
        double c = 2 * rng.uniform01() - 1;
        double w = rng.uniform01() * 0.5;
        std::vector<ComplexBox<double>> in{ComplexBox<double>(
            RealInterval<double>(c - w, c + w), RealInterval<double>::singleton(0.0))};
        auto out = evaluate(sq, dom, std::span<const ComplexBox<double>>(in));
        double width_in = width(in, kFixed);
        double width_out = width(out, kFixed);
        CHECK(width_out <= l * (width_in + u));
    }
}

TEST_CASE("proposition width/dist bounds hold exactly on the dyadic backend") {
    Circuit c = parse_system(dense_system_source(1, 3, 3));
    SplitMix64 rng(29);
    for (int bits : {24, 53}) {
        PrecisionContext ctx = PrecisionContext::dyadic(bits);
        BoxDomain<Dyadic> dom{ctx};
        Rat u = u_prec_rat(ctx);
        for (int i = 0; i < 60; ++i) {
            double ce = 2 * rng.uniform01() - 1;
            double wi = rng.uniform01() * 0.25;
            double ce2 = ce + 0.05 * (2 * rng.uniform01() - 1);
            double wi2 = rng.uniform01() * 0.25;
            auto mk = [&](double mid, double hw) {
                using S = ScalarOps<Dyadic>;
                return std::vector<ComplexBox<Dyadic>>{ComplexBox<Dyadic>(
                    RealInterval<Dyadic>(S::from_double(mid - hw), S::from_double(mid + hw)),
                    RealInterval<Dyadic>(S::from_double(-hw), S::from_double(hw)))};
            };
            auto x = mk(ce, wi), y = mk(ce2, wi2);
            auto in_x = std::span<const ComplexBox<Dyadic>>(x);
            auto in_y = std::span<const ComplexBox<Dyadic>>(y);
            auto tape = evaluate_tape(c, dom, in_x);
            auto tape_y = evaluate_tape(c, dom, in_y);
            // Magnitude bound over every node of both evaluations.
            double m = 1.0;
            for (const auto& t : tape) m = std::max(m, ScalarOps<Dyadic>::to_double(box_mag(t)));
            for (const auto& t : tape_y) m = std::max(m, ScalarOps<Dyadic>::to_double(box_mag(t)));
            m = m * (1 + 1e-12) + 1e-12;
            double l = lipschitz_bound(c, m);
            Rat l_rat = Rat::from_double(l);

            auto exact_width = [&](const ComplexBox<Dyadic>& z) {
                Rat wr = Rat::from_dyadic(z.re.hi) - Rat::from_dyadic(z.re.lo);
                Rat wim = Rat::from_dyadic(z.im.hi) - Rat::from_dyadic(z.im.lo);
                return wr >= wim ? wr : wim;
            };
            Rat w_in = exact_width(x[0]);
            Rat w_out = exact_width(tape[c.outputs[0]]);
            CHECK(w_out <= l_rat * (w_in + u));

            auto exact_dist = [&](const ComplexBox<Dyadic>& a, const ComplexBox<Dyadic>& b) {
                auto ad = [](const Dyadic& p, const Dyadic& q) {
                    return (Rat::from_dyadic(p) - Rat::from_dyadic(q)).abs();
                };
                Rat best = ad(a.re.lo, b.re.lo);
                for (auto [p, q] : {std::pair{&a.re.hi, &b.re.hi}, std::pair{&a.im.lo, &b.im.lo},
                                    std::pair{&a.im.hi, &b.im.hi}}) {
                    Rat d = ad(*p, *q);
                    if (d > best) best = d;
                }
                return best;
            };
            Rat d_in = exact_dist(x[0], y[0]);
            Rat d_out = exact_dist(tape[c.outputs[0]], tape_y[c.outputs[0]]);
            CHECK(d_out <= l_rat * (d_in + u));
        }
    }
}

TEST_CASE("parser round-trip against the monomial oracle") {
    // Small integer coefficients and eighth-integer points keep binary64
    // evaluation exact; the oracle evaluates the expanded monomials in
    // rational arithmetic.
    std::vector<Poly> system{
        {{3, 1, {2, 0}}, {-2, 0, {1, 1}}, {0, 5, {0, 3}}, {7, -4, {0, 0}}},
        {{1, 0, {1, 2}}, {-6, 2, {2, 1}}, {4, 0, {0, 1}}},
    };
    Circuit c = parse_system(poly_source(system, 2));
    SplitMix64 rng(41);
    for (int i = 0; i < 20; ++i) {
        long a = static_cast<long>(rng.next() % 33) - 16;
        long b = static_cast<long>(rng.next() % 33) - 16;
        std::vector<RatC> x{{Rat(BigInt(a), BigInt(8)), Rat(0)}, {Rat(BigInt(b), BigInt(8)), Rat(0)}};
        auto got = eval_point(c, {pt(a / 8.0), pt(b / 8.0)});
        for (std::size_t j = 0; j < system.size(); ++j) {
            RatC want = eval_poly_rat(system[j], x);
            CHECK(Rat::from_double(got[j].re) == want.re);
            CHECK(Rat::from_double(got[j].im) == want.im);
        }
    }
}

TEST_CASE("deduplicated node counts and degrees") {
    Circuit c = parse_system("vars: x\nx^2 + x^2\n");
    CHECK(deduplicated_node_count(c) < c.size());
    auto degs = output_degrees(parse_system("vars: x y\nx^3*y + 1\nx + y\n"));
    CHECK(degs[0] == 4);
    CHECK(degs[1] == 1);
}
