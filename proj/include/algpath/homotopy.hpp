#ifndef ALGPATH_HOMOTOPY_HPP
#define ALGPATH_HOMOTOPY_HPP

#include <complex>
#include <cstdint>

#include "algpath/refine.hpp"

namespace algpath {

struct CandidateRejected : std::runtime_error {
    CandidateRejected() : std::runtime_error("no radius certifies around the candidate point") {}
};

// Deterministic 64-bit generator (splitmix) used for all seeded randomness.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1p-53; }
    // Standard complex normal via Box-Muller.
    std::complex<double> normal_complex() {
        double u1 = uniform01(), u2 = uniform01();
        if (u1 <= 0) u1 = 0x1p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2)};
    }
};

// Unit-modulus gamma constants, angle uniform, fully determined by the seed.
std::vector<std::complex<double>> random_gamma(std::uint64_t seed, std::size_t n);

// ---------------------------------------------------------------------------
// Homotopy families
// ---------------------------------------------------------------------------

// F_t(x) = t f(x) + (1-t) g(x) with g_i(x) = gamma_i (x_i^{d_i} - 1); start
// zeros are all tuples of d_i-th roots of unity.
struct TotalDegreeHomotopy {
    Circuit family;  // parametric
    std::vector<unsigned> degrees;
    std::vector<std::complex<double>> gamma;

    std::size_t path_count() const;
    std::vector<std::complex<double>> start_point(std::size_t path) const;
    // Exact diagonal inverse of dg at the start point, 1/(gamma_i d_i x_i^{d_i-1}).
    std::vector<std::complex<double>> start_diag_inverse(std::size_t path) const;
};

TotalDegreeHomotopy make_total_degree(const Circuit& target, std::uint64_t seed);

// F_t(x) = f(x) - (1-t) f(x0); x0 is an exact start zero by construction.
struct NewtonHomotopy {
    Circuit family;
    std::vector<std::complex<double>> x0;
};

NewtonHomotopy make_newton(const Circuit& target, const std::vector<std::complex<double>>& x0);

// ---------------------------------------------------------------------------
// Benchmark system generators (desk-scale versions of the paper families)
// ---------------------------------------------------------------------------

// Dense system: every monomial of total degree <= deg in n variables, with
// standard complex normal coefficients. Emitted as parser source text.
std::string dense_system_source(int n_vars, int degree, std::uint64_t seed);

// Low-Waring-rank system: each component is +-1 + sum of `rank` powers of
// random {-1,0,1} linear forms; built directly to keep the compact circuit.
Circuit structured_system(int n_vars, int degree, int rank, std::uint64_t seed);

// Katsura system in m variables (m-1 quadrics plus one linear equation).
std::string katsura_source(int m);

// ---------------------------------------------------------------------------
// Start-box bootstrap
// ---------------------------------------------------------------------------

template <class N>
PointVec<N> to_points(const std::vector<std::complex<double>>& xs) {
    using S = ScalarOps<N>;
    PointVec<N> out;
    out.reserve(xs.size());
    for (const auto& z : xs) out.push_back({S::from_double(z.real()), S::from_double(z.imag())});
    return out;
}

// Wraps an approximate regular zero into a certified 7/8-Moore box. The
// radius search starts at 1e-3, halves down to 1e-12, and after the first
// success grows by doubling while the certificate still holds (r <= 1).
template <class N>
MooreBox<N> certify_candidate(const SystemView<N>& view, const PointVec<N>& x,
                              const PrecisionContext& ctx, const PointMat<N>* a_hint = nullptr) {
    using S = ScalarOps<N>;
    PointMat<N> a;
    if (a_hint) {
        a = *a_hint;
    } else {
        try {
            a = midpoint_inverse(view.df(singleton_vec(x), ctx), ctx);
        } catch (const SingularJacobian&) {
            throw CandidateRejected();  // not near a regular zero
        }
    }
    const double rho = 7.0 / 8.0;
    N r = S::from_double(1e-3);
    const N r_min = S::from_double(1e-12);
    bool found = false;
    while (S::cmp(r, r_min) >= 0) {
        MooreBox<N> cand{x, r, a, rho};
        if (certify(view, cand, rho, ctx)) {
            found = true;
            break;
        }
        r = S::ldexp2(r, -1);
    }
    if (!found) throw CandidateRejected();
    while (true) {
        N r2 = S::ldexp2(r, 1);
        if (S::cmp(r2, S::one()) > 0) break;
        MooreBox<N> cand{x, r2, a, rho};
        if (!certify(view, cand, rho, ctx)) break;
        r = r2;
    }
    return MooreBox<N>{x, r, a, rho};
}

template <class N>
MooreBox<N> total_degree_start_box(const TrackingSystem& sys, const TotalDegreeHomotopy& hom,
                                   std::size_t path, const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    PointVec<N> x = to_points<N>(hom.start_point(path));
    auto diag = hom.start_diag_inverse(path);
    PointMat<N> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        a.at(i, i) = CPoint<N>{S::from_double(diag[i].real()), S::from_double(diag[i].imag())};
    return certify_candidate(view_at(sys, S::zero()), x, ctx, &a);
}

template <class N>
MooreBox<N> newton_start_box(const TrackingSystem& sys, const NewtonHomotopy& hom,
                             const PrecisionContext& ctx) {
    using S = ScalarOps<N>;
    PointVec<N> x = to_points<N>(hom.x0);
    return certify_candidate(view_at(sys, S::zero()), x, ctx);
}

}  // namespace algpath

#endif
