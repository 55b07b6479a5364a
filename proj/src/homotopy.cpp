#include "algpath/homotopy.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace algpath {

std::vector<std::complex<double>> random_gamma(std::uint64_t seed, std::size_t n) {
    SplitMix64 rng(seed ^ 0x67a47c1500000000ull);
    std::vector<std::complex<double>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double angle = 2 * M_PI * rng.uniform01();
        out.emplace_back(std::cos(angle), std::sin(angle));
    }
    return out;
}

namespace {

// Appends the nodes of `src` (non-parametric) with inputs shifted by one to
// make room for the parameter; returns the remapped output ids.
std::vector<std::uint32_t> splice_shifted(CircuitBuilder& b, const Circuit& src) {
    std::vector<std::uint32_t> remap(src.nodes.size());
    for (std::size_t i = 0; i < src.nodes.size(); ++i) {
        const auto& n = src.nodes[i];
        switch (n.kind) {
            case Circuit::Kind::Input: remap[i] = b.input(n.a + 1); break;
            case Circuit::Kind::Const: remap[i] = b.constant(n.cre, n.cim); break;
            case Circuit::Kind::Add: remap[i] = b.add(remap[n.a], remap[n.b]); break;
            case Circuit::Kind::Mul: remap[i] = b.mul(remap[n.a], remap[n.b]); break;
        }
    }
    std::vector<std::uint32_t> outs;
    outs.reserve(src.outputs.size());
    for (auto o : src.outputs) outs.push_back(remap[o]);
    return outs;
}

std::vector<std::string> shifted_names(const Circuit& target) {
    std::vector<std::string> names;
    names.push_back("t");
    if (target.input_names.size() == target.n_inputs)
        names.insert(names.end(), target.input_names.begin(), target.input_names.end());
    else
        for (std::uint32_t i = 0; i < target.n_inputs; ++i) names.push_back("x" + std::to_string(i + 1));
    return names;
}

std::string fmt_complex(std::complex<double> z) {
    char buf[80];
    if (z.imag() >= 0)
        std::snprintf(buf, sizeof buf, "(%.17g+%.17gi)", z.real(), z.imag());
    else
        std::snprintf(buf, sizeof buf, "(%.17g-%.17gi)", z.real(), -z.imag());
    return buf;
}

}  // namespace

TotalDegreeHomotopy make_total_degree(const Circuit& target, std::uint64_t seed) {
    if (target.parametric) throw std::invalid_argument("total degree: target must not be parametric");
    if (target.outputs.size() != target.n_inputs)
        throw std::invalid_argument("total degree: system must be square");
    const std::size_t n = target.n_inputs;

    TotalDegreeHomotopy hom;
    hom.degrees = output_degrees(target);
    for (unsigned d : hom.degrees)
        if (d < 1) throw std::invalid_argument("total degree: every equation must have degree >= 1");
    hom.gamma = random_gamma(seed, n);

    CircuitBuilder b;
    std::uint32_t t = b.input(0);
    std::vector<std::uint32_t> f_outs = splice_shifted(b, target);
    std::uint32_t one_minus_t = b.add(b.constant(1, 0), b.mul(b.constant(-1, 0), t));
    std::vector<std::uint32_t> outs;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t xi = b.input(static_cast<std::uint32_t>(i + 1));
        std::uint32_t pow = b.pow(xi, hom.degrees[i]);
        std::uint32_t gi = b.mul(b.constant(hom.gamma[i].real(), hom.gamma[i].imag()),
                                 b.add(pow, b.constant(-1, 0)));
        outs.push_back(b.add(b.mul(t, f_outs[i]), b.mul(one_minus_t, gi)));
    }
    hom.family = b.finish(std::move(outs), static_cast<std::uint32_t>(n + 1), true,
                          shifted_names(target));
    return hom;
}

std::size_t TotalDegreeHomotopy::path_count() const {
    std::size_t c = 1;
    for (unsigned d : degrees) c *= d;
    return c;
}

std::vector<std::complex<double>> TotalDegreeHomotopy::start_point(std::size_t path) const {
    std::vector<std::complex<double>> x(degrees.size());
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        std::size_t k = path % degrees[i];
        path /= degrees[i];
        double angle = 2 * M_PI * static_cast<double>(k) / degrees[i];
        x[i] = {std::cos(angle), std::sin(angle)};
    }
    return x;
}

std::vector<std::complex<double>> TotalDegreeHomotopy::start_diag_inverse(std::size_t path) const {
    auto x = start_point(path);
    std::vector<std::complex<double>> diag(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::complex<double> deriv =
            gamma[i] * static_cast<double>(degrees[i]) * std::pow(x[i], static_cast<int>(degrees[i]) - 1);
        diag[i] = 1.0 / deriv;
    }
    return diag;
}

NewtonHomotopy make_newton(const Circuit& target, const std::vector<std::complex<double>>& x0) {
    if (target.parametric) throw std::invalid_argument("newton homotopy: target must not be parametric");
    if (target.outputs.size() != target.n_inputs)
        throw std::invalid_argument("newton homotopy: system must be square");
    if (x0.size() != target.n_inputs)
        throw std::invalid_argument("newton homotopy: start point has wrong dimension");
    const std::size_t n = target.n_inputs;

    // f(x0) in plain point arithmetic; the values become representable
    // constants of the family circuit.
    PointDomain<double> dom{PrecisionContext::fixed64()};
    std::vector<CPoint<double>> in(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = {x0[i].real(), x0[i].imag()};
    auto fx0 = evaluate(target, dom, std::span<const CPoint<double>>(in));

    NewtonHomotopy hom;
    hom.x0 = x0;
    CircuitBuilder b;
    std::uint32_t t = b.input(0);
    std::vector<std::uint32_t> f_outs = splice_shifted(b, target);
    std::uint32_t t_minus_1 = b.add(t, b.constant(-1, 0));
    std::vector<std::uint32_t> outs;
    for (std::size_t i = 0; i < n; ++i)
        outs.push_back(b.add(f_outs[i], b.mul(t_minus_1, b.constant(fx0[i].re, fx0[i].im))));
    hom.family = b.finish(std::move(outs), static_cast<std::uint32_t>(n + 1), true,
                          shifted_names(target));
    return hom;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {

void enumerate_monomials(int n_vars, int max_deg, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == n_vars) {
        out.push_back(current);
        return;
    }
    int used = 0;
    for (int e : current) used += e;
    for (int e = 0; e + used <= max_deg; ++e) {
        current.push_back(e);
        enumerate_monomials(n_vars, max_deg, current, out);
        current.pop_back();
    }
}

}  // namespace

std::string dense_system_source(int n_vars, int degree, std::uint64_t seed) {
    SplitMix64 rng(seed ^ 0xd5e4a3b200000000ull);
    std::ostringstream out;
    out << "vars:";
    for (int i = 1; i <= n_vars; ++i) out << " x" << i;
    out << "\n";
    std::vector<std::vector<int>> monomials;
    std::vector<int> cur;
    enumerate_monomials(n_vars, degree, cur, monomials);
    for (int eq = 0; eq < n_vars; ++eq) {
        bool first = true;
        for (const auto& mono : monomials) {
            std::complex<double> c = rng.normal_complex();
            if (!first) out << " + ";
            out << fmt_complex(c);
            for (int v = 0; v < n_vars; ++v) {
                if (mono[v] == 0) continue;
                out << "*x" << (v + 1);
                if (mono[v] > 1) out << "^" << mono[v];
            }
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

Circuit structured_system(int n_vars, int degree, int rank, std::uint64_t seed) {
    SplitMix64 rng(seed ^ 0x57a6c7e100000000ull);
    CircuitBuilder b(/*dedup=*/true, /*fold=*/true);
    std::vector<std::uint32_t> xs;
    for (int i = 0; i < n_vars; ++i) xs.push_back(b.input(static_cast<std::uint32_t>(i)));
    std::vector<std::uint32_t> outs;
    std::vector<std::string> names;
    for (int i = 1; i <= n_vars; ++i) names.push_back("x" + std::to_string(i));
    for (int eq = 0; eq < n_vars; ++eq) {
        double sign = (rng.next() & 1) ? 1.0 : -1.0;
        std::uint32_t acc = b.constant(sign, 0);
        for (int r = 0; r < rank; ++r) {
            std::optional<std::uint32_t> form;
            for (int v = 0; v < n_vars; ++v) {
                int a = static_cast<int>(rng.next() % 3) - 1;  // uniform in {-1,0,1}
                if (a == 0) continue;
                std::uint32_t term = a == 1 ? xs[v] : b.mul(b.constant(-1, 0), xs[v]);
                form = form ? b.add(*form, term) : term;
            }
            if (!form) form = b.constant(0, 0);
            acc = b.add(acc, b.pow(*form, static_cast<unsigned>(degree)));
        }
        outs.push_back(acc);
    }
    return b.finish(std::move(outs), static_cast<std::uint32_t>(n_vars), false, std::move(names));
}

std::string katsura_source(int m) {
    if (m < 2) throw std::invalid_argument("katsura: need at least 2 variables");
    const int nmax = m - 1;  // indices 0..nmax
    std::ostringstream out;
    out << "vars:";
    for (int i = 0; i <= nmax; ++i) out << " u" << i;
    out << "\n";
    for (int j = 0; j <= nmax - 1; ++j) {
        // sum over k of u(|k|) u(|j-k|) for |k|, |j-k| <= nmax, minus u(j).
        std::map<std::pair<int, int>, long> coeff;
        for (int k = -nmax; k <= nmax; ++k) {
            int l = j - k;
            if (l < -nmax || l > nmax) continue;
            int a = std::abs(k), bidx = std::abs(l);
            if (a > bidx) std::swap(a, bidx);
            coeff[{a, bidx}] += 1;
        }
        bool first = true;
        for (const auto& [key, c] : coeff) {
            if (!first) out << " + ";
            if (c != 1) out << c << "*";
            if (key.first == key.second)
                out << "u" << key.first << "^2";
            else
                out << "u" << key.first << "*u" << key.second;
            first = false;
        }
        out << " - u" << j << "\n";
    }
    out << "u0";
    for (int k = 1; k <= nmax; ++k) out << " + 2*u" << k;
    out << " - 1\n";
    return out.str();
}

}  // namespace algpath
