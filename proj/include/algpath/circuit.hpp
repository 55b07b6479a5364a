#ifndef ALGPATH_CIRCUIT_HPP
#define ALGPATH_CIRCUIT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "algpath/interval.hpp"

namespace algpath {

// Arithmetic circuit (straight-line program) over C with four node kinds.
// Nodes are topologically ordered: Add/Mul operands reference strictly
// earlier indices.
struct Circuit {
    enum class Kind : std::uint8_t { Input, Const, Add, Mul };
    struct Node {
        Kind kind;
        std::uint32_t a = 0, b = 0;  // operand indices (Add/Mul), input index (Input)
        double cre = 0, cim = 0;     // constant value (Const)
    };

    std::vector<Node> nodes;
    std::vector<std::uint32_t> outputs;
    std::uint32_t n_inputs = 0;
    bool parametric = false;  // input 0 is the path parameter
    std::vector<std::string> input_names;

    std::size_t size() const { return nodes.size(); }
    // Number of non-parameter variables.
    std::size_t n_vars() const { return parametric ? n_inputs - 1 : n_inputs; }
};

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int l, int c)
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) + ")"),
          line(l), col(c) {}
};

// Text format:
//   vars: x y            (required, first non-comment line)
//   param: t             (optional)
//   <polynomial>         (one per line; sum of terms, see README)
// '#' starts a comment. Decimal coefficients are rounded to the nearest
// binary64 value at parse time.
Circuit parse_system(const std::string& text);

// Incremental builder. With `dedup`, structurally identical nodes are
// shared; with `fold`, additions/multiplications by constants 0 and 1
// collapse and constant subexpressions are evaluated.
class CircuitBuilder {
public:
    explicit CircuitBuilder(bool dedup = false, bool fold = false);
    // Seeds the builder with the nodes of an existing circuit.
    CircuitBuilder(const Circuit& base, bool dedup, bool fold);

    std::uint32_t input(std::uint32_t index);
    std::uint32_t constant(double re, double im);
    std::uint32_t add(std::uint32_t a, std::uint32_t b);
    std::uint32_t mul(std::uint32_t a, std::uint32_t b);
    std::uint32_t pow(std::uint32_t base, unsigned exponent);  // binary exponentiation

    const std::vector<Circuit::Node>& nodes() const { return nodes_; }
    Circuit finish(std::vector<std::uint32_t> outputs, std::uint32_t n_inputs, bool parametric,
                   std::vector<std::string> input_names = {});

private:
    std::uint32_t push(Circuit::Node n);
    std::vector<Circuit::Node> nodes_;
    bool dedup_, fold_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> memo_;  // hash -> candidates
    void memo_insert(std::uint32_t idx);
    std::optional<std::uint32_t> memo_find(const Circuit::Node& n) const;
};

// Forward-mode differentiation. The result computes the original outputs
// followed, for each index in `wrt` in order, by the derivatives of every
// output with respect to that input. New nodes are folded and shared.
Circuit differentiate(const Circuit& c, std::span<const std::uint32_t> wrt);

// Structural rewrite binding input 0 to a constant; the result is
// non-parametric.
Circuit bind_parameter(const Circuit& c, double t_re, double t_im);

// Formal degree of each output in the non-parameter variables
// (upper bound; exact for expanded polynomials).
std::vector<unsigned> output_degrees(const Circuit& c);

// Node count after hash-consing, for size reporting.
std::size_t deduplicated_node_count(const Circuit& c);

// ---------------------------------------------------------------------------
// Evaluation domains
// ---------------------------------------------------------------------------

template <class N>
struct PointDomain {
    using value_type = CPoint<N>;
    PrecisionContext ctx;
    value_type from_const(double re, double im) const {
        return {ScalarOps<N>::from_double(re), ScalarOps<N>::from_double(im)};
    }
    value_type add(const value_type& a, const value_type& b) const { return cp_add(a, b, ctx); }
    value_type mul(const value_type& a, const value_type& b) const { return cp_mul(a, b, ctx); }
};

template <class N>
struct BoxDomain {
    using value_type = ComplexBox<N>;
    PrecisionContext ctx;
    value_type from_const(double re, double im) const {
        using S = ScalarOps<N>;
        return ComplexBox<N>(RealInterval<N>::singleton(S::from_double(re)),
                             RealInterval<N>::singleton(S::from_double(im)));
    }
    value_type add(const value_type& a, const value_type& b) const { return cadd(a, b, ctx); }
    value_type mul(const value_type& a, const value_type& b) const { return cmul(a, b, ctx); }
};

// Single forward pass. `mask`, when given, marks the nodes that must be
// computed (see compute_mask); skipped slots hold default values.
template <class Domain>
std::vector<typename Domain::value_type> evaluate_tape(
    const Circuit& c, const Domain& dom,
    std::span<const typename Domain::value_type> inputs,
    const std::vector<std::uint8_t>* mask = nullptr) {
    using V = typename Domain::value_type;
    if (inputs.size() != c.n_inputs)
        throw std::invalid_argument("evaluate: wrong number of inputs");
    std::vector<V> tape(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        const auto& n = c.nodes[i];
        switch (n.kind) {
            case Circuit::Kind::Input: tape[i] = inputs[n.a]; break;
            case Circuit::Kind::Const: tape[i] = dom.from_const(n.cre, n.cim); break;
            case Circuit::Kind::Add: tape[i] = dom.add(tape[n.a], tape[n.b]); break;
            case Circuit::Kind::Mul: tape[i] = dom.mul(tape[n.a], tape[n.b]); break;
        }
    }
    return tape;
}

template <class Domain>
std::vector<typename Domain::value_type> evaluate(
    const Circuit& c, const Domain& dom,
    std::span<const typename Domain::value_type> inputs) {
    auto tape = evaluate_tape(c, dom, inputs);
    std::vector<typename Domain::value_type> out;
    out.reserve(c.outputs.size());
    for (auto idx : c.outputs) out.push_back(tape[idx]);
    return out;
}

// Nodes needed to compute the given outputs.
std::vector<std::uint8_t> compute_mask(const Circuit& c, std::span<const std::uint32_t> outputs);

// ---------------------------------------------------------------------------
// Certified Lipschitz constant (Proposition-style width bound)
// ---------------------------------------------------------------------------
//
// Returns L such that width(box_f(X)) <= L * (width(X) + u_prec) whenever all
// node values over the region have magnitude <= M (M >= 1). Per node we track
// (p, q) with width <= p*w + q*u:
//   input (1,0); const (0,0); add (pa+pb, qa+qb+2M);
//   complex mul (2M(pa+pb), 2M(qa+qb) + 4M^2).
// The mul row follows from width(IJ) <= |I|w(J) + |J|w(I) applied to the four
// real products (each endpoint rounded within M^2 u/2) plus the final
// combination rounded within M^2 u per endpoint.
double lipschitz_bound(const Circuit& c, double mag_bound);

// ---------------------------------------------------------------------------
// Tracking system: a circuit together with its Jacobian and parameter
// derivative, evaluated in one pass.
// ---------------------------------------------------------------------------

struct TrackingSystem {
    Circuit aug;       // outputs: F (n), then dF/dx_i blocks, then dF/dt (if parametric)
    std::size_t n = 0; // number of x variables
    bool parametric = false;
    std::size_t f_nodes = 0;   // node count of the source circuit
    std::size_t df_added = 0;  // extra nodes introduced by differentiation
    std::vector<std::uint8_t> mask_f, mask_f_df, mask_df, mask_fdot;

    std::uint32_t out_f(std::size_t j) const { return aug.outputs[j]; }
    std::uint32_t out_df(std::size_t j, std::size_t i) const {
        return aug.outputs[n + i * n + j];
    }
    std::uint32_t out_fdot(std::size_t j) const { return aug.outputs[n + n * n + j]; }
};

TrackingSystem build_tracking_system(const Circuit& f);

namespace detail {
template <class N>
std::vector<ComplexBox<N>> box_inputs(const TrackingSystem& sys,
                                      const std::optional<ComplexBox<N>>& param,
                                      const BoxVector<N>& x) {
    if (x.size() != sys.n) throw std::invalid_argument("system evaluation: dimension mismatch");
    std::vector<ComplexBox<N>> in;
    in.reserve(sys.aug.n_inputs);
    if (sys.parametric) {
        if (!param) throw std::invalid_argument("system evaluation: missing parameter value");
        in.push_back(*param);
    }
    in.insert(in.end(), x.begin(), x.end());
    return in;
}
}  // namespace detail

template <class N>
BoxVector<N> eval_f_box(const TrackingSystem& sys, const std::optional<ComplexBox<N>>& param,
                        const BoxVector<N>& x, const PrecisionContext& ctx) {
    auto in = detail::box_inputs(sys, param, x);
    auto tape = evaluate_tape(sys.aug, BoxDomain<N>{ctx}, std::span<const ComplexBox<N>>(in),
                              &sys.mask_f);
    BoxVector<N> out(sys.n);
    for (std::size_t j = 0; j < sys.n; ++j) out[j] = tape[sys.out_f(j)];
    return out;
}

template <class N>
BoxMatrix<N> eval_df_box(const TrackingSystem& sys, const std::optional<ComplexBox<N>>& param,
                         const BoxVector<N>& x, const PrecisionContext& ctx) {
    auto in = detail::box_inputs(sys, param, x);
    auto tape = evaluate_tape(sys.aug, BoxDomain<N>{ctx}, std::span<const ComplexBox<N>>(in),
                              &sys.mask_df);
    BoxMatrix<N> out(sys.n);
    for (std::size_t j = 0; j < sys.n; ++j)
        for (std::size_t i = 0; i < sys.n; ++i) out.at(j, i) = tape[sys.out_df(j, i)];
    return out;
}

template <class N>
BoxVector<N> eval_fdot_box(const TrackingSystem& sys, const std::optional<ComplexBox<N>>& param,
                           const BoxVector<N>& x, const PrecisionContext& ctx) {
    if (!sys.parametric) throw std::logic_error("eval_fdot_box: system is not parametric");
    auto in = detail::box_inputs(sys, param, x);
    auto tape = evaluate_tape(sys.aug, BoxDomain<N>{ctx}, std::span<const ComplexBox<N>>(in),
                              &sys.mask_fdot);
    BoxVector<N> out(sys.n);
    for (std::size_t j = 0; j < sys.n; ++j) out[j] = tape[sys.out_fdot(j)];
    return out;
}

}  // namespace algpath

#endif
