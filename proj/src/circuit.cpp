#include "algpath/circuit.hpp"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace algpath {

namespace {

std::uint64_t node_hash(const Circuit::Node& n) {
    auto mix = [](std::uint64_t h, std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    };
    std::uint64_t h = static_cast<std::uint64_t>(n.kind);
    h = mix(h, n.a);
    h = mix(h, n.b);
    std::uint64_t bits;
    std::memcpy(&bits, &n.cre, 8);
    h = mix(h, bits);
    std::memcpy(&bits, &n.cim, 8);
    h = mix(h, bits);
    return h;
}

bool node_equal(const Circuit::Node& x, const Circuit::Node& y) {
    return x.kind == y.kind && x.a == y.a && x.b == y.b && x.cre == y.cre && x.cim == y.cim;
}

}  // namespace

CircuitBuilder::CircuitBuilder(bool dedup, bool fold) : dedup_(dedup), fold_(fold) {}

CircuitBuilder::CircuitBuilder(const Circuit& base, bool dedup, bool fold)
    : nodes_(base.nodes), dedup_(dedup), fold_(fold) {
    if (dedup_)
        for (std::uint32_t i = 0; i < nodes_.size(); ++i) memo_insert(i);
}

void CircuitBuilder::memo_insert(std::uint32_t idx) {
    memo_[node_hash(nodes_[idx])].push_back(idx);
}

std::optional<std::uint32_t> CircuitBuilder::memo_find(const Circuit::Node& n) const {
    auto it = memo_.find(node_hash(n));
    if (it == memo_.end()) return std::nullopt;
    for (std::uint32_t idx : it->second)
        if (node_equal(nodes_[idx], n)) return idx;
    return std::nullopt;
}

std::uint32_t CircuitBuilder::push(Circuit::Node n) {
    if (dedup_) {
        if (auto hit = memo_find(n)) return *hit;
    }
    nodes_.push_back(n);
    auto idx = static_cast<std::uint32_t>(nodes_.size() - 1);
    if (dedup_) memo_insert(idx);
    return idx;
}

std::uint32_t CircuitBuilder::input(std::uint32_t index) {
    Circuit::Node n{Circuit::Kind::Input, index, 0, 0, 0};
    return push(n);
}

std::uint32_t CircuitBuilder::constant(double re, double im) {
    Circuit::Node n{Circuit::Kind::Const, 0, 0, re, im};
    return push(n);
}

std::uint32_t CircuitBuilder::add(std::uint32_t a, std::uint32_t b) {
    if (fold_) {
        const auto& na = nodes_[a];
        const auto& nb = nodes_[b];
        auto is_zero = [](const Circuit::Node& n) {
            return n.kind == Circuit::Kind::Const && n.cre == 0 && n.cim == 0;
        };
        if (is_zero(na)) return b;
        if (is_zero(nb)) return a;
        if (na.kind == Circuit::Kind::Const && nb.kind == Circuit::Kind::Const)
            return constant(na.cre + nb.cre, na.cim + nb.cim);
    }
    return push(Circuit::Node{Circuit::Kind::Add, a, b, 0, 0});
}

std::uint32_t CircuitBuilder::mul(std::uint32_t a, std::uint32_t b) {
    if (fold_) {
        const auto& na = nodes_[a];
        const auto& nb = nodes_[b];
        auto is_zero = [](const Circuit::Node& n) {
            return n.kind == Circuit::Kind::Const && n.cre == 0 && n.cim == 0;
        };
        auto is_one = [](const Circuit::Node& n) {
            return n.kind == Circuit::Kind::Const && n.cre == 1 && n.cim == 0;
        };
        if (is_zero(na) || is_zero(nb)) return constant(0, 0);
        if (is_one(na)) return b;
        if (is_one(nb)) return a;
        if (na.kind == Circuit::Kind::Const && nb.kind == Circuit::Kind::Const)
            return constant(na.cre * nb.cre - na.cim * nb.cim, na.cre * nb.cim + na.cim * nb.cre);
    }
    return push(Circuit::Node{Circuit::Kind::Mul, a, b, 0, 0});
}

std::uint32_t CircuitBuilder::pow(std::uint32_t base, unsigned exponent) {
    if (exponent == 0) return constant(1, 0);
    // Square-and-multiply; squarings are shared through dedup when enabled.
    std::uint32_t result = 0;
    bool have_result = false;
    std::uint32_t sq = base;
    unsigned e = exponent;
    while (true) {
        if (e & 1) {
            result = have_result ? mul(result, sq) : sq;
            have_result = true;
        }
        e >>= 1;
        if (!e) break;
        sq = mul(sq, sq);
    }
    return result;
}

Circuit CircuitBuilder::finish(std::vector<std::uint32_t> outputs, std::uint32_t n_inputs,
                               bool parametric, std::vector<std::string> input_names) {
    Circuit c;
    c.nodes = std::move(nodes_);
    c.outputs = std::move(outputs);
    c.n_inputs = n_inputs;
    c.parametric = parametric;
    c.input_names = std::move(input_names);
    return c;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
    const char* p;
    const char* line_begin;
    int line;

    int col() const { return static_cast<int>(p - line_begin) + 1; }
    void skip_ws() {
        while (*p == ' ' || *p == '\t') ++p;
    }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
    throw ParseError(msg, c.line, c.col());
}

bool parse_number(Cursor& c, double* out) {
    char* end = nullptr;
    double v = std::strtod(c.p, &end);
    if (end == c.p) return false;
    // Reject a bare sign consumed by strtod as part of an operator.
    c.p = end;
    *out = v;
    return true;
}

std::string parse_ident(Cursor& c) {
    if (!std::isalpha(static_cast<unsigned char>(*c.p)) && *c.p != '_') return {};
    std::string s;
    while (std::isalnum(static_cast<unsigned char>(*c.p)) || *c.p == '_') s.push_back(*c.p++);
    return s;
}

struct LineParser {
    Cursor& cur;
    CircuitBuilder& b;
    const std::unordered_map<std::string, std::uint32_t>& vars;  // name -> input node

    // polynomial := ['+'|'-'] term (('+'|'-') term)*
    std::uint32_t parse_poly() {
        cur.skip_ws();
        bool neg = false;
        if (*cur.p == '+' || *cur.p == '-') {
            neg = (*cur.p == '-');
            ++cur.p;
        }
        std::uint32_t acc = parse_term(neg);
        while (true) {
            cur.skip_ws();
            if (*cur.p == '+' || *cur.p == '-') {
                bool tneg = (*cur.p == '-');
                ++cur.p;
                acc = b.add(acc, parse_term(tneg));
            } else {
                break;
            }
        }
        return acc;
    }

    // term := coefficient? ('*'? var ('^' int)?)*
    std::uint32_t parse_term(bool negate) {
        cur.skip_ws();
        std::optional<std::uint32_t> acc;
        bool saw_factor = false;
        // Leading coefficient: decimal or (a+bi).
        if (std::isdigit(static_cast<unsigned char>(*cur.p)) || *cur.p == '.') {
            double v = 0;
            if (!parse_number(cur, &v)) fail(cur, "expected coefficient");
            acc = b.constant(negate ? -v : v, 0);
            negate = false;
            saw_factor = true;
        } else if (*cur.p == '(') {
            auto [re, im] = parse_complex();
            acc = b.constant(negate ? -re : re, negate ? -im : im);
            negate = false;
            saw_factor = true;
        }
        while (true) {
            cur.skip_ws();
            if (*cur.p == '*') {
                ++cur.p;
                cur.skip_ws();
            }
            if (std::isalpha(static_cast<unsigned char>(*cur.p)) || *cur.p == '_') {
                std::uint32_t f = parse_var_power();
                acc = acc ? b.mul(*acc, f) : f;
                saw_factor = true;
            } else if (*cur.p == '(') {
                auto [re, im] = parse_complex();
                std::uint32_t f = b.constant(re, im);
                acc = acc ? b.mul(*acc, f) : f;
                saw_factor = true;
            } else {
                break;
            }
        }
        if (!saw_factor) fail(cur, "expected term");
        if (negate) acc = b.mul(b.constant(-1, 0), *acc);
        return *acc;
    }

    std::uint32_t parse_var_power() {
        Cursor at = cur;
        std::string name = parse_ident(cur);
        auto it = vars.find(name);
        if (it == vars.end()) fail(at, "unknown variable '" + name + "'");
        cur.skip_ws();
        unsigned e = 1;
        if (*cur.p == '^') {
            ++cur.p;
            cur.skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(*cur.p))) fail(cur, "expected exponent");
            e = 0;
            while (std::isdigit(static_cast<unsigned char>(*cur.p))) {
                e = e * 10 + static_cast<unsigned>(*cur.p - '0');
                if (e > 1000000) fail(cur, "exponent too large");
                ++cur.p;
            }
        }
        return b.pow(it->second, e);
    }

    // '(' a (('+'|'-') b 'i')? ')'
    std::pair<double, double> parse_complex() {
        ++cur.p;  // '('
        cur.skip_ws();
        double re = 0;
        if (!parse_number(cur, &re)) fail(cur, "expected real part");
        cur.skip_ws();
        double im = 0;
        if (*cur.p == '+' || *cur.p == '-') {
            bool neg = (*cur.p == '-');
            ++cur.p;
            cur.skip_ws();
            if (!parse_number(cur, &im)) fail(cur, "expected imaginary part");
            im = neg ? -im : im;
            cur.skip_ws();
            if (*cur.p != 'i') fail(cur, "expected 'i'");
            ++cur.p;
        } else if (*cur.p == 'i') {
            ++cur.p;
            im = re;
            re = 0;
        }
        cur.skip_ws();
        if (*cur.p != ')') fail(cur, "expected ')'");
        ++cur.p;
        return {re, im};
    }
};

}  // namespace

Circuit parse_system(const std::string& text) {
    CircuitBuilder b(false, false);
    std::vector<std::string> var_names;
    std::optional<std::string> param_name;
    std::unordered_map<std::string, std::uint32_t> var_nodes;
    std::vector<std::uint32_t> outputs;
    bool header_done = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
        raw.push_back('\0');
        Cursor cur{raw.c_str(), raw.c_str(), line_no};
        cur.skip_ws();
        if (*cur.p == '\0') continue;

        if (!header_done) {
            Cursor probe = cur;
            std::string kw = parse_ident(probe);
            if (kw == "vars" && *probe.p == ':') {
                if (!var_names.empty()) fail(cur, "duplicate vars line");
                ++probe.p;
                cur = probe;
                while (true) {
                    cur.skip_ws();
                    if (*cur.p == '\0') break;
                    std::string name = parse_ident(cur);
                    if (name.empty()) fail(cur, "expected variable name");
                    var_names.push_back(name);
                }
                if (var_names.empty()) fail(cur, "empty variable list");
                continue;
            }
            if (kw == "param" && *probe.p == ':') {
                if (param_name) fail(cur, "duplicate param line");
                ++probe.p;
                cur = probe;
                cur.skip_ws();
                std::string name = parse_ident(cur);
                if (name.empty()) fail(cur, "expected parameter name");
                param_name = name;
                continue;
            }
            if (var_names.empty()) fail(cur, "expected 'vars:' line");
            header_done = true;
            // Materialize input nodes: parameter first, then variables.
            std::uint32_t idx = 0;
            if (param_name) var_nodes[*param_name] = b.input(idx++);
            for (const auto& v : var_names) {
                if (var_nodes.count(v)) fail(cur, "duplicate variable '" + v + "'");
                var_nodes[v] = b.input(idx++);
            }
        }
        LineParser lp{cur, b, var_nodes};
        outputs.push_back(lp.parse_poly());
        cur.skip_ws();
        if (*cur.p != '\0') fail(cur, "unexpected trailing input");
    }
    if (var_names.empty()) throw ParseError("no variables declared", line_no, 1);
    if (outputs.empty()) throw ParseError("no polynomials", line_no, 1);

    std::vector<std::string> input_names;
    if (param_name) input_names.push_back(*param_name);
    input_names.insert(input_names.end(), var_names.begin(), var_names.end());
    auto n_inputs = static_cast<std::uint32_t>(var_names.size() + (param_name ? 1 : 0));
    return b.finish(std::move(outputs), n_inputs, param_name.has_value(), std::move(input_names));
}

// ---------------------------------------------------------------------------
// Differentiation and rewrites
// ---------------------------------------------------------------------------

Circuit differentiate(const Circuit& c, std::span<const std::uint32_t> wrt) {
    CircuitBuilder b(c, /*dedup=*/true, /*fold=*/true);
    std::vector<std::uint32_t> outputs = c.outputs;
    std::vector<std::uint32_t> deriv(c.nodes.size());
    for (std::uint32_t v : wrt) {
        if (v >= c.n_inputs) throw std::invalid_argument("differentiate: bad input index");
        for (std::uint32_t i = 0; i < c.nodes.size(); ++i) {
            const auto& n = c.nodes[i];
            switch (n.kind) {
                case Circuit::Kind::Input:
                    deriv[i] = b.constant(n.a == v ? 1 : 0, 0);
                    break;
                case Circuit::Kind::Const:
                    deriv[i] = b.constant(0, 0);
                    break;
                case Circuit::Kind::Add:
                    deriv[i] = b.add(deriv[n.a], deriv[n.b]);
                    break;
                case Circuit::Kind::Mul:
                    deriv[i] = b.add(b.mul(deriv[n.a], n.b), b.mul(n.a, deriv[n.b]));
                    break;
            }
        }
        for (auto out : c.outputs) outputs.push_back(deriv[out]);
    }
    return b.finish(std::move(outputs), c.n_inputs, c.parametric, c.input_names);
}

Circuit bind_parameter(const Circuit& c, double t_re, double t_im) {
    if (!c.parametric) throw std::logic_error("bind_parameter: circuit is not parametric");
    Circuit out = c;
    out.parametric = false;
    out.n_inputs = c.n_inputs - 1;
    if (!out.input_names.empty()) out.input_names.erase(out.input_names.begin());
    for (auto& n : out.nodes) {
        if (n.kind == Circuit::Kind::Input) {
            if (n.a == 0) {
                n = Circuit::Node{Circuit::Kind::Const, 0, 0, t_re, t_im};
            } else {
                n.a -= 1;
            }
        }
    }
    return out;
}

std::vector<unsigned> output_degrees(const Circuit& c) {
    std::vector<unsigned> deg(c.nodes.size(), 0);
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const auto& n = c.nodes[i];
        switch (n.kind) {
            case Circuit::Kind::Input:
                deg[i] = (c.parametric && n.a == 0) ? 0 : 1;
                break;
            case Circuit::Kind::Const:
                deg[i] = 0;
                break;
            case Circuit::Kind::Add:
                deg[i] = std::max(deg[n.a], deg[n.b]);
                break;
            case Circuit::Kind::Mul:
                deg[i] = deg[n.a] + deg[n.b];
                break;
        }
    }
    std::vector<unsigned> out;
    out.reserve(c.outputs.size());
    for (auto idx : c.outputs) out.push_back(deg[idx]);
    return out;
}

std::size_t deduplicated_node_count(const Circuit& c) {
    CircuitBuilder b(true, false);
    std::vector<std::uint32_t> remap(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const auto& n = c.nodes[i];
        switch (n.kind) {
            case Circuit::Kind::Input: remap[i] = b.input(n.a); break;
            case Circuit::Kind::Const: remap[i] = b.constant(n.cre, n.cim); break;
            case Circuit::Kind::Add: remap[i] = b.add(remap[n.a], remap[n.b]); break;
            case Circuit::Kind::Mul: remap[i] = b.mul(remap[n.a], remap[n.b]); break;
        }
    }
    return b.nodes().size();
}

std::vector<std::uint8_t> compute_mask(const Circuit& c, std::span<const std::uint32_t> outputs) {
    std::vector<std::uint8_t> mask(c.nodes.size(), 0);
    for (auto o : outputs) mask[o] = 1;
    for (std::size_t i = c.nodes.size(); i-- > 0;) {
        if (!mask[i]) continue;
        const auto& n = c.nodes[i];
        if (n.kind == Circuit::Kind::Add || n.kind == Circuit::Kind::Mul) {
            mask[n.a] = 1;
            mask[n.b] = 1;
        }
    }
    return mask;
}

double lipschitz_bound(const Circuit& c, double mag_bound) {
    if (mag_bound < 1) throw std::invalid_argument("lipschitz_bound: M must be >= 1");
    using S = ScalarOps<double>;
    PrecisionContext ctx;
    const double m = mag_bound;
    const double two_m = S::mul_up(2.0, m, ctx);
    const double m2 = S::mul_up(m, m, ctx);
    const double four_m2 = S::mul_up(4.0, m2, ctx);
    std::vector<double> p(c.nodes.size()), q(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const auto& n = c.nodes[i];
        switch (n.kind) {
            case Circuit::Kind::Input:
                p[i] = 1;
                q[i] = 0;
                break;
            case Circuit::Kind::Const:
                p[i] = 0;
                q[i] = 0;
                break;
            case Circuit::Kind::Add:
                p[i] = S::add_up(p[n.a], p[n.b], ctx);
                q[i] = S::add_up(S::add_up(q[n.a], q[n.b], ctx), two_m, ctx);
                break;
            case Circuit::Kind::Mul:
                p[i] = S::mul_up(two_m, S::add_up(p[n.a], p[n.b], ctx), ctx);
                q[i] = S::add_up(S::mul_up(two_m, S::add_up(q[n.a], q[n.b], ctx), ctx), four_m2, ctx);
                break;
        }
    }
    double bound = 0;
    for (auto o : c.outputs) bound = std::max(bound, std::max(p[o], q[o]));
    return bound;
}

TrackingSystem build_tracking_system(const Circuit& f) {
    TrackingSystem sys;
    sys.n = f.n_vars();
    sys.parametric = f.parametric;
    sys.f_nodes = f.nodes.size();
    std::vector<std::uint32_t> wrt;
    const std::uint32_t first_var = f.parametric ? 1 : 0;
    for (std::size_t i = 0; i < sys.n; ++i) wrt.push_back(first_var + static_cast<std::uint32_t>(i));
    if (f.parametric) wrt.push_back(0);
    sys.aug = differentiate(f, wrt);
    sys.df_added = sys.aug.nodes.size() - f.nodes.size();

    const std::size_t n = sys.n;
    std::vector<std::uint32_t> f_outs(sys.aug.outputs.begin(), sys.aug.outputs.begin() + n);
    std::vector<std::uint32_t> df_outs(sys.aug.outputs.begin() + n,
                                       sys.aug.outputs.begin() + n + n * n);
    std::vector<std::uint32_t> f_df_outs(sys.aug.outputs.begin(),
                                         sys.aug.outputs.begin() + n + n * n);
    sys.mask_f = compute_mask(sys.aug, f_outs);
    sys.mask_df = compute_mask(sys.aug, df_outs);
    sys.mask_f_df = compute_mask(sys.aug, f_df_outs);
    if (f.parametric) {
        std::vector<std::uint32_t> fdot_outs(sys.aug.outputs.begin() + n + n * n,
                                             sys.aug.outputs.end());
        sys.mask_fdot = compute_mask(sys.aug, fdot_outs);
    }
    return sys;
}

}  // namespace algpath
