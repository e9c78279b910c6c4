#ifndef MAGSYM_SYSTEMS_HPP
#define MAGSYM_SYSTEMS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magsym/geometry.hpp"
#include "magsym/normal.hpp"
#include "magsym/phase.hpp"
#include "magsym/sysfile.hpp"

namespace magsym {

/// One conserved quantity of a system.
///
/// `classical` is the phase-space function in canonical Cartesian momenta;
/// `quantum` is its quantization per the stored recipe (the momentum
/// polynomial together with `ordering` *is* the recipe, the operator is
/// cached).  A nonpolynomial integral carries only `classical_expr` and has
/// no quantum counterpart.
struct IntegralDef {
    std::string name;
    PhasePolynomial classical;
    Ordering ordering = Ordering::Symmetrized;
    std::optional<DiffOperator> quantum;
    ExprPtr classical_expr; // set only for nonpolynomial integrals
    bool nonpolynomial() const { return classical_expr != nullptr; }
};

struct SystemDef {
    std::string name;
    std::string frame = "cartesian"; // frame of the source description
    std::vector<std::pair<std::string, Reality>> params;
    Field3 A;
    RatFunc W;
    PhasePolynomial H_classical;
    DiffOperator H;
    std::vector<IntegralDef> integrals;
    /// Alternative scalar potentials admitting extra integrals.
    std::vector<std::pair<std::string, RatFunc>> potential_variants;
    /// Named relations the verification engine is expected to establish.
    std::vector<std::pair<std::string, std::string>> expected;
    /// Display forms in auxiliary coordinates (documentation only).
    std::vector<std::pair<std::string, std::string>> views;

    const IntegralDef* find(const std::string& n) const {
        for (const auto& it : integrals)
            if (it.name == n) return &it;
        return nullptr;
    }
    const IntegralDef& integral(const std::string& n) const {
        const IntegralDef* p = find(n);
        if (!p)
            throw UnknownSystem("system " + name + " has no integral " + n);
        return *p;
    }
};

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{
        "new-complex", "constant-B-landau", "constant-B-symmetric",
        "constant-B-W3", "inverse-square-B"};
    return names;
}

/// Golden source text of a builtin, byte-identical to the copy shipped in
/// share/systems/<name>.sys.
inline std::string builtin_source(const std::string& name) {
    static const std::map<std::string, std::string> src = {
        {"new-complex", R"([system]
name = new-complex
frame = cartesian

[params]
b : complex
w1 : complex

[potential]
A = 0, 0, -b/(2*(x1 - I*x2)^2)
W = w1/(2*(x1 - I*x2)^2) - b^2/(8*(x1 - I*x2)^4)

[integrals]
Y1 = I*pA1 + pA2
Y2 = x3*pA1 - x1*pA3 + I*(x2*pA3 - x3*pA2) - b/(x1 - I*x2)
Xt2 = pA3 + b/(2*(x1 - I*x2)^2)
X1 = (x1*pA2 - x2*pA1)^2 - b*(x1 + I*x2)/(x1 - I*x2)*pA3 - b^2*(x1 + I*x2)/(2*(x1 - I*x2)^3) + w1*(x1 + I*x2)/(x1 - I*x2)

[expected]
commutes = p1A p2A
)"},
        {"constant-B-landau", R"([system]
name = constant-B-landau
frame = cartesian

[params]
b : complex

[potential]
A = 0, b*x1, 0
W = 0

[integrals]
Y1 = pA1 + b*x2
Y2 = pA2 - b*x1
Xt1 = x1*pA2 - x2*pA1 - b*(x1^2 + x2^2)/2
Xt2 = pA3
)"},
        {"constant-B-symmetric", R"([system]
name = constant-B-symmetric
frame = cartesian

[params]
b : complex

[potential]
A = -b*x2/2, b*x1/2, 0
W = 0

[integrals]
Y1 = pA1 + b*x2
Y2 = pA2 - b*x1
Xt1 = x1*pA2 - x2*pA1 - b*(x1^2 + x2^2)/2
Xt2 = pA3
)"},
        {"constant-B-W3", R"([system]
name = constant-B-W3
frame = cartesian

[params]
b : complex
c : complex

[functions]
W3(x3) : real

[potential]
A = 0, b*x1, 0
W = W3(x3)

[integrals]
Y1 = pA1 + b*x2
Y2 = pA2 - b*x1
Xt1 = x1*pA2 - x2*pA1 - b*(x1^2 + x2^2)/2
X2 = pA3^2 + 2*W3(x3)
)"},
        {"inverse-square-B", R"([system]
name = inverse-square-B
frame = cartesian

[params]
b : complex
w0 : complex

[potential]
A = 0, 0, -2*b/x2^2
W = -4*(b^2/(2*x2^4) + w0/x2^2)

[integrals]
Xt2 = pA3 + 2*b/x2^2
Y1 = pA1
X1 = (x1*pA2 - x2*pA1)^2 - 4*b*(x1^2 + x2^2)/x2^2*(pA3 + 2*b/x2^2) - 8*w0*(x1^2 + x2^2)/x2^2
X3 = (x1*pA2 - x2*pA1)*pA2 - 4*b*x1/x2^2*(pA3 + 2*b/x2^2) - 8*w0*x1/x2^2

[expected]
dependence = (Xt2^2 + Y1^2 - 2*H)*X1 + X3^2 - 4*(Xt2*b + 2*w0)*(2*H - Xt2^2)
)"},
    };
    auto it = src.find(name);
    if (it == src.end()) {
        std::string msg = "unknown system '" + name + "'; available:";
        for (const auto& n : builtin_names()) msg += " " + n;
        throw UnknownSystem(msg);
    }
    return it->second;
}

/// Materialize a parsed system file: resolve symbols, transform a
/// cylindrical description into Cartesian fields, build H per Eq. (1)
/// shape ½Σ(p_j+A_j)² + W, and quantize each declared integral with the
/// symmetrized ordering.  Parse errors in individual expressions propagate
/// as SyntaxError/UnknownIdentifier.
inline SystemDef load(const SystemFile& sf) {
    auto& vt = vars();
    SystemDef sd;
    sd.name = sf.name;
    sd.frame = sf.frame;
    sd.params = sf.params;
    sd.expected = sf.expected;

    ParseContext ctx = ParseContext::basic();
    for (const auto& [pn, re] : sf.params) ctx.param(pn, re);
    for (const auto& [fn, fargs, fre] : sf.functions) {
        std::vector<VarId> argv;
        for (const auto& an : fargs) {
            auto it = ctx.idents.find(an);
            if (it == ctx.idents.end())
                throw Error("function " + fn +
                            ": unknown argument coordinate " + an);
            argv.push_back(it->second);
        }
        ctx.func(fn, argv, fre);
    }

    Field3 A{normalize(parse_expr(sf.A[0], ctx)),
             normalize(parse_expr(sf.A[1], ctx)),
             normalize(parse_expr(sf.A[2], ctx))};
    RatFunc W = normalize(parse_expr(sf.W, ctx));
    if (sf.frame == "cylindrical") {
        A = oneform_to_cartesian(A);
        W = to_cartesian(W);
    }
    sd.A = A;
    sd.W = W;

    std::array<VarId, 3> ps{vt.p1, vt.p2, vt.p3};
    PhasePolynomial Hc = sd.W;
    for (int j = 0; j < 3; ++j) {
        PhasePolynomial pa = RatFunc::var(ps[j]) + sd.A[j];
        Hc += pa * pa * RatFunc::constant(CRat(Rat(1, 2)));
    }
    sd.H_classical = Hc;
    sd.H = from_momentum_polynomial(Hc, Ordering::Symmetrized);

    ParseContext ictx = ctx;
    ictx.allow_momenta = true;
    for (int j = 0; j < 3; ++j) ictx.vector_potential[j] = nf_to_expr(sd.A[j]);
    for (const auto& [iname, itext] : sf.integrals) {
        IntegralDef idf;
        idf.name = iname;
        idf.classical = normalize(parse_expr(itext, ictx));
        idf.ordering = Ordering::Symmetrized;
        idf.quantum = from_momentum_polynomial(idf.classical, idf.ordering);
        sd.integrals.push_back(std::move(idf));
    }
    return sd;
}

namespace detail {

/// The nonpolynomial integral of the constant-field system: with theta =
/// b x3 / p3A, the combination pA1 cos(theta) + pA2 sin(theta) is conserved
/// along the flow (the gauge-covariant velocity rotates at rate b while
/// theta advances at the same rate).  Valid only where p3 != 0.
inline ExprPtr constant_field_x5(const Field3& A, VarId b) {
    auto& vt = vars();
    ExprPtr pA1 = ex_add(ex_sym(vt.p1), nf_to_expr(A[0]));
    ExprPtr pA2 = ex_add(ex_sym(vt.p2), nf_to_expr(A[1]));
    ExprPtr pA3 = ex_add(ex_sym(vt.p3), nf_to_expr(A[2]));
    ExprPtr theta =
        ex_div(ex_mul(ex_sym(b), ex_sym(vt.x3)), std::move(pA3));
    return ex_add(ex_mul(std::move(pA1), ex_func(FuncKind::Cos, theta)),
                  ex_mul(std::move(pA2), ex_func(FuncKind::Sin, theta)));
}

} // namespace detail

inline SystemDef builtin(const std::string& name) {
    auto& vt = vars();
    SysParseResult pr = parse_system_file(builtin_source(name));
    if (!pr.ok()) {
        std::string msg = "builtin system '" + name + "' failed to parse:";
        for (const auto& d : pr.diagnostics) msg += "\n  " + d.str();
        throw Error(msg);
    }
    SystemDef sd = load(*pr.file);

    if (name == "new-complex") {
        // Dependent quadratic integrals closing the algebra:
        // R1 := [Y1,X1]/(i hbar), R2 := [Y2,X1]/(i hbar), computed rather
        // than transcribed.
        RatFunc inv_ih =
            (RatFunc::i() * RatFunc::var(vt.hbar)).pow(-1);
        const IntegralDef Y1 = sd.integral("Y1");
        const IntegralDef Y2 = sd.integral("Y2");
        const IntegralDef X1 = sd.integral("X1");
        Chart cart = Chart::cartesian();
        const std::vector<std::pair<std::string, const IntegralDef*>> gens{
            {"R1", &Y1}, {"R2", &Y2}};
        for (const auto& [rn, gen] : gens) {
            IntegralDef r;
            r.name = rn;
            r.classical = poisson(gen->classical, X1.classical, cart);
            r.ordering = Ordering::Symmetrized;
            r.quantum =
                commutator(*gen->quantum, *X1.quantum).scaled(inv_ih);
            sd.integrals.push_back(std::move(r));
        }
        sd.views = {
            {"B", "b/zbar^3 dzbar ^ dx3"},
            {"W", "w1/(2*zbar^2) - b^2/(8*zbar^4)"},
            {"Y1", "2*I*pAz"},
            {"Y2", "2*x3*pAz - zbar*pA3 - b/zbar"},
            {"Xt2", "pA3 + b/(2*zbar^2)"},
            {"X1",
             "-(z*pAz - zbar*pAzbar)^2 - b*z/zbar*pA3 - b^2*z/(2*zbar^3) "
             "+ w1*z/zbar"},
        };
    } else if (name == "constant-B-landau" ||
               name == "constant-B-symmetric") {
        VarId b = vt.parameter("b", Reality::Complex);
        IntegralDef x5;
        x5.name = "X5";
        x5.classical_expr = detail::constant_field_x5(sd.A, b);
        sd.integrals.push_back(std::move(x5));
    } else if (name == "constant-B-W3") {
        ParseContext ctx = ParseContext::basic();
        ctx.param("b", Reality::Complex).param("c", Reality::Complex);
        sd.potential_variants = {
            {"singular-oscillator",
             normalize(parse_expr("c/x3^2 + b^2*x3^2/8", ctx))},
            {"harmonic-oscillator",
             normalize(parse_expr("b^2*x3^2/2", ctx))},
        };
    }
    return sd;
}

} // namespace magsym

#endif
