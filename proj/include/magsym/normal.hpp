#ifndef MAGSYM_NORMAL_HPP
#define MAGSYM_NORMAL_HPP

#include <string>

#include "magsym/expr.hpp"
#include "magsym/ratfunc.hpp"

namespace magsym {

namespace detail {

inline std::string mono_str(const Monomial& m, const CRat& c) {
    std::string s;
    bool minus_one = (c == CRat(-1));
    if (m.empty() || (!c.is_one() && !minus_one)) {
        std::string cs = c.str();
        if (cs.find(' ') != std::string::npos) cs = "(" + cs + ")";
        s += cs;
    } else if (minus_one) {
        s += "-";
    }
    for (const auto& [v, e] : m.e) {
        if (!s.empty() && s.back() != '-') s += "*";
        s += vars().name(v);
        if (e != 1) s += "^" + std::to_string(e);
    }
    return s;
}

inline std::string poly_str(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& t : p.terms()) {
        std::string ts = mono_str(t.m, t.c);
        if (s.empty()) {
            s = ts;
        } else if (!ts.empty() && ts[0] == '-') {
            s += " - " + ts.substr(1);
        } else {
            s += " + " + ts;
        }
    }
    return s;
}

} // namespace detail

/// Deterministic canonical text of a normal form.
inline std::string nf_str(const RatFunc& f) {
    if (f.is_polynomial()) return detail::poly_str(f.num());
    std::string n = detail::poly_str(f.num());
    if (n.find(' ') != std::string::npos) n = "(" + n + ")";
    std::string d = detail::poly_str(f.den());
    if (d.find(' ') != std::string::npos || d.find('*') != std::string::npos)
        d = "(" + d + ")";
    return n + "/" + d;
}

/// Canonical rational normal form. The expression must be rational over
/// coordinates, parameters and atoms; sin/cos must have been rewritten to
/// the phase unit u beforehand.
inline RatFunc normalize(const ExprPtr& e) {
    auto& vt = vars();
    switch (e->type) {
        case ExprType::Scalar:
            return RatFunc::constant(e->scalar);
        case ExprType::Sym:
            if (e->sym == vt.phi)
                throw UnsupportedNode(
                    "phi cannot appear in rational expressions; use u");
            return RatFunc::var(e->sym);
        case ExprType::Sum: {
            RatFunc acc;
            for (const auto& k : e->kids) acc += normalize(k);
            return acc;
        }
        case ExprType::Prod: {
            RatFunc acc = RatFunc::from_long(1);
            for (const auto& k : e->kids) acc *= normalize(k);
            return acc;
        }
        case ExprType::Pow:
            return normalize(e->kids[0]).pow(e->ipow);
        case ExprType::Func: {
            switch (e->fk) {
                case FuncKind::Exp: {
                    RatFunc arg = normalize(e->kids[0]);
                    if (arg.is_zero()) return RatFunc::from_long(1);
                    std::vector<int> deps;
                    for (VarId v : arg.variables()) {
                        const VarInfo& vi = vt.info(v);
                        if (vi.kind == VarKind::Coordinate ||
                            vi.kind == VarKind::Hbar ||
                            vi.kind == VarKind::Parameter)
                            deps.push_back(v);
                        if (v == vt.u) deps.push_back(vt.phi);
                    }
                    VarId atom = vt.exp_atom(nf_str(arg), e->kids[0], deps);
                    return RatFunc::var(atom);
                }
                case FuncKind::Ln: {
                    RatFunc arg = normalize(e->kids[0]);
                    if (arg.is_polynomial() && arg.num().num_terms() == 1 &&
                        arg.num().leading_coeff().is_one() &&
                        arg.num().leading_monomial().e.size() == 1 &&
                        arg.num().leading_monomial().e[0].second == 1) {
                        VarId c = arg.num().leading_monomial().e[0].first;
                        return RatFunc::var(vt.ln_atom(c));
                    }
                    throw UnsupportedNode(
                        "ln is only supported on a bare coordinate");
                }
                case FuncKind::Sin:
                case FuncKind::Cos:
                    throw UnsupportedNode(
                        "sin/cos must be rewritten to the phase unit u "
                        "before normalization");
            }
            throw UnsupportedNode("unknown function");
        }
        case ExprType::UFunc:
            return RatFunc::var(vt.ufunc_atom(e->func_id, e->deriv));
    }
    throw UnsupportedNode("unknown node");
}

inline ExprPtr var_to_expr(VarId v) {
    const VarInfo& vi = vars().info(v);
    switch (vi.kind) {
        case VarKind::UFuncAtom:
            return ex_ufunc(vi.func_id, vi.deriv);
        case VarKind::ExpAtom:
            return ex_func(FuncKind::Exp, vi.fn_arg);
        case VarKind::LnAtom:
            return ex_func(FuncKind::Ln, ex_sym(vi.func_id));
        default:
            return ex_sym(v);
    }
}

inline ExprPtr poly_to_expr(const Poly& p) {
    std::vector<ExprPtr> terms;
    for (const auto& t : p.terms()) {
        std::vector<ExprPtr> factors;
        if (!t.c.is_one() || t.m.empty()) factors.push_back(ex_scalar(t.c));
        for (const auto& [v, e] : t.m.e)
            factors.push_back(ex_pow(var_to_expr(v), e));
        terms.push_back(ex_mul(std::move(factors)));
    }
    return ex_add(std::move(terms));
}

inline ExprPtr nf_to_expr(const RatFunc& f) {
    if (f.is_polynomial() && f.den().constant_value().is_one())
        return poly_to_expr(f.num());
    return ex_div(poly_to_expr(f.num()), poly_to_expr(f.den()));
}

/// Exact zero test on the rational class.
inline bool is_zero_expr(const ExprPtr& e) { return normalize(e).is_zero(); }

inline bool equivalent(const ExprPtr& a, const ExprPtr& b) {
    return (normalize(a) - normalize(b)).is_zero();
}

} // namespace magsym

#endif
