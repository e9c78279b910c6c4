#ifndef MAGSYM_EXPR_HPP
#define MAGSYM_EXPR_HPP

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "magsym/rational.hpp"
#include "magsym/symbols.hpp"

namespace magsym {

enum class ExprType { Scalar, Sym, Sum, Prod, Pow, Func, UFunc };
enum class FuncKind { Exp, Ln, Sin, Cos };

/// Immutable expression node. Sums and products are flattened on
/// construction; scalars are folded.
struct Expr {
    ExprType type;
    CRat scalar;               // Scalar
    VarId sym = -1;            // Sym
    std::vector<ExprPtr> kids; // Sum, Prod, Pow (1), Func (1)
    int ipow = 1;              // Pow exponent
    FuncKind fk = FuncKind::Exp;
    int func_id = -1;          // UFunc
    std::vector<int> deriv;    // UFunc derivative multi-index
};

inline ExprPtr ex_scalar(CRat c) {
    auto e = std::make_shared<Expr>();
    e->type = ExprType::Scalar;
    e->scalar = std::move(c);
    return e;
}
inline ExprPtr ex_num(long n) { return ex_scalar(CRat(n)); }
inline ExprPtr ex_rat(long n, long d) { return ex_scalar(CRat::from_long(n, d)); }
inline ExprPtr ex_i() { return ex_scalar(CRat::i()); }

inline ExprPtr ex_sym(VarId v) {
    auto e = std::make_shared<Expr>();
    e->type = ExprType::Sym;
    e->sym = v;
    return e;
}

inline bool is_zero(const ExprPtr& e) {
    return e->type == ExprType::Scalar && e->scalar.is_zero();
}
inline bool is_one(const ExprPtr& e) {
    return e->type == ExprType::Scalar && e->scalar.is_one();
}

inline ExprPtr ex_add(std::vector<ExprPtr> ops) {
    std::vector<ExprPtr> flat;
    CRat c(0);
    for (auto& op : ops) {
        if (op->type == ExprType::Scalar) {
            c += op->scalar;
        } else if (op->type == ExprType::Sum) {
            for (auto& k : op->kids) {
                if (k->type == ExprType::Scalar)
                    c += k->scalar;
                else
                    flat.push_back(k);
            }
        } else {
            flat.push_back(op);
        }
    }
    if (!c.is_zero()) flat.push_back(ex_scalar(c));
    if (flat.empty()) return ex_num(0);
    if (flat.size() == 1) return flat[0];
    auto e = std::make_shared<Expr>();
    e->type = ExprType::Sum;
    e->kids = std::move(flat);
    return e;
}

inline ExprPtr ex_mul(std::vector<ExprPtr> ops) {
    std::vector<ExprPtr> flat;
    CRat c(1);
    for (auto& op : ops) {
        if (op->type == ExprType::Scalar) {
            c *= op->scalar;
        } else if (op->type == ExprType::Prod) {
            for (auto& k : op->kids) {
                if (k->type == ExprType::Scalar)
                    c *= k->scalar;
                else
                    flat.push_back(k);
            }
        } else {
            flat.push_back(op);
        }
    }
    if (c.is_zero()) return ex_num(0);
    if (!c.is_one()) flat.insert(flat.begin(), ex_scalar(c));
    if (flat.empty()) return ex_num(1);
    if (flat.size() == 1) return flat[0];
    auto e = std::make_shared<Expr>();
    e->type = ExprType::Prod;
    e->kids = std::move(flat);
    return e;
}

inline ExprPtr ex_add(ExprPtr a, ExprPtr b) {
    return ex_add(std::vector<ExprPtr>{std::move(a), std::move(b)});
}
inline ExprPtr ex_mul(ExprPtr a, ExprPtr b) {
    return ex_mul(std::vector<ExprPtr>{std::move(a), std::move(b)});
}
inline ExprPtr ex_neg(ExprPtr a) { return ex_mul(ex_num(-1), std::move(a)); }
inline ExprPtr ex_sub(ExprPtr a, ExprPtr b) {
    return ex_add(std::move(a), ex_neg(std::move(b)));
}

inline ExprPtr ex_pow(ExprPtr base, int e) {
    if (e == 1) return base;
    if (e == 0) return ex_num(1);
    if (base->type == ExprType::Scalar) return ex_scalar(base->scalar.pow(e));
    if (base->type == ExprType::Pow)
        return ex_pow(base->kids[0], base->ipow * e);
    auto p = std::make_shared<Expr>();
    p->type = ExprType::Pow;
    p->kids = {std::move(base)};
    p->ipow = e;
    return p;
}

inline ExprPtr ex_div(ExprPtr a, ExprPtr b) {
    if (is_zero(b)) throw DivisionByZero("division by zero expression");
    return ex_mul(std::move(a), ex_pow(std::move(b), -1));
}

inline ExprPtr ex_func(FuncKind fk, ExprPtr arg) {
    auto e = std::make_shared<Expr>();
    e->type = ExprType::Func;
    e->fk = fk;
    e->kids = {std::move(arg)};
    return e;
}

inline ExprPtr ex_ufunc(int func_id, std::vector<int> deriv = {}) {
    auto e = std::make_shared<Expr>();
    e->type = ExprType::UFunc;
    e->func_id = func_id;
    if (deriv.empty())
        deriv.assign(vars().func(func_id).arg_coords.size(), 0);
    e->deriv = std::move(deriv);
    return e;
}

inline void free_symbols_into(const ExprPtr& e, std::set<VarId>& out) {
    switch (e->type) {
        case ExprType::Scalar:
            return;
        case ExprType::Sym:
            out.insert(e->sym);
            return;
        case ExprType::UFunc:
            for (VarId c : vars().func(e->func_id).arg_coords) out.insert(c);
            return;
        default:
            for (const auto& k : e->kids) free_symbols_into(k, out);
    }
}

inline std::set<VarId> free_symbols(const ExprPtr& e) {
    std::set<VarId> s;
    free_symbols_into(e, s);
    return s;
}

/// Exact partial derivative with respect to a coordinate or parameter.
/// du/dphi = I*u; uninterpreted functions increment their multi-index.
inline ExprPtr diff(const ExprPtr& e, VarId v) {
    auto& vt = vars();
    switch (e->type) {
        case ExprType::Scalar:
            return ex_num(0);
        case ExprType::Sym:
            if (e->sym == v) return ex_num(1);
            if (e->sym == vt.u && v == vt.phi)
                return ex_mul(ex_i(), ex_sym(vt.u));
            return ex_num(0);
        case ExprType::Sum: {
            std::vector<ExprPtr> parts;
            for (const auto& k : e->kids) parts.push_back(diff(k, v));
            return ex_add(std::move(parts));
        }
        case ExprType::Prod: {
            std::vector<ExprPtr> parts;
            for (size_t i = 0; i < e->kids.size(); ++i) {
                std::vector<ExprPtr> fac;
                for (size_t j = 0; j < e->kids.size(); ++j)
                    fac.push_back(i == j ? diff(e->kids[j], v) : e->kids[j]);
                parts.push_back(ex_mul(std::move(fac)));
            }
            return ex_add(std::move(parts));
        }
        case ExprType::Pow: {
            ExprPtr inner = diff(e->kids[0], v);
            if (is_zero(inner)) return ex_num(0);
            return ex_mul({ex_num(e->ipow), ex_pow(e->kids[0], e->ipow - 1),
                           std::move(inner)});
        }
        case ExprType::Func: {
            ExprPtr da = diff(e->kids[0], v);
            if (is_zero(da)) return ex_num(0);
            switch (e->fk) {
                case FuncKind::Exp:
                    return ex_mul(std::move(da), ex_func(FuncKind::Exp, e->kids[0]));
                case FuncKind::Ln:
                    return ex_div(std::move(da), e->kids[0]);
                case FuncKind::Sin:
                    return ex_mul(std::move(da), ex_func(FuncKind::Cos, e->kids[0]));
                case FuncKind::Cos:
                    return ex_neg(
                        ex_mul(std::move(da), ex_func(FuncKind::Sin, e->kids[0])));
            }
            return ex_num(0);
        }
        case ExprType::UFunc: {
            const FuncInfo& f = vt.func(e->func_id);
            for (size_t slot = 0; slot < f.arg_coords.size(); ++slot) {
                if (f.arg_coords[slot] == v) {
                    std::vector<int> d = e->deriv;
                    d[slot] += 1;
                    return ex_ufunc(e->func_id, std::move(d));
                }
            }
            return ex_num(0);
        }
    }
    return ex_num(0);
}

inline ExprPtr diff(const ExprPtr& e, VarId v, int times) {
    ExprPtr cur = e;
    for (int k = 0; k < times; ++k) cur = diff(cur, v);
    return cur;
}

/// Simultaneous substitution of symbols. A binding may mention its own
/// key (x2 -> -x2); mutual cycles between distinct keys are rejected.
inline ExprPtr substitute(const ExprPtr& e,
                          const std::map<VarId, ExprPtr>& bindings) {
    for (const auto& [k, repl] : bindings) {
        std::set<VarId> fs = free_symbols(repl);
        for (VarId other : fs) {
            if (other == k) continue;
            auto it = bindings.find(other);
            if (it == bindings.end()) continue;
            std::set<VarId> fs2 = free_symbols(it->second);
            if (fs2.count(k))
                throw CyclicBinding("cyclic bindings between '" +
                                    vars().name(k) + "' and '" +
                                    vars().name(other) + "'");
        }
    }
    std::function<ExprPtr(const ExprPtr&)> go = [&](const ExprPtr& n) -> ExprPtr {
        switch (n->type) {
            case ExprType::Scalar:
                return n;
            case ExprType::Sym: {
                auto it = bindings.find(n->sym);
                return it == bindings.end() ? n : it->second;
            }
            case ExprType::Sum: {
                std::vector<ExprPtr> ks;
                for (const auto& k : n->kids) ks.push_back(go(k));
                return ex_add(std::move(ks));
            }
            case ExprType::Prod: {
                std::vector<ExprPtr> ks;
                for (const auto& k : n->kids) ks.push_back(go(k));
                return ex_mul(std::move(ks));
            }
            case ExprType::Pow:
                return ex_pow(go(n->kids[0]), n->ipow);
            case ExprType::Func:
                return ex_func(n->fk, go(n->kids[0]));
            case ExprType::UFunc:
                return n;
        }
        return n;
    };
    return go(e);
}

/// Complex conjugation: I -> -I, u -> 1/u, complex parameters to their
/// bar partners, coordinates fixed.
inline ExprPtr conjugate(const ExprPtr& e) {
    auto& vt = vars();
    switch (e->type) {
        case ExprType::Scalar:
            return ex_scalar(e->scalar.conj());
        case ExprType::Sym: {
            const VarInfo& vi = vt.info(e->sym);
            if (e->sym == vt.u) return ex_pow(ex_sym(vt.u), -1);
            if (vi.reality == Reality::Complex &&
                vi.kind == VarKind::Parameter)
                return ex_sym(vt.conj_parameter(e->sym));
            return e;
        }
        case ExprType::Sum: {
            std::vector<ExprPtr> ks;
            for (const auto& k : e->kids) ks.push_back(conjugate(k));
            return ex_add(std::move(ks));
        }
        case ExprType::Prod: {
            std::vector<ExprPtr> ks;
            for (const auto& k : e->kids) ks.push_back(conjugate(k));
            return ex_mul(std::move(ks));
        }
        case ExprType::Pow:
            return ex_pow(conjugate(e->kids[0]), e->ipow);
        case ExprType::Func:
            return ex_func(e->fk, conjugate(e->kids[0]));
        case ExprType::UFunc: {
            const FuncInfo& f = vt.func(e->func_id);
            if (f.reality == Reality::Real) return e;
            int cf = vt.declare_func(f.name.ends_with("_bar")
                                         ? f.name.substr(0, f.name.size() - 4)
                                         : f.name + "_bar",
                                     f.arg_coords, Reality::Complex);
            return ex_ufunc(cf, e->deriv);
        }
    }
    return e;
}

/// Callable table for uninterpreted functions: value of the deriv-th
/// derivative at the given argument values.
using UFuncTable = std::map<int, std::function<std::complex<double>(
                                     const std::vector<int>& deriv,
                                     const std::vector<std::complex<double>>&)>>;

inline std::complex<double>
eval_numeric(const ExprPtr& e,
             const std::map<VarId, std::complex<double>>& point,
             const UFuncTable& ufuncs = {}) {
    auto& vt = vars();
    switch (e->type) {
        case ExprType::Scalar:
            return e->scalar.to_complex();
        case ExprType::Sym: {
            auto it = point.find(e->sym);
            if (it == point.end())
                throw MissingBinding("no value for symbol '" +
                                     vt.name(e->sym) + "'");
            return it->second;
        }
        case ExprType::Sum: {
            std::complex<double> s = 0.0;
            for (const auto& k : e->kids) s += eval_numeric(k, point, ufuncs);
            return s;
        }
        case ExprType::Prod: {
            std::complex<double> s = 1.0;
            for (const auto& k : e->kids) s *= eval_numeric(k, point, ufuncs);
            return s;
        }
        case ExprType::Pow: {
            std::complex<double> b = eval_numeric(e->kids[0], point, ufuncs);
            if (e->ipow < 0 && b == std::complex<double>(0.0, 0.0))
                throw DivisionByZero("pole hit in numeric evaluation");
            return std::pow(b, e->ipow);
        }
        case ExprType::Func: {
            std::complex<double> a = eval_numeric(e->kids[0], point, ufuncs);
            switch (e->fk) {
                case FuncKind::Exp:
                    return std::exp(a);
                case FuncKind::Ln:
                    if (a == std::complex<double>(0.0, 0.0))
                        throw DivisionByZero("ln(0) in numeric evaluation");
                    return std::log(a);
                case FuncKind::Sin:
                    return std::sin(a);
                case FuncKind::Cos:
                    return std::cos(a);
            }
            return 0.0;
        }
        case ExprType::UFunc: {
            auto it = ufuncs.find(e->func_id);
            if (it == ufuncs.end())
                throw MissingBinding("no numeric table for function '" +
                                     vt.func(e->func_id).name + "'");
            std::vector<std::complex<double>> args;
            for (VarId c : vt.func(e->func_id).arg_coords) {
                auto pit = point.find(c);
                if (pit == point.end())
                    throw MissingBinding("no value for coordinate '" +
                                         vt.name(c) + "'");
                args.push_back(pit->second);
            }
            return it->second(e->deriv, args);
        }
    }
    return 0.0;
}

} // namespace magsym

#endif
