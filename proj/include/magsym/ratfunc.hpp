#ifndef MAGSYM_RATFUNC_HPP
#define MAGSYM_RATFUNC_HPP

#include <complex>
#include <map>
#include <utility>

#include "magsym/poly.hpp"

namespace magsym {

/// Canonical rational function: gcd(num, den) = 1, den monic in the
/// global monomial order. The zero function is 0/1.
class RatFunc {
  public:
    RatFunc() : num_(), den_(Poly::constant(CRat(1))) {}
    RatFunc(Poly num) : num_(std::move(num)), den_(Poly::constant(CRat(1))) {}
    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        reduce();
    }

    static RatFunc constant(CRat c) { return RatFunc(Poly::constant(std::move(c))); }
    static RatFunc from_long(long n) { return constant(CRat(n)); }
    static RatFunc i() { return constant(CRat::i()); }
    static RatFunc var(VarId v, int exp = 1) {
        if (exp >= 0) return RatFunc(Poly::var(v, exp));
        return RatFunc(Poly::constant(CRat(1)), Poly::var(v, -exp));
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    CRat constant_value() const { return num_.constant_value(); }
    bool is_polynomial() const { return den_.is_constant(); }

    RatFunc operator-() const {
        RatFunc f;
        f.num_ = -num_;
        f.den_ = den_;
        return f;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw DivisionByZero("division by zero expression");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }

    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) {
        return !(a == b);
    }

    RatFunc pow(int e) const {
        if (e < 0) return (RatFunc::from_long(1) / *this).pow(-e);
        RatFunc acc = RatFunc::from_long(1);
        RatFunc base = *this;
        for (; e > 0; e >>= 1) {
            if (e & 1) acc *= base;
            if (e > 1) base *= base;
        }
        return acc;
    }

    /// d/dv with chain rules for uninterpreted-function atoms, ln atoms and
    /// the phase unit u (du/dphi = I*u).
    RatFunc diff(VarId v) const {
        RatFunc dn = poly_diff(num_, v);
        RatFunc dd = poly_diff(den_, v);
        // (n/d)' = (n' d - n d') / d^2
        return (dn * RatFunc(den_) - RatFunc(num_) * dd) /
               RatFunc(den_ * den_);
    }

    /// Complex conjugate: scalars conjugated, u -> 1/u, complex parameters
    /// and complex function atoms swapped with their partners.
    RatFunc conj() const {
        auto [n, dn] = poly_conj(num_);
        auto [d, dd] = poly_conj(den_);
        // conj = u^(dd - dn) * n / d
        if (dd >= dn)
            return RatFunc(n * Poly::var(vars().u, dd - dn), d);
        return RatFunc(n, d * Poly::var(vars().u, dn - dd));
    }

    RatFunc subst_negate(VarId v) const {
        return RatFunc(num_.subst_negate(v), den_.subst_negate(v));
    }

    RatFunc subst_scalar(VarId v, const CRat& val) const {
        Poly d = den_.subst_scalar(v, val);
        if (d.is_zero())
            throw DivisionByZero("substitution makes denominator vanish");
        return RatFunc(num_.subst_scalar(v, val), std::move(d));
    }

    RatFunc subst(VarId v, const RatFunc& repl) const {
        return poly_subst(num_, v, repl) / poly_subst(den_, v, repl);
    }

    RatFunc conj_scalars_only() const {
        RatFunc f;
        f.num_ = num_.conj_coeffs();
        f.den_ = den_.conj_coeffs();
        f.reduce();
        return f;
    }

    std::complex<double>
    eval(const std::map<VarId, std::complex<double>>& point) const {
        std::complex<double> d = den_.eval(point);
        if (d == std::complex<double>(0.0, 0.0))
            throw DivisionByZero("denominator vanishes at sample point");
        return num_.eval(point) / d;
    }

    std::vector<VarId> variables() const {
        std::vector<VarId> vs = num_.variables();
        std::vector<VarId> vd = den_.variables();
        vs.insert(vs.end(), vd.begin(), vd.end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return vs;
    }

  private:
    void reduce() {
        if (num_.is_zero()) {
            den_ = Poly::constant(CRat(1));
            return;
        }
        if (den_.is_zero()) throw DivisionByZero("zero denominator");
        if (!den_.is_constant() || !den_.constant_value().is_one()) {
            Poly g = Poly::gcd(num_, den_);
            if (!g.is_constant()) {
                num_ = Poly::divexact(num_, g);
                den_ = Poly::divexact(den_, g);
            }
        }
        CRat lc = den_.leading_coeff();
        if (!lc.is_one()) {
            CRat inv = lc.inv();
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    static RatFunc poly_subst(const Poly& p, VarId v, const RatFunc& repl) {
        auto uv = p.univariate(v);
        RatFunc out;
        for (const auto& [e, coeff] : uv) out += RatFunc(coeff) * repl.pow(e);
        return out;
    }

    static RatFunc poly_diff(const Poly& p, VarId v) {
        auto& vt = vars();
        RatFunc out;
        if (v != vt.phi) out = RatFunc(p.derivative(v));
        for (VarId a : p.variables()) {
            if (a == v) continue;
            RatFunc chain = chain_derivative(a, v);
            if (chain.is_zero()) continue;
            out += RatFunc(p.derivative(a)) * chain;
        }
        return out;
    }

    /// d(atom)/d(coord); zero when independent.
    static RatFunc chain_derivative(VarId a, VarId v) {
        auto& vt = vars();
        const VarInfo& ai = vt.info(a);
        switch (ai.kind) {
            case VarKind::UFuncAtom: {
                const FuncInfo& f = vt.func(ai.func_id);
                for (size_t slot = 0; slot < f.arg_coords.size(); ++slot) {
                    if (f.arg_coords[slot] == v) {
                        std::vector<int> d = ai.deriv;
                        d[slot] += 1;
                        return RatFunc::var(vt.ufunc_atom(ai.func_id, d));
                    }
                }
                return RatFunc();
            }
            case VarKind::LnAtom:
                if (ai.func_id == v) return RatFunc::var(v, -1);
                return RatFunc();
            case VarKind::ExpAtom: {
                for (VarId dep : ai.deriv)
                    if (dep == v)
                        throw UnsupportedNode(
                            "cannot differentiate exponential atom '" +
                            ai.name + "' at normal-form level");
                return RatFunc();
            }
            case VarKind::Coordinate:
                if (a == vt.u && v == vt.phi)
                    return RatFunc(Poly::var(vt.u).scaled(CRat::i()));
                return RatFunc();
            default:
                return RatFunc();
        }
    }

    /// Conjugate a polynomial. Returns (P', d) with conj(P) = u^(-d) * P'.
    static std::pair<Poly, int> poly_conj(const Poly& p) {
        auto& vt = vars();
        int du = p.degree(vt.u);
        Poly out;
        for (const auto& t : p.terms()) {
            Monomial m;
            CRat c = t.c.conj();
            for (const auto& [var, ex] : t.m.e) {
                const VarInfo& vi = vt.info(var);
                VarId target = var;
                if (var == vt.u) {
                    int flipped = du - ex;
                    if (flipped > 0) m.e.emplace_back(vt.u, flipped);
                    continue;
                }
                if (vi.reality == Reality::Complex) {
                    switch (vi.kind) {
                        case VarKind::Parameter:
                            target = vt.conj_parameter(var);
                            break;
                        case VarKind::UFuncAtom: {
                            const FuncInfo& f = vt.func(vi.func_id);
                            int cf = vt.declare_func(
                                f.name.ends_with("_bar")
                                    ? f.name.substr(0, f.name.size() - 4)
                                    : f.name + "_bar",
                                f.arg_coords, Reality::Complex);
                            target = vt.ufunc_atom(cf, vi.deriv);
                            break;
                        }
                        case VarKind::ExpAtom:
                            throw UnsupportedNode(
                                "cannot conjugate exponential atom at "
                                "normal-form level");
                        default:
                            break;
                    }
                }
                if (target == var) {
                    m.e.emplace_back(var, ex);
                } else {
                    m.e.emplace_back(target, ex);
                }
            }
            // terms lacking u still need the u^du factor
            bool has_u = t.m.exp_of(vt.u) > 0;
            if (!has_u && du > 0) m.e.emplace_back(vt.u, du);
            std::sort(m.e.begin(), m.e.end(),
                      [&vt](const auto& a, const auto& b) {
                          return vt.rank_less(a.first, b.first);
                      });
            Poly mono = Poly::constant(c);
            for (const auto& [var, ex] : m.e)
                mono *= Poly::var(var, ex);
            out += mono;
        }
        return {out, du};
    }

    Poly num_, den_;
};

} // namespace magsym

#endif
