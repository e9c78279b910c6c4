#ifndef MAGSYM_DIFFOP_HPP
#define MAGSYM_DIFFOP_HPP

#include <array>
#include <map>
#include <string>

#include "magsym/normal.hpp"
#include "magsym/ratfunc.hpp"

namespace magsym {

/// Multi-index for partial derivatives in the three Cartesian coordinates.
using Idx3 = std::array<int, 3>;

inline int idx_order(const Idx3& a) { return a[0] + a[1] + a[2]; }

/// An antiunitary symmetry candidate: a coordinate point map combined with
/// optional complex conjugation.  flip[j] means x_{j+1} -> -x_{j+1}.
struct AntilinearMap {
    std::string name;
    std::array<bool, 3> flip{false, false, false};
    bool conjugate = true;

    static AntilinearMap T() { return {"T", {false, false, false}, true}; }
    static AntilinearMap P(int axis_or_all) {
        // axis 1..3 flips one coordinate; 0 flips all three
        AntilinearMap m{"P", {false, false, false}, false};
        if (axis_or_all == 0) {
            m.flip = {true, true, true};
        } else {
            m.name = "P" + std::to_string(axis_or_all);
            m.flip[axis_or_all - 1] = true;
        }
        return m;
    }
    static AntilinearMap PT(int axis_or_all) {
        AntilinearMap m = P(axis_or_all);
        m.name += "T";
        m.conjugate = true;
        return m;
    }
};

/// Normal-ordered linear differential operator: a finite sum of terms
/// c_alpha(x) d^alpha with every derivative pushed to the right.
class DiffOperator {
  public:
    DiffOperator() = default;

    static DiffOperator zero() { return {}; }
    static DiffOperator identity() {
        return term(RatFunc::from_long(1), {0, 0, 0});
    }
    static DiffOperator mult(RatFunc c) { return term(std::move(c), {0, 0, 0}); }
    static DiffOperator d(int axis, int times = 1) {
        Idx3 a{0, 0, 0};
        a[axis] = times;
        return term(RatFunc::from_long(1), a);
    }
    /// Momentum operator p_j = -i hbar d_j.
    static DiffOperator momentum(int axis) {
        Idx3 a{0, 0, 0};
        a[axis] = 1;
        return term(-RatFunc::i() * RatFunc::var(vars().hbar), a);
    }
    static DiffOperator term(RatFunc c, Idx3 alpha) {
        DiffOperator op;
        if (!c.is_zero()) op.terms_[alpha] = std::move(c);
        return op;
    }

    const std::map<Idx3, RatFunc>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int order() const {
        int o = 0;
        for (const auto& [a, c] : terms_) o = std::max(o, idx_order(a));
        return o;
    }
    RatFunc coeff(Idx3 a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? RatFunc() : it->second;
    }

    DiffOperator operator-() const {
        DiffOperator op = *this;
        for (auto& [a, c] : op.terms_) c = -c;
        return op;
    }

    friend DiffOperator operator+(const DiffOperator& a,
                                  const DiffOperator& b) {
        DiffOperator out = a;
        for (const auto& [idx, c] : b.terms_) out.add_term(idx, c);
        return out;
    }
    friend DiffOperator operator-(const DiffOperator& a,
                                  const DiffOperator& b) {
        return a + (-b);
    }
    DiffOperator& operator+=(const DiffOperator& o) { return *this = *this + o; }
    DiffOperator& operator-=(const DiffOperator& o) { return *this = *this - o; }

    DiffOperator scaled(const RatFunc& k) const {
        DiffOperator op;
        for (const auto& [a, c] : terms_) {
            RatFunc kc = k * c;
            if (!kc.is_zero()) op.terms_[a] = std::move(kc);
        }
        return op;
    }

    friend bool operator==(const DiffOperator& a, const DiffOperator& b) {
        return (a - b).is_zero();
    }

    /// Operator composition (generalized Leibniz rule):
    ///   c d^a (d f) = c sum_{g<=a} C(a,g) d^g(d) d^{a-g} f  applied per term.
    friend DiffOperator operator*(const DiffOperator& A, const DiffOperator& B) {
        DiffOperator out;
        for (const auto& [a, ca] : A.terms_) {
            for (const auto& [b, cb] : B.terms_) {
                Idx3 g{0, 0, 0};
                for (g[0] = 0; g[0] <= a[0]; ++g[0])
                    for (g[1] = 0; g[1] <= a[1]; ++g[1])
                        for (g[2] = 0; g[2] <= a[2]; ++g[2]) {
                            CRat binom =
                                CRat(choose(a[0], g[0]) * choose(a[1], g[1]) *
                                     choose(a[2], g[2]));
                            RatFunc dcb = deriv_multi(cb, g);
                            if (dcb.is_zero()) continue;
                            Idx3 rest{a[0] - g[0] + b[0], a[1] - g[1] + b[1],
                                      a[2] - g[2] + b[2]};
                            out.add_term(rest,
                                         ca * RatFunc::constant(binom) * dcb);
                        }
            }
        }
        return out;
    }

    friend DiffOperator commutator(const DiffOperator& A,
                                   const DiffOperator& B) {
        return A * B - B * A;
    }
    friend DiffOperator anticommutator(const DiffOperator& A,
                                       const DiffOperator& B) {
        return A * B + B * A;
    }

    /// Formal L2 adjoint: (c d^a)+ = (-1)^|a| d^a . conj(c), re-normal-ordered.
    DiffOperator adjoint() const {
        DiffOperator out;
        for (const auto& [a, c] : terms_) {
            DiffOperator da = term(RatFunc::from_long(1), a);
            DiffOperator mc = mult(c.conj());
            DiffOperator t = (da * mc)
                                 .scaled(RatFunc::constant(
                                     CRat(idx_order(a) % 2 ? -1 : 1)));
            out += t;
        }
        return out;
    }

    /// Conjugation by an antiunitary candidate: M O M^{-1}.  Coordinate
    /// flips act on coefficients by substitution and give each flipped
    /// derivative a sign; conjugation conjugates the coefficients.
    DiffOperator apply_antilinear(const AntilinearMap& m) const {
        DiffOperator out;
        auto& vt = vars();
        std::array<VarId, 3> xs{vt.x1, vt.x2, vt.x3};
        for (const auto& [a, c] : terms_) {
            RatFunc cc = c;
            int sign = 1;
            for (int j = 0; j < 3; ++j) {
                if (!m.flip[j]) continue;
                cc = cc.subst_negate(xs[j]);
                if (a[j] % 2) sign = -sign;
            }
            if (m.conjugate) cc = cc.conj();
            if (sign < 0) cc = -cc;
            out.add_term(a, cc);
        }
        return out;
    }

    /// Split by powers of hbar: returns (grade -> operator with hbar
    /// removed from the coefficients).
    std::map<int, DiffOperator> hbar_grade() const {
        std::map<int, DiffOperator> out;
        VarId h = vars().hbar;
        for (const auto& [a, c] : terms_) {
            // c = num/den; den never contains hbar in our usage, but handle
            // a pure hbar power in the denominator anyway
            int dden = c.den().degree(h);
            auto parts = c.num().univariate(h);
            for (const auto& [e, coeff] : parts) {
                RatFunc piece = RatFunc(coeff, c.den().subst_scalar(h, CRat(1)));
                out[e - dden].add_term_public(a, piece);
            }
        }
        for (auto it = out.begin(); it != out.end();)
            it = it->second.is_zero() ? out.erase(it) : std::next(it);
        return out;
    }

    void add_term_public(Idx3 a, const RatFunc& c) { add_term(a, c); }

    /// Canonical display: terms sorted by multi-index, derivatives rendered
    /// as d1, d2, d3 powers.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [a, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + nf_str(c) + ")";
            for (int j = 0; j < 3; ++j)
                if (a[j] > 0) {
                    s += "*d" + std::to_string(j + 1);
                    if (a[j] > 1) s += "^" + std::to_string(a[j]);
                }
        }
        return s;
    }

  private:
    void add_term(Idx3 a, const RatFunc& c) {
        auto it = terms_.find(a);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_[a] = c;
            return;
        }
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    static long choose(int n, int k) {
        long r = 1;
        for (int j = 1; j <= k; ++j) r = r * (n - j + 1) / j;
        return r;
    }

    static RatFunc deriv_multi(RatFunc f, const Idx3& g) {
        auto& vt = vars();
        std::array<VarId, 3> xs{vt.x1, vt.x2, vt.x3};
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < g[j] && !f.is_zero(); ++k) f = f.diff(xs[j]);
        return f;
    }

    std::map<Idx3, RatFunc> terms_;
};

} // namespace magsym

#endif
