#ifndef MAGSYM_POLY_HPP
#define MAGSYM_POLY_HPP

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "magsym/rational.hpp"
#include "magsym/symbols.hpp"

namespace magsym {

/// Sorted exponent list (variable, positive exponent), most significant
/// variable first per VarTable::rank_less.
struct Monomial {
    std::vector<std::pair<VarId, int>> e;

    bool empty() const { return e.empty(); }

    int exp_of(VarId v) const {
        for (const auto& [var, ex] : e)
            if (var == v) return ex;
        return 0;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [var, ex] : e) d += ex;
        return d;
    }

    static Monomial mul(const Monomial& a, const Monomial& b) {
        Monomial m;
        auto& vt = vars();
        size_t i = 0, j = 0;
        while (i < a.e.size() || j < b.e.size()) {
            if (j == b.e.size() ||
                (i < a.e.size() && vt.rank_less(a.e[i].first, b.e[j].first))) {
                m.e.push_back(a.e[i++]);
            } else if (i == a.e.size() ||
                       vt.rank_less(b.e[j].first, a.e[i].first)) {
                m.e.push_back(b.e[j++]);
            } else {
                m.e.emplace_back(a.e[i].first, a.e[i].second + b.e[j].second);
                ++i;
                ++j;
            }
        }
        return m;
    }

    /// a/b; requires divisibility (checked).
    static bool try_div(const Monomial& a, const Monomial& b, Monomial& out) {
        out.e.clear();
        auto& vt = vars();
        size_t i = 0, j = 0;
        while (i < a.e.size() || j < b.e.size()) {
            if (j == b.e.size()) {
                out.e.push_back(a.e[i++]);
            } else if (i == a.e.size()) {
                return false; // b has a variable a lacks
            } else if (vt.rank_less(a.e[i].first, b.e[j].first)) {
                out.e.push_back(a.e[i++]);
            } else if (vt.rank_less(b.e[j].first, a.e[i].first)) {
                return false;
            } else {
                int d = a.e[i].second - b.e[j].second;
                if (d < 0) return false;
                if (d > 0) out.e.emplace_back(a.e[i].first, d);
                ++i;
                ++j;
            }
        }
        return true;
    }

    /// Lexicographic order, most significant variable first.
    /// Returns <0, 0, >0.
    static int cmp(const Monomial& a, const Monomial& b) {
        auto& vt = vars();
        size_t i = 0, j = 0;
        while (i < a.e.size() || j < b.e.size()) {
            if (i == a.e.size()) return -1; // b has an extra leading var
            if (j == b.e.size()) return 1;
            if (vt.rank_less(a.e[i].first, b.e[j].first)) return 1;
            if (vt.rank_less(b.e[j].first, a.e[i].first)) return -1;
            if (a.e[i].second != b.e[j].second)
                return a.e[i].second > b.e[j].second ? 1 : -1;
            ++i;
            ++j;
        }
        return 0;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return cmp(a, b) == 0;
    }
};

struct MonoGreater {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return Monomial::cmp(a, b) > 0;
    }
};

/// Sparse multivariate polynomial over CRat; terms sorted descending.
class Poly {
  public:
    struct Term {
        Monomial m;
        CRat c;
    };

    Poly() = default;

    static Poly zero() { return Poly(); }
    static Poly constant(CRat c) {
        Poly p;
        if (!c.is_zero()) p.terms_.push_back({Monomial{}, std::move(c)});
        return p;
    }
    static Poly var(VarId v, int exp = 1) {
        Poly p;
        Monomial m;
        if (exp != 0) m.e.emplace_back(v, exp);
        p.terms_.push_back({std::move(m), CRat(1)});
        return p;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].m.empty());
    }
    CRat constant_value() const {
        return terms_.empty() ? CRat(0) : terms_[0].c;
    }
    const CRat& leading_coeff() const { return terms_.front().c; }
    const Monomial& leading_monomial() const { return terms_.front().m; }

    size_t num_terms() const { return terms_.size(); }

    int degree(VarId v) const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, t.m.exp_of(v));
        return d;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, t.m.total_degree());
        return d;
    }

    bool contains(VarId v) const {
        for (const auto& t : terms_)
            if (t.m.exp_of(v) > 0) return true;
        return false;
    }

    std::vector<VarId> variables() const {
        std::vector<VarId> vs;
        for (const auto& t : terms_)
            for (const auto& [v, e] : t.m.e) vs.push_back(v);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return vs;
    }

    Poly operator-() const {
        Poly p = *this;
        for (auto& t : p.terms_) t.c = -t.c;
        return p;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly out;
        size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size()) {
                out.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size()) {
                out.terms_.push_back(b.terms_[j++]);
            } else {
                int c = Monomial::cmp(a.terms_[i].m, b.terms_[j].m);
                if (c > 0)
                    out.terms_.push_back(a.terms_[i++]);
                else if (c < 0)
                    out.terms_.push_back(b.terms_[j++]);
                else {
                    CRat s = a.terms_[i].c + b.terms_[j].c;
                    if (!s.is_zero())
                        out.terms_.push_back({a.terms_[i].m, std::move(s)});
                    ++i;
                    ++j;
                }
            }
        }
        return out;
    }

    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::map<Monomial, CRat, MonoGreater> acc;
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                Monomial m = Monomial::mul(ta.m, tb.m);
                auto [it, fresh] = acc.emplace(std::move(m), ta.c * tb.c);
                if (!fresh) it->second += ta.c * tb.c;
            }
        Poly out;
        for (auto& [m, c] : acc)
            if (!c.is_zero()) out.terms_.push_back({m, std::move(c)});
        return out;
    }

    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly scaled(const CRat& k) const {
        if (k.is_zero()) return Poly();
        Poly p = *this;
        for (auto& t : p.terms_) t.c *= k;
        return p;
    }

    Poly pow(int e) const {
        Poly acc = Poly::constant(CRat(1));
        Poly base = *this;
        for (; e > 0; e >>= 1) {
            if (e & 1) acc *= base;
            if (e > 1) base *= base;
        }
        return acc;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].c != b.terms_[i].c ||
                !(a.terms_[i].m == b.terms_[i].m))
                return false;
        return true;
    }

    /// Partial derivative with respect to a ring variable (explicit part
    /// only; chain rules for atoms live in RatFunc::diff).
    Poly derivative(VarId v) const {
        Poly out;
        for (const auto& t : terms_) {
            int e = t.m.exp_of(v);
            if (e == 0) continue;
            Monomial m;
            for (const auto& [var, ex] : t.m.e) {
                if (var == v) {
                    if (ex > 1) m.e.emplace_back(var, ex - 1);
                } else {
                    m.e.emplace_back(var, ex);
                }
            }
            out.terms_.push_back({std::move(m), t.c * CRat(e)});
        }
        std::sort(out.terms_.begin(), out.terms_.end(),
                  [](const Term& a, const Term& b) {
                      return Monomial::cmp(a.m, b.m) > 0;
                  });
        return out;
    }

    /// Substitute a variable by an exact scalar.
    Poly subst_scalar(VarId v, const CRat& val) const {
        std::map<Monomial, CRat, MonoGreater> acc;
        for (const auto& t : terms_) {
            int e = t.m.exp_of(v);
            Monomial m;
            for (const auto& [var, ex] : t.m.e)
                if (var != v) m.e.emplace_back(var, ex);
            CRat c = t.c * val.pow(e);
            if (c.is_zero()) continue;
            auto [it, fresh] = acc.emplace(std::move(m), c);
            if (!fresh) it->second += c;
        }
        Poly out;
        for (auto& [m, c] : acc)
            if (!c.is_zero()) out.terms_.push_back({m, std::move(c)});
        return out;
    }

    /// Substitute v -> -v.
    Poly subst_negate(VarId v) const {
        Poly p = *this;
        for (auto& t : p.terms_)
            if (t.m.exp_of(v) % 2 == 1) t.c = -t.c;
        return p;
    }

    /// Substitute a variable by a polynomial.
    Poly subst_poly(VarId v, const Poly& repl) const {
        Poly out;
        for (const auto& t : terms_) {
            int e = t.m.exp_of(v);
            Monomial m;
            for (const auto& [var, ex] : t.m.e)
                if (var != v) m.e.emplace_back(var, ex);
            Poly term;
            term.terms_.push_back({std::move(m), t.c});
            if (e > 0) term *= repl.pow(e);
            out += term;
        }
        return out;
    }

    Poly conj_coeffs() const {
        Poly p = *this;
        for (auto& t : p.terms_) t.c = t.c.conj();
        return p;
    }

    /// Coefficients as a univariate polynomial in v.
    std::map<int, Poly> univariate(VarId v) const {
        std::map<int, Poly> out;
        for (const auto& t : terms_) {
            int e = t.m.exp_of(v);
            Monomial m;
            for (const auto& [var, ex] : t.m.e)
                if (var != v) m.e.emplace_back(var, ex);
            out[e].terms_.push_back({std::move(m), t.c});
        }
        for (auto& [e, p] : out)
            std::sort(p.terms_.begin(), p.terms_.end(),
                      [](const Term& a, const Term& b) {
                          return Monomial::cmp(a.m, b.m) > 0;
                      });
        return out;
    }

    Poly coeff_of(VarId v, int e) const {
        Poly out;
        for (const auto& t : terms_) {
            if (t.m.exp_of(v) != e) continue;
            Monomial m;
            for (const auto& [var, ex] : t.m.e)
                if (var != v) m.e.emplace_back(var, ex);
            out.terms_.push_back({std::move(m), t.c});
        }
        std::sort(out.terms_.begin(), out.terms_.end(),
                  [](const Term& a, const Term& b) {
                      return Monomial::cmp(a.m, b.m) > 0;
                  });
        return out;
    }

    /// Rebuild from a univariate coefficient map.
    static Poly from_univariate(VarId v, const std::map<int, Poly>& coeffs) {
        Poly out;
        for (const auto& [e, p] : coeffs) out += p * Poly::var(v, e ? e : 0);
        return out;
    }

    std::complex<double>
    eval(const std::map<VarId, std::complex<double>>& point) const {
        std::complex<double> acc = 0.0;
        for (const auto& t : terms_) {
            std::complex<double> v = t.c.to_complex();
            for (const auto& [var, ex] : t.m.e) {
                auto it = point.find(var);
                if (it == point.end())
                    throw MissingBinding("no value for symbol '" +
                                         vars().name(var) + "'");
                std::complex<double> b = it->second;
                for (int k = 0; k < ex; ++k) v *= b;
            }
            acc += v;
        }
        return acc;
    }

    /// Exact division if it succeeds, nullopt on nonzero remainder.
    static std::optional<Poly> try_divexact(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
        Poly q;
        Poly rem = a;
        while (!rem.is_zero()) {
            Monomial mq;
            if (!Monomial::try_div(rem.leading_monomial(), b.leading_monomial(),
                                   mq))
                return std::nullopt;
            Poly t;
            t.terms_.push_back(
                {std::move(mq), rem.leading_coeff() / b.leading_coeff()});
            q += t;
            rem -= t * b;
        }
        return q;
    }

    /// Exact division; throws on nonzero remainder.
    static Poly divexact(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
        Poly q;
        Poly rem = a;
        while (!rem.is_zero()) {
            Monomial mq;
            if (!Monomial::try_div(rem.leading_monomial(), b.leading_monomial(),
                                   mq))
                throw Error("divexact: not divisible");
            Poly t;
            t.terms_.push_back({std::move(mq), rem.leading_coeff() / b.leading_coeff()});
            q += t;
            rem -= t * b;
        }
        return q;
    }

    /// Multivariate GCD over Q(i), monic in the global leading coefficient.
    static Poly gcd(const Poly& a, const Poly& b) {
        Poly g = gcd_raw(a, b);
        return monic(g);
    }

    static Poly monic(const Poly& p) {
        if (p.is_zero()) return p;
        return p.scaled(p.leading_coeff().inv());
    }

  private:
    static Poly gcd_raw(const Poly& a0, const Poly& b0) {
        if (a0.is_zero()) return b0;
        if (b0.is_zero()) return a0;
        if (a0.is_constant() || b0.is_constant())
            return Poly::constant(CRat(1));
        // Pull out the monomial content first: denominators in practice are
        // dominated by pure powers (r^k, u^k, ...), which this settles
        // without entering the remainder sequence.
        Monomial ma = mono_content(a0), mb = mono_content(b0);
        Monomial mg = mono_min(ma, mb);
        Poly a = mono_divide(a0, ma);
        Poly b = mono_divide(b0, mb);
        Poly g = mono_factor(mg) * gcd_stripped(a, b);
        return g;
    }

    static Poly gcd_stripped(const Poly& a, const Poly& b) {
        if (a.is_constant() || b.is_constant())
            return Poly::constant(CRat(1));
        if (a == b || a == -b) return a;
        // Canonical denominators are almost always powers of a primitive
        // monic linear form (x1 - I*x2, ...).  A linear form primitive in
        // its main variable is irreducible, so the gcd against anything is
        // that form raised to its multiplicity in the other operand; the
        // remainder sequence never has to run.
        if (auto g = linear_power_gcd(a, b)) return *g;
        if (auto g = linear_power_gcd(b, a)) return *g;
        // Main variable: the most significant variable present in either.
        VarId va = a.leading_monomial().e.front().first;
        VarId vb = b.leading_monomial().e.front().first;
        VarId v = vars().rank_less(va, vb) ? va : vb;
        if (!b.contains(v)) return gcd_raw(content(a, v), b);
        if (!a.contains(v)) return gcd_raw(a, content(b, v));

        Poly ca = content(a, v);
        Poly cb = content(b, v);
        Poly c = gcd_raw(ca, cb);
        Poly g = strip_numeric_content(divexact(a, ca));
        Poly h = strip_numeric_content(divexact(b, cb));
        if (g.degree(v) < h.degree(v)) std::swap(g, h);
        while (!h.is_zero()) {
            Poly rem = prem(g, h, v);
            g = h;
            if (rem.is_zero()) break;
            h = primitive_part(rem, v);
        }
        return c * primitive_part(g, v);
    }

    /// If p = c (v + q)^m with numeric c and q free of v, the gcd with any
    /// other polynomial is (v + q)^j, j the multiplicity of v + q in it.
    static std::optional<Poly> linear_power_gcd(const Poly& p,
                                                const Poly& other) {
        VarId v = p.leading_monomial().e.front().first;
        auto up = p.univariate(v);
        int m = up.rbegin()->first;
        if (m == 0) return std::nullopt;
        const Poly& lc = up.rbegin()->second;
        if (!lc.is_constant()) return std::nullopt;
        CRat c = lc.leading_coeff();
        Poly q;
        if (auto it = up.find(m - 1); it != up.end())
            q = it->second.scaled((c * CRat(m)).inv());
        Poly lin = Poly::var(v, 1) + q;
        Poly pw = Poly::constant(c);
        for (int k = 0; k < m; ++k) pw = pw * lin;
        if (!(pw == p)) return std::nullopt;
        int j = 0;
        Poly rest = other;
        while (j < m) {
            auto d = try_divexact(rest, lin);
            if (!d) break;
            rest = std::move(*d);
            ++j;
        }
        Poly g = Poly::constant(CRat(1));
        for (int k = 0; k < j; ++k) g = g * lin;
        return g;
    }

    /// Per-variable minimum exponent over all terms of p.
    static Monomial mono_content(const Poly& p) {
        Monomial m = p.terms_.front().m;
        for (size_t i = 1; i < p.terms_.size() && !m.empty(); ++i)
            m = mono_min(m, p.terms_[i].m);
        return m;
    }

    static Monomial mono_min(const Monomial& a, const Monomial& b) {
        Monomial out;
        for (const auto& [v, e] : a.e) {
            int eb = b.exp_of(v);
            int m = std::min(e, eb);
            if (m > 0) out.e.emplace_back(v, m);
        }
        return out;
    }

    static Poly mono_factor(const Monomial& m) {
        Poly p;
        p.terms_.push_back({m, CRat(1)});
        return p;
    }

    static Poly mono_divide(const Poly& p, const Monomial& m) {
        if (m.empty()) return p;
        Poly out = p;
        for (auto& t : out.terms_) {
            Monomial q;
            Monomial::try_div(t.m, m, q);
            t.m = std::move(q);
        }
        return out;
    }

    /// Pseudo-remainder of a by b in variable v.
    static Poly prem(Poly a, const Poly& b, VarId v) {
        int db = b.degree(v);
        auto ub = b.univariate(v);
        Poly lb = ub.rbegin()->second; // leading coeff in v
        while (!a.is_zero() && a.degree(v) >= db) {
            int da = a.degree(v);
            auto ua = a.univariate(v);
            Poly la = ua.rbegin()->second;
            a = a * lb - b * la * Poly::var(v, da - db);
        }
        return a;
    }

    static Poly content(const Poly& p, VarId v) {
        auto uv = p.univariate(v);
        Poly c;
        for (const auto& [e, coeff] : uv) c = gcd_raw(c, coeff);
        return monic(c);
    }

    /// Rescale so coefficients are primitive Gaussian integers.  Without
    /// this the rational coefficients produced by pseudo-remainders grow
    /// exponentially along the remainder sequence.
    static Poly strip_numeric_content(const Poly& p) {
        if (p.is_zero()) return p;
        mpz_class g = 0, l = 1;
        auto acc = [&](const Rat& q) {
            if (q == 0) return;
            g = ::gcd(g, q.get_num());
            l = ::lcm(l, q.get_den());
        };
        for (const auto& t : p.terms_) {
            acc(t.c.re());
            acc(t.c.im());
        }
        if (g == 0) return p;
        Rat s(l, g);
        s.canonicalize();
        return p.scaled(CRat(s));
    }

    static Poly primitive_part(const Poly& p, VarId v) {
        if (p.is_zero()) return p;
        Poly c = content(p, v);
        return strip_numeric_content(divexact(p, c));
    }

    std::vector<Term> terms_;
};

} // namespace magsym

#endif
