#ifndef MAGSYM_PHASE_HPP
#define MAGSYM_PHASE_HPP

#include <array>
#include <functional>

#include "magsym/diffop.hpp"
#include "magsym/ratfunc.hpp"

namespace magsym {

/// Classical phase-space function, polynomial in the momenta with rational
/// coefficients; the momenta live in the same ring as the coordinates.
using PhasePolynomial = RatFunc;

/// Canonical chart: three coordinate/momentum pairs.  In the cylindrical
/// chart the angular slot pairs (phi, p2); derivatives with respect to phi
/// act through the phase unit u, so the coefficients stay rational.
struct Chart {
    std::array<VarId, 3> q;
    std::array<VarId, 3> p;

    static Chart cartesian() {
        auto& vt = vars();
        return {{vt.x1, vt.x2, vt.x3}, {vt.p1, vt.p2, vt.p3}};
    }
    static Chart cylindrical() {
        auto& vt = vars();
        return {{vt.r, vt.phi, vt.Z}, {vt.p1, vt.p2, vt.p3}};
    }
};

/// Canonical Poisson bracket in the given chart.
inline PhasePolynomial poisson(const PhasePolynomial& f,
                               const PhasePolynomial& g, const Chart& ch) {
    PhasePolynomial out;
    for (int j = 0; j < 3; ++j)
        out += f.diff(ch.q[j]) * g.diff(ch.p[j]) -
               f.diff(ch.p[j]) * g.diff(ch.q[j]);
    return out;
}

/// Magnetic field entering the twisted bracket as the 2-form components
/// B_{jk} in the chart's coordinate order: B12, B13, B23.
struct BracketField {
    RatFunc B12, B13, B23;
};

/// Poisson bracket twisted by a magnetic 2-form: the momenta are the gauge
/// covariant ones and pick up {p_j, p_k} = -B_{jk}.  This lets integrals be
/// checked against a field directly, with no choice of vector potential.
inline PhasePolynomial magnetic_poisson(const PhasePolynomial& f,
                                        const PhasePolynomial& g,
                                        const Chart& ch,
                                        const BracketField& B) {
    PhasePolynomial out = poisson(f, g, ch);
    auto add = [&](int j, int k, const RatFunc& Bjk) {
        out -= Bjk * (f.diff(ch.p[j]) * g.diff(ch.p[k]) -
                      f.diff(ch.p[k]) * g.diff(ch.p[j]));
    };
    add(0, 1, B.B12);
    add(0, 2, B.B13);
    add(1, 2, B.B23);
    return out;
}

/// Leading symbol of a differential operator: substitute -i hbar d -> p,
/// then drop every positive power of hbar and require that no negative
/// power survives.
inline PhasePolynomial classical_limit(const DiffOperator& op) {
    auto& vt = vars();
    std::array<VarId, 3> ps{vt.p1, vt.p2, vt.p3};
    RatFunc acc;
    for (const auto& [a, c] : op.terms()) {
        // d^alpha = (i/hbar)^|alpha| p^alpha
        RatFunc mono = RatFunc::from_long(1);
        for (int j = 0; j < 3; ++j)
            if (a[j] > 0) mono *= RatFunc::var(ps[j], a[j]);
        RatFunc scale =
            (RatFunc::i() / RatFunc::var(vt.hbar)).pow(idx_order(a));
        acc += c * scale * mono;
    }
    // now expand in hbar and keep the constant grade
    VarId h = vt.hbar;
    if (acc.den().contains(h)) {
        int dden = acc.den().degree(h);
        // denominator is a pure hbar power times an hbar-free poly in all
        // supported uses; shift it into the numerator grading
        auto dparts = acc.den().univariate(h);
        if (dparts.size() != 1)
            throw NotConvertible("classical limit: hbar mixed into the "
                                 "denominator");
        acc = RatFunc(acc.num(), dparts.begin()->second);
        if (acc.num().univariate(h).begin()->first - dden < 0)
            throw NotConvertible("classical limit diverges as hbar -> 0");
        auto nparts = acc.num().univariate(h);
        Poly keep;
        for (const auto& [e, coeff] : nparts)
            if (e == dden) keep = coeff;
        return RatFunc(keep, acc.den());
    }
    auto nparts = acc.num().univariate(h);
    auto it = nparts.find(0);
    return it == nparts.end() ? RatFunc()
                              : RatFunc(it->second, acc.den());
}

/// Split a phase-space function into coefficients of the momentum
/// monomials p^alpha.  The momenta must not appear in the denominator.
inline std::map<Idx3, RatFunc> momentum_coefficients(const PhasePolynomial& f) {
    auto& vt = vars();
    std::array<VarId, 3> ps{vt.p1, vt.p2, vt.p3};
    for (VarId pv : ps)
        if (f.den().contains(pv))
            throw NotConvertible("not polynomial in the momenta");
    std::map<Idx3, RatFunc> terms;
    std::function<void(const RatFunc&, int, Idx3)> split =
        [&](const RatFunc& g, int j, Idx3 a) {
            if (j == 3) {
                if (!g.is_zero()) {
                    auto it = terms.find(a);
                    if (it == terms.end())
                        terms[a] = g;
                    else
                        it->second += g;
                }
                return;
            }
            auto parts = g.num().univariate(ps[j]);
            for (const auto& [e, coeff] : parts) {
                Idx3 b = a;
                b[j] = e;
                split(RatFunc(coeff, g.den()), j + 1, b);
            }
        };
    split(f, 0, {0, 0, 0});
    return terms;
}

enum class Ordering { Left, Symmetrized };

/// Quantize a momentum polynomial in the Cartesian chart: p^alpha becomes
/// (-i hbar)^|alpha| d^alpha with the coefficient to the left, or the
/// symmetrized product (c o d^alpha + d^alpha o c)/2.
inline DiffOperator
from_momentum_polynomial(const PhasePolynomial& f,
                         Ordering ord = Ordering::Symmetrized) {
    auto& vt = vars();
    DiffOperator out;
    std::map<Idx3, RatFunc> terms = momentum_coefficients(f);
    RatFunc mih = -RatFunc::i() * RatFunc::var(vt.hbar);
    for (const auto& [a, c] : terms) {
        RatFunc scale = mih.pow(idx_order(a));
        DiffOperator da = DiffOperator::term(scale, a);
        if (ord == Ordering::Left) {
            out += DiffOperator::mult(c) * da;
        } else {
            DiffOperator half =
                (DiffOperator::mult(c) * da + da * DiffOperator::mult(c))
                    .scaled(RatFunc::constant(CRat(Rat(1, 2))));
            out += half;
        }
    }
    return out;
}

} // namespace magsym

#endif
