#ifndef MAGSYM_GEOMETRY_HPP
#define MAGSYM_GEOMETRY_HPP

#include <array>

#include "magsym/diffop.hpp"
#include "magsym/ratfunc.hpp"

namespace magsym {

/// Three component functions in a fixed frame.  For a 1-form these are the
/// covariant components (A_1, A_2, A_3) or (A_r, A_phi, A_Z); for a
/// magnetic field they are the 2-form components (B^1, B^2, B^3) or
/// (B^r, B^phi, B^Z).
using Field3 = std::array<RatFunc, 3>;

inline std::array<RatFunc, 3> cart_derivs(const RatFunc& f) {
    auto& vt = vars();
    return {f.diff(vt.x1), f.diff(vt.x2), f.diff(vt.x3)};
}

inline Field3 grad(const RatFunc& f) { return cart_derivs(f); }

inline Field3 curl(const Field3& A) {
    auto& vt = vars();
    return {A[2].diff(vt.x2) - A[1].diff(vt.x3),
            A[0].diff(vt.x3) - A[2].diff(vt.x1),
            A[1].diff(vt.x1) - A[0].diff(vt.x2)};
}

inline RatFunc divergence(const Field3& B) {
    auto& vt = vars();
    return B[0].diff(vt.x1) + B[1].diff(vt.x2) + B[2].diff(vt.x3);
}

/// cos(phi) and sin(phi) as rational functions of the phase unit u.
inline RatFunc cos_phi() {
    RatFunc u = RatFunc::var(vars().u);
    return (u + RatFunc::from_long(1) / u) / RatFunc::from_long(2);
}
inline RatFunc sin_phi() {
    RatFunc u = RatFunc::var(vars().u);
    return (u - RatFunc::from_long(1) / u) /
           (RatFunc::from_long(2) * RatFunc::i());
}

/// Substitute x1 = r cos(phi), x2 = r sin(phi), x3 = Z.
inline RatFunc to_cylindrical(const RatFunc& f) {
    auto& vt = vars();
    RatFunc r = RatFunc::var(vt.r);
    return f.subst(vt.x1, r * cos_phi())
        .subst(vt.x2, r * sin_phi())
        .subst(vt.x3, RatFunc::var(vt.Z));
}

/// Inverse substitution.  A cylindrical expression returns to the Cartesian
/// frame only when every monomial r^a u^b has a+b even after clearing the
/// fraction, i.e. when it is built from r*u = x1+i*x2, r/u = x1-i*x2 and
/// r^2 = x1^2+x2^2; otherwise it is genuinely multivalued in (x1, x2) and
/// NotConvertible is raised.
inline RatFunc to_cartesian(const RatFunc& f) {
    auto& vt = vars();
    struct Split {
        int par = -1; // -1 unset, 0 even, 1 odd, 2 mixed
        void feed(int q) {
            if (par == -1)
                par = q;
            else if (par != q)
                par = 2;
        }
    };
    auto parity_of = [&](const Poly& p) {
        Split s;
        for (const auto& t : p.terms())
            s.feed((t.m.exp_of(vt.r) + t.m.exp_of(vt.u)) % 2);
        return s.par;
    };
    if (f.is_zero()) return f;
    Poly n = f.num(), d = f.den();
    int pn = parity_of(n), pd = parity_of(d);
    if (pn == 2 || pd == 2 || ((pn ^ pd) & 1))
        throw NotConvertible("expression is not single-valued in Cartesian "
                             "coordinates");
    if (pn == 1) { // scale both sides by r to even out
        n = n * Poly::var(vt.r);
        d = d * Poly::var(vt.r);
    }
    RatFunc z = RatFunc::var(vt.x1) + RatFunc::i() * RatFunc::var(vt.x2);
    RatFunc r2 = RatFunc::var(vt.x1).pow(2) + RatFunc::var(vt.x2).pow(2);
    auto convert = [&](const Poly& p) {
        RatFunc out;
        for (const auto& t : p.terms()) {
            int a = t.m.exp_of(vt.r), b = t.m.exp_of(vt.u),
                c = t.m.exp_of(vt.Z);
            RatFunc term = RatFunc::constant(t.c);
            for (const auto& [v, e] : t.m.e)
                if (v != vt.r && v != vt.u && v != vt.Z)
                    term *= RatFunc::var(v, e);
            term *= z.pow(b) * r2.pow((a - b) / 2);
            if (c > 0) term *= RatFunc::var(vt.x3, c);
            out += term;
        }
        return out;
    };
    return convert(n) / convert(d);
}

/// 1-form components, cylindrical -> Cartesian (same rule for A and p).
inline Field3 oneform_to_cartesian(const Field3& Acyl) {
    auto& vt = vars();
    RatFunc r = RatFunc::var(vt.r);
    RatFunc A1 = cos_phi() * Acyl[0] - sin_phi() / r * Acyl[1];
    RatFunc A2 = sin_phi() * Acyl[0] + cos_phi() / r * Acyl[1];
    return {to_cartesian(A1), to_cartesian(A2), to_cartesian(Acyl[2])};
}

inline Field3 oneform_to_cylindrical(const Field3& Acart) {
    Field3 c{to_cylindrical(Acart[0]), to_cylindrical(Acart[1]),
             to_cylindrical(Acart[2])};
    RatFunc r = RatFunc::var(vars().r);
    return {cos_phi() * c[0] + sin_phi() * c[1],
            r * (cos_phi() * c[1] - sin_phi() * c[0]), c[2]};
}

/// Magnetic field 2-form components, cylindrical -> Cartesian.
inline Field3 field_to_cartesian(const Field3& Bcyl) {
    auto& vt = vars();
    RatFunc r = RatFunc::var(vt.r);
    RatFunc B1 = cos_phi() / r * Bcyl[0] - sin_phi() * Bcyl[1];
    RatFunc B2 = sin_phi() / r * Bcyl[0] + cos_phi() * Bcyl[1];
    RatFunc B3 = Bcyl[2] / r;
    return {to_cartesian(B1), to_cartesian(B2), to_cartesian(B3)};
}

inline Field3 field_to_cylindrical(const Field3& Bcart) {
    Field3 c{to_cylindrical(Bcart[0]), to_cylindrical(Bcart[1]),
             to_cylindrical(Bcart[2])};
    RatFunc r = RatFunc::var(vars().r);
    return {r * (cos_phi() * c[0] + sin_phi() * c[1]),
            cos_phi() * c[1] - sin_phi() * c[0], r * c[2]};
}

/// Auxiliary one-variable functions rho(r), sigma(r), psi(phi), tau(phi),
/// mu(Z) parametrizing the second order determining equations.  Any
/// cylindrical rational functions work here, abstract atoms included.
struct AuxFunctions {
    RatFunc rho, sigma, psi, tau, mu;
};

/// Magnetic field (B^r, B^phi, B^Z) from the auxiliary functions.
inline Field3 field_from_aux(const AuxFunctions& a) {
    auto& vt = vars();
    RatFunc r = RatFunc::var(vt.r);
    RatFunc two = RatFunc::from_long(2);
    RatFunc Br = -r.pow(2) / two * a.mu.diff(vt.Z) +
                 a.tau.diff(vt.phi) / (two * r.pow(2));
    RatFunc Bphi = a.tau / r.pow(3) + a.sigma.diff(vt.r) / two;
    RatFunc BZ = -a.psi / (two * r.pow(2)) + r * a.mu -
                 a.rho.diff(vt.r) / two -
                 a.psi.diff(vt.phi).diff(vt.phi) / (two * r.pow(2));
    return {Br, Bphi, BZ};
}

/// First order coefficients (s1, s2) of the cylindrical integrals in terms
/// of the auxiliary functions.
inline std::pair<Field3, Field3> s_from_aux(const AuxFunctions& a) {
    auto& vt = vars();
    RatFunc r = RatFunc::var(vt.r);
    Field3 s1{a.psi.diff(vt.phi), -a.psi / r - r.pow(2) * a.mu + a.rho,
              a.tau};
    Field3 s2{RatFunc(), a.mu, -a.tau / r.pow(2) + a.sigma};
    return {s1, s2};
}

/// A -> A + grad(chi).
inline Field3 gauge_shift(const Field3& A, const RatFunc& chi) {
    Field3 g = grad(chi);
    return {A[0] + g[0], A[1] + g[1], A[2] + g[2]};
}

/// Operator conjugation by the gauge factor: exp(-i chi/hbar) O
/// exp(i chi/hbar), which maps the Hamiltonian with potential A to the one
/// with A + grad(chi).  Evaluated as the commutator series
/// sum_k ad_g^k(O)/k! with g = -i chi/hbar; each commutator with a
/// multiplication operator lowers the derivative order, so the series
/// terminates.
inline DiffOperator gauge_conjugate(const DiffOperator& op,
                                    const RatFunc& chi) {
    RatFunc g = -RatFunc::i() * chi / RatFunc::var(vars().hbar);
    DiffOperator G = DiffOperator::mult(g);
    DiffOperator acc = op;
    DiffOperator cur = op;
    CRat fact(1);
    for (int k = 1; !cur.is_zero() && k < 64; ++k) {
        cur = commutator(G, cur);
        fact = fact * CRat(Rat(1, k));
        acc += cur.scaled(RatFunc::constant(fact));
    }
    return acc;
}

} // namespace magsym

#endif
