#include <gtest/gtest.h>

#include <random>

#include "magsym/diffop.hpp"
#include "magsym/phase.hpp"

using namespace magsym;

namespace {

RatFunc rf_var(VarId v) { return RatFunc::var(v); }

DiffOperator rnd_op(std::mt19937& g) {
    auto& vt = vars();
    std::uniform_int_distribution<long> coef(-4, 4);
    std::uniform_int_distribution<int> dg(0, 2);
    DiffOperator op;
    for (int t = 0; t < 3; ++t) {
        RatFunc c = RatFunc::constant(CRat(coef(g))) *
                    rf_var(vt.x1).pow(dg(g)) * rf_var(vt.x2).pow(dg(g));
        Idx3 a{dg(g), dg(g), 0};
        op += DiffOperator::term(c, a);
    }
    return op;
}

} // namespace

TEST(DiffOp, CanonicalCommutators) {
    auto& vt = vars();
    RatFunc ih = RatFunc::i() * rf_var(vt.hbar);
    // [p_j, x_j] = -i hbar, [p_j, x_k] = 0
    for (int j = 0; j < 3; ++j) {
        VarId xs[3] = {vt.x1, vt.x2, vt.x3};
        for (int k = 0; k < 3; ++k) {
            DiffOperator c = commutator(DiffOperator::momentum(j),
                                        DiffOperator::mult(rf_var(xs[k])));
            if (j == k)
                EXPECT_EQ(c, DiffOperator::mult(-ih));
            else
                EXPECT_TRUE(c.is_zero());
        }
    }
    // [p_j, p_k] = 0
    EXPECT_TRUE(commutator(DiffOperator::momentum(0),
                           DiffOperator::momentum(1))
                    .is_zero());
}

TEST(DiffOp, CompositionAssociative) {
    std::mt19937 g(42);
    for (int it = 0; it < 25; ++it) {
        DiffOperator A = rnd_op(g), B = rnd_op(g), C = rnd_op(g);
        EXPECT_EQ((A * B) * C, A * (B * C));
        EXPECT_EQ(A * (B + C), A * B + A * C);
    }
}

TEST(DiffOp, NormalOrdering) {
    auto& vt = vars();
    // d1 . x1 = x1 d1 + 1
    DiffOperator lhs = DiffOperator::d(0) * DiffOperator::mult(rf_var(vt.x1));
    DiffOperator want = DiffOperator::term(rf_var(vt.x1), {1, 0, 0}) +
                        DiffOperator::identity();
    EXPECT_EQ(lhs, want);
    // d1^2 . x1 = x1 d1^2 + 2 d1
    DiffOperator lhs2 =
        DiffOperator::d(0, 2) * DiffOperator::mult(rf_var(vt.x1));
    DiffOperator want2 =
        DiffOperator::term(rf_var(vt.x1), {2, 0, 0}) +
        DiffOperator::term(RatFunc::from_long(2), {1, 0, 0});
    EXPECT_EQ(lhs2, want2);
}

TEST(DiffOp, JacobiIdentity) {
    std::mt19937 g(7);
    for (int it = 0; it < 10; ++it) {
        DiffOperator A = rnd_op(g), B = rnd_op(g), C = rnd_op(g);
        DiffOperator j = commutator(A, commutator(B, C)) +
                         commutator(B, commutator(C, A)) +
                         commutator(C, commutator(A, B));
        EXPECT_TRUE(j.is_zero());
    }
}

TEST(DiffOp, AdjointAntiHomomorphism) {
    std::mt19937 g(99);
    for (int it = 0; it < 15; ++it) {
        DiffOperator A = rnd_op(g), B = rnd_op(g);
        EXPECT_EQ((A * B).adjoint(), B.adjoint() * A.adjoint());
        EXPECT_EQ(A.adjoint().adjoint(), A);
        EXPECT_EQ((A + B).adjoint(), A.adjoint() + B.adjoint());
    }
}

TEST(DiffOp, AdjointExamples) {
    auto& vt = vars();
    // momentum is symmetric
    for (int j = 0; j < 3; ++j)
        EXPECT_EQ(DiffOperator::momentum(j).adjoint(),
                  DiffOperator::momentum(j));
    // (i d1)+ = i d1 ... no: (d1)+ = -d1, (i)* = -i, so (i d1)+ = i d1
    DiffOperator id1 = DiffOperator::term(RatFunc::i(), {1, 0, 0});
    EXPECT_EQ(id1.adjoint(), id1);
    // (c(x) d1)+ = -conj(c) d1 - conj(c)'
    RatFunc c = rf_var(vt.x1) * RatFunc::i();
    DiffOperator op = DiffOperator::term(c, {1, 0, 0});
    DiffOperator want =
        DiffOperator::term(rf_var(vt.x1) * RatFunc::i(), {1, 0, 0}) +
        DiffOperator::mult(RatFunc::i());
    EXPECT_EQ(op.adjoint(), want);
}

TEST(DiffOp, AntilinearMaps) {
    auto& vt = vars();
    // T conjugates coefficients and fixes derivatives
    DiffOperator op = DiffOperator::term(RatFunc::i() * rf_var(vt.x1),
                                         {0, 1, 0});
    DiffOperator t = op.apply_antilinear(AntilinearMap::T());
    EXPECT_EQ(t, DiffOperator::term(-RatFunc::i() * rf_var(vt.x1), {0, 1, 0}));
    // P2 flips x2 and d2
    DiffOperator p2 = op.apply_antilinear(AntilinearMap::P(2));
    EXPECT_EQ(p2, DiffOperator::term(-RatFunc::i() * rf_var(vt.x1), {0, 1, 0}));
    // full parity on an odd-order term
    DiffOperator p = DiffOperator::d(0).apply_antilinear(AntilinearMap::P(0));
    EXPECT_EQ(p, -DiffOperator::d(0));
    // PT is an involution
    DiffOperator twice = op.apply_antilinear(AntilinearMap::PT(2))
                             .apply_antilinear(AntilinearMap::PT(2));
    EXPECT_EQ(twice, op);
}

TEST(DiffOp, HbarGrading) {
    auto& vt = vars();
    DiffOperator H =
        DiffOperator::term(rf_var(vt.hbar).pow(2), {2, 0, 0}) +
        DiffOperator::term(rf_var(vt.x1) * rf_var(vt.hbar), {1, 0, 0}) +
        DiffOperator::mult(rf_var(vt.x2));
    auto grades = H.hbar_grade();
    ASSERT_EQ(grades.size(), 3u);
    EXPECT_EQ(grades[0], DiffOperator::mult(rf_var(vt.x2)));
    EXPECT_EQ(grades[1], DiffOperator::term(rf_var(vt.x1), {1, 0, 0}));
    EXPECT_EQ(grades[2], DiffOperator::d(0, 2));
}

TEST(Phase, PoissonBasics) {
    auto& vt = vars();
    Chart ch = Chart::cartesian();
    RatFunc x = rf_var(vt.x1), p = rf_var(vt.p1);
    EXPECT_EQ(poisson(x, p, ch), RatFunc::from_long(1));
    EXPECT_EQ(poisson(p, x, ch), -RatFunc::from_long(1));
    EXPECT_EQ(poisson(x, rf_var(vt.p2), ch), RatFunc());
    // {L3, p1} = p2 with L3 = x1 p2 - x2 p1
    RatFunc L3 = x * rf_var(vt.p2) - rf_var(vt.x2) * p;
    EXPECT_EQ(poisson(L3, p, ch), rf_var(vt.p2));
}

TEST(Phase, PoissonJacobi) {
    auto& vt = vars();
    Chart ch = Chart::cartesian();
    std::mt19937 g(5);
    std::uniform_int_distribution<long> coef(-3, 3);
    std::uniform_int_distribution<int> dg(0, 2);
    auto rnd = [&] {
        RatFunc f;
        for (int t = 0; t < 3; ++t)
            f += RatFunc::constant(CRat(coef(g))) *
                 rf_var(vt.x1).pow(dg(g)) * rf_var(vt.p1).pow(dg(g)) *
                 rf_var(vt.p2).pow(dg(g));
        return f;
    };
    for (int it = 0; it < 10; ++it) {
        RatFunc a = rnd(), b = rnd(), c = rnd();
        RatFunc j = poisson(a, poisson(b, c, ch), ch) +
                    poisson(b, poisson(c, a, ch), ch) +
                    poisson(c, poisson(a, b, ch), ch);
        EXPECT_TRUE(j.is_zero());
    }
}

TEST(Phase, MagneticBracketClosedFieldJacobi) {
    auto& vt = vars();
    Chart ch = Chart::cartesian();
    // B = curl A for A = (0, x1^2 x3, 0):  B = (-x1^2, 0, 2 x1 x3)
    // 2-form components: B12 = B^3, B13 = -B^2, B23 = B^1
    BracketField B{rf_var(vt.x1) * rf_var(vt.x3) * RatFunc::from_long(2),
                   RatFunc(), -rf_var(vt.x1).pow(2)};
    std::mt19937 g(6);
    std::uniform_int_distribution<long> coef(-3, 3);
    std::uniform_int_distribution<int> dg(0, 2);
    auto rnd = [&] {
        RatFunc f;
        for (int t = 0; t < 2; ++t)
            f += RatFunc::constant(CRat(coef(g))) *
                 rf_var(vt.x1).pow(dg(g)) * rf_var(vt.x3).pow(dg(g)) *
                 rf_var(vt.p1).pow(dg(g)) * rf_var(vt.p3).pow(dg(g));
        return f;
    };
    auto pb = [&](const RatFunc& f, const RatFunc& h) {
        return magnetic_poisson(f, h, ch, B);
    };
    for (int it = 0; it < 8; ++it) {
        RatFunc a = rnd(), b = rnd(), c = rnd();
        RatFunc j = pb(a, pb(b, c)) + pb(b, pb(c, a)) + pb(c, pb(a, b));
        EXPECT_TRUE(j.is_zero()) << "iteration " << it;
    }
}

TEST(Phase, MagneticBracketMatchesMinimalCoupling) {
    auto& vt = vars();
    Chart ch = Chart::cartesian();
    // Landau-type field B^3 = b with A = (0, b x1, 0).  In the twisted
    // bracket the covariant momenta satisfy {p1, p2} = -b.
    VarId b = vt.parameter("b_mc", Reality::Real);
    BracketField B{rf_var(b), RatFunc(), RatFunc()};
    RatFunc p1 = rf_var(vt.p1), p2 = rf_var(vt.p2);
    EXPECT_EQ(magnetic_poisson(p1, p2, ch, B), -rf_var(b));
    // Minimal coupling: canonical bracket of p1 and p2 + b x1 (kinetic
    // momenta in the gauge) gives the same value
    RatFunc k1 = p1, k2 = p2 + rf_var(b) * rf_var(vt.x1);
    EXPECT_EQ(poisson(k1, k2, ch), -rf_var(b));
}

TEST(Phase, CylindricalChartAngularMomentum) {
    auto& vt = vars();
    Chart ch = Chart::cylindrical();
    // H = (p_r^2 + p_phi^2/r^2 + p_Z^2)/2 has {H, p_phi} = 0
    RatFunc pr = rf_var(vt.p1), pphi = rf_var(vt.p2), pZ = rf_var(vt.p3);
    RatFunc r = rf_var(vt.r);
    RatFunc H = (pr.pow(2) + pphi.pow(2) / r.pow(2) + pZ.pow(2)) /
                RatFunc::from_long(2);
    EXPECT_TRUE(poisson(H, pphi, ch).is_zero());
    EXPECT_TRUE(poisson(H, pZ, ch).is_zero());
    // phi-dependence through u: {u, p_phi} = du/dphi = i u
    RatFunc u = rf_var(vt.u);
    EXPECT_EQ(poisson(u, pphi, ch), RatFunc::i() * u);
}

TEST(Phase, ClassicalLimitRoundTrip) {
    auto& vt = vars();
    // f = p1^2/2 + x1 p2 + x2^2
    RatFunc f = rf_var(vt.p1).pow(2) / RatFunc::from_long(2) +
                rf_var(vt.x1) * rf_var(vt.p2) + rf_var(vt.x2).pow(2);
    for (Ordering ord : {Ordering::Left, Ordering::Symmetrized}) {
        DiffOperator op = from_momentum_polynomial(f, ord);
        EXPECT_EQ(classical_limit(op), f) << (ord == Ordering::Left);
    }
}

TEST(Phase, SymmetrizationIsSymmetric) {
    auto& vt = vars();
    // symmetrized x1 p1 quantizes to a formally symmetric operator
    RatFunc f = rf_var(vt.x1) * rf_var(vt.p1);
    DiffOperator op = from_momentum_polynomial(f, Ordering::Symmetrized);
    EXPECT_EQ(op.adjoint(), op);
    // left ordering is not symmetric here
    DiffOperator left = from_momentum_polynomial(f, Ordering::Left);
    EXPECT_NE(left.adjoint() - left, DiffOperator::zero());
}

TEST(Phase, ClassicalLimitDropsQuantumCorrections) {
    auto& vt = vars();
    // hbar^2 d1 has symbol hbar * (i p1) -> 0 classically
    DiffOperator op =
        DiffOperator::term(RatFunc::var(vt.hbar).pow(2), {1, 0, 0});
    EXPECT_TRUE(classical_limit(op).is_zero());
    // a bare d1 diverges as hbar -> 0
    EXPECT_THROW(classical_limit(DiffOperator::d(0)), NotConvertible);
}
