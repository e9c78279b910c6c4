#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "magsym/systems.hpp"

using namespace magsym;

namespace {

RatFunc rv(VarId v) { return RatFunc::var(v); }

RatFunc zbar() {
    auto& vt = vars();
    return rv(vt.x1) - RatFunc::i() * rv(vt.x2);
}

std::string share_path(const std::string& name) {
    return std::string(MAGSYM_SHARE_DIR) + "/systems/" + name + ".sys";
}

} // namespace

TEST(Systems, UnknownSystemListsNames) {
    try {
        builtin("landau");
        FAIL() << "expected UnknownSystem";
    } catch (const UnknownSystem& e) {
        std::string msg = e.what();
        for (const auto& n : builtin_names())
            EXPECT_NE(msg.find(n), std::string::npos) << n;
    }
}

TEST(Systems, CurlMatchesDeclaredField) {
    auto& vt = vars();
    RatFunc b = rv(vt.parameter("b", Reality::Complex));

    Field3 B = curl(builtin("new-complex").A);
    EXPECT_EQ(B[0], -RatFunc::i() * b / zbar().pow(3));
    EXPECT_EQ(B[1], -b / zbar().pow(3));
    EXPECT_TRUE(B[2].is_zero());

    for (const char* n :
         {"constant-B-landau", "constant-B-symmetric", "constant-B-W3"}) {
        Field3 Bc = curl(builtin(n).A);
        EXPECT_TRUE(Bc[0].is_zero()) << n;
        EXPECT_TRUE(Bc[1].is_zero()) << n;
        EXPECT_EQ(Bc[2], b) << n;
    }

    Field3 Bi = curl(builtin("inverse-square-B").A);
    EXPECT_EQ(Bi[0], RatFunc::from_long(4) * b / rv(vt.x2).pow(3));
    EXPECT_TRUE(Bi[1].is_zero());
    EXPECT_TRUE(Bi[2].is_zero());
}

TEST(Systems, DivergenceFreeGauges) {
    for (const auto& n : builtin_names())
        EXPECT_TRUE(divergence(builtin(n).A).is_zero()) << n;
}

// H must expand to -hbar^2/2 Delta - b/(2 zbar^2) p3 + w1/(2 zbar^2) for the
// new system: the A.p cross term absorbs the most singular part of W.
TEST(Systems, NewComplexHamiltonianFixedForm) {
    auto& vt = vars();
    RatFunc b = rv(vt.parameter("b", Reality::Complex));
    RatFunc w1 = rv(vt.parameter("w1", Reality::Complex));
    RatFunc half = RatFunc::constant(CRat(Rat(1, 2)));

    DiffOperator expected;
    for (int j = 0; j < 3; ++j)
        expected += (DiffOperator::momentum(j) * DiffOperator::momentum(j))
                        .scaled(half);
    RatFunc c = -b * half / zbar().pow(2);
    expected += DiffOperator::mult(c) * DiffOperator::momentum(2);
    expected += DiffOperator::mult(w1 * half / zbar().pow(2));

    EXPECT_EQ(builtin("new-complex").H, expected);
}

TEST(Systems, HamiltonianShapeInvariant) {
    RatFunc half = RatFunc::constant(CRat(Rat(1, 2)));
    for (const auto& n : builtin_names()) {
        SystemDef s = builtin(n);
        DiffOperator rebuilt = DiffOperator::mult(s.W);
        for (int j = 0; j < 3; ++j) {
            DiffOperator pj = DiffOperator::momentum(j);
            DiffOperator aj = DiffOperator::mult(s.A[j]);
            rebuilt += (pj * pj).scaled(half);
            rebuilt += (aj * pj + pj * aj).scaled(half);
            rebuilt += (aj * aj).scaled(half);
        }
        EXPECT_EQ(s.H, rebuilt) << n;
    }
}

TEST(Systems, LandauFreeFieldLimit) {
    auto& vt = vars();
    VarId b = vt.parameter("b", Reality::Complex);
    SystemDef s = builtin("constant-B-landau");
    DiffOperator free_h;
    RatFunc c = RatFunc::constant(CRat(Rat(-1, 2))) * rv(vt.hbar).pow(2);
    for (int j = 0; j < 3; ++j) free_h += DiffOperator::d(j, 2).scaled(c);
    DiffOperator limit;
    for (const auto& [a, coeff] : s.H.terms())
        limit += DiffOperator::term(coeff.subst_scalar(b, CRat(0)), a);
    EXPECT_EQ(limit, free_h);
}

TEST(Systems, ClassicalBracketsVanish) {
    Chart cart = Chart::cartesian();
    for (const auto& n : builtin_names()) {
        SystemDef s = builtin(n);
        for (const auto& it : s.integrals) {
            if (it.nonpolynomial()) continue;
            EXPECT_TRUE(poisson(s.H_classical, it.classical, cart).is_zero())
                << n << ":" << it.name;
        }
    }
}

TEST(Systems, QuantumCommutatorsVanish) {
    for (const auto& n : builtin_names()) {
        SystemDef s = builtin(n);
        for (const auto& it : s.integrals) {
            if (!it.quantum) continue;
            EXPECT_EQ(commutator(s.H, *it.quantum), DiffOperator::zero())
                << n << ":" << it.name;
        }
    }
}

TEST(Systems, NewComplexMagneticMomentaCommute) {
    SystemDef s = builtin("new-complex");
    DiffOperator p1A = DiffOperator::momentum(0) + DiffOperator::mult(s.A[0]);
    DiffOperator p2A = DiffOperator::momentum(1) + DiffOperator::mult(s.A[1]);
    EXPECT_EQ(commutator(p1A, p2A), DiffOperator::zero());
}

TEST(Systems, NewComplexDerivedIntegrals) {
    auto& vt = vars();
    SystemDef s = builtin("new-complex");
    const IntegralDef& R1 = s.integral("R1");
    const IntegralDef& R2 = s.integral("R2");
    ASSERT_TRUE(R1.quantum && R2.quantum);
    RatFunc ih = RatFunc::i() * rv(vt.hbar);
    EXPECT_EQ(commutator(*s.integral("Y1").quantum, *s.integral("X1").quantum),
              R1.quantum->scaled(ih));
    EXPECT_EQ(commutator(*s.integral("Y2").quantum, *s.integral("X1").quantum),
              R2.quantum->scaled(ih));
    // dependent integrals are still integrals
    EXPECT_EQ(commutator(s.H, *R1.quantum), DiffOperator::zero());
    EXPECT_EQ(commutator(s.H, *R2.quantum), DiffOperator::zero());
}

TEST(Systems, ConstantFieldNonpolynomialIntegral) {
    SystemDef s = builtin("constant-B-landau");
    const IntegralDef& x5 = s.integral("X5");
    EXPECT_TRUE(x5.nonpolynomial());
    EXPECT_FALSE(x5.quantum.has_value());

    // numeric spot check: at b*x3/p3 = 0 the integral reduces to pA1
    auto& vt = vars();
    VarId b = vt.parameter("b", Reality::Complex);
    std::map<VarId, std::complex<double>> pt{
        {vt.x1, 0.3}, {vt.x2, -0.2}, {vt.x3, 0.0}, {b, 1.25},
        {vt.p1, 0.7}, {vt.p2, 0.1},  {vt.p3, 2.0}};
    auto val = eval_numeric(x5.classical_expr, pt);
    EXPECT_NEAR(val.real(), 0.7, 1e-12);
    EXPECT_NEAR(val.imag(), 0.0, 1e-12);
}

TEST(Systems, W3VariantsStored) {
    auto& vt = vars();
    RatFunc b = rv(vt.parameter("b", Reality::Complex));
    RatFunc c = rv(vt.parameter("c", Reality::Complex));
    RatFunc x3 = rv(vt.x3);
    SystemDef s = builtin("constant-B-W3");
    ASSERT_EQ(s.potential_variants.size(), 2u);
    EXPECT_EQ(s.potential_variants[0].first, "singular-oscillator");
    EXPECT_EQ(s.potential_variants[0].second,
              c / x3.pow(2) +
                  b.pow(2) * x3.pow(2) * RatFunc::constant(CRat(Rat(1, 8))));
    EXPECT_EQ(s.potential_variants[1].second,
              b.pow(2) * x3.pow(2) * RatFunc::constant(CRat(Rat(1, 2))));
}

TEST(Systems, GoldenFilesByteIdentical) {
    for (const auto& n : builtin_names()) {
        std::ifstream f(share_path(n), std::ios::binary);
        ASSERT_TRUE(f.good()) << share_path(n);
        std::ostringstream ss;
        ss << f.rdbuf();
        EXPECT_EQ(ss.str(), builtin_source(n)) << n;
    }
}

TEST(Systems, LoadReproducesBuiltin) {
    for (const auto& n : builtin_names()) {
        std::ifstream f(share_path(n), std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        SysParseResult pr = parse_system_file(ss.str());
        ASSERT_TRUE(pr.ok()) << n;
        SystemDef fromfile = load(*pr.file);
        SystemDef direct = builtin(n);
        EXPECT_EQ(fromfile.name, direct.name);
        for (int j = 0; j < 3; ++j) EXPECT_EQ(fromfile.A[j], direct.A[j]) << n;
        EXPECT_EQ(fromfile.W, direct.W) << n;
        EXPECT_EQ(fromfile.H, direct.H) << n;
        for (const auto& it : fromfile.integrals) {
            const IntegralDef& d = direct.integral(it.name);
            EXPECT_EQ(it.classical, d.classical) << n << ":" << it.name;
            EXPECT_EQ(*it.quantum, *d.quantum) << n << ":" << it.name;
        }
    }
}

TEST(Systems, CylindricalFrameConverts) {
    // symmetric gauge written as the one-form A_phi = b r^2 / 2
    const char* text = R"([system]
name = sym-cyl
frame = cylindrical

[params]
b : complex

[potential]
A = 0, b*r^2/2, 0
W = 0
)";
    SysParseResult pr = parse_system_file(text);
    ASSERT_TRUE(pr.ok());
    SystemDef s = load(*pr.file);
    SystemDef ref = builtin("constant-B-symmetric");
    for (int j = 0; j < 3; ++j) EXPECT_EQ(s.A[j], ref.A[j]);
    EXPECT_EQ(s.H, ref.H);
}

TEST(Systems, UndeclaredParameterRejected) {
    const char* text = R"([system]
name = broken

[potential]
A = 0, 0, 0
W = q/(x1^2)
)";
    SysParseResult pr = parse_system_file(text);
    ASSERT_FALSE(pr.ok());
    bool mentions_q = false;
    for (const auto& d : pr.diagnostics)
        if (d.message.find("q") != std::string::npos) mentions_q = true;
    EXPECT_TRUE(mentions_q);
}
