#include <gtest/gtest.h>

#include "magsym/geometry.hpp"
#include "magsym/parser.hpp"

using namespace magsym;

namespace {

RatFunc rf(const std::string& s, const ParseContext& ctx) {
    return normalize(parse_expr(s, ctx));
}

ParseContext geo_ctx() {
    ParseContext ctx = ParseContext::basic();
    ctx.param("b", Reality::Real);
    return ctx;
}

} // namespace

TEST(Geometry, CurlConstantField) {
    auto ctx = geo_ctx();
    Field3 A{rf("0", ctx), rf("b*x1", ctx), rf("0", ctx)};
    Field3 B = curl(A);
    EXPECT_TRUE(B[0].is_zero());
    EXPECT_TRUE(B[1].is_zero());
    EXPECT_EQ(B[2], rf("b", ctx));
}

TEST(Geometry, CurlOfGradientVanishes) {
    auto ctx = geo_ctx();
    RatFunc chi = rf("x1^2*x2 + x3*x1", ctx);
    Field3 B = curl(grad(chi));
    for (int j = 0; j < 3; ++j) EXPECT_TRUE(B[j].is_zero());
}

TEST(Geometry, DivOfCurlVanishes) {
    auto ctx = geo_ctx();
    Field3 A{rf("x2^2*x3", ctx), rf("x1^3 - x3", ctx),
             rf("x1*x2*x3 + b*x2", ctx)};
    EXPECT_TRUE(divergence(curl(A)).is_zero());
}

TEST(Geometry, CurlComplexGauge) {
    auto ctx = geo_ctx();
    // A = (0, 0, -b/(2(x1-i x2)^2)) produces the antiholomorphic field
    // (-ib/(x1-ix2)^3, -b/(x1-ix2)^3, 0)
    Field3 A{rf("0", ctx), rf("0", ctx),
             rf("-b/(2*(x1 - I*x2)^2)", ctx)};
    Field3 B = curl(A);
    EXPECT_EQ(B[0], rf("-I*b/(x1 - I*x2)^3", ctx));
    EXPECT_EQ(B[1], rf("-b/(x1 - I*x2)^3", ctx));
    EXPECT_TRUE(B[2].is_zero());
}

TEST(Geometry, GaugeShiftPreservesCurl) {
    auto ctx = geo_ctx();
    Field3 A{rf("0", ctx), rf("b*x1", ctx), rf("0", ctx)};
    // chi = -b x1 x2 / 2 moves to the symmetric gauge
    Field3 A2 = gauge_shift(A, rf("-b*x1*x2/2", ctx));
    EXPECT_EQ(A2[0], rf("-b*x2/2", ctx));
    EXPECT_EQ(A2[1], rf("b*x1/2", ctx));
    EXPECT_TRUE(A2[2].is_zero());
    Field3 B1 = curl(A), B2 = curl(A2);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(B1[j], B2[j]);
}

TEST(Geometry, CoordinateRoundTrips) {
    auto ctx = geo_ctx();
    const char* cases[] = {"x1^2 + x2^2", "x1 + I*x2", "x3*(x1 - I*x2)",
                           "(x1^2 - x2^2)/(x1^2 + x2^2 + 1)", "b*x1*x2"};
    for (const char* s : cases) {
        RatFunc f = rf(s, ctx);
        EXPECT_EQ(to_cartesian(to_cylindrical(f)), f) << s;
    }
    // and the other direction on convertible cylindrical expressions
    const char* cyl_cases[] = {"r^2", "r*u", "r^3*u + Z*r^2", "u^2",
                               "1/(r*u)^2"};
    for (const char* s : cyl_cases) {
        RatFunc f = rf(s, ctx);
        EXPECT_EQ(to_cylindrical(to_cartesian(f)), f) << s;
    }
}

TEST(Geometry, NotConvertibleCases) {
    auto ctx = geo_ctx();
    // r alone and u alone are multivalued over (x1, x2)
    EXPECT_THROW(to_cartesian(rf("r", ctx)), NotConvertible);
    EXPECT_THROW(to_cartesian(rf("u", ctx)), NotConvertible);
    EXPECT_THROW(to_cartesian(rf("r + u^2", ctx)), NotConvertible);
    // but r*u and r/u and mixed even combinations convert
    EXPECT_EQ(to_cartesian(rf("r*u", ctx)), rf("x1 + I*x2", ctx));
    EXPECT_EQ(to_cartesian(rf("r/u", ctx)), rf("x1 - I*x2", ctx));
    EXPECT_EQ(to_cartesian(rf("r^2*u^2", ctx)), rf("(x1 + I*x2)^2", ctx));
}

TEST(Geometry, OneFormTransforms) {
    auto ctx = geo_ctx();
    // A_Z = -b u^2/(2 r^2) is -b/(2 zbar^2) in Cartesian components
    Field3 Acyl{rf("0", ctx), rf("0", ctx), rf("-b*u^2/(2*r^2)", ctx)};
    Field3 Acart = oneform_to_cartesian(Acyl);
    EXPECT_TRUE(Acart[0].is_zero());
    EXPECT_TRUE(Acart[1].is_zero());
    EXPECT_EQ(Acart[2], rf("-b/(2*(x1 - I*x2)^2)", ctx));
    // round trip
    Field3 back = oneform_to_cylindrical(Acart);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(back[j], Acyl[j]);
    // a tangential example: A = (0, b x1, 0) has A_phi = b r^2 cos(phi) sin(phi) + ...
    Field3 Acart2{rf("0", ctx), rf("b*x1", ctx), rf("0", ctx)};
    Field3 c = oneform_to_cylindrical(Acart2);
    Field3 back2 = oneform_to_cartesian(c);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(back2[j], Acart2[j]);
}

TEST(Geometry, FieldTransforms) {
    auto ctx = geo_ctx();
    // constant B^3 = b corresponds to B^Z = b r (2-form components)
    Field3 Bcart{rf("0", ctx), rf("0", ctx), rf("b", ctx)};
    Field3 Bcyl = field_to_cylindrical(Bcart);
    EXPECT_TRUE(Bcyl[0].is_zero());
    EXPECT_TRUE(Bcyl[1].is_zero());
    EXPECT_EQ(Bcyl[2], rf("b*r", ctx));
    Field3 back = field_to_cartesian(Bcyl);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(back[j], Bcart[j]);
    // the antiholomorphic field of the complex cylindrical system
    Field3 Bcyl2{rf("-I*b*u^2/r^2", ctx), rf("-b*u^2/r^3", ctx),
                 rf("0", ctx)};
    Field3 Bcart2 = field_to_cartesian(Bcyl2);
    EXPECT_EQ(Bcart2[0], rf("-I*b/(x1 - I*x2)^3", ctx));
    EXPECT_EQ(Bcart2[1], rf("-b/(x1 - I*x2)^3", ctx));
    EXPECT_TRUE(Bcart2[2].is_zero());
}

TEST(Geometry, FieldFromAuxReproducesComplexCylindrical) {
    ParseContext ctx = ParseContext::basic();
    for (const char* p : {"rho3", "rho1", "rho2", "sigma3", "sigma1", "psi3",
                          "psi2", "tau2"})
        ctx.param(p, Reality::Real);
    AuxFunctions a;
    a.mu = rf("rho3", ctx);
    a.rho = rf("rho3*r^2 + rho1 + rho2/r", ctx);
    a.sigma = rf("sigma3 + sigma1/r^2", ctx);
    // psi = 2 psi3 cos(phi) + i psi2 e^{i phi} + rho2, tau = sigma1 - tau2 e^{2i phi}
    a.psi = rf("psi3*(u + 1/u) + I*psi2*u + rho2", ctx);
    a.tau = rf("sigma1 - tau2*u^2", ctx);
    Field3 B = field_from_aux(a);
    EXPECT_EQ(B[0], rf("-I*tau2*u^2/r^2", ctx));
    EXPECT_EQ(B[1], rf("-tau2*u^2/r^3", ctx));
    EXPECT_TRUE(B[2].is_zero());
    // s-coefficients stay consistent with the same aux functions
    auto [s1, s2] = s_from_aux(a);
    EXPECT_EQ(s1[2], a.tau);
    EXPECT_EQ(s2[1], a.mu);
    EXPECT_EQ(s2[2], rf("-sigma1/r^2 + tau2*u^2/r^2 + sigma3 + sigma1/r^2",
                        ctx));
}

TEST(Geometry, GaugeConjugateMatchesGaugeShift) {
    auto ctx = geo_ctx();
    auto& vt = vars();
    // H = (1/2) sum (p_j + A_j)^2 in the Landau gauge
    Field3 A{rf("0", ctx), rf("b*x1", ctx), rf("0", ctx)};
    RatFunc chi = rf("-b*x1*x2/2", ctx);
    Field3 A2 = gauge_shift(A, chi);
    auto ham = [&](const Field3& a) {
        DiffOperator H;
        for (int j = 0; j < 3; ++j) {
            DiffOperator pj = DiffOperator::momentum(j) +
                              DiffOperator::mult(a[j]);
            H += (pj * pj).scaled(RatFunc::constant(CRat(Rat(1, 2))));
        }
        return H;
    };
    // e^{i chi/hbar} H_A e^{-i chi/hbar} = H_{A + grad chi}
    EXPECT_EQ(gauge_conjugate(ham(A), chi), ham(A2));
    (void)vt;
}
