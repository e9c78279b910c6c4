#include <gtest/gtest.h>

#include <array>

#include "magsym/replay.hpp"

using namespace magsym;

namespace {

const CheckResult* find_check(const Report& r, const std::string& id) {
    for (const auto& c : r.checks)
        if (c.check_id == id) return &c;
    return nullptr;
}

std::array<RatFunc, 6> unit_k(int j) {
    std::array<RatFunc, 6> k{};
    k[j] = RatFunc::from_long(1);
    return k;
}

} // namespace

TEST(Replay, PipelineForcedPartialsConstantField) {
    // Constant B^Z = mu2 r: the compatibility conditions close for the
    // conserved directions p_Z, p_phi and for P1, P2, but obstruct L1, L2.
    auto& vt = vars();
    AuxFunctions aux{RatFunc(), RatFunc(), RatFunc(), RatFunc(),
                     RatFunc::var(vt.parameter("mu2", Reality::Complex))};
    for (int j : {0, 1, 2, 5}) {
        CompatibilityConditions p = compatibility_conditions(aux, unit_k(j));
        EXPECT_TRUE(p.c_rphi.is_zero()) << "direction " << j;
        EXPECT_TRUE(p.c_rZ.is_zero()) << "direction " << j;
        EXPECT_TRUE(p.c_phiZ.is_zero()) << "direction " << j;
    }
    for (int j : {3, 4}) {
        CompatibilityConditions p = compatibility_conditions(aux, unit_k(j));
        EXPECT_FALSE(p.c_rphi.is_zero() && p.c_rZ.is_zero() &&
                     p.c_phiZ.is_zero())
            << "rotation " << j;
    }
}

TEST(Replay, MixedPartialSymmetryOfForcedGradient) {
    // When the conditions close, the forced partials really are a gradient:
    // integrating the k3-direction m for the final case-2 field.
    Report rep = compatibility_replay({ReplayBranch::K4Nonzero, true});
    const CheckResult* m = find_check(rep, "replay:m-display");
    ASSERT_NE(m, nullptr);
    EXPECT_TRUE(m->pass);
}

TEST(Replay, K4ZeroBranchAllChecksPass) {
    Report rep = compatibility_replay({ReplayBranch::K4Zero, false});
    EXPECT_TRUE(rep.all_pass()) << rep.text();
    EXPECT_EQ(rep.checks.size(), 6u);
    for (const char* id :
         {"replay:mu3-condition", "replay:mu2-pair", "replay:k4k5zero-pair",
          "replay:rho3-combination", "replay:k1-branch-rho-sigma",
          "replay:sigma3-k3mu1"})
        EXPECT_NE(find_check(rep, id), nullptr) << id;
}

TEST(Replay, K4NonzeroBranchAllChecksPass) {
    Report rep = compatibility_replay({ReplayBranch::K4Nonzero, false});
    EXPECT_TRUE(rep.all_pass()) << rep.text();
    EXPECT_EQ(rep.checks.size(), 9u);
    for (const char* id :
         {"replay:k4-mu-linear", "replay:k4-rho-sigma-mu2",
          "replay:k4-constraint-closure", "replay:m-display",
          "replay:field-display"})
        EXPECT_NE(find_check(rep, id), nullptr) << id;
}

TEST(Replay, StrictModeDoesNotThrowOnPassingBranches) {
    EXPECT_NO_THROW(compatibility_replay({ReplayBranch::K4Zero, true}));
    EXPECT_NO_THROW(compatibility_replay({ReplayBranch::K4Nonzero, true}));
}

TEST(Replay, DeviationNotesRecorded) {
    // Arbitrated readings are annotated, not silently absorbed: the
    // rho'''-combination misprint and the m-display tau convention.
    Report r0 = compatibility_replay({ReplayBranch::K4Zero, false});
    const CheckResult* rho = find_check(r0, "replay:rho3-combination");
    ASSERT_NE(rho, nullptr);
    EXPECT_NE(rho->note.find("misprint"), std::string::npos);

    Report r1 = compatibility_replay({ReplayBranch::K4Nonzero, false});
    const CheckResult* m = find_check(r1, "replay:m-display");
    ASSERT_NE(m, nullptr);
    EXPECT_NE(m->note.find("factor i"), std::string::npos);
    const CheckResult* cc = find_check(r1, "replay:k4-constraint-closure");
    ASSERT_NE(cc, nullptr);
    EXPECT_NE(cc->note.find("k5 = -i k4"), std::string::npos);
}

TEST(Replay, FinalFieldMatchesNewSystemInCartesianCoordinates) {
    // The case-2 field transported to Cartesian coordinates is the
    // B = (i, 1, 0) b / (x1 - i x2)^2 field of the new system with tau2 = b.
    auto& vt = vars();
    RatFunc r = RatFunc::var(vt.r);
    RatFunc uu = RatFunc::var(vt.u);
    RatFunc i = RatFunc::i();
    RatFunc tau2 = RatFunc::var(vt.parameter("tau2", Reality::Complex));
    AuxFunctions aux{RatFunc(), RatFunc(), RatFunc(),
                     -tau2 * uu * uu, RatFunc()};
    Field3 B = field_from_aux(aux);
    EXPECT_TRUE((B[0] + i * tau2 * uu * uu / (r * r)).is_zero());
    EXPECT_TRUE((B[1] + tau2 * uu * uu / r.pow(3)).is_zero());
    EXPECT_TRUE(B[2].is_zero());
    // In Cartesian coordinates this is the curl of the stored vector
    // potential A = (0, 0, -b/(2 (x1 - i x2)^2)) with tau2 = b.
    Field3 Bc = field_to_cartesian(B);
    RatFunc zb3 = (RatFunc::var(vt.x1) - i * RatFunc::var(vt.x2)).pow(3);
    EXPECT_TRUE((Bc[0] + i * tau2 / zb3).is_zero());
    EXPECT_TRUE((Bc[1] + tau2 / zb3).is_zero());
    EXPECT_TRUE(Bc[2].is_zero());
}
