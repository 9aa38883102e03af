#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "lyapdim/lyap.hpp"
#include "lyapdim/theory.hpp"

using namespace lyapdim;

namespace {

const SystemParams kClassical = SystemParams::classical();
constexpr double kThreshold = 209.0 / 45.0;

SystemParams random_params(std::mt19937_64& rng, double lo = 0.05, double hi = 40.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng)};
}

// Numeric eigenvalues of the symmetrized Jacobian, sorted non-increasing.
std::array<double, 3> numeric_sym_eigs(const SystemParams& p, const StateVec& s) {
    const Eigen::Vector3d e = Eigen::SelfAdjointEigenSolver<Matrix3>(symmetrized_jacobian(p, s)).eigenvalues();
    return {e[2], e[1], e[0]};
}

// R straight from its definition, with Vdot taken as a central difference of
// V along the flow.
double r_oracle(const SystemParams& p, const GammaCertificate& c, const StateVec& s) {
    const double h = 1e-6;
    const StateVec f = vector_field(p, s);
    const double vdot = (certificate_v(p, c, s + h * f) - certificate_v(p, c, s - h * f)) / (2 * h);
    const double rho2 = c.rho * c.rho;
    const double w = s.y + (p.b() - 1) / p.sigma() * s.x;
    return -p.sigma() * s.z + rho2 * s.z * s.z / 4 + rho2 / 4 * w * w + vdot;
}

bool sqrt_condition(const SystemParams& p) {
    return p.sigma() * p.r() + (p.sigma() - p.b()) * (p.b() - 1) > 0;
}

}  // namespace

TEST(OriginEigenvalues, ClassicalValues) {
    const OriginEigenvalues e = origin_eigenvalues(kClassical);
    EXPECT_NEAR(e.lambda1, 0.5 * (std::sqrt(1201.0) - 11.0), 1e-13);
    EXPECT_NEAR(e.lambda1, 11.82772, 1e-5);
    EXPECT_EQ(e.lambda2, -8.0 / 3.0);
    EXPECT_NEAR(e.lambda3, -0.5 * (std::sqrt(1201.0) + 11.0), 1e-13);
    EXPECT_NEAR(std::sqrt(1201.0), 34.65545, 1e-5);
}

TEST(OriginEigenvalues, MatchNumericEigensolver) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 500; ++i) {
        const SystemParams p = random_params(rng);
        Eigen::EigenSolver<Matrix3> es(jacobian(p, {0, 0, 0}));
        std::array<double, 3> num{};
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(es.eigenvalues()[k].imag(), 0.0, 1e-12);
            num[k] = es.eigenvalues()[k].real();
        }
        std::sort(num.begin(), num.end(), std::greater<>());
        const auto closed = origin_eigenvalues(p).sorted();
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(closed[k], num[k], 1e-12 * (1 + std::abs(num[k])));
    }
}

TEST(OriginEigenvalues, VanishesAtROne) {
    EXPECT_NEAR(origin_eigenvalues({10, 1, 8.0 / 3.0}).lambda1, 0.0, 1e-14);
}

TEST(OriginEigenvalues, SumIsTraceAndOrdering) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
        const SystemParams p = random_params(rng);
        const OriginEigenvalues e = origin_eigenvalues(p);
        EXPECT_NEAR(e.lambda1 + e.lambda2 + e.lambda3, p.trace(), 1e-12 * (1 + std::abs(p.trace())));
        if (p.sigma() * p.r() > (p.b() - p.sigma()) * (p.b() - 1) + 1e-9) {
            EXPECT_GT(e.lambda1, e.lambda2);
            EXPECT_GT(e.lambda2, e.lambda3);
        }
    }
}

TEST(LeonovFormula, ClassicalValue) {
    EXPECT_NEAR(leonov_formula(kClassical), 3.0 - 2.0 * (41.0 / 3.0) / (11.0 + std::sqrt(1201.0)), 1e-15);
    EXPECT_NEAR(leonov_formula(kClassical), 2.401312, 1e-6);
}

TEST(LeonovFormula, EqualsTwoPlusCriticalFraction) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const SystemParams p = random_params(rng);
        if (!(p.sigma() * p.r() > (p.b() + 1) * (p.b() + p.sigma()))) continue;
        const double s0 = critical_fraction(p);
        EXPECT_GT(s0, 0.0);
        EXPECT_LT(s0, 1.0);
        EXPECT_NEAR(leonov_formula(p), 2.0 + s0, 1e-12);
    }
}

TEST(LeonovFormula, EqualsKaplanYorkeOfOriginSpectrum) {
    std::mt19937_64 rng(24);
    int tested = 0;
    for (int i = 0; i < 2000; ++i) {
        const SystemParams p = random_params(rng);
        if (!(p.sigma() * p.r() > (p.b() + 1) * (p.b() + p.sigma()))) continue;
        const auto e = origin_eigenvalues(p).sorted();
        EXPECT_NEAR(kaplan_yorke(std::span<const double>(e)).value, leonov_formula(p), 1e-12);
        ++tested;
    }
    EXPECT_GT(tested, 100);
}

TEST(LeonovFormula, IncreasingInR) {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(0.1, 30.0);
    for (int i = 0; i < 200; ++i) {
        const double s = u(rng), b = u(rng);
        double prev = -std::numeric_limits<double>::infinity();
        for (double r = 0.1; r < 200; r *= 1.5) {
            const double v = leonov_formula({s, r, b});
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(CheckConditions, Classical) {
    const TheoremVerdict v = check_conditions(kClassical);
    EXPECT_EQ(v.outcome, Outcome::FormulaHolds);
    EXPECT_EQ(v.branch, Branch::CaseA);
    ASSERT_TRUE(v.bound.has_value());
    EXPECT_NEAR(*v.bound, 2.401312, 1e-6);
    EXPECT_FALSE(v.case_boundary);
    const auto& c9 = v.checks[2];
    EXPECT_EQ(c9.id, ConditionId::CaseA);
    EXPECT_NEAR(c9.lhs, -3600.0, 1e-9);
    EXPECT_NEAR(c9.rhs, 525.926, 1e-3);
    EXPECT_EQ(label(ConditionId::CaseB), "(10)+(11)");
}

TEST(CheckConditions, StableRegimeConverges) {
    const TheoremVerdict v = check_conditions({10, 3, 8.0 / 3.0});
    EXPECT_EQ(v.outcome, Outcome::ConvergesToEquilibria);
    EXPECT_FALSE(v.bound.has_value());
    EXPECT_TRUE(v.holds(ConditionId::Equilibria));
    EXPECT_NEAR((8.0 / 3.0 + 1) * (8.0 / 3.0 + 10), 418.0 / 9.0, 1e-12);
}

TEST(CheckConditions, ROneFailsSeven) {
    const TheoremVerdict v = check_conditions({10, 0.5, 8.0 / 3.0});
    EXPECT_EQ(v.outcome, Outcome::ConditionsFail);
    EXPECT_FALSE(v.holds(ConditionId::R0));
    EXPECT_FALSE(v.bound.has_value());
}

TEST(CheckConditions, ThresholdAt209Over45) {
    EXPECT_EQ(check_conditions({10, kThreshold * (1 + 1e-9), 8.0 / 3.0}).outcome, Outcome::FormulaHolds);
    EXPECT_EQ(check_conditions({10, kThreshold * (1 - 1e-9), 8.0 / 3.0}).outcome, Outcome::ConvergesToEquilibria);
    // sigma r = (b + 1)(b + sigma) exactly: neither strict inequality holds.
    EXPECT_EQ(check_conditions({10, kThreshold, 8.0 / 3.0}).outcome, Outcome::ConditionsFail);
}

TEST(CheckConditions, CaseBForLargeB) {
    const SystemParams p{10, 28, 6};
    const TheoremVerdict v = check_conditions(p);
    EXPECT_FALSE(v.holds(ConditionId::CaseA));
    EXPECT_TRUE(v.holds(ConditionId::CaseB));
    EXPECT_EQ(v.branch, Branch::CaseB);
    EXPECT_EQ(v.outcome, Outcome::FormulaHolds);
}

TEST(CheckConditions, VerdictInvariants) {
    std::mt19937_64 rng(26);
    for (int i = 0; i < 20000; ++i) {
        const SystemParams p = random_params(rng, 0.05, 30.0);
        const TheoremVerdict v = check_conditions(p);
        if (v.outcome == Outcome::FormulaHolds) {
            EXPECT_TRUE(v.premises_hold() && v.holds(ConditionId::Formula));
            ASSERT_TRUE(v.bound.has_value());
            EXPECT_GT(*v.bound, 2.0);
            EXPECT_LT(*v.bound, 3.0);
            EXPECT_EQ(*v.bound, leonov_formula(p));
        } else if (v.outcome == Outcome::ConvergesToEquilibria) {
            EXPECT_TRUE(v.premises_hold() && v.holds(ConditionId::Equilibria));
            EXPECT_FALSE(v.bound.has_value());
        }
        EXPECT_FALSE(v.holds(ConditionId::CaseA) && v.holds(ConditionId::CaseB));
        EXPECT_EQ(v.checks.size(), 6u);
    }
}

TEST(GammaQuadratic, RootResiduals) {
    std::mt19937_64 rng(27);
    int found = 0;
    for (int i = 0; i < 5000; ++i) {
        const SystemParams p = random_params(rng, 0.1, 30.0);
        std::optional<std::pair<double, double>> roots;
        try {
            roots = gamma_quadratic_roots(p);
        } catch (const DegenerateQuadratic&) {
            continue;
        }
        if (!roots) continue;
        ++found;
        const auto q = quadratic_coefficients(p);
        const double c = 2 * p.sigma() - p.b();
        const double k = 4 * p.b() * (p.sigma() + 1);
        for (double g : {roots->first, roots->second}) {
            const double scale = std::abs(q.lead) * (g + c) * (g + c) + std::abs(k * g * q.tail) + 1.0;
            EXPECT_LE(std::abs(gamma2_polynomial(p, g)), 1e-9 * scale);
        }
        EXPECT_LE(roots->first, roots->second);
    }
    EXPECT_GT(found, 100);
}

TEST(GammaQuadratic, CaseBMidpointSatisfiesInequality) {
    std::mt19937_64 rng(28);
    int tested = 0;
    for (int i = 0; i < 5000; ++i) {
        const SystemParams p = random_params(rng, 0.1, 30.0);
        if (check_conditions(p).branch != Branch::CaseB) continue;
        const auto roots = gamma_quadratic_roots(p);
        ASSERT_TRUE(roots.has_value());
        const double mid = 0.5 * (std::max(0.0, roots->first) + roots->second);
        EXPECT_GT(mid, 0.0);
        EXPECT_LT(gamma2_polynomial(p, mid), 0.0);
        ++tested;
    }
    EXPECT_GT(tested, 50);
}

TEST(GammaQuadratic, NegativeLeadingCoefficientFeasibleForAllPositiveGamma) {
    // Under (8) (tail <= 0) with lead < 0 both terms are non-positive.
    std::mt19937_64 rng(29);
    for (int i = 0; i < 2000; ++i) {
        const SystemParams p = random_params(rng, 0.1, 30.0);
        const auto q = quadratic_coefficients(p);
        if (!(q.lead < 0 && q.tail <= 0)) continue;
        for (double g : {1e-3, 0.1, 1.0, 10.0, 1e3}) EXPECT_LT(gamma2_polynomial(p, g), 0.0);
    }
}

TEST(GammaQuadratic, DegenerateLeadingCoefficient) {
    // sigma = 10, b = 5: base = -220, so lead = 0 at r - 1 = 2.2.
    const SystemParams p{10, 3.2, 5};
    try {
        gamma_quadratic_roots(p);
        FAIL() << "expected DegenerateQuadratic";
    } catch (const DegenerateQuadratic& e) {
        EXPECT_TRUE(e.feasible());
    }
    const TheoremVerdict v = check_conditions(p);
    EXPECT_EQ(v.branch, Branch::CaseA);
    EXPECT_TRUE(v.case_boundary);
}

TEST(SymmetrizedJacobian, ClosedFormMatchesNumeric) {
    std::mt19937_64 rng(30);
    std::uniform_real_distribution<double> u(-40.0, 60.0);
    int tested = 0;
    while (tested < 1000) {
        const SystemParams p = random_params(rng, 0.1, 30.0);
        if (!sqrt_condition(p)) continue;
        const StateVec s{u(rng), u(rng), u(rng)};
        const auto closed = symmetrized_eigenvalues(p, s);
        const auto num = numeric_sym_eigs(p, s);
        const double scale = 1.0 + std::abs(num[0]) + std::abs(num[2]);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(closed[k], num[k], 1e-10 * scale);
        ++tested;
    }
}

TEST(SymmetrizedJacobian, MiddleEigenvalueAndOrdering) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    const AbsorbingBall ball = absorbing_ball(kClassical);
    const double rh = rho(kClassical);
    for (int i = 0; i < 10000; ++i) {
        Eigen::Vector3d d{g(rng), g(rng), g(rng)};
        d *= ball.radius * std::cbrt(std::uniform_real_distribution<double>(0, 1)(rng)) / d.norm();
        const StateVec s = ball.center + StateVec::from(d);
        const double t1 = kClassical.sigma() - 2 * kClassical.b() + 1;
        const double t2 = 2 * kClassical.sigma() / rh - rh * s.z;
        const double t3 = rh * (s.y + (kClassical.b() - 1) / kClassical.sigma() * s.x);
        const double root = std::sqrt(t1 * t1 + t2 * t2 + t3 * t3);
        const auto l = symmetrized_eigenvalues(kClassical, s);
        EXPECT_GE(l[0], l[1]);
        EXPECT_GE(l[1], l[2]);
        EXPECT_EQ(l[1], -kClassical.b());
        EXPECT_NEAR(l[0], -0.5 * (kClassical.sigma() + 1) + 0.5 * root, 1e-12);
    }
}

TEST(SymmetrizedJacobian, CollapsedBracket) {
    const double rh = rho(kClassical), s = kClassical.sigma(), b = kClassical.b();
    const double x = 3.0;
    const StateVec pt{x, -(b - 1) * x / s, 2 * s / (rh * rh)};
    const auto l = symmetrized_eigenvalues(kClassical, pt);
    EXPECT_NEAR(l[0], -(s + 1) / 2 + std::abs(s - 2 * b + 1) / 2, 1e-12);
    EXPECT_NEAR(l[2], -(s + 1) / 2 - std::abs(s - 2 * b + 1) / 2, 1e-12);
}

TEST(SymmetrizedJacobian, RhoUndefined) {
    EXPECT_THROW(rho({1, 0.1, 5}), RhoUndefined);
    EXPECT_THROW(symmetrized_eigenvalues({1, 0.1, 5}, {0, 0, 0}), RhoUndefined);
    EXPECT_NEAR(rho(kClassical), 10.0 / std::sqrt(280.0 + (10 - 8.0 / 3.0) * (8.0 / 3.0 - 1)), 1e-15);
}

TEST(Certificate, ClassicalExistsAndVerifies) {
    const auto cert = find_gamma_certificate(kClassical);
    ASSERT_TRUE(cert.has_value());
    EXPECT_EQ(cert->branch, CertificateBranch::Gamma2Zero);
    EXPECT_EQ(cert->gamma2, 0.0);
    EXPECT_GT(cert->gamma1, 0.0);
    EXPECT_EQ(cert->rho, rho(kClassical));
    EXPECT_EQ(cert->s0, critical_fraction(kClassical));
    EXPECT_GT(cert->s0, 0.0);
    EXPECT_LT(cert->s0, 1.0);
    const RCheckReport rep = verify_R_nonpositive(kClassical, *cert, 20000);
    EXPECT_TRUE(rep.a1_ok && rep.b3_ok && rep.a_block_ok && rep.b_block_ok);
    EXPECT_LE(rep.max_r, 1e-9);
    EXPECT_TRUE(rep.passed());
    EXPECT_FALSE(rep.reduced_system);
}

TEST(Certificate, NoneWhenConditionsFail) {
    EXPECT_FALSE(find_gamma_certificate({10, 0.5, 8.0 / 3.0}).has_value());
    EXPECT_FALSE(find_gamma_certificate({10, kThreshold, 8.0 / 3.0}).has_value());
}

TEST(Certificate, CoefficientFormEqualsDefinition) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-20.0, 50.0);
    for (const SystemParams& p : {kClassical, SystemParams(10, 28, 6), SystemParams(10, 3, 8.0 / 3.0)}) {
        const auto cert = find_gamma_certificate(p);
        ASSERT_TRUE(cert.has_value());
        const RCoefficients k = r_coefficients(p, *cert);
        for (int i = 0; i < 500; ++i) {
            const StateVec s{u(rng) / 2, u(rng), u(rng)};
            const double a = r_function(k, s);
            const double o = r_oracle(p, *cert, s);
            EXPECT_NEAR(a, o, 1e-5 * (1.0 + std::abs(o)));
            EXPECT_NEAR(a, r_function_direct(p, *cert, s), 1e-9 * (1.0 + std::abs(a)));
        }
    }
}

TEST(Certificate, CorruptedGamma3Rejected) {
    auto cert = find_gamma_certificate(kClassical);
    ASSERT_TRUE(cert.has_value());
    cert->gamma3 -= 10.0;
    const RCheckReport rep = verify_R_nonpositive(kClassical, *cert, 1000);
    EXPECT_FALSE(rep.b3_ok);
    EXPECT_FALSE(rep.passed());
}

TEST(Certificate, CorruptedGamma4Rejected) {
    auto cert = find_gamma_certificate(kClassical);
    ASSERT_TRUE(cert.has_value());
    cert->gamma4 += 5.0;
    const RCheckReport rep = verify_R_nonpositive(kClassical, *cert, 20000);
    EXPECT_FALSE(rep.b_block_ok);
    EXPECT_GT(rep.max_r, 0.0);
    EXPECT_FALSE(rep.passed());
}

TEST(Certificate, Gamma1ZeroGivesReducedSystem) {
    GammaCertificate c;
    c.rho = rho(kClassical);
    c.gamma1 = 0.0;
    c.gamma3 = 0.5;
    const RCoefficients k = r_coefficients(kClassical, c);
    EXPECT_EQ(k.a1, 0.0);
    EXPECT_EQ(k.a2, 0.0);
    const RCheckReport rep = verify_R_nonpositive(kClassical, c, 100);
    EXPECT_TRUE(rep.reduced_system);
}

TEST(Certificate, ExistsAndVerifiesAcrossParameterGrid) {
    int gamma2_positive = 0, tested = 0;
    for (double s = 0.5; s <= 30.0; s += 1.5)
        for (double b = 0.2; b <= 9.0; b += 0.4)
            for (double r : {1.5, 3.0, 10.0, 28.0, 100.0}) {
                const SystemParams p{s, r, b};
                const auto cert = find_gamma_certificate(p);
                if (check_conditions(p).outcome == Outcome::ConditionsFail) {
                    EXPECT_FALSE(cert.has_value());
                    continue;
                }
                ASSERT_TRUE(cert.has_value());
                ++tested;
                if (cert->branch == CertificateBranch::Gamma2Positive) ++gamma2_positive;
                EXPECT_TRUE(verify_R_nonpositive(p, *cert, 300).passed()) << s << ' ' << r << ' ' << b;
            }
    EXPECT_GT(tested, 500);
    EXPECT_GT(gamma2_positive, 50);
}

TEST(DimensionEstimate, NegativeJustAboveCriticalFraction) {
    const auto cert = find_gamma_certificate(kClassical);
    ASSERT_TRUE(cert.has_value());
    const double s = cert->s0 + 1e-3;
    std::mt19937_64 rng(33);
    std::normal_distribution<double> g;
    const AbsorbingBall ball = absorbing_ball(kClassical);
    for (int i = 0; i < 1000; ++i) {
        Eigen::Vector3d d{g(rng), g(rng), g(rng)};
        d *= ball.radius * std::cbrt(std::uniform_real_distribution<double>(0, 1)(rng)) / d.norm();
        const StateVec x = ball.center + StateVec::from(d);
        const double lhs = dimension_estimate_lhs(kClassical, *cert, s, x);
        EXPECT_LE(lhs, dimension_estimate_rhs(kClassical, s) + 1e-9 * (1 + std::abs(lhs)));
        EXPECT_TRUE(dimension_condition_at(kClassical, *cert, s, x));
    }
    EXPECT_NEAR(dimension_estimate_rhs(kClassical, cert->s0), 0.0, 1e-12);
}

TEST(DimensionEstimate, ConvergenceConditionInStableRegime) {
    const SystemParams p{10, 3, 8.0 / 3.0};
    const auto cert = find_gamma_certificate(p);
    ASSERT_TRUE(cert.has_value());
    EXPECT_LT(cert->s0, 0.0);
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(-20.0, 40.0);
    for (int i = 0; i < 1000; ++i)
        EXPECT_TRUE(convergence_condition_at(p, *cert, {u(rng), u(rng), u(rng)}));
}

TEST(Lemma2, Examples) {
    EXPECT_TRUE(lemma2_domain_check({8, 1.5, 2}));
    const TheoremVerdict v = check_conditions({8, 1.5, 2});
    EXPECT_TRUE(v.holds(ConditionId::R0) && v.holds(ConditionId::RLower) && v.branch != Branch::None);
    EXPECT_TRUE(lemma2_domain_check(kClassical));
    EXPECT_FALSE(lemma2_domain_check({5, 28, 2}));
    EXPECT_EQ(check_conditions({5, 28, 2}).outcome, Outcome::FormulaHolds);
}

TEST(Lemma2, FunctionIdentities) {
    std::mt19937_64 rng(35);
    for (int i = 0; i < 1000; ++i) {
        const SystemParams p = random_params(rng, 0.1, 30.0);
        const double s = p.sigma(), b = p.b();
        const auto q = quadratic_coefficients(p);
        EXPECT_NEAR(q.base / (3 * s * s), b / 3 * lemma2_f(b, s), 1e-10 * (1 + std::abs(q.base / (3 * s * s))));
    }
    for (double s = 7.0; s < 100; s += 0.5) {
        EXPECT_NEAR(lemma2_f(4, s), -3 + 18 / s + 9 / (s * s), 1e-12);
        EXPECT_LT(lemma2_f(4, s), 0.0);
    }
}

TEST(Lemma2, AuditNeverThrowsInsideBox) {
    for (double s = 7.05; s <= 30; s += 0.46)
        for (double b = 0.04; b < 4; b += 0.08)
            for (double r : {1.01, 2.0, 5.0, 10.0, 28.0, 100.0, 1000.0})
                EXPECT_NO_THROW(EXPECT_TRUE(lemma2_domain_check({s, r, b})));
}

TEST(Remark4, RStarSearch) {
    RStarQuery q;
    q.epsilon = 0.5;
    q.sigma_cells = q.b_cells = 10;
    q.r_grid = {1.5, 2, 3, 5, 8, 10, 28, 100};
    EXPECT_EQ(remark4_r_star(q), 1.5);
    q.require_formula = true;
    const auto rs = remark4_r_star(q);
    ASSERT_TRUE(rs.has_value());
    EXPECT_GT(*rs, 1.5);
    for (double r : q.r_grid) {
        if (r < *rs) continue;
        EXPECT_EQ(check_conditions({q.sigma_min + 0.5 * (q.sigma_max - q.sigma_min) / q.sigma_cells, r,
                                    (4 - q.epsilon) * (1 - 0.5 / q.b_cells)})
                      .outcome,
                  Outcome::FormulaHolds);
    }
    q.r_grid = {};
    EXPECT_THROW(remark4_r_star(q), std::invalid_argument);
}
