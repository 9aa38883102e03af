#pragma once

// Analytical side: closed-form eigenvalues at the origin, the exact
// dimension formula, the parameter-condition checker, and the Lyapunov-type
// certificate
//
//   V = g4 x^2 + (g3 - sigma g1) y^2 + g3 z^2 + g1 x^4 / (4 sigma)
//       - g1 x^2 z - g1 g2 x y - (sigma / b) z
//
// whose orbital derivative makes
//
//   R = -sigma z + rho^2 z^2 / 4 + rho^2 / 4 (y + (b-1) x / sigma)^2 + Vdot
//     = A1 x^4 + A2 x^2 z + A3 z^2 + B1 x^2 + B2 x y + B3 y^2
//
// non-positive everywhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lyapdim/errors.hpp"
#include "lyapdim/model.hpp"
#include "lyapdim/rng.hpp"

namespace lyapdim {

namespace detail {

// Slack used for every inequality: strict ones need this much margin,
// non-strict ones may be violated by at most this much.
inline double slack(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }
inline bool strictly_greater(double a, double b) { return a > b + slack(a, b); }
inline bool at_least(double a, double b) { return a >= b - slack(a, b); }

inline double disc_root(const SystemParams& p) {
    const double s = p.sigma();
    return std::sqrt((s - 1.0) * (s - 1.0) + 4.0 * s * p.r());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Origin eigenvalues and the dimension formula

struct OriginEigenvalues {
    double lambda1{0.0};
    double lambda2{0.0};
    double lambda3{0.0};

    std::array<double, 3> sorted() const {
        std::array<double, 3> v{lambda1, lambda2, lambda3};
        std::sort(v.begin(), v.end(), std::greater<>());
        return v;
    }
};

/// lambda1,3 = -(sigma + 1 -/+ sqrt((sigma-1)^2 + 4 r sigma)) / 2, lambda2 = -b.
/// Fields keep that labelling; they are non-increasing whenever
/// sigma r > (b - sigma)(b - 1). Use sorted() for the ordered spectrum.
inline OriginEigenvalues origin_eigenvalues(const SystemParams& p) {
    const double root = detail::disc_root(p);
    return {-0.5 * (p.sigma() + 1.0 - root), -p.b(), -0.5 * (p.sigma() + 1.0 + root)};
}

/// 3 - 2 (sigma + b + 1) / (sigma + 1 + sqrt((sigma - 1)^2 + 4 sigma r)).
inline double leonov_formula(const SystemParams& p) {
    return 3.0 - 2.0 * (p.sigma() + p.b() + 1.0) / (p.sigma() + 1.0 + detail::disc_root(p));
}

/// s0 = (sqrt(k) - (sigma + 2b + 1)) / (sigma + 1 + sqrt(k)), k = (sigma-1)^2 + 4 sigma r.
/// In (0, 1) exactly when sigma r > (b + 1)(b + sigma); negative below that.
inline double critical_fraction(const SystemParams& p) {
    const double root = detail::disc_root(p);
    return (root - (p.sigma() + 2.0 * p.b() + 1.0)) / (p.sigma() + 1.0 + root);
}

// ---------------------------------------------------------------------------
// Theorem conditions

enum class Outcome { FormulaHolds, ConvergesToEquilibria, ConditionsFail };
enum class Branch { CaseA, CaseB, None };
enum class ConditionId { R0, RLower, CaseA, CaseB, Equilibria, Formula };

inline std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::FormulaHolds: return "FormulaHolds";
        case Outcome::ConvergesToEquilibria: return "ConvergesToEquilibria";
        case Outcome::ConditionsFail: return "ConditionsFail";
    }
    return "?";
}

inline std::string_view to_string(Branch b) {
    switch (b) {
        case Branch::CaseA: return "CaseA";
        case Branch::CaseB: return "CaseB";
        case Branch::None: return "None";
    }
    return "?";
}

/// Equation labels of the theorem: (7) r > 1, (8) lower bound on r - 1,
/// (9) case a, (10)+(11) case b, (12) convergence window, (13) formula range.
inline std::string_view label(ConditionId id) {
    switch (id) {
        case ConditionId::R0: return "(7)";
        case ConditionId::RLower: return "(8)";
        case ConditionId::CaseA: return "(9)";
        case ConditionId::CaseB: return "(10)+(11)";
        case ConditionId::Equilibria: return "(12)";
        case ConditionId::Formula: return "(13)";
    }
    return "?";
}

struct ConditionCheck {
    ConditionId id;
    std::string relation;  // how lhs compares with rhs when the condition holds
    double lhs{0.0};
    double rhs{0.0};
    std::optional<double> lower;  // for the two-sided (12): lower < lhs < rhs
    bool holds{false};
};

struct TheoremVerdict {
    Outcome outcome{Outcome::ConditionsFail};
    std::vector<ConditionId> satisfied;
    Branch branch{Branch::None};
    std::optional<double> bound;
    std::vector<ConditionCheck> checks;
    /// (9) holds with equality (within slack); assigned to case a.
    bool case_boundary{false};

    bool holds(ConditionId id) const { return std::find(satisfied.begin(), satisfied.end(), id) != satisfied.end(); }
    /// (7), (8) and one of the two cases: the hypotheses shared by both
    /// outcomes.
    bool premises_hold() const { return holds(ConditionId::R0) && holds(ConditionId::RLower) && branch != Branch::None; }
};

/// Coefficients shared by (8), (9) and the gamma_2 quadratic:
///   base = b (b + sigma - 1)^2 - 4 sigma (sigma b + b - b^2)
///   lead = base + sigma^2 (r - 1)(b - 4)       (case a  <=>  lead <= 0)
///   tail = base - 3 sigma^2 (r - 1)            ((8)     <=>  tail <= 0)
struct QuadraticCoefficients {
    double base;
    double lead;
    double tail;
};

inline QuadraticCoefficients quadratic_coefficients(const SystemParams& p) {
    const double s = p.sigma(), b = p.b(), rm1 = p.r() - 1.0;
    const double base = b * (b + s - 1.0) * (b + s - 1.0) - 4.0 * s * (s * b + b - b * b);
    return {base, base + s * s * rm1 * (b - 4.0), base - 3.0 * s * s * rm1};
}

/// Left side of the gamma_2 inequality:
/// (2 sigma - b + g)^2 lead + 4 b g (sigma + 1) tail.
inline double gamma2_polynomial(const SystemParams& p, double gamma) {
    const auto q = quadratic_coefficients(p);
    const double c = 2.0 * p.sigma() - p.b() + gamma;
    return c * c * q.lead + 4.0 * p.b() * gamma * (p.sigma() + 1.0) * q.tail;
}

/// Real roots (sorted) of the gamma_2 polynomial, or nullopt when the
/// discriminant is negative. Throws DegenerateQuadratic when the leading
/// coefficient vanishes; its feasible() flag is tail < 0, in which case
/// every gamma_2 > 0 satisfies the strict inequality.
inline std::optional<std::pair<double, double>> gamma_quadratic_roots(const SystemParams& p) {
    const auto q = quadratic_coefficients(p);
    const double c = 2.0 * p.sigma() - p.b();
    const double k = 4.0 * p.b() * (p.sigma() + 1.0);
    const double scale = std::max({std::abs(q.base), std::abs(q.lead - q.base), 1.0});
    if (std::abs(q.lead) <= 1e-12 * scale) {
        throw DegenerateQuadratic("leading coefficient of the gamma_2 quadratic vanishes", q.tail < 0.0);
    }
    // lead g^2 + (2 c lead + k tail) g + lead c^2
    const double a = q.lead;
    const double bq = 2.0 * c * q.lead + k * q.tail;
    const double cq = q.lead * c * c;
    // bq^2 - 4 a cq = k tail (4 c lead + k tail), free of cancellation in a c^2.
    const double disc = k * q.tail * (4.0 * c * q.lead + k * q.tail);
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double qv = -0.5 * (bq + std::copysign(sq, bq));
    double r1 = qv / a;
    double r2 = qv != 0.0 ? cq / qv : r1;
    if (r1 > r2) std::swap(r1, r2);
    return std::make_pair(r1, r2);
}

inline TheoremVerdict check_conditions(const SystemParams& p) {
    using detail::at_least;
    using detail::strictly_greater;
    const double s = p.sigma(), b = p.b(), r = p.r();
    const auto q = quadratic_coefficients(p);
    TheoremVerdict v;

    auto record = [&v](ConditionCheck c) {
        if (c.holds) v.satisfied.push_back(c.id);
        v.checks.push_back(std::move(c));
    };

    record({ConditionId::R0, ">", r - 1.0, 0.0, std::nullopt, strictly_greater(r - 1.0, 0.0)});

    const double rhs8 = q.base / (3.0 * s * s);
    record({ConditionId::RLower, ">=", r - 1.0, rhs8, std::nullopt, at_least(r - 1.0, rhs8)});

    const double lhs9 = s * s * (r - 1.0) * (b - 4.0);
    const double rhs9 = 4.0 * s * (s * b + b - b * b) - b * (b + s - 1.0) * (b + s - 1.0);
    const bool case_a = at_least(rhs9, lhs9);
    v.case_boundary = case_a && !strictly_greater(rhs9, lhs9);
    record({ConditionId::CaseA, "<=", lhs9, rhs9, std::nullopt, case_a});

    // Case b: (9) fails with margin, the quadratic has two distinct real
    // roots and the larger one is positive.
    double larger_root = std::numeric_limits<double>::quiet_NaN();
    bool case_b = false;
    if (!case_a) {
        try {
            if (auto roots = gamma_quadratic_roots(p)) {
                larger_root = roots->second;
                case_b = roots->first < roots->second && larger_root > 0.0;
            }
        } catch (const DegenerateQuadratic&) {
            // lead == 0 means (9) holds with equality; handled as case a.
        }
    }
    record({ConditionId::CaseB, ">", larger_root, 0.0, std::nullopt, case_b});

    v.branch = case_a ? Branch::CaseA : (case_b ? Branch::CaseB : Branch::None);

    const double sr = s * r;
    const double upper = (b + 1.0) * (b + s);
    const double lower = (b - s) * (b - 1.0);
    record({ConditionId::Equilibria, "<", sr, upper, lower,
            strictly_greater(sr, lower) && strictly_greater(upper, sr)});
    record({ConditionId::Formula, ">", sr, upper, std::nullopt, strictly_greater(sr, upper)});

    if (v.premises_hold()) {
        if (v.holds(ConditionId::Formula)) {
            v.outcome = Outcome::FormulaHolds;
            v.bound = leonov_formula(p);
        } else if (v.holds(ConditionId::Equilibria)) {
            v.outcome = Outcome::ConvergesToEquilibria;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Change of variables and the symmetrized Jacobian

/// rho = sigma / sqrt(sigma r + (sigma - b)(b - 1)).
inline double rho(const SystemParams& p) {
    const double w = p.sigma() * p.r() + (p.sigma() - p.b()) * (p.b() - 1.0);
    if (!(w > 0.0)) {
        std::ostringstream msg;
        msg << "sigma r + (sigma - b)(b - 1) = " << w << " is not positive";
        throw RhoUndefined(msg.str());
    }
    return p.sigma() / std::sqrt(w);
}

/// S = [[-1/rho, 0, 0], [-(b-1)/sigma, 1, 0], [0, 0, 1]].
inline Matrix3 change_of_variables(const SystemParams& p) {
    Matrix3 m;
    m << -1.0 / rho(p), 0.0, 0.0,
         -(p.b() - 1.0) / p.sigma(), 1.0, 0.0,
         0.0, 0.0, 1.0;
    return m;
}

/// 1/2 (S J S^-1 + (S J S^-1)^T), formed numerically.
inline Matrix3 symmetrized_jacobian(const SystemParams& p, const StateVec& s) {
    const Matrix3 sm = change_of_variables(p);
    const Matrix3 m = sm * jacobian(p, s) * sm.inverse();
    return 0.5 * (m + m.transpose());
}

/// Closed-form eigenvalues of symmetrized_jacobian, sorted non-increasing:
/// -b and -(sigma+1)/2 +/- 1/2 sqrt((sigma-2b+1)^2 + (2 sigma/rho - rho z)^2
/// + rho^2 (y + (b-1) x / sigma)^2).
inline std::array<double, 3> symmetrized_eigenvalues(const SystemParams& p, const StateVec& s) {
    const double rh = rho(p);
    const double sg = p.sigma(), b = p.b();
    const double t1 = sg - 2.0 * b + 1.0;
    const double t2 = 2.0 * sg / rh - rh * s.z;
    const double t3 = rh * (s.y + (b - 1.0) / sg * s.x);
    const double root = std::sqrt(t1 * t1 + t2 * t2 + t3 * t3);
    std::array<double, 3> v{-0.5 * (sg + 1.0) + 0.5 * root, -b, -0.5 * (sg + 1.0) - 0.5 * root};
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

// ---------------------------------------------------------------------------
// Certificate

enum class CertificateBranch {
    Gamma2Zero,      // rho^2/4 + K - sigma/(b(r-1)) < 0: gamma_2 = 0 suffices
    Gamma2Positive,  // gamma_2 > 0 from the quadratic inequality
};

inline std::string_view to_string(CertificateBranch b) {
    return b == CertificateBranch::Gamma2Zero ? "gamma2_zero" : "gamma2_positive";
}

struct GammaCertificate {
    double gamma1{0.0};
    double gamma2{0.0};
    double gamma3{0.0};
    double gamma4{0.0};
    double rho{0.0};
    /// critical_fraction(p); below zero when sigma r < (b+1)(b+sigma).
    double s0{0.0};
    CertificateBranch branch{CertificateBranch::Gamma2Zero};
};

struct RCoefficients {
    double a1, a2, a3;
    double b1, b2, b3;
    double c1, c2;  // b1 = c1 - 2 sigma g4, b2 = c2 + 2 sigma g4
};

inline RCoefficients r_coefficients(const SystemParams& p, double rho, double g1, double g2, double g3, double g4) {
    const double s = p.sigma(), b = p.b(), r = p.r(), rho2 = rho * rho;
    RCoefficients k{};
    k.a1 = -g1;
    k.a2 = g1 * (g2 + 2.0 * s + b);
    k.a3 = rho2 / 4.0 - 2.0 * b * g3;
    k.c1 = rho2 * (b - 1.0) * (b - 1.0) / (4.0 * s * s) - r * g1 * g2;
    k.c2 = rho2 * (b - 1.0) / (2.0 * s) + g1 * g2 - 2.0 * r * s * g1 + 2.0 * r * g3 + s * g1 * g2 - s / b;
    k.b1 = k.c1 - 2.0 * s * g4;
    k.b2 = k.c2 + 2.0 * s * g4;
    k.b3 = 2.0 * s * g1 - 2.0 * g3 - s * g1 * g2 + rho2 / 4.0;
    return k;
}

inline RCoefficients r_coefficients(const SystemParams& p, const GammaCertificate& c) {
    return r_coefficients(p, c.rho, c.gamma1, c.gamma2, c.gamma3, c.gamma4);
}

/// V of the certificate at a point.
inline double certificate_v(const SystemParams& p, const GammaCertificate& c, const StateVec& s) {
    const double sg = p.sigma();
    const double x2 = s.x * s.x;
    return c.gamma4 * x2 + (c.gamma3 - sg * c.gamma1) * s.y * s.y + c.gamma3 * s.z * s.z
           + c.gamma1 * x2 * x2 / (4.0 * sg) - c.gamma1 * x2 * s.z - c.gamma1 * c.gamma2 * s.x * s.y
           - sg / p.b() * s.z;
}

/// Orbital derivative grad(V) . f of the certificate's V.
inline double certificate_v_rate(const SystemParams& p, const GammaCertificate& c, const StateVec& s) {
    const double sg = p.sigma();
    const double vx = 2.0 * c.gamma4 * s.x + c.gamma1 * s.x * s.x * s.x / sg - 2.0 * c.gamma1 * s.x * s.z
                      - c.gamma1 * c.gamma2 * s.y;
    const double vy = 2.0 * (c.gamma3 - sg * c.gamma1) * s.y - c.gamma1 * c.gamma2 * s.x;
    const double vz = 2.0 * c.gamma3 * s.z - c.gamma1 * s.x * s.x - sg / p.b();
    const StateVec f = vector_field(p, s);
    return vx * f.x + vy * f.y + vz * f.z;
}

/// R from its definition, with Vdot computed as grad(V) . f.
inline double r_function_direct(const SystemParams& p, const GammaCertificate& c, const StateVec& s) {
    const double rho2 = c.rho * c.rho;
    const double w = s.y + (p.b() - 1.0) / p.sigma() * s.x;
    return -p.sigma() * s.z + rho2 * s.z * s.z / 4.0 + rho2 / 4.0 * w * w + certificate_v_rate(p, c, s);
}

/// R in coefficient form A1 x^4 + A2 x^2 z + A3 z^2 + B1 x^2 + B2 x y + B3 y^2.
inline double r_function(const RCoefficients& k, const StateVec& s) {
    const double x2 = s.x * s.x;
    return k.a1 * x2 * x2 + k.a2 * x2 * s.z + k.a3 * s.z * s.z + k.b1 * x2 + k.b2 * s.x * s.y + k.b3 * s.y * s.y;
}

namespace detail {

struct CertificateTerms {
    double rho2;
    double e1;  // rho^2/4   + K - sigma/(b(r-1))
    double eb;  // rho^2/(4b) + K - sigma/(b(r-1))
    double k;   // rho^2 (b + sigma - 1)^2 / (4 sigma^2 (r - 1))
    double t;   // sigma / (b (r - 1))
};

inline CertificateTerms certificate_terms(const SystemParams& p, double rh) {
    const double s = p.sigma(), b = p.b(), rm1 = p.r() - 1.0, rho2 = rh * rh;
    const double k = rho2 * (b + s - 1.0) * (b + s - 1.0) / (4.0 * s * s * rm1);
    const double t = s / (b * rm1);
    return {rho2, rho2 / 4.0 + k - t, rho2 / (4.0 * b) + k - t, k, t};
}

// Bounds on 2 g3 for given g1, g2.
struct Gamma3Bracket {
    double strict_lower;   // B3 < 0
    double lower;          // 4 A1 A3 - A2^2 >= 0 (or A3 <= 0 when g1 = 0)
    double upper;          // B3 + C1 + C2 <= 0

    double max_lower() const { return std::max(strict_lower, lower); }
};

inline Gamma3Bracket gamma3_bracket(const SystemParams& p, const CertificateTerms& ct, double g1, double g2) {
    const double s = p.sigma(), b = p.b();
    return {ct.rho2 / 4.0 + 2.0 * s * g1 - s * g1 * g2,
            ct.rho2 / (4.0 * b) + g1 * (g2 + 2.0 * s + b) * (g2 + 2.0 * s + b) / (4.0 * b),
            2.0 * s * g1 + g1 * g2 - ct.k + ct.t};
}

}  // namespace detail

/// Deterministic certificate search. Returns nullopt when the parameter
/// conditions fail; throws NoCertificate when a running-parameter bracket is
/// empty at working precision.
///
/// gamma_2 = 0 when rho^2/4 + K - sigma/(b(r-1)) < 0, otherwise the midpoint
/// of the positive part of the quadratic's feasible interval (1 when the
/// quadratic degenerates to a linear inequality valid for all gamma_2 > 0).
/// gamma_1 and gamma_3 are midpoints of their brackets; gamma_4 is the vertex
/// of 4 B1 B3 - B2^2 as a quadratic in gamma_4.
inline std::optional<GammaCertificate> find_gamma_certificate(const SystemParams& p) {
    const TheoremVerdict verdict = check_conditions(p);
    if (verdict.outcome == Outcome::ConditionsFail) return std::nullopt;

    const double s = p.sigma(), b = p.b();
    GammaCertificate cert;
    cert.rho = rho(p);
    cert.s0 = critical_fraction(p);
    const auto ct = detail::certificate_terms(p, cert.rho);
    const auto q = quadratic_coefficients(p);
    const double c = 2.0 * s - b;

    if (ct.eb > 0.0) throw NoCertificate("gamma1 bracket is empty", "gamma1", 0.0, -4.0 * b * ct.eb);

    const double lead_scale = std::max({std::abs(q.base), std::abs(q.lead - q.base), 1.0});
    if (q.lead < -1e-12 * lead_scale) {
        cert.branch = CertificateBranch::Gamma2Zero;
        cert.gamma2 = 0.0;
        // 0 <= g1 <= -4 b eb / c^2; any g1 >= 0 works when c = 0, take 0.
        cert.gamma1 = c * c > 1e-300 ? -2.0 * b * ct.eb / (c * c) : 0.0;
    } else {
        cert.branch = CertificateBranch::Gamma2Positive;
        try {
            const auto roots = gamma_quadratic_roots(p);
            const double lo = roots ? std::max(0.0, roots->first) : 0.0;
            if (!roots || !(roots->second > lo))
                throw NoCertificate("gamma2 bracket is empty", "gamma2", lo, roots ? roots->second : lo);
            cert.gamma2 = 0.5 * (lo + roots->second);
        } catch (const DegenerateQuadratic& e) {
            if (!e.feasible()) throw NoCertificate("gamma2 bracket is empty (degenerate quadratic)", "gamma2", 0.0, 0.0);
            cert.gamma2 = 1.0;
        }
        const double g1_lo = ct.e1 / (cert.gamma2 * (s + 1.0));
        const double shift = c + cert.gamma2;
        if (shift * shift > 1e-300) {
            const double g1_hi = -4.0 * b * ct.eb / (shift * shift);
            if (!(g1_hi > g1_lo)) throw NoCertificate("gamma1 bracket is empty", "gamma1", g1_lo, g1_hi);
            cert.gamma1 = 0.5 * (g1_lo + g1_hi);
        } else {
            cert.gamma1 = std::max(2.0 * g1_lo, g1_lo + 1.0);
        }
    }

    const auto br = detail::gamma3_bracket(p, ct, cert.gamma1, cert.gamma2);
    const double lo3 = br.max_lower();
    const bool strict_binding = br.strict_lower >= br.lower;
    if (br.upper < lo3 || (strict_binding && !(br.upper > lo3)))
        throw NoCertificate("gamma3 bracket is empty", "gamma3", lo3 / 2.0, br.upper / 2.0);
    cert.gamma3 = 0.25 * (lo3 + br.upper);

    const auto k = r_coefficients(p, cert.rho, cert.gamma1, cert.gamma2, cert.gamma3, 0.0);
    cert.gamma4 = (-2.0 * k.b3 - k.c2) / (2.0 * s);
    return cert;
}

struct RCheckReport {
    double max_r{-std::numeric_limits<double>::infinity()};
    StateVec argmax;
    std::size_t samples{0};
    bool a1_ok{false};          // A1 <= 0
    bool b3_ok{false};          // B3 < 0
    bool a_block_ok{false};     // 4 A1 A3 - A2^2 >= 0, or A3 <= 0 when A1 = 0
    bool b_block_ok{false};     // 4 B1 B3 - B2^2 >= 0
    bool reduced_system{false}; // A1 = A2 = 0
    RCoefficients coefficients{};

    bool coefficients_ok() const { return a1_ok && b3_ok && a_block_ok && b_block_ok; }
    bool passed(double tolerance = 1e-9) const { return coefficients_ok() && max_r <= tolerance; }
};

/// Evaluates R at `samples` Halton points of the box centred on the
/// absorbing ball with half-width three times its radius, and checks the
/// sign conditions on the coefficients that make R <= 0 everywhere.
inline RCheckReport verify_R_nonpositive(const SystemParams& p, const GammaCertificate& c, std::size_t samples) {
    using detail::at_least;
    using detail::slack;
    RCheckReport rep;
    const RCoefficients k = r_coefficients(p, c);
    rep.coefficients = k;
    rep.a1_ok = at_least(0.0, k.a1);
    rep.b3_ok = -k.b3 > slack(k.b3, 0.0);
    rep.reduced_system = k.a1 == 0.0;
    if (rep.reduced_system) {
        rep.a_block_ok = at_least(0.0, k.a3) && k.a2 == 0.0;
    } else {
        const double t1 = 4.0 * k.a1 * k.a3, t2 = k.a2 * k.a2;
        rep.a_block_ok = at_least(t1, t2);
    }
    {
        const double t1 = 4.0 * k.b1 * k.b3, t2 = k.b2 * k.b2;
        rep.b_block_ok = at_least(t1, t2);
    }

    const AbsorbingBall ball = absorbing_ball(p);
    const double half = 3.0 * ball.radius;
    rep.samples = samples;
    for (std::size_t i = 1; i <= samples; ++i) {
        const auto u = halton3(i);
        const StateVec pt = ball.center + StateVec{half * (2.0 * u[0] - 1.0), half * (2.0 * u[1] - 1.0),
                                                   half * (2.0 * u[2] - 1.0)};
        const double v = r_function(k, pt);
        if (v > rep.max_r) {
            rep.max_r = v;
            rep.argmax = pt;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dimension estimate along states

/// 2 (l1 + l2 + s l3) + 2 d/dt theta with theta = (1 - s) V / sqrt(k).
inline double dimension_estimate_lhs(const SystemParams& p, const GammaCertificate& c, double s, const StateVec& x) {
    const auto l = symmetrized_eigenvalues(p, x);
    const double theta_rate = (1.0 - s) * certificate_v_rate(p, c, x) / detail::disc_root(p);
    return 2.0 * (l[0] + l[1] + s * l[2]) + 2.0 * theta_rate;
}

/// State-independent upper bound -(sigma + 2b + 1) - s (sigma + 1) + (1 - s) sqrt(k).
inline double dimension_estimate_rhs(const SystemParams& p, double s) {
    return -(p.sigma() + 2.0 * p.b() + 1.0) - s * (p.sigma() + 1.0) + (1.0 - s) * detail::disc_root(p);
}

/// Sum condition with j = 2 at one state: l1 + l2 + s l3 + d/dt theta < 0.
inline bool dimension_condition_at(const SystemParams& p, const GammaCertificate& c, double s, const StateVec& x) {
    return dimension_estimate_lhs(p, c, s, x) < 0.0;
}

/// Convergence condition at one state: l1 + l2 + d/dt theta < 0 (s = 0).
inline bool convergence_condition_at(const SystemParams& p, const GammaCertificate& c, const StateVec& x) {
    return dimension_estimate_lhs(p, c, 0.0, x) < 0.0;
}

// ---------------------------------------------------------------------------
// Parameter-domain sufficiency

/// f(b, sigma) = (b/sigma + 1 - 1/sigma)^2 - 4 (1/sigma + 1 - b/sigma);
/// (8) reads r - 1 >= (b/3) f and case a reads r - 1 >= b f / (4 - b) for b < 4.
inline double lemma2_f(double b, double sigma) {
    const double u = b / sigma + 1.0 - 1.0 / sigma;
    return u * u - 4.0 * (1.0 / sigma + 1.0 - b / sigma);
}

inline bool lemma2_box(const SystemParams& p) { return p.r() > 1.0 && p.sigma() > 7.0 && p.b() < 4.0; }

/// True iff r > 1, sigma > 7 and 0 < b < 4. Inside that box the theorem's
/// premises must hold; a violation raises std::logic_error.
inline bool lemma2_domain_check(const SystemParams& p) {
    if (!lemma2_box(p)) return false;
    if (!check_conditions(p).premises_hold()) {
        std::ostringstream msg;
        msg << "parameter point (" << p.sigma() << ", " << p.r() << ", " << p.b()
            << ") lies in the sufficiency box but the theorem's conditions fail";
        throw std::logic_error(msg.str());
    }
    return true;
}

struct RStarQuery {
    double epsilon{0.1};
    double sigma_min{7.0};
    double sigma_max{30.0};
    int sigma_cells{40};
    int b_cells{40};
    std::vector<double> r_grid;  // ascending
    /// Require the formula outcome rather than the premises alone.
    bool require_formula{false};
};

/// Smallest r in the grid from which on (for it and every larger grid r) the
/// premises, or the formula outcome with require_formula, hold on every cell
/// centre with sigma in (sigma_min, sigma_max] and b in (0, 4 - epsilon).
/// nullopt when even the largest r fails.
inline std::optional<double> remark4_r_star(const RStarQuery& q) {
    if (q.r_grid.empty() || !(q.epsilon > 0.0) || q.epsilon >= 4.0)
        throw std::invalid_argument("r_star query needs a non-empty r grid and 0 < epsilon < 4");
    auto all_hold = [&](double r) {
        const double bmax = 4.0 - q.epsilon;
        for (int i = 0; i < q.sigma_cells; ++i) {
            const double s = q.sigma_min + (i + 0.5) * (q.sigma_max - q.sigma_min) / q.sigma_cells;
            for (int j = 0; j < q.b_cells; ++j) {
                const double b = (j + 0.5) * bmax / q.b_cells;
                const TheoremVerdict v = check_conditions(SystemParams(s, r, b));
                const bool ok = q.require_formula ? v.outcome == Outcome::FormulaHolds : v.premises_hold();
                if (!ok) return false;
            }
        }
        return true;
    };
    std::optional<double> best;
    for (auto it = q.r_grid.rbegin(); it != q.r_grid.rend(); ++it) {
        if (!all_hold(*it)) break;
        best = *it;
    }
    return best;
}

}  // namespace lyapdim
