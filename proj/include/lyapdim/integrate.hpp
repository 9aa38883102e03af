#pragma once

// Fixed-step RK4 and step-controlled Dormand-Prince 5(4) for the Lorenz flow
// and for the state coupled with the variational equation dF/dt = J(s) F.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "lyapdim/errors.hpp"
#include "lyapdim/model.hpp"

namespace lyapdim {

enum class Method { RK4, DOPRI45 };

inline std::string_view to_string(Method m) { return m == Method::RK4 ? "rk4" : "dopri45"; }

inline Method method_from_string(std::string_view name) {
    if (name == "rk4" || name == "RK4") return Method::RK4;
    if (name == "dopri45" || name == "DOPRI45") return Method::DOPRI45;
    throw std::invalid_argument("unknown integration method '" + std::string(name) + "'");
}

struct IntegratorConfig {
    double step{1e-3};
    Method method{Method::RK4};
    // Only used by DOPRI45, which subdivides each `step` adaptively.
    double abs_tol{1e-10};
    double rel_tol{1e-10};

    void validate() const {
        if (!(step > 0.0) || !std::isfinite(step))
            throw std::invalid_argument("integrator step must be positive");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw std::invalid_argument("integrator tolerances must be positive");
    }
};

/// Columns are tangent vectors; starts as the identity (X(0) = I).
struct TangentFrame {
    Matrix3 columns{Matrix3::Identity()};

    bool finite() const { return columns.allFinite(); }
};

/// Trajectories leaving this radius are treated as divergent.
inline constexpr double kDivergenceRadius = 1e6;

namespace detail {

// Column 0 is the state, columns 1..3 the tangent frame.
using Augmented = Eigen::Matrix<double, 3, 4>;

inline void guard(const StateVec& s, double t = 0.0) {
    if (!s.finite() || s.norm() > kDivergenceRadius) {
        std::ostringstream msg;
        msg << "trajectory diverged: state (" << s.x << ", " << s.y << ", " << s.z << ")";
        throw NonFiniteState(msg.str(), t);
    }
}

inline Augmented pack(const StateVec& s, const TangentFrame& f) {
    Augmented a;
    a.col(0) = s.vec();
    a.rightCols<3>() = f.columns;
    return a;
}

inline Eigen::Vector3d field(const SystemParams& p, const Eigen::Vector3d& v) {
    return vector_field(p, StateVec::from(v)).vec();
}

inline Augmented augmented_field(const SystemParams& p, const Augmented& a) {
    const StateVec s = StateVec::from(a.col(0));
    Augmented d;
    d.col(0) = vector_field(p, s).vec();
    d.rightCols<3>() = jacobian(p, s) * a.rightCols<3>();
    return d;
}

// Weighted RMS error norm used by the step-size controller.
template <class Y>
double error_norm(const Y& err, const Y& y0, const Y& y1, double atol, double rtol) {
    const auto scale = (atol + rtol * y0.array().abs().max(y1.array().abs())).eval();
    return std::sqrt((err.array() / scale).square().mean());
}

}  // namespace detail

/// One classical Runge-Kutta step for any vector-space valued state.
template <class Y, class Rhs>
Y rk4_step(Rhs&& rhs, const Y& y, double h) {
    const Y k1 = rhs(y);
    const Y k2 = rhs((y + 0.5 * h * k1).eval());
    const Y k3 = rhs((y + 0.5 * h * k2).eval());
    const Y k4 = rhs((y + h * k3).eval());
    return (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
}

/// Advances y over exactly `span` time units with Dormand-Prince 5(4),
/// starting with trial step `span` and shrinking/growing it as needed.
template <class Y, class Rhs>
Y dopri45_advance(Rhs&& rhs, const Y& y, double span, double atol, double rtol) {
    // Autonomous right-hand side, so the node coefficients c_i are not needed.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b*, the embedded 4th order weights subtracted from the 5th order ones.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Y cur = y;
    double done = 0.0;
    double h = span;
    int rejected_in_row = 0;
    while (done < span) {
        h = std::min(h, span - done);
        const Y k1 = rhs(cur);
        const Y k2 = rhs((cur + h * (a21 * k1)).eval());
        const Y k3 = rhs((cur + h * (a31 * k1 + a32 * k2)).eval());
        const Y k4 = rhs((cur + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        const Y k5 = rhs((cur + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        const Y k6 = rhs((cur + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        const Y next = (cur + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)).eval();
        const Y k7 = rhs(next);
        const Y err = (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).eval();
        const double en = detail::error_norm(err, cur, next, atol, rtol);
        if (!std::isfinite(en)) throw NonFiniteState("DOPRI45 error estimate is not finite");
        const double factor = std::clamp(0.9 * std::pow(std::max(en, 1e-300), -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            cur = next;
            done += h;
            rejected_in_row = 0;
        } else if (++rejected_in_row > 50 || h < 1e-14 * std::max(1.0, span)) {
            throw NonFiniteState("DOPRI45 step size underflow");
        }
        h *= factor;
    }
    return cur;
}

/// Advances the state by one configured step.
inline StateVec step_state(const SystemParams& p, const StateVec& s, const IntegratorConfig& cfg) {
    auto rhs = [&p](const Eigen::Vector3d& v) { return detail::field(p, v); };
    const Eigen::Vector3d next = cfg.method == Method::RK4
                                     ? rk4_step(rhs, s.vec(), cfg.step)
                                     : dopri45_advance(rhs, s.vec(), cfg.step, cfg.abs_tol, cfg.rel_tol);
    StateVec out = StateVec::from(next);
    detail::guard(out);
    return out;
}

/// Advances state and tangent frame together with the same scheme and step.
inline std::pair<StateVec, TangentFrame> step_augmented(const SystemParams& p, const StateVec& s,
                                                        const TangentFrame& frame,
                                                        const IntegratorConfig& cfg) {
    auto rhs = [&p](const detail::Augmented& a) { return detail::augmented_field(p, a); };
    const detail::Augmented a0 = detail::pack(s, frame);
    const detail::Augmented a1 = cfg.method == Method::RK4
                                     ? rk4_step(rhs, a0, cfg.step)
                                     : dopri45_advance(rhs, a0, cfg.step, cfg.abs_tol, cfg.rel_tol);
    std::pair<StateVec, TangentFrame> out{StateVec::from(a1.col(0)), TangentFrame{a1.rightCols<3>()}};
    detail::guard(out.first);
    if (!out.second.finite()) throw NonFiniteState("tangent frame overflowed");
    return out;
}

/// Number of configured steps covering `duration` (rounded to nearest).
inline long step_count(double duration, const IntegratorConfig& cfg) {
    return std::lround(duration / cfg.step);
}

/// Integrates the state over `duration` time units. The optional observer is
/// called as observer(t, state) after every step.
template <class Observer>
StateVec integrate(const SystemParams& p, StateVec s, double duration, const IntegratorConfig& cfg,
                   Observer&& observer) {
    cfg.validate();
    const long n = step_count(duration, cfg);
    for (long i = 1; i <= n; ++i) {
        try {
            s = step_state(p, s, cfg);
        } catch (const NonFiniteState& e) {
            throw NonFiniteState(e.what(), static_cast<double>(i) * cfg.step);
        }
        observer(static_cast<double>(i) * cfg.step, s);
    }
    return s;
}

inline StateVec integrate(const SystemParams& p, StateVec s, double duration, const IntegratorConfig& cfg) {
    return integrate(p, s, duration, cfg, [](double, const StateVec&) {});
}

inline std::pair<StateVec, TangentFrame> integrate_augmented(const SystemParams& p, StateVec s,
                                                             TangentFrame frame, double duration,
                                                             const IntegratorConfig& cfg) {
    cfg.validate();
    const long n = step_count(duration, cfg);
    for (long i = 0; i < n; ++i) std::tie(s, frame) = step_augmented(p, s, frame, cfg);
    return {s, frame};
}

}  // namespace lyapdim
