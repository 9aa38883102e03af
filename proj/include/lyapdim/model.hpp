#pragma once

// Lorenz vector field, its Jacobian, equilibria and the absorbing ball
// obtained from V = 1/2 (x^2 + y^2 + (z - r - sigma)^2).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lyapdim {

/// Positive parameter triple (sigma, r, b). Construction rejects anything
/// that is not a finite positive number.
class SystemParams {
public:
    SystemParams(double sigma, double r, double b) : sigma_(sigma), r_(r), b_(b) {
        auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!ok(sigma) || !ok(r) || !ok(b)) {
            std::ostringstream msg;
            msg << "Lorenz parameters must be finite and positive, got sigma=" << sigma
                << " r=" << r << " b=" << b;
            throw std::invalid_argument(msg.str());
        }
    }

    /// sigma = 10, r = 28, b = 8/3.
    static SystemParams classical() { return {10.0, 28.0, 8.0 / 3.0}; }

    double sigma() const noexcept { return sigma_; }
    double r() const noexcept { return r_; }
    double b() const noexcept { return b_; }

    /// Constant divergence of the field, -(sigma + 1 + b).
    double trace() const noexcept { return -(sigma_ + 1.0 + b_); }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;

private:
    double sigma_;
    double r_;
    double b_;
};

struct StateVec {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static StateVec from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    friend bool operator==(const StateVec&, const StateVec&) = default;
};

inline StateVec operator+(const StateVec& a, const StateVec& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline StateVec operator-(const StateVec& a, const StateVec& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline StateVec operator*(double k, const StateVec& a) { return {k * a.x, k * a.y, k * a.z}; }

inline double distance(const StateVec& a, const StateVec& b) { return (a - b).norm(); }

using Matrix3 = Eigen::Matrix3d;

inline StateVec vector_field(const SystemParams& p, const StateVec& s) {
    return {p.sigma() * (s.y - s.x),
            p.r() * s.x - s.y - s.x * s.z,
            -p.b() * s.z + s.x * s.y};
}

inline Matrix3 jacobian(const SystemParams& p, const StateVec& s) {
    Matrix3 j;
    j << -p.sigma(), p.sigma(), 0.0,
         p.r() - s.z, -1.0, -s.x,
         s.y, s.x, -p.b();
    return j;
}

/// S0 is the origin. S1, S2 exist iff r > 1; S1 has negative x and y, S2
/// positive, so that the Fig. 1 coexistence seeds (-16.29, -0.06, 42.12)
/// and (16.29, 0.06, 42.12) are captured by S2 and S1 respectively.
struct EquilibriumSet {
    StateVec s0{};
    std::optional<std::pair<StateVec, StateVec>> s12;

    /// All equilibria in the order S0, S1, S2.
    std::vector<StateVec> all() const {
        std::vector<StateVec> out{s0};
        if (s12) {
            out.push_back(s12->first);
            out.push_back(s12->second);
        }
        return out;
    }
};

inline EquilibriumSet equilibria(const SystemParams& p) {
    EquilibriumSet eq;
    if (p.r() > 1.0) {
        const double q = std::sqrt(p.b() * (p.r() - 1.0));
        const double z = p.r() - 1.0;
        eq.s12 = std::make_pair(StateVec{-q, -q, z}, StateVec{q, q, z});
    }
    return eq;
}

/// V(x,y,z) = 1/2 (x^2 + y^2 + (z - r - sigma)^2).
inline double dissipation_lyapunov(const SystemParams& p, const StateVec& s) {
    const double w = s.z - p.r() - p.sigma();
    return 0.5 * (s.x * s.x + s.y * s.y + w * w);
}

/// Orbital derivative of dissipation_lyapunov:
/// -sigma x^2 - y^2 - b z^2 + b (r + sigma) z.
inline double dissipation_lyapunov_rate(const SystemParams& p, const StateVec& s) {
    return -p.sigma() * s.x * s.x - s.y * s.y - p.b() * s.z * s.z + p.b() * (p.r() + p.sigma()) * s.z;
}

struct AbsorbingBall {
    StateVec center;
    double radius;

    bool contains(const StateVec& s) const { return distance(s, center) <= radius; }
};

/// With d = s - center and m = r + sigma, Vdot = -sigma dx^2 - dy^2 - b dz^2
/// - b m dz <= -mu |d|^2 + b m |d|, mu = min(sigma, 1, b), so Vdot < 0 for
/// |d| > b m / mu. The returned radius is that bound widened by 10%.
inline AbsorbingBall absorbing_ball(const SystemParams& p) {
    const double mu = std::min({p.sigma(), 1.0, p.b()});
    const double bound = p.b() * (p.r() + p.sigma()) / mu;
    return {StateVec{0.0, 0.0, p.r() + p.sigma()}, 1.1 * bound};
}

}  // namespace lyapdim
