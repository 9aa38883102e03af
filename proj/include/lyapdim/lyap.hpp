#pragma once

// Finite-time Lyapunov exponents and the Kaplan-Yorke (local Lyapunov)
// dimension.
//
// Two estimators are provided. le_spectrum_qr is the usual Benettin scheme:
// the tangent frame is re-orthonormalized every `reorth_interval` time units
// and the logarithms of the Gram-Schmidt norms are averaged. le_spectrum_svd
// evaluates (1/t) ln sigma_i(X(t)) for the fundamental matrix itself; X is
// kept as Q * D * U (Q orthogonal, D diagonal stored as logarithms, U unit
// upper triangular) so that singular values spanning hundreds of decades
// stay representable.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "lyapdim/errors.hpp"
#include "lyapdim/integrate.hpp"
#include "lyapdim/model.hpp"
#include "lyapdim/parallel.hpp"

namespace lyapdim {

/// Ordered finite-time exponents (per time unit), LE1 >= LE2 >= LE3.
struct LeSpectrum {
    std::array<double, 3> exponents{};
    double horizon{0.0};
    double transient_discarded{0.0};

    double sum() const { return exponents[0] + exponents[1] + exponents[2]; }
    double largest() const { return exponents[0]; }
};

struct FiniteTimeDim {
    int j{0};
    double fraction{0.0};
    double value{0.0};
    // Set when |LE_{j+1}| vanished and the value was taken as j + 1.
    bool degenerate{false};
};

/// Kaplan-Yorke dimension of a spectrum sorted non-increasingly.
///
/// 0 when LE1 <= 0, n when the full sum is >= 0. Otherwise j is the largest
/// index with LE1 + ... + LEj > 0 and (LE1 + ... + LEj) / |LE_{j+1}| < 1.
/// When no index satisfies both (the partial sum hits exactly zero), the
/// value falls back to the continuous limit: the largest j with a
/// non-negative partial sum.
inline FiniteTimeDim kaplan_yorke(std::span<const double> le) {
    const int n = static_cast<int>(le.size());
    FiniteTimeDim out;
    if (n == 0 || le[0] <= 0.0) return out;

    double total = 0.0;
    for (double v : le) total += v;
    if (total >= 0.0) {
        out.j = n;
        out.value = n;
        return out;
    }

    constexpr double kTiny = 1e-12;
    std::vector<double> partial(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) partial[k] = partial[k - 1] + le[k - 1];

    int j = 0;
    for (int k = n - 1; k >= 1; --k) {
        const double denom = std::abs(le[k]);
        if (partial[k] > 0.0 && (denom < kTiny || partial[k] / denom < 1.0)) {
            j = k;
            break;
        }
    }
    if (j == 0) {
        for (int k = n - 1; k >= 1; --k) {
            if (partial[k] >= 0.0) {
                j = k;
                break;
            }
        }
    }
    out.j = j;
    const double denom = std::abs(le[j]);
    if (denom < kTiny) {
        out.degenerate = true;
        out.value = j + 1;
        out.fraction = 0.0;
        return out;
    }
    out.fraction = partial[j] / denom;
    out.value = j + out.fraction;
    return out;
}

inline FiniteTimeDim kaplan_yorke(const LeSpectrum& spectrum) {
    return kaplan_yorke(std::span<const double>(spectrum.exponents));
}

struct QrOptions {
    double reorth_interval{0.5};
    double checkpoint_interval{10.0};
    /// Minimum number of re-orthonormalization intervals in the horizon.
    int min_intervals{100};
};

struct QrCheckpoint {
    double time{0.0};  // measured from the end of the transient
    std::array<double, 3> exponents{};
    FiniteTimeDim dimension;
};

struct QrRun {
    LeSpectrum spectrum;
    std::vector<QrCheckpoint> checkpoints;
    StateVec final_state;
};

/// Modified Gram-Schmidt with one re-orthogonalization pass. Replaces the
/// columns by an orthonormal basis and returns ln of the diagonal of R.
inline Eigen::Vector3d orthonormalize(Matrix3& m) {
    Eigen::Vector3d log_norms;
    for (int i = 0; i < 3; ++i) {
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k < i; ++k) m.col(i) -= m.col(k).dot(m.col(i)) * m.col(k);
        const double nrm = m.col(i).norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NonFiniteState("tangent vectors collapsed");
        m.col(i) /= nrm;
        log_norms[i] = std::log(nrm);
    }
    return log_norms;
}

namespace detail {

inline std::array<double, 3> sorted_desc(std::array<double, 3> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

}  // namespace detail

/// Benettin/QR estimator with checkpoints. `observer(t, state)` is called
/// after every step of the accumulation phase.
template <class Observer>
QrRun le_spectrum_qr_run(const SystemParams& p, StateVec x0, double horizon, double transient,
                         const IntegratorConfig& cfg, const QrOptions& opts, Observer&& observer) {
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(transient >= 0.0)) throw std::invalid_argument("transient must be non-negative");
    if (horizon < opts.min_intervals * opts.reorth_interval) {
        std::ostringstream msg;
        msg << "horizon " << horizon << " covers fewer than " << opts.min_intervals
            << " re-orthonormalization intervals of " << opts.reorth_interval;
        throw HorizonTooShort(msg.str());
    }

    const long reorth_every = std::max(1L, step_count(opts.reorth_interval, cfg));
    const long checkpoint_every = std::max(1L, step_count(opts.checkpoint_interval, cfg));

    StateVec s = x0;
    TangentFrame frame;
    const long n_transient = step_count(transient, cfg);
    for (long i = 1; i <= n_transient; ++i) {
        std::tie(s, frame) = step_augmented(p, s, frame, cfg);
        if (i % reorth_every == 0) orthonormalize(frame.columns);
    }
    orthonormalize(frame.columns);

    QrRun run;
    Eigen::Vector3d log_sum = Eigen::Vector3d::Zero();
    const long n = step_count(horizon, cfg);
    for (long i = 1; i <= n; ++i) {
        std::tie(s, frame) = step_augmented(p, s, frame, cfg);
        const double t = static_cast<double>(i) * cfg.step;
        observer(t, s);
        const bool checkpoint = (i % checkpoint_every == 0) || i == n;
        if (checkpoint || i % reorth_every == 0) log_sum += orthonormalize(frame.columns);
        if (checkpoint) {
            QrCheckpoint cp;
            cp.time = t;
            cp.exponents = detail::sorted_desc({log_sum[0] / t, log_sum[1] / t, log_sum[2] / t});
            cp.dimension = kaplan_yorke(std::span<const double>(cp.exponents));
            run.checkpoints.push_back(cp);
        }
    }
    const double t_end = static_cast<double>(n) * cfg.step;
    run.spectrum.exponents = detail::sorted_desc({log_sum[0] / t_end, log_sum[1] / t_end, log_sum[2] / t_end});
    run.spectrum.horizon = t_end;
    run.spectrum.transient_discarded = static_cast<double>(n_transient) * cfg.step;
    run.final_state = s;
    return run;
}

inline QrRun le_spectrum_qr_run(const SystemParams& p, StateVec x0, double horizon, double transient,
                                const IntegratorConfig& cfg, const QrOptions& opts = {}) {
    return le_spectrum_qr_run(p, x0, horizon, transient, cfg, opts, [](double, const StateVec&) {});
}

inline LeSpectrum le_spectrum_qr(const SystemParams& p, StateVec x0, double horizon, double transient,
                                 const IntegratorConfig& cfg, const QrOptions& opts = {}) {
    return le_spectrum_qr_run(p, x0, horizon, transient, cfg, opts).spectrum;
}

struct SvdOptions {
    /// Interval between QR factorizations of the propagated frame.
    double renorm_interval{0.5};
    /// X(0). Any nonsingular matrix; defaults to the identity.
    Matrix3 initial{Matrix3::Identity()};
};

namespace detail {

// Triangular factor of X(t) kept as diag(exp(log_d)) * unit, unit being unit
// upper triangular.
struct ScaledTriangular {
    Eigen::Vector3d log_d{Eigen::Vector3d::Zero()};
    Matrix3 unit{Matrix3::Identity()};
};

// exp(a) with a guard against leaving double range.
inline double safe_exp(double a) {
    if (a > 700.0) throw OverflowRisk("fundamental-matrix bookkeeping is not graded; exponent overflow");
    return std::exp(a);
}

// Left-multiplies the factor by an upper triangular matrix with positive
// diagonal, given as exp(log_r) on the diagonal plus off-diagonal entries.
inline void accumulate(ScaledTriangular& acc, const Matrix3& r) {
    Eigen::Vector3d log_r;
    for (int i = 0; i < 3; ++i) log_r[i] = std::log(r(i, i));
    Matrix3 next = Matrix3::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            double v = 0.0;
            for (int l = i; l <= j; ++l)
                v += (r(i, l) / r(i, i)) * safe_exp(acc.log_d[l] - acc.log_d[i]) * acc.unit(l, j);
            next(i, j) = v;
        }
    }
    acc.unit = next;
    acc.log_d += log_r;
}

// 2x2 minors of a 3x3 matrix in the basis (12, 13, 23).
inline Matrix3 second_compound(const Matrix3& m) {
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    Matrix3 c;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const int i = pairs[a][0], j = pairs[a][1], k = pairs[b][0], l = pairs[b][1];
            c(a, b) = m(i, k) * m(j, l) - m(i, l) * m(j, k);
        }
    return c;
}

inline double largest_singular_value(const Matrix3& m) {
    return Eigen::JacobiSVD<Matrix3>(m).singularValues()[0];
}

// ln sigma_1, ln sigma_2, ln sigma_3 of diag(exp(log_d)) * unit.
inline std::array<double, 3> log_singular_values(const ScaledTriangular& f) {
    const auto& d = f.log_d;
    // Order the rows by scale so every ratio below is <= 1.
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] > d[b]; });
    const double top = d[idx[0]];
    const double second = d[idx[1]];

    Eigen::Vector3d scale1;
    for (int i = 0; i < 3; ++i) scale1[i] = std::exp(d[i] - top);
    const double ln_s1 = top + std::log(largest_singular_value(scale1.asDiagonal() * f.unit));

    // Wedge-2 scales are d_i + d_j for the pairs (12, 13, 23).
    const Eigen::Vector3d d2{d[0] + d[1], d[0] + d[2], d[1] + d[2]};
    const double top2 = top + second;
    Eigen::Vector3d scale2;
    for (int i = 0; i < 3; ++i) scale2[i] = std::exp(d2[i] - top2);
    const double ln_s12 = top2 + std::log(largest_singular_value(scale2.asDiagonal() * second_compound(f.unit)));

    const double ln_det = d.sum();  // det(unit) = 1
    return {ln_s1, ln_s12 - ln_s1, ln_det - ln_s12};
}

}  // namespace detail

/// (1/t) ln sigma_i(X(t, x0)), sorted, for the fundamental matrix X with
/// X(0) = opts.initial.
inline LeSpectrum le_spectrum_svd(const SystemParams& p, StateVec x0, double horizon,
                                  const IntegratorConfig& cfg, const SvdOptions& opts = {}) {
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    // X(t) = Phi(t) X(0); Phi is propagated from the identity and X(0)'s own
    // QR factorization seeds the bookkeeping.
    Eigen::HouseholderQR<Matrix3> qr0(opts.initial);
    Matrix3 q0 = qr0.householderQ();
    Matrix3 r0 = qr0.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < 3; ++i) {
        if (r0(i, i) < 0.0) {
            r0.row(i) *= -1.0;
            q0.col(i) *= -1.0;
        }
        if (r0(i, i) == 0.0) throw std::invalid_argument("initial fundamental matrix is singular");
    }
    detail::ScaledTriangular acc;
    detail::accumulate(acc, r0);

    StateVec s = x0;
    TangentFrame frame{q0};
    const long every = std::max(1L, step_count(opts.renorm_interval, cfg));
    const long n = step_count(horizon, cfg);
    for (long i = 1; i <= n; ++i) {
        std::tie(s, frame) = step_augmented(p, s, frame, cfg);
        if (i % every == 0 || i == n) {
            // frame = Q R with R upper triangular, positive diagonal.
            Matrix3 r = Matrix3::Zero();
            Matrix3 m = frame.columns;
            for (int c = 0; c < 3; ++c) {
                for (int pass = 0; pass < 2; ++pass)
                    for (int k = 0; k < c; ++k) {
                        const double proj = m.col(k).dot(m.col(c));
                        r(k, c) += proj;
                        m.col(c) -= proj * m.col(k);
                    }
                r(c, c) = m.col(c).norm();
                if (!(r(c, c) > 0.0)) throw NonFiniteState("tangent vectors collapsed");
                m.col(c) /= r(c, c);
            }
            frame.columns = m;
            detail::accumulate(acc, r);
        }
    }
    const double t = static_cast<double>(n) * cfg.step;
    const auto ln_sv = detail::log_singular_values(acc);
    LeSpectrum out;
    out.exponents = detail::sorted_desc({ln_sv[0] / t, ln_sv[1] / t, ln_sv[2] / t});
    out.horizon = t;
    return out;
}

struct LocalDimension {
    FiniteTimeDim final;
    /// Max over checkpoint values and the final value; the finite-horizon
    /// stand-in for the limsup.
    double limsup{0.0};
    LeSpectrum spectrum;
    std::vector<double> checkpoint_values;
};

inline LocalDimension local_dimension(const SystemParams& p, StateVec x0, double horizon, double transient,
                                      const IntegratorConfig& cfg, const QrOptions& opts = {}) {
    const QrRun run = le_spectrum_qr_run(p, x0, horizon, transient, cfg, opts);
    LocalDimension out;
    out.spectrum = run.spectrum;
    out.final = kaplan_yorke(run.spectrum);
    out.limsup = out.final.value;
    for (const auto& cp : run.checkpoints) {
        out.checkpoint_values.push_back(cp.dimension.value);
        out.limsup = std::max(out.limsup, cp.dimension.value);
    }
    return out;
}

struct GridDimension {
    double value{0.0};
    StateVec argmax_seed;
    std::size_t argmax_index{0};
    /// Limsup proxy per seed; empty for seeds that diverged.
    std::vector<std::optional<double>> per_seed;
    std::vector<std::size_t> skipped;
};

/// Maximum local dimension over a set of seeds. Seeds are independent and
/// may be evaluated on `threads` workers; the result does not depend on the
/// thread count. Ties go to the lowest index.
inline GridDimension set_dimension_grid(const SystemParams& p, const std::vector<StateVec>& seeds,
                                        double horizon, double transient, const IntegratorConfig& cfg,
                                        unsigned threads = 1, const QrOptions& opts = {}) {
    if (seeds.empty()) throw std::invalid_argument("set_dimension_grid needs at least one seed");
    GridDimension out;
    out.per_seed.resize(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        try {
            out.per_seed[i] = local_dimension(p, seeds[i], horizon, transient, cfg, opts).limsup;
        } catch (const NonFiniteState&) {
            out.per_seed[i].reset();
        }
    });
    bool any = false;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!out.per_seed[i]) {
            out.skipped.push_back(i);
            continue;
        }
        if (!any || *out.per_seed[i] > out.value) {
            any = true;
            out.value = *out.per_seed[i];
            out.argmax_index = i;
            out.argmax_seed = seeds[i];
        }
    }
    if (!any) throw NonFiniteState("every seed diverged");
    return out;
}

/// Points along a trajectory after `transient`, one every `spacing` time
/// units; used to seed grids on the attractor.
inline std::vector<StateVec> attractor_samples(const SystemParams& p, StateVec start, std::size_t count,
                                               double spacing, double transient, const IntegratorConfig& cfg) {
    std::vector<StateVec> out;
    out.reserve(count);
    StateVec s = integrate(p, start, transient, cfg);
    for (std::size_t i = 0; i < count; ++i) {
        s = integrate(p, s, spacing, cfg);
        out.push_back(s);
    }
    return out;
}

}  // namespace lyapdim
