#pragma once

// Parameter-plane classification and trajectory probes.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lyapdim/integrate.hpp"
#include "lyapdim/lyap.hpp"
#include "lyapdim/model.hpp"
#include "lyapdim/parallel.hpp"
#include "lyapdim/rng.hpp"
#include "lyapdim/theory.hpp"

namespace lyapdim {

enum class Param { Sigma, R, B };

inline std::string_view to_string(Param p) {
    switch (p) {
        case Param::Sigma: return "sigma";
        case Param::R: return "r";
        case Param::B: return "b";
    }
    return "?";
}

inline Param param_from_string(std::string_view name) {
    if (name == "sigma" || name == "s") return Param::Sigma;
    if (name == "r" || name == "rho") return Param::R;
    if (name == "b") return Param::B;
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "' (expected sigma, r or b)");
}

struct Axis {
    Param param{Param::Sigma};
    double min{0.0};
    double max{1.0};
    int cells{2};

    double center(int i) const { return min + (i + 0.5) * (max - min) / cells; }
};

struct ScanRequest {
    Param fixed{Param::R};
    double fixed_value{28.0};
    Axis axis1{Param::Sigma, 0.0, 20.0, 100};
    Axis axis2{Param::B, 0.0, 8.0, 100};

    /// Axis ranges may start at 0 since only cell centres are evaluated.
    void validate() const {
        if (fixed == axis1.param || fixed == axis2.param || axis1.param == axis2.param)
            throw std::invalid_argument("scan needs one fixed parameter and two distinct axis parameters");
        if (!(fixed_value > 0.0)) throw std::invalid_argument("fixed parameter value must be positive");
        for (const Axis* a : {&axis1, &axis2}) {
            if (!(a->min < a->max)) throw std::invalid_argument("axis min must be below max");
            if (a->cells < 2) throw std::invalid_argument("axis needs at least 2 cells");
            if (!(a->min >= 0.0)) throw std::invalid_argument("axis bounds must be non-negative");
        }
    }

    SystemParams params_at(double v1, double v2) const {
        double s = 0.0, r = 0.0, b = 0.0;
        auto put = [&](Param p, double v) {
            (p == Param::Sigma ? s : p == Param::R ? r : b) = v;
        };
        put(fixed, fixed_value);
        put(axis1.param, v1);
        put(axis2.param, v2);
        return {s, r, b};
    }
};

struct ScanCell {
    double axis1_value{0.0};
    double axis2_value{0.0};
    Outcome verdict{Outcome::ConditionsFail};
    std::optional<double> bound;

    friend bool operator==(const ScanCell&, const ScanCell&) = default;
};

/// Classifies every cell centre, row-major with axis1 as the outer index.
inline std::vector<ScanCell> run_scan(const ScanRequest& req, unsigned threads = 1) {
    req.validate();
    const auto n1 = static_cast<std::size_t>(req.axis1.cells);
    const auto n2 = static_cast<std::size_t>(req.axis2.cells);
    std::vector<ScanCell> cells(n1 * n2);
    parallel_for(n1, threads, [&](std::size_t i) {
        const double v1 = req.axis1.center(static_cast<int>(i));
        for (std::size_t j = 0; j < n2; ++j) {
            const double v2 = req.axis2.center(static_cast<int>(j));
            const TheoremVerdict v = check_conditions(req.params_at(v1, v2));
            cells[i * n2 + j] = ScanCell{v1, v2, v.outcome, v.bound};
        }
    });
    return cells;
}

struct ProbeOptions {
    IntegratorConfig integrator{};
    double transient{0.0};
    double capture_distance{1e-3};
    /// The distance must stay below capture_distance this long, ending at
    /// the horizon.
    double capture_hold{10.0};
    std::uint64_t rng_seed{0};
    unsigned threads{1};
};

struct SeedReport {
    StateVec initial;
    StateVec final_state;
    std::optional<double> largest_le;
    bool captured{false};
    /// Index into equilibria(p).all() of the nearest equilibrium at the end.
    int equilibrium{-1};
    double final_distance{std::numeric_limits<double>::infinity()};
    /// Time after which the trajectory stayed within capture_distance.
    std::optional<double> capture_time;
    bool diverged{false};
};

struct ProbeReport {
    std::vector<SeedReport> seeds;

    std::size_t captured_count() const {
        std::size_t n = 0;
        for (const auto& s : seeds) n += s.captured ? 1 : 0;
        return n;
    }
};

/// Integrates each seed over `horizon`, estimating its largest finite-time
/// exponent and whether it settles on an equilibrium.
inline ProbeReport chaos_probe(const SystemParams& p, const std::vector<StateVec>& seeds, double horizon,
                               const ProbeOptions& opts = {}) {
    if (seeds.empty()) throw std::invalid_argument("chaos_probe needs at least one seed");
    const std::vector<StateVec> eq = equilibria(p).all();
    ProbeReport rep;
    rep.seeds.resize(seeds.size());
    parallel_for(seeds.size(), opts.threads, [&](std::size_t i) {
        SeedReport& out = rep.seeds[i];
        out.initial = seeds[i];
        double last_far = 0.0;
        auto observer = [&](double t, const StateVec& s) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : eq) best = std::min(best, distance(s, e));
            if (best >= opts.capture_distance) last_far = t;
        };
        try {
            const QrRun run = le_spectrum_qr_run(p, seeds[i], horizon, opts.transient, opts.integrator, {}, observer);
            out.final_state = run.final_state;
            out.largest_le = run.spectrum.largest();
            for (std::size_t k = 0; k < eq.size(); ++k) {
                const double d = distance(run.final_state, eq[k]);
                if (d < out.final_distance) {
                    out.final_distance = d;
                    out.equilibrium = static_cast<int>(k);
                }
            }
            const double end = run.spectrum.horizon;
            if (out.final_distance < opts.capture_distance) out.capture_time = last_far;
            out.captured = out.final_distance < opts.capture_distance && end - last_far >= opts.capture_hold;
        } catch (const NonFiniteState&) {
            out.diverged = true;
        }
    });
    return rep;
}

/// Seeds drawn uniformly from the absorbing ball with a counter-based
/// generator keyed by opts.rng_seed.
inline std::vector<StateVec> absorbing_ball_seeds(const SystemParams& p, std::size_t count, std::uint64_t rng_seed) {
    const AbsorbingBall ball = absorbing_ball(p);
    std::vector<StateVec> seeds;
    seeds.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng = CounterRng(rng_seed).split(i);
        seeds.push_back(uniform_in_ball(rng, ball.center, ball.radius));
    }
    return seeds;
}

inline ProbeReport chaos_probe(const SystemParams& p, std::size_t seed_count, double horizon,
                               const ProbeOptions& opts = {}) {
    if (seed_count < 1) throw std::invalid_argument("chaos_probe needs at least one seed");
    return chaos_probe(p, absorbing_ball_seeds(p, seed_count, opts.rng_seed), horizon, opts);
}

}  // namespace lyapdim
