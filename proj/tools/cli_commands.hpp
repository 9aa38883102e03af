#pragma once

// Command layer of the lyapdim tool. run_cli takes the argument list and the
// two output streams so tests can drive it without spawning processes.
//
// Exit codes: 0 success, 1 configuration error, 2 non-finite state,
// 3 no certificate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lyapdim/lyapdim.hpp"

namespace lyapdim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNonFinite = 2, kNoCertificate = 3 };

enum class OutputFormat { Text, Csv, Json };

inline OutputFormat format_from_string(const std::string& s) {
    if (s == "text") return OutputFormat::Text;
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown output format '" + s + "' (expected text, csv or json)");
}

/// Raw option values as typed on the command line.
struct RawOptions {
    std::string params{"10,28,8/3"};
    std::string sigma, r, b;
    std::string from;
    std::string horizon, transient;
    std::string step{"1e-3"};
    std::string method{"rk4"};
    std::string output;
    std::string out_path;
    std::uint64_t seed{0};
    std::optional<unsigned> threads;
    std::size_t samples{100000};
    std::size_t stride{1};
    std::string estimator{"qr"};
    std::size_t grid{0};
    std::string fixed{"r=28"};
    std::string axis1{"sigma=0:20:100"};
    std::string axis2{"b=0:8:100"};
};

/// Parsed and validated configuration shared by all subcommands.
struct RunConfig {
    SystemParams params{SystemParams::classical()};
    IntegratorConfig integrator{};
    double horizon{0.0};
    double transient{0.0};
    OutputFormat output{OutputFormat::Text};
    std::string out_path;
    std::uint64_t seed{0};
    unsigned threads{1};
};

inline RunConfig make_config(const RawOptions& raw, double default_horizon, double default_transient,
                             OutputFormat default_output) {
    RunConfig cfg;
    double s = 0.0, r = 0.0, b = 0.0;
    {
        const auto v = parse_real_list(raw.params);
        if (v.size() != 3) throw std::invalid_argument("--params expects sigma,r,b");
        s = v[0], r = v[1], b = v[2];
    }
    if (!raw.sigma.empty()) s = parse_real(raw.sigma);
    if (!raw.r.empty()) r = parse_real(raw.r);
    if (!raw.b.empty()) b = parse_real(raw.b);
    cfg.params = SystemParams(s, r, b);

    cfg.integrator.step = parse_real(raw.step);
    cfg.integrator.method = method_from_string(raw.method);
    cfg.integrator.validate();

    cfg.horizon = raw.horizon.empty() ? default_horizon : parse_real(raw.horizon);
    cfg.transient = raw.transient.empty() ? default_transient : parse_real(raw.transient);
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw std::invalid_argument("--horizon must be positive");
    if (!(cfg.transient >= 0.0) || !std::isfinite(cfg.transient))
        throw std::invalid_argument("--transient must be non-negative");

    cfg.output = raw.output.empty() ? default_output : format_from_string(raw.output);
    cfg.out_path = raw.out_path;
    cfg.seed = raw.seed;
    cfg.threads = raw.threads ? *raw.threads : threads_from_env(1);
    if (cfg.threads == 0) throw std::invalid_argument("--threads must be at least 1");
    return cfg;
}

/// Offset applied to a named equilibrium for --from s0|s1|s2.
inline constexpr double kEquilibriumOffset = 1e-3;

/// s0, s1, s2 (offset by 1e-3 in x), "random" (absorbing ball, keyed by
/// --seed) or an explicit triple x,y,z.
inline StateVec resolve_start(const std::string& from, const SystemParams& p, std::uint64_t seed) {
    const StateVec offset{kEquilibriumOffset, 0.0, 0.0};
    const EquilibriumSet eq = equilibria(p);
    if (from == "s0") return eq.s0 + offset;
    if (from == "s1" || from == "s2") {
        if (!eq.s12) throw std::invalid_argument("equilibria S1, S2 exist only for r > 1");
        return (from == "s1" ? eq.s12->first : eq.s12->second) + offset;
    }
    if (from == "random") {
        const AbsorbingBall ball = absorbing_ball(p);
        CounterRng rng(seed);
        return uniform_in_ball(rng, ball.center, ball.radius);
    }
    const auto v = parse_real_list(from);
    if (v.size() != 3) throw std::invalid_argument("--from expects s0, s1, s2, random or x,y,z");
    return {v[0], v[1], v[2]};
}

/// Destination for data: the --out file if given, else stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::invalid_argument("cannot open output file '" + path + "'");
            os_ = file_.get();
        }
        *os_ << std::setprecision(std::numeric_limits<double>::max_digits10);
    }
    std::ostream& stream() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

inline nlohmann::json params_json(const SystemParams& p) {
    return {{"sigma", p.sigma()}, {"r", p.r()}, {"b", p.b()}};
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_simulate(const RunConfig& cfg, const std::string& from, std::size_t stride, std::ostream& out) {
    const StateVec start = resolve_start(from.empty() ? "s0" : from, cfg.params, cfg.seed);
    if (stride == 0) throw std::invalid_argument("--stride must be at least 1");
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    const double total = cfg.transient + cfg.horizon;
    const long transient_steps = step_count(cfg.transient, cfg.integrator);

    struct Row {
        double t;
        StateVec s;
        bool transient;
    };
    std::vector<Row> rows{{0.0, start, transient_steps > 0}};
    long i = 0;
    integrate(cfg.params, start, total, cfg.integrator, [&](double t, const StateVec& s) {
        ++i;
        if (i % static_cast<long>(stride) == 0) rows.push_back({t, s, i <= transient_steps});
    });

    if (cfg.output == OutputFormat::Json) {
        nlohmann::json j;
        j["params"] = params_json(cfg.params);
        j["start"] = start;
        j["transient"] = cfg.transient;
        auto& arr = j["samples"] = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"t", r.t}, {"state", r.s}, {"segment", r.transient ? "transient" : "attractor"}});
        os << j.dump() << '\n';
    } else {
        os << "t,x,y,z,segment\n";
        for (const auto& r : rows)
            os << r.t << ',' << r.s.x << ',' << r.s.y << ',' << r.s.z << ','
               << (r.transient ? "transient" : "attractor") << '\n';
    }
    return kOk;
}

inline LeSpectrum compute_spectrum(const RunConfig& cfg, const StateVec& start, const std::string& estimator) {
    if (estimator == "qr") return le_spectrum_qr(cfg.params, start, cfg.horizon, cfg.transient, cfg.integrator);
    if (estimator == "svd") {
        const StateVec s = integrate(cfg.params, start, cfg.transient, cfg.integrator);
        LeSpectrum out = le_spectrum_svd(cfg.params, s, cfg.horizon, cfg.integrator);
        out.transient_discarded = static_cast<double>(step_count(cfg.transient, cfg.integrator)) * cfg.integrator.step;
        return out;
    }
    throw std::invalid_argument("unknown estimator '" + estimator + "' (expected qr or svd)");
}

inline int cmd_les(const RunConfig& cfg, const std::string& from, const std::string& estimator, std::ostream& out) {
    const StateVec start = resolve_start(from.empty() ? "s0" : from, cfg.params, cfg.seed);
    const LeSpectrum spec = compute_spectrum(cfg, start, estimator);
    const FiniteTimeDim dim = kaplan_yorke(spec);
    const double residual = spec.sum() - cfg.params.trace();
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    switch (cfg.output) {
        case OutputFormat::Json: {
            nlohmann::json j{{"params", params_json(cfg.params)}, {"start", start},   {"spectrum", spec},
                             {"dimension", dim},                {"trace", cfg.params.trace()},
                             {"sum_residual", residual},        {"estimator", estimator}};
            os << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Csv:
            os << "le1,le2,le3,sum,trace,sum_residual,dimension\n"
               << spec.exponents[0] << ',' << spec.exponents[1] << ',' << spec.exponents[2] << ',' << spec.sum()
               << ',' << cfg.params.trace() << ',' << residual << ',' << dim.value << '\n';
            break;
        case OutputFormat::Text:
            os << "exponents " << spec.exponents[0] << ' ' << spec.exponents[1] << ' ' << spec.exponents[2] << '\n'
               << "sum " << spec.sum() << " trace " << cfg.params.trace() << " residual " << residual << '\n'
               << "dimension " << dim.value << (dim.degenerate ? " (degenerate)" : "") << '\n';
            break;
    }
    return kOk;
}

inline int cmd_dim(const RunConfig& cfg, const std::string& from, std::size_t grid, std::ostream& out) {
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    if (grid > 0) {
        const auto seeds = absorbing_ball_seeds(cfg.params, grid, cfg.seed);
        const GridDimension g =
            set_dimension_grid(cfg.params, seeds, cfg.horizon, cfg.transient, cfg.integrator, cfg.threads);
        switch (cfg.output) {
            case OutputFormat::Json: {
                nlohmann::json per = nlohmann::json::array();
                for (const auto& v : g.per_seed) per.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
                nlohmann::json j{{"params", params_json(cfg.params)}, {"value", g.value},
                                 {"argmax_seed", g.argmax_seed},      {"argmax_index", g.argmax_index},
                                 {"per_seed", per},                   {"skipped", g.skipped}};
                os << j.dump(2) << '\n';
                break;
            }
            case OutputFormat::Csv:
                os << "index,x,y,z,dimension\n";
                for (std::size_t i = 0; i < seeds.size(); ++i) {
                    os << i << ',' << seeds[i].x << ',' << seeds[i].y << ',' << seeds[i].z << ',';
                    if (g.per_seed[i]) os << *g.per_seed[i];
                    os << '\n';
                }
                break;
            case OutputFormat::Text:
                os << "dimension " << g.value << " at seed " << g.argmax_index << " (" << g.argmax_seed.x << ", "
                   << g.argmax_seed.y << ", " << g.argmax_seed.z << ")\n"
                   << "seeds " << seeds.size() << " skipped " << g.skipped.size() << '\n';
                break;
        }
        return kOk;
    }

    const StateVec start = resolve_start(from.empty() ? "s0" : from, cfg.params, cfg.seed);
    const LocalDimension ld = local_dimension(cfg.params, start, cfg.horizon, cfg.transient, cfg.integrator);
    const double residual = ld.spectrum.sum() - cfg.params.trace();
    switch (cfg.output) {
        case OutputFormat::Json: {
            nlohmann::json j{{"params", params_json(cfg.params)}, {"start", start},
                             {"dimension", ld.final},             {"limsup", ld.limsup},
                             {"spectrum", ld.spectrum},           {"checkpoints", ld.checkpoint_values},
                             {"sum_residual", residual}};
            os << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Csv:
            os << "dimension,limsup,le1,le2,le3,sum_residual\n"
               << ld.final.value << ',' << ld.limsup << ',' << ld.spectrum.exponents[0] << ','
               << ld.spectrum.exponents[1] << ',' << ld.spectrum.exponents[2] << ',' << residual << '\n';
            break;
        case OutputFormat::Text:
            os << "dimension " << ld.final.value << " limsup " << ld.limsup << '\n'
               << "exponents " << ld.spectrum.exponents[0] << ' ' << ld.spectrum.exponents[1] << ' '
               << ld.spectrum.exponents[2] << '\n'
               << "sum residual " << residual << '\n';
            break;
    }
    return kOk;
}

/// Labels of the conditions responsible for ConditionsFail.
inline std::vector<std::string> failing_labels(const TheoremVerdict& v) {
    std::vector<std::string> out;
    if (!v.holds(ConditionId::R0)) out.emplace_back(label(ConditionId::R0));
    if (!v.holds(ConditionId::RLower)) out.emplace_back(label(ConditionId::RLower));
    if (v.branch == Branch::None)
        out.push_back(std::string(label(ConditionId::CaseA)) + "/" + std::string(label(ConditionId::CaseB)));
    if (out.empty())
        out.push_back(std::string(label(ConditionId::Equilibria)) + "/" + std::string(label(ConditionId::Formula)));
    return out;
}

inline std::string verdict_summary(const TheoremVerdict& v) {
    std::ostringstream os;
    os << to_string(v.outcome);
    if (v.outcome == Outcome::ConditionsFail) {
        os << ':';
        for (const auto& l : failing_labels(v)) os << ' ' << l;
        return os.str();
    }
    os << ", " << to_string(v.branch);
    // Truncated rather than rounded, so the printed digits are digits of the
    // bound itself.
    if (v.bound) os << ", bound " << std::fixed << std::setprecision(6) << std::trunc(*v.bound * 1e6) / 1e6;
    return os.str();
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
    const TheoremVerdict v = check_conditions(cfg.params);
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    switch (cfg.output) {
        case OutputFormat::Json: {
            nlohmann::json j = v;
            j["params"] = params_json(cfg.params);
            j["summary"] = verdict_summary(v);
            os << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Csv:
            os << "condition,relation,lower,lhs,rhs,holds\n";
            for (const auto& c : v.checks) {
                os << label(c.id) << ',' << c.relation << ',';
                if (c.lower) os << *c.lower;
                os << ',';
                if (std::isfinite(c.lhs)) os << c.lhs;
                os << ',' << c.rhs << ',' << (c.holds ? "true" : "false") << '\n';
            }
            break;
        case OutputFormat::Text:
            os << verdict_summary(v) << '\n';
            for (const auto& c : v.checks) {
                os << "  " << std::left << std::setw(10) << label(c.id) << ' ';
                if (c.lower) os << *c.lower << " < ";
                if (std::isfinite(c.lhs))
                    os << c.lhs;
                else
                    os << "n/a";
                os << ' ' << c.relation << ' ' << c.rhs << "  " << (c.holds ? "holds" : "fails") << '\n';
            }
            if (v.case_boundary) os << "  note: (9) holds with equality; assigned to case a\n";
            break;
    }
    return kOk;
}

inline int cmd_certify(const RunConfig& cfg, std::size_t samples, std::ostream& out, std::ostream& err) {
    const std::optional<GammaCertificate> cert = find_gamma_certificate(cfg.params);
    if (!cert) {
        err << "no certificate: " << verdict_summary(check_conditions(cfg.params)) << '\n';
        return kNoCertificate;
    }
    const RCheckReport rep = verify_R_nonpositive(cfg.params, *cert, samples);
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    switch (cfg.output) {
        case OutputFormat::Json: {
            nlohmann::json j{{"params", params_json(cfg.params)},
                             {"certificate", *cert},
                             {"check", rep},
                             {"passed", rep.passed()}};
            os << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Csv:
            os << "name,value\n"
               << "gamma1," << cert->gamma1 << "\ngamma2," << cert->gamma2 << "\ngamma3," << cert->gamma3
               << "\ngamma4," << cert->gamma4 << "\nrho," << cert->rho << "\ns0," << cert->s0
               << "\nmax_r," << rep.max_r << "\nsamples," << rep.samples << "\npassed,"
               << (rep.passed() ? "true" : "false") << '\n';
            break;
        case OutputFormat::Text:
            os << "branch " << to_string(cert->branch) << '\n'
               << "gamma " << cert->gamma1 << ' ' << cert->gamma2 << ' ' << cert->gamma3 << ' ' << cert->gamma4
               << '\n'
               << "rho " << cert->rho << " s0 " << cert->s0 << '\n'
               << "coefficients A1<=0 " << rep.a1_ok << " B3<0 " << rep.b3_ok << " A-block " << rep.a_block_ok
               << " B-block " << rep.b_block_ok << '\n'
               << "max R " << rep.max_r << " over " << rep.samples << " samples at (" << rep.argmax.x << ", "
               << rep.argmax.y << ", " << rep.argmax.z << ")\n"
               << (rep.passed() ? "certificate valid" : "certificate rejected") << '\n';
            break;
    }
    if (!rep.passed()) {
        err << "certificate failed verification\n";
        return kNoCertificate;
    }
    return kOk;
}

/// "name=min:max:cells", e.g. "sigma=0:20:100".
inline Axis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("axis must look like name=min:max:cells");
    Axis a;
    a.param = param_from_string(text.substr(0, eq));
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("axis must look like name=min:max:cells");
    a.min = parse_real(parts[0]);
    a.max = parse_real(parts[1]);
    const double cells = parse_real(parts[2]);
    if (cells != std::floor(cells) || cells < 2 || cells > 1e6) throw std::invalid_argument("axis cells must be an integer >= 2");
    a.cells = static_cast<int>(cells);
    return a;
}

inline ScanRequest parse_scan_request(const RawOptions& raw) {
    ScanRequest req;
    const auto eq = raw.fixed.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--fixed must look like name=value");
    req.fixed = param_from_string(raw.fixed.substr(0, eq));
    req.fixed_value = parse_real(raw.fixed.substr(eq + 1));
    req.axis1 = parse_axis(raw.axis1);
    req.axis2 = parse_axis(raw.axis2);
    req.validate();
    return req;
}

inline int cmd_scan(const RunConfig& cfg, const ScanRequest& req, std::ostream& out) {
    const auto cells = run_scan(req, cfg.threads);
    Sink sink(cfg.out_path, out);
    if (cfg.output == OutputFormat::Json)
        write_scan_json(sink.stream(), cells);
    else
        write_scan_csv(sink.stream(), cells);
    return kOk;
}

inline int cmd_equilibria(const RunConfig& cfg, std::ostream& out) {
    const auto eq = equilibria(cfg.params).all();
    static const char* names[] = {"s0", "s1", "s2"};
    Sink sink(cfg.out_path, out);
    std::ostream& os = sink.stream();
    nlohmann::json arr = nlohmann::json::array();
    if (cfg.output == OutputFormat::Csv) os << "name,x,y,z,eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im\n";
    for (std::size_t i = 0; i < eq.size(); ++i) {
        Eigen::EigenSolver<Matrix3> es(jacobian(cfg.params, eq[i]), false);
        auto ev = es.eigenvalues();
        std::vector<std::complex<double>> sorted(ev.data(), ev.data() + 3);
        std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
            return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
        });
        switch (cfg.output) {
            case OutputFormat::Json: {
                nlohmann::json e{{"name", names[i]}, {"state", eq[i]}};
                auto& ej = e["eigenvalues"] = nlohmann::json::array();
                for (auto z : sorted) ej.push_back({z.real(), z.imag()});
                arr.push_back(e);
                break;
            }
            case OutputFormat::Csv:
                os << names[i] << ',' << eq[i].x << ',' << eq[i].y << ',' << eq[i].z;
                for (auto z : sorted) os << ',' << z.real() << ',' << z.imag();
                os << '\n';
                break;
            case OutputFormat::Text:
                os << names[i] << " (" << eq[i].x << ", " << eq[i].y << ", " << eq[i].z << ") eigenvalues";
                for (auto z : sorted) os << ' ' << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << 'i';
                os << '\n';
                break;
        }
    }
    if (cfg.output == OutputFormat::Json) os << arr.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lorenz system: trajectories, Lyapunov exponents and dimension, theorem conditions", "lyapdim"};
    app.require_subcommand(1);
    RawOptions raw;

    auto add_common = [&raw](CLI::App* sub) {
        sub->add_option("--params", raw.params, "sigma,r,b; rationals such as 8/3 accepted");
        sub->add_option("--sigma", raw.sigma, "override sigma");
        sub->add_option("--r", raw.r, "override r");
        sub->add_option("--b", raw.b, "override b");
        sub->add_option("--output", raw.output, "text, csv or json");
        sub->add_option("--out", raw.out_path, "write data to this file instead of stdout");
        sub->add_option("--threads", raw.threads, "worker threads (default: LYAPDIM_THREADS or 1)");
    };
    auto add_integration = [&raw](CLI::App* sub) {
        sub->add_option("--from", raw.from, "s0, s1, s2 (offset 1e-3), random, or x,y,z");
        sub->add_option("--horizon", raw.horizon, "integration time after the transient");
        sub->add_option("--transient", raw.transient, "time discarded before accumulation");
        sub->add_option("--step", raw.step, "integrator step");
        sub->add_option("--method", raw.method, "rk4 or dopri45");
        sub->add_option("--seed", raw.seed, "seed for random starts");
    };

    auto* simulate = app.add_subcommand("simulate", "integrate a trajectory and write t,x,y,z rows");
    add_common(simulate);
    add_integration(simulate);
    simulate->add_option("--stride", raw.stride, "write every n-th step");

    auto* les = app.add_subcommand("les", "finite-time Lyapunov exponents");
    add_common(les);
    add_integration(les);
    les->add_option("--estimator", raw.estimator, "qr or svd");

    auto* dim = app.add_subcommand("dim", "local Lyapunov dimension");
    add_common(dim);
    add_integration(dim);
    dim->add_option("--grid", raw.grid, "maximise over this many absorbing-ball seeds");

    auto* check = app.add_subcommand("check", "evaluate the theorem's parameter conditions");
    add_common(check);

    auto* certify = app.add_subcommand("certify", "construct and verify the Lyapunov-type certificate");
    add_common(certify);
    certify->add_option("--samples", raw.samples, "sample points for the R <= 0 check");

    auto* scan = app.add_subcommand("scan", "classify a parameter plane");
    add_common(scan);
    scan->add_option("--fixed", raw.fixed, "fixed parameter, e.g. r=28");
    scan->add_option("--axis1", raw.axis1, "outer axis, e.g. sigma=0:20:100");
    scan->add_option("--axis2", raw.axis2, "inner axis, e.g. b=0:8:100");

    auto* eq = app.add_subcommand("equilibria", "equilibria and their Jacobian eigenvalues");
    add_common(eq);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(make_config(raw, 100.0, 0.0, OutputFormat::Csv), raw.from, raw.stride, out);
        if (les->parsed()) return cmd_les(make_config(raw, 1000.0, 100.0, OutputFormat::Text), raw.from, raw.estimator, out);
        if (dim->parsed()) return cmd_dim(make_config(raw, 1000.0, 100.0, OutputFormat::Text), raw.from, raw.grid, out);
        if (check->parsed()) return cmd_check(make_config(raw, 1.0, 0.0, OutputFormat::Text), out);
        if (certify->parsed()) return cmd_certify(make_config(raw, 1.0, 0.0, OutputFormat::Text), raw.samples, out, err);
        if (scan->parsed()) {
            const RunConfig cfg = make_config(raw, 1.0, 0.0, OutputFormat::Csv);
            return cmd_scan(cfg, parse_scan_request(raw), out);
        }
        if (eq->parsed()) return cmd_equilibria(make_config(raw, 1.0, 0.0, OutputFormat::Text), out);
    } catch (const NonFiniteState& e) {
        err << "error: " << e.what() << '\n';
        return kNonFinite;
    } catch (const OverflowRisk& e) {
        err << "error: " << e.what() << '\n';
        return kNonFinite;
    } catch (const NoCertificate& e) {
        err << "error: " << e.what() << '\n';
        return kNoCertificate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace lyapdim::cli
