#pragma once

// JSON and CSV encodings of the public result types.

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "lyapdim/lyap.hpp"
#include "lyapdim/model.hpp"
#include "lyapdim/scan.hpp"
#include "lyapdim/theory.hpp"

namespace lyapdim {

/// Verdict tags used in scan files: "formula", "equilibria", "fail".
inline std::string_view verdict_tag(Outcome o) {
    switch (o) {
        case Outcome::FormulaHolds: return "formula";
        case Outcome::ConvergesToEquilibria: return "equilibria";
        case Outcome::ConditionsFail: return "fail";
    }
    return "fail";
}

inline Outcome verdict_from_tag(std::string_view tag) {
    if (tag == "formula") return Outcome::FormulaHolds;
    if (tag == "equilibria") return Outcome::ConvergesToEquilibria;
    if (tag == "fail") return Outcome::ConditionsFail;
    throw std::invalid_argument("unknown verdict tag '" + std::string(tag) + "'");
}

inline void to_json(nlohmann::json& j, const StateVec& s) { j = nlohmann::json::array({s.x, s.y, s.z}); }
inline void from_json(const nlohmann::json& j, StateVec& s) {
    s = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline void to_json(nlohmann::json& j, const ScanCell& c) {
    j = {{"axis1", c.axis1_value}, {"axis2", c.axis2_value}, {"verdict", verdict_tag(c.verdict)}};
    j["bound"] = c.bound ? nlohmann::json(*c.bound) : nlohmann::json(nullptr);
}
inline void from_json(const nlohmann::json& j, ScanCell& c) {
    c.axis1_value = j.at("axis1").get<double>();
    c.axis2_value = j.at("axis2").get<double>();
    c.verdict = verdict_from_tag(j.at("verdict").get<std::string>());
    if (j.contains("bound") && !j.at("bound").is_null())
        c.bound = j.at("bound").get<double>();
    else
        c.bound.reset();
}

inline void to_json(nlohmann::json& j, const LeSpectrum& s) {
    j = {{"exponents", s.exponents}, {"horizon", s.horizon}, {"transient_discarded", s.transient_discarded}};
}
inline void from_json(const nlohmann::json& j, LeSpectrum& s) {
    s.exponents = j.at("exponents").get<std::array<double, 3>>();
    s.horizon = j.at("horizon").get<double>();
    s.transient_discarded = j.at("transient_discarded").get<double>();
}

inline void to_json(nlohmann::json& j, const FiniteTimeDim& d) {
    j = {{"j", d.j}, {"fraction", d.fraction}, {"value", d.value}, {"degenerate", d.degenerate}};
}
inline void from_json(const nlohmann::json& j, FiniteTimeDim& d) {
    d.j = j.at("j").get<int>();
    d.fraction = j.at("fraction").get<double>();
    d.value = j.at("value").get<double>();
    d.degenerate = j.value("degenerate", false);
}

inline void to_json(nlohmann::json& j, const GammaCertificate& c) {
    j = {{"gamma1", c.gamma1}, {"gamma2", c.gamma2}, {"gamma3", c.gamma3}, {"gamma4", c.gamma4},
         {"rho", c.rho},       {"s0", c.s0},         {"branch", to_string(c.branch)}};
}
inline void from_json(const nlohmann::json& j, GammaCertificate& c) {
    c.gamma1 = j.at("gamma1").get<double>();
    c.gamma2 = j.at("gamma2").get<double>();
    c.gamma3 = j.at("gamma3").get<double>();
    c.gamma4 = j.at("gamma4").get<double>();
    c.rho = j.at("rho").get<double>();
    c.s0 = j.at("s0").get<double>();
    const auto branch = j.at("branch").get<std::string>();
    if (branch == "gamma2_zero")
        c.branch = CertificateBranch::Gamma2Zero;
    else if (branch == "gamma2_positive")
        c.branch = CertificateBranch::Gamma2Positive;
    else
        throw std::invalid_argument("unknown certificate branch '" + branch + "'");
}

inline void to_json(nlohmann::json& j, const TheoremVerdict& v) {
    j["outcome"] = to_string(v.outcome);
    j["branch"] = to_string(v.branch);
    j["bound"] = v.bound ? nlohmann::json(*v.bound) : nlohmann::json(nullptr);
    j["case_boundary"] = v.case_boundary;
    auto& sat = j["satisfied"] = nlohmann::json::array();
    for (auto id : v.satisfied) sat.push_back(label(id));
    auto& checks = j["conditions"] = nlohmann::json::array();
    for (const auto& c : v.checks) {
        nlohmann::json e = {{"id", label(c.id)}, {"relation", c.relation}, {"holds", c.holds}};
        // NaN (no real root) is written as null.
        e["lhs"] = std::isfinite(c.lhs) ? nlohmann::json(c.lhs) : nlohmann::json(nullptr);
        e["rhs"] = c.rhs;
        if (c.lower) e["lower"] = *c.lower;
        checks.push_back(std::move(e));
    }
}

inline void to_json(nlohmann::json& j, const RCheckReport& r) {
    j = {{"max_r", r.max_r},
         {"argmax", r.argmax},
         {"samples", r.samples},
         {"a1_nonpositive", r.a1_ok},
         {"b3_negative", r.b3_ok},
         {"a_block", r.a_block_ok},
         {"b_block", r.b_block_ok},
         {"reduced_system", r.reduced_system}};
}

inline void to_json(nlohmann::json& j, const SeedReport& s) {
    j = {{"initial", s.initial}, {"final", s.final_state}, {"captured", s.captured},
         {"equilibrium", s.equilibrium}, {"final_distance", s.final_distance}, {"diverged", s.diverged}};
    j["largest_le"] = s.largest_le ? nlohmann::json(*s.largest_le) : nlohmann::json(nullptr);
    j["capture_time"] = s.capture_time ? nlohmann::json(*s.capture_time) : nlohmann::json(nullptr);
}

/// Parses a decimal number or a rational "p/q" such as "8/3".
inline double parse_real(std::string_view text) {
    auto whole = [](std::string_view t) {
        const std::string s(t);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + s + "'");
        }
        if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return whole(text);
    const double den = whole(text.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return whole(text.substr(0, slash)) / den;
}

/// Comma-separated list of reals, each accepted by parse_real.
inline std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        out.push_back(parse_real(text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// "sigma,r,b", e.g. "10,28,8/3".
inline SystemParams parse_params(std::string_view text) {
    const auto v = parse_real_list(text);
    if (v.size() != 3) throw std::invalid_argument("parameters must be a triple sigma,r,b");
    return {v[0], v[1], v[2]};
}

/// Round-trip precision for doubles in CSV output.
inline constexpr int kCsvPrecision = std::numeric_limits<double>::max_digits10;

/// Header `axis1,axis2,verdict,bound`; bound is empty when absent.
inline void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells) {
    os << "axis1,axis2,verdict,bound\n";
    os << std::setprecision(kCsvPrecision);
    for (const auto& c : cells) {
        os << c.axis1_value << ',' << c.axis2_value << ',' << verdict_tag(c.verdict) << ',';
        if (c.bound) os << *c.bound;
        os << '\n';
    }
}

inline std::vector<ScanCell> read_scan_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "axis1,axis2,verdict,bound")
        throw std::invalid_argument("scan CSV must start with header axis1,axis2,verdict,bound");
    std::vector<ScanCell> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 4) throw std::invalid_argument("malformed scan CSV row: " + line);
        ScanCell c;
        c.axis1_value = std::stod(f[0]);
        c.axis2_value = std::stod(f[1]);
        c.verdict = verdict_from_tag(f[2]);
        if (!f[3].empty()) c.bound = std::stod(f[3]);
        out.push_back(c);
    }
    return out;
}

inline void write_scan_json(std::ostream& os, const std::vector<ScanCell>& cells) {
    os << nlohmann::json(cells).dump(2) << '\n';
}

}  // namespace lyapdim
