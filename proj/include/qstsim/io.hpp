// Copyright 2026 The qstsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario configuration parsing and time-series serialization.

#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qstsim/analytic.hpp"
#include "qstsim/dynamics.hpp"
#include "qstsim/error.hpp"
#include "qstsim/model.hpp"

namespace qstsim {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Angles

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view s, std::string_view whole) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError("cannot parse angle '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace detail

/// Parses "0.5236", "pi", "pi/6", "2pi/3", "2*pi/3", "75deg", "75 deg".
inline double parse_angle(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (s.size() > 3 && s.substr(s.size() - 3) == "deg") {
        return detail::parse_number(s.substr(0, s.size() - 3), text) * std::numbers::pi / 180.0;
    }
    if (const auto pos = s.find("pi"); pos != std::string_view::npos) {
        std::string_view head = detail::trim(s.substr(0, pos));
        std::string_view tail = detail::trim(s.substr(pos + 2));
        if (!head.empty() && head.back() == '*') head = detail::trim(head.substr(0, head.size() - 1));
        const double factor = head.empty() ? 1.0 : detail::parse_number(head, text);
        double divisor = 1.0;
        if (!tail.empty()) {
            if (tail.front() != '/') throw ConfigError("cannot parse angle '" + std::string(text) + "'");
            divisor = detail::parse_number(tail.substr(1), text);
            if (divisor == 0.0) throw ConfigError("angle '" + std::string(text) + "' divides by zero");
        }
        return factor * std::numbers::pi / divisor;
    }
    return detail::parse_number(s, text);
}

inline double angle_from_json(const Json& j, std::string_view key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_angle(j.get<std::string>());
    throw ConfigError(std::string(key) + ": expected a number or an angle string");
}

// ---------------------------------------------------------------------------
// ModelParams <-> JSON

/// Every ModelParams field; absent optionals serialize as null.
inline Json params_to_json(const ModelParams& p) {
    Json j = Json::object();
    for (const auto& f : param_fields()) {
        const auto v = f.get(p);
        j[std::string(f.name)] = v ? Json(*v) : Json(nullptr);
    }
    return j;
}

/// Strict parse: unknown keys are rejected. kappa, H, omega1, omega2 are
/// required; theta, k1, k2 default to 0. Angle fields accept angle strings.
inline ModelParams params_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("params: expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& f : param_fields()) known = known || f.name == key;
        if (!known) throw ConfigError("params: unknown key '" + key + "'");
    }
    ModelParams p;
    for (const auto& f : param_fields()) {
        const std::string key(f.name);
        const bool angle = key == "theta" || key == "theta_nv_axis" || key == "eta";
        if (!j.contains(key) || j.at(key).is_null()) {
            if (!f.optional && (key == "kappa" || key == "H" || key == "omega1" || key == "omega2")) {
                throw ConfigError("params: missing required key '" + key + "'");
            }
            if (f.optional) f.set(p, std::nullopt);
            continue;
        }
        const Json& v = j.at(key);
        double value = 0.0;
        if (angle) {
            value = angle_from_json(v, key);
        } else if (v.is_number()) {
            value = v.get<double>();
        } else {
            throw ConfigError("params: '" + key + "' must be a number");
        }
        f.set(p, value);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Scenario configuration

enum class OutputFormat { csv, json };

struct ScenarioConfig {
    ModelParams params;
    std::vector<Backend> backends{Backend::analytic};
    std::vector<double> theta_list;
    std::optional<double> t_final;  ///< unset = 2 t*
    std::size_t sample_count = 201;
    std::string output = "qst";
    OutputFormat format = OutputFormat::csv;
    ChannelType channel_type = ChannelType::lowering;
    std::optional<std::size_t> fixed_step;
    double tol = 1e-6;  ///< backend-agreement gate for compare
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    FidelityFrame fidelity_frame = FidelityFrame::lab;
};

inline std::vector<Backend> parse_backends(std::string_view name) {
    if (name == "all") {
        return {Backend::analytic, Backend::schrodinger, Backend::lindblad, Backend::nonhermitian};
    }
    return {backend_from_string(name)};
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline OutputFormat format_from_string(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("format must be csv or json, got '" + std::string(s) + "'");
}

inline std::string_view to_string(ChannelType c) {
    return c == ChannelType::lowering ? "lowering" : "dephasing";
}

inline ChannelType channel_from_string(std::string_view s) {
    if (s == "lowering") return ChannelType::lowering;
    if (s == "dephasing") return ChannelType::dephasing;
    throw ConfigError("channel_type must be lowering or dephasing, got '" + std::string(s) + "'");
}

inline std::string_view to_string(FidelityFrame f) {
    return f == FidelityFrame::lab ? "lab" : "phase_compensated";
}

inline FidelityFrame frame_from_string(std::string_view s) {
    if (s == "lab") return FidelityFrame::lab;
    if (s == "phase_compensated") return FidelityFrame::phase_compensated;
    throw ConfigError("fidelity_frame must be lab or phase_compensated, got '" + std::string(s) +
                      "'");
}

/// The four initial-state angles of the published figures.
inline std::vector<double> paper_thetas() {
    return {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3,
            75.0 * std::numbers::pi / 180.0};
}

namespace detail {

template <typename T>
T json_get(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

}  // namespace detail

inline ScenarioConfig config_from_json(const Json& j) {
    static const std::set<std::string> known = {
        "params",  "backend", "theta_list", "t_final", "sample_count", "output", "format",
        "channel_type", "fixed_step", "tol", "rel_tol", "abs_tol", "fidelity_frame"};
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    }
    if (!j.contains("params")) throw ConfigError("config: missing 'params'");

    ScenarioConfig c;
    c.params = params_from_json(j.at("params"));
    if (j.contains("backend")) c.backends = parse_backends(detail::json_get<std::string>(j, "backend"));
    if (j.contains("theta_list")) {
        const Json& list = j.at("theta_list");
        if (!list.is_array()) throw ConfigError("theta_list: expected an array");
        for (const auto& v : list) c.theta_list.push_back(angle_from_json(v, "theta_list"));
    } else {
        c.theta_list = {c.params.theta};
    }
    if (j.contains("t_final") && !j.at("t_final").is_null()) {
        c.t_final = detail::json_get<double>(j, "t_final");
    }
    if (j.contains("sample_count")) c.sample_count = detail::json_get<std::size_t>(j, "sample_count");
    if (j.contains("output")) c.output = detail::json_get<std::string>(j, "output");
    if (j.contains("format")) c.format = format_from_string(detail::json_get<std::string>(j, "format"));
    if (j.contains("channel_type")) {
        c.channel_type = channel_from_string(detail::json_get<std::string>(j, "channel_type"));
    }
    if (j.contains("fixed_step") && !j.at("fixed_step").is_null()) {
        c.fixed_step = detail::json_get<std::size_t>(j, "fixed_step");
    }
    if (j.contains("tol")) c.tol = detail::json_get<double>(j, "tol");
    if (j.contains("rel_tol")) c.rel_tol = detail::json_get<double>(j, "rel_tol");
    if (j.contains("abs_tol")) c.abs_tol = detail::json_get<double>(j, "abs_tol");
    if (j.contains("fidelity_frame")) {
        c.fidelity_frame = frame_from_string(detail::json_get<std::string>(j, "fidelity_frame"));
    }

    validate(c.params);
    if (c.theta_list.empty()) throw ConfigError("theta_list must not be empty");
    for (double th : c.theta_list) {
        ModelParams probe = c.params;
        probe.theta = th;
        validate(probe);
    }
    if (c.t_final && !(*c.t_final > 0.0)) throw ConfigError("t_final must be > 0");
    if (c.sample_count < 2) throw ConfigError("sample_count must be >= 2");
    if (c.fixed_step && *c.fixed_step == 0) throw ConfigError("fixed_step must be >= 1");
    return c;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

inline Json config_to_json(const ScenarioConfig& c) {
    Json j;
    j["params"] = params_to_json(c.params);
    if (c.backends.size() == 4) {
        j["backend"] = "all";
    } else {
        j["backend"] = std::string(to_string(c.backends.front()));
    }
    j["theta_list"] = c.theta_list;
    j["t_final"] = c.t_final ? Json(*c.t_final) : Json(nullptr);
    j["sample_count"] = c.sample_count;
    j["output"] = c.output;
    j["format"] = std::string(to_string(c.format));
    j["channel_type"] = std::string(to_string(c.channel_type));
    j["fixed_step"] = c.fixed_step ? Json(*c.fixed_step) : Json(nullptr);
    j["tol"] = c.tol;
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    j["fidelity_frame"] = std::string(to_string(c.fidelity_frame));
    return j;
}

// ---------------------------------------------------------------------------
// Time series emission

/// Populations of |00>, |10>, |01>, |11> (cavity, carbon) in CSV column order
/// P0..P3, read from a series on the [cavity(F), carbon] space.
inline std::array<double, 4> effective_columns(const TimeSeries& s, std::size_t k) {
    if (s.dims.subsystems() != 2 || s.dims[1] != 2) {
        throw DimensionError("CSV columns need a [cavity, carbon] series, got " + s.dims.to_string());
    }
    const auto& pop = s.populations.at(k);
    auto at = [&](std::size_t n, std::size_t c) {
        const std::size_t d[] = {n, c};
        return pop[s.dims.flat_index(d)];
    };
    return {at(0, 0), at(1, 0), at(0, 1), at(1, 1)};
}

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Header `t,P0,P1,P2,P3[,F]`, 12 significant digits.
inline std::string to_csv(const TimeSeries& s) {
    std::ostringstream out;
    out << "t,P0,P1,P2,P3";
    if (s.fidelity) out << ",F";
    out << '\n';
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const auto p = effective_columns(s, k);
        out << format_number(s.times[k]);
        for (double v : p) out << ',' << format_number(v);
        if (s.fidelity) out << ',' << format_number(s.fidelity->at(k));
        out << '\n';
    }
    return out.str();
}

namespace detail {

inline Json complex_array(const std::vector<Complex>& v) {
    Json arr = Json::array();
    for (const Complex& c : v) arr.push_back({c.real(), c.imag()});
    return arr;
}

inline std::vector<Complex> complex_vector(const Json& arr) {
    std::vector<Complex> out;
    for (const auto& c : arr) out.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    return out;
}

}  // namespace detail

inline Json to_json(const TimeSeries& s, const ModelParams& params) {
    Json j;
    j["backend"] = std::string(to_string(s.backend));
    j["dims"] = std::vector<std::size_t>(s.dims.dims().begin(), s.dims.dims().end());
    j["times"] = s.times;
    j["populations"] = s.populations;
    j["norms"] = s.norms;
    j["fidelity"] = s.fidelity ? Json(*s.fidelity) : Json(nullptr);
    Json amps = Json::array();
    for (const auto& row : s.amplitudes) amps.push_back(detail::complex_array(row));
    j["amplitudes"] = std::move(amps);
    Json dens = Json::array();
    for (const auto& rho : s.densities) {
        std::vector<Complex> flat(rho.matrix().data(), rho.matrix().data() + rho.matrix().size());
        dens.push_back(detail::complex_array(flat));
    }
    j["densities"] = std::move(dens);
    j["params"] = params_to_json(params);
    return j;
}

struct LoadedSeries {
    TimeSeries series;
    ModelParams params;
};

inline LoadedSeries timeseries_from_json(const Json& j) {
    try {
        LoadedSeries out;
        TimeSeries& s = out.series;
        s.backend = backend_from_string(j.at("backend").get<std::string>());
        s.dims = HilbertDims(j.at("dims").get<std::vector<std::size_t>>());
        s.times = j.at("times").get<std::vector<double>>();
        s.populations = j.at("populations").get<std::vector<std::vector<double>>>();
        s.norms = j.at("norms").get<std::vector<double>>();
        if (!j.at("fidelity").is_null()) s.fidelity = j.at("fidelity").get<std::vector<double>>();
        for (const auto& row : j.at("amplitudes")) s.amplitudes.push_back(detail::complex_vector(row));
        const auto d = static_cast<Eigen::Index>(s.dims.total());
        for (const auto& flat : j.at("densities")) {
            const auto v = detail::complex_vector(flat);
            if (static_cast<Eigen::Index>(v.size()) != d * d) {
                throw ConfigError("density entry has wrong size");
            }
            s.densities.emplace_back(s.dims, Eigen::Map<const Matrix>(v.data(), d, d), 1e-6);
        }
        out.params = params_from_json(j.at("params"));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("time series JSON: ") + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

/// Writes `series` to `path`. CSV output is accompanied by `<path>.params.json`
/// holding the full scenario and parameter echo.
inline void emit(const TimeSeries& series, OutputFormat format, const std::string& path,
                 const ModelParams& params, const Json& scenario_echo = Json::object()) {
    if (format == OutputFormat::csv) {
        write_text(path, to_csv(series));
        Json side;
        side["params"] = params_to_json(params);
        side["backend"] = std::string(to_string(series.backend));
        side["scenario"] = scenario_echo;
        write_text(path + ".params.json", side.dump(2) + "\n");
    } else {
        Json j = to_json(series, params);
        j["scenario"] = scenario_echo;
        write_text(path, j.dump() + "\n");
    }
}

}  // namespace qstsim
