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

// Physical parameters of the cavity / NV / 13C transfer model and the
// quantities derived from them.
//
// Frequencies are plain numbers in one angular-frequency unit; times are in
// the reciprocal unit. The reference configuration keeps the published
// numerals (kappa = 1000, H = -32.02, omega1 = 2, omega2 = 0.008).

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qstsim/error.hpp"

namespace qstsim {

struct ModelParams {
    // Effective-model symbols.
    double kappa = 0.0;   ///< dressed cavity-NV coupling
    double h = 0.0;       ///< NV-carbon flip coupling H (may be negative)
    double omega1 = 0.0;  ///< detuning Delta_1 = omega_c - omega_0 - Omega
    double omega2 = 0.0;  ///< detuning Delta_2 = omega_0 + omega'_13C - Omega
    double theta = 0.0;   ///< initial-state mixing angle, radians in [0, pi/2]
    double k1 = 0.0;      ///< cavity decay constant
    double k2 = 0.0;      ///< carbon decay constant

    // Upstream symbols, only needed by the full-system builders.
    std::optional<double> omega_nv;
    std::optional<double> omega_c;
    std::optional<double> omega_0;
    std::optional<double> g;
    std::optional<double> lambda_drive;
    std::optional<double> omega_dressed;  ///< dressed splitting Omega
    std::optional<double> eta;            ///< dressed mixing angle
    std::optional<double> omega_c13;
    std::optional<double> c_par_raw;      ///< C_parallel
    std::optional<double> c_perp_raw;     ///< C_perp
    std::optional<double> theta_nv_axis;  ///< NV axis vs vacancy-carbon axis angle
    std::optional<double> b_field;
    // High-field-dropped hyperfine terms; restorable in build_hyperfine only.
    std::optional<double> c_r;
    std::optional<double> c_delta;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Name/value access to every ModelParams field, keyed by its serialized name.
struct ParamField {
    std::string_view name;
    bool optional;
    std::function<std::optional<double>(const ModelParams&)> get;
    std::function<void(ModelParams&, std::optional<double>)> set;
};

inline const std::vector<ParamField>& param_fields() {
    static const std::vector<ParamField> fields = [] {
        std::vector<ParamField> f;
        auto required = [&f](std::string_view name, double ModelParams::*member) {
            f.push_back({name, false,
                         [member](const ModelParams& p) { return std::optional<double>(p.*member); },
                         [member, name](ModelParams& p, std::optional<double> v) {
                             if (!v) throw ParameterError(std::string(name), "value required");
                             p.*member = *v;
                         }});
        };
        auto optional = [&f](std::string_view name, std::optional<double> ModelParams::*member) {
            f.push_back({name, true, [member](const ModelParams& p) { return p.*member; },
                         [member](ModelParams& p, std::optional<double> v) { p.*member = v; }});
        };
        required("kappa", &ModelParams::kappa);
        required("H", &ModelParams::h);
        required("omega1", &ModelParams::omega1);
        required("omega2", &ModelParams::omega2);
        required("theta", &ModelParams::theta);
        required("k1", &ModelParams::k1);
        required("k2", &ModelParams::k2);
        optional("omega_nv", &ModelParams::omega_nv);
        optional("omega_c", &ModelParams::omega_c);
        optional("omega_0", &ModelParams::omega_0);
        optional("g", &ModelParams::g);
        optional("lambda_drive", &ModelParams::lambda_drive);
        optional("Omega_dressed", &ModelParams::omega_dressed);
        optional("eta", &ModelParams::eta);
        optional("omega_c13", &ModelParams::omega_c13);
        optional("c_par_raw", &ModelParams::c_par_raw);
        optional("c_perp_raw", &ModelParams::c_perp_raw);
        optional("theta_nv_axis", &ModelParams::theta_nv_axis);
        optional("B_field", &ModelParams::b_field);
        optional("c_r", &ModelParams::c_r);
        optional("c_delta", &ModelParams::c_delta);
        return f;
    }();
    return fields;
}

inline const ParamField& param_field(std::string_view name) {
    for (const auto& f : param_fields()) {
        if (f.name == name) return f;
    }
    throw ParameterError(std::string(name), "not a ModelParams field");
}

inline double require_symbol(const std::optional<double>& v, std::string_view name) {
    if (!v) throw ParameterError(std::string(name), "missing (required by this builder)");
    return *v;
}

/// Range checks shared by every consumer: finite values, k1, k2 >= 0,
/// theta in [0, pi/2].
inline void validate(const ModelParams& p) {
    for (const auto& f : param_fields()) {
        if (auto v = f.get(p); v && !std::isfinite(*v)) {
            throw ParameterError(std::string(f.name), "must be finite");
        }
    }
    if (p.k1 < 0.0) throw ParameterError("k1", "decay constant must be >= 0");
    if (p.k2 < 0.0) throw ParameterError("k2", "decay constant must be >= 0");
    if (p.theta < 0.0 || p.theta > std::numbers::pi / 2 + 1e-15) {
        throw ParameterError("theta", "must lie in [0, pi/2]");
    }
}

// ---------------------------------------------------------------------------
// Hyperfine geometry

struct HyperfineCoefficients {
    double c_par_theta = 0.0;
    double c_perp_theta = 0.0;
};

/// Angle-dependent hyperfine coefficients C_par(theta), C_perp(theta).
inline HyperfineCoefficients hyperfine_coefficients(double c_par, double c_perp,
                                                    double theta_axis) {
    const double c2 = std::cos(theta_axis) * std::cos(theta_axis);
    const double s2 = std::sin(theta_axis) * std::sin(theta_axis);
    return {c_par * c2 + c_perp * s2, 0.5 * (c_perp * (1.0 + c2) + c_par * s2)};
}

/// Hyperfine coefficients from the optional raw symbols of `p`.
inline HyperfineCoefficients hyperfine_coefficients(const ModelParams& p) {
    return hyperfine_coefficients(require_symbol(p.c_par_raw, "c_par_raw"),
                                  require_symbol(p.c_perp_raw, "c_perp_raw"),
                                  require_symbol(p.theta_nv_axis, "theta_nv_axis"));
}

/// Effective flip coupling H = -(C_perp(theta)/2) sin^2(eta/2).
inline double coupling_h(double c_perp_theta, double eta) {
    const double s = std::sin(0.5 * eta);
    return -0.5 * c_perp_theta * s * s;
}

// ---------------------------------------------------------------------------
// Derived quantities of the effective model

struct EffectiveParams {
    double omega12 = 0.0;       ///< 2 w1 w2 / (w1 + w2)
    double delta12 = 0.0;       ///< w1 - w2
    double stark_cavity = 0.0;  ///< kappa^2 / (4 w1)
    double stark_carbon = 0.0;  ///< H^2 / w2
    double flip = 0.0;          ///< kappa H / (2 w12), the cavity-carbon exchange element
    double delta_h = 0.0;       ///< stark_carbon - stark_cavity; zero at resonance
    double big_d = 0.0;         ///< half the eigenvalue splitting
    double phase_c = 0.0;       ///< -kappa^2/(8 w1) - H^2/(2 w2)
    double t_star = 0.0;        ///< (pi/2) / D; +inf when D = 0
};

inline EffectiveParams effective_params(const ModelParams& p) {
    if (p.omega1 == 0.0) throw ParameterError("omega1", "zero detuning (division by zero)");
    if (p.omega2 == 0.0) throw ParameterError("omega2", "zero detuning (division by zero)");
    if (p.omega1 + p.omega2 == 0.0) {
        throw ParameterError("omega1+omega2", "harmonic-mean detuning undefined");
    }
    const double k = p.kappa;
    const double hh = p.h;
    const double w1 = p.omega1;
    const double w2 = p.omega2;

    EffectiveParams e;
    e.omega12 = 2.0 * w1 * w2 / (w1 + w2);
    e.delta12 = w1 - w2;
    e.stark_cavity = k * k / (4.0 * w1);
    e.stark_carbon = hh * hh / w2;
    e.flip = k * hh / (2.0 * e.omega12);
    e.delta_h = e.stark_carbon - e.stark_cavity;

    const double k2 = k * k;
    const double h2 = hh * hh;
    const double radicand = k2 * k2 / (64.0 * w1 * w1) - k2 * h2 / (8.0 * w1 * w2) +
                            k2 * h2 / (4.0 * e.omega12 * e.omega12) + h2 * h2 / (4.0 * w2 * w2);
    if (radicand < 0.0) {
        throw RegimeError("non-oscillatory regime: D radicand = " + std::to_string(radicand) +
                          " < 0");
    }
    e.big_d = std::sqrt(radicand);
    e.phase_c = -k2 / (8.0 * w1) - h2 / (2.0 * w2);
    e.t_star = e.big_d > 0.0 ? 0.5 * std::numbers::pi / e.big_d
                             : std::numeric_limits<double>::infinity();
    return e;
}

/// |Delta_h| relative to the cavity Stark shift; 0 at exact resonance.
inline double resonance_mismatch(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);
    const double scale = std::abs(e.stark_cavity) > 0.0 ? std::abs(e.stark_cavity)
                                                        : std::abs(e.stark_carbon);
    return scale > 0.0 ? std::abs(e.delta_h) / scale : 0.0;
}

enum class ResonanceFree { kappa, h, omega1, omega2 };

/// Solve H^2 / w2 = kappa^2 / (4 w1) for the chosen symbol, keeping the other
/// three fixed. Signs of kappa and H are preserved.
inline ModelParams solve_resonance(ModelParams p, ResonanceFree free) {
    auto nonzero = [](double v, const char* name) {
        if (v == 0.0) throw ParameterError(name, "must be nonzero for this resonance solve");
    };
    switch (free) {
        case ResonanceFree::omega2:
            nonzero(p.kappa, "kappa");
            nonzero(p.omega1, "omega1");
            p.omega2 = 4.0 * p.omega1 * p.h * p.h / (p.kappa * p.kappa);
            nonzero(p.omega2, "omega2");
            break;
        case ResonanceFree::omega1:
            nonzero(p.h, "H");
            nonzero(p.omega2, "omega2");
            p.omega1 = p.kappa * p.kappa * p.omega2 / (4.0 * p.h * p.h);
            nonzero(p.omega1, "omega1");
            break;
        case ResonanceFree::kappa: {
            nonzero(p.omega1, "omega1");
            nonzero(p.omega2, "omega2");
            const double k2 = 4.0 * p.omega1 * p.h * p.h / p.omega2;
            if (k2 < 0.0) {
                throw ParameterError("kappa", "no real solution: omega1 and omega2 differ in sign");
            }
            p.kappa = std::copysign(std::sqrt(k2), p.kappa);
            break;
        }
        case ResonanceFree::h: {
            nonzero(p.omega1, "omega1");
            nonzero(p.omega2, "omega2");
            const double h2 = p.kappa * p.kappa * p.omega2 / (4.0 * p.omega1);
            if (h2 < 0.0) {
                throw ParameterError("H", "no real solution: omega1 and omega2 differ in sign");
            }
            p.h = std::copysign(std::sqrt(h2), p.h);
            break;
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Reference configurations

/// The published parameter set, stored verbatim.
inline ModelParams paper_params(double theta = std::numbers::pi / 6) {
    ModelParams p;
    p.kappa = 1000.0;
    p.h = -32.02;
    p.omega1 = 2.0;
    p.omega2 = 0.008;
    p.theta = theta;
    return p;
}

/// Published kappa, H, omega1 with omega2 chosen to satisfy the resonance condition.
inline ModelParams resonant_params(double theta = std::numbers::pi / 6) {
    return solve_resonance(paper_params(theta), ResonanceFree::omega2);
}

/// Dispersive test configuration: w1 = w2 = 1, kappa = scale, H = -scale/2.
/// Exactly resonant with Delta_12 = 0, kappa/w1 = scale and |H|/w2 = scale/2.
/// Hyperfine geometry is zeroed, so the RWA S_z I_z shift vanishes.
inline ModelParams dispersive_params(double scale, double theta = std::numbers::pi / 4) {
    ModelParams p;
    p.kappa = scale;
    p.h = -0.5 * scale;
    p.omega1 = 1.0;
    p.omega2 = 1.0;
    p.theta = theta;
    p.c_par_raw = 0.0;
    p.c_perp_raw = 0.0;
    p.theta_nv_axis = 0.0;
    p.eta = 0.0;
    return p;
}

}  // namespace qstsim
