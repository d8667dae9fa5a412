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

// Batch execution: per-angle simulations across backends, decay-constant
// calibration against a target fidelity, and parameter sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "qstsim/analytic.hpp"
#include "qstsim/dynamics.hpp"
#include "qstsim/hamiltonian.hpp"
#include "qstsim/io.hpp"
#include "qstsim/model.hpp"

namespace qstsim {

/// Transfer time quoted for the published runs.
inline constexpr double kPublishedTransferTime = 1.603e-6;

/// Relative |Delta_h| below which the decaying closed form is exact.
inline constexpr double kResonanceTol = 1e-6;

inline bool is_resonant(const ModelParams& p, double rel_tol = kResonanceTol) {
    return resonance_mismatch(p) <= rel_tol;
}

struct SolverTolerances {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::optional<std::size_t> fixed_step;
};

namespace detail {

inline EvolutionSpec effective_spec(const ModelParams& p, Backend backend, double t_final,
                                    std::size_t samples, ChannelType channel,
                                    const SolverTolerances& tol) {
    const bool decaying = backend == Backend::nonhermitian;
    EvolutionSpec spec{decaying ? build_effective_dephasing(p) : build_effective(p),
                       effective_initial_state(p.theta),
                       t_final,
                       samples,
                       tol.rel_tol,
                       tol.abs_tol,
                       {},
                       tol.fixed_step,
                       {}};
    if (backend == Backend::lindblad) spec.collapse_ops = effective_collapse_ops(p, channel);
    return spec;
}

}  // namespace detail

/// Samples the effective model for one backend on a uniform grid over
/// [0, t_final] and attaches the lab-frame conditional fidelity (or the
/// requested frame).
inline TimeSeries simulate_effective(const ModelParams& p, Backend backend, double t_final,
                                     std::size_t samples,
                                     ChannelType channel = ChannelType::lowering,
                                     const SolverTolerances& tol = {},
                                     FidelityFrame frame = FidelityFrame::lab) {
    validate(p);
    const EffectiveParams e = effective_params(p);
    TimeSeries s;
    if (backend == Backend::analytic) {
        const bool decaying = p.k1 != 0.0 || p.k2 != 0.0;
        s.backend = Backend::analytic;
        s.dims = HilbertDims{2, 2};
        s.times = uniform_times(t_final, samples);
        std::vector<double> f;
        for (double t : s.times) {
            const AmplitudeTriple m = decaying ? dephased_amplitudes(p, t) : amplitudes(p, t);
            const auto pops = m.populations();
            s.populations.emplace_back(pops.begin(), pops.end());
            const StateVector psi = m.to_state();
            s.amplitudes.emplace_back(psi.amplitudes().data(),
                                      psi.amplitudes().data() + psi.size());
            s.norms.push_back(m.norm_squared());
            f.push_back(fidelity_against_target(carbon_density(m), p.theta, frame, e.phase_c, t));
        }
        s.fidelity = std::move(f);
        return s;
    }
    const EvolutionSpec spec = detail::effective_spec(p, backend, t_final, samples, channel, tol);
    switch (backend) {
        case Backend::schrodinger: s = schrodinger_evolve(spec); break;
        case Backend::nonhermitian: s = nonhermitian_evolve(spec); break;
        case Backend::lindblad: s = lindblad_evolve(spec); break;
        case Backend::analytic: break;
    }
    s.fidelity = fidelity_series(s, p.theta, 1, frame, e.phase_c);
    return s;
}

/// Conditional fidelity at time t by the most accurate available route:
/// undecayed closed form when k1 = k2 = 0, decaying closed form at resonance,
/// non-Hermitian integration otherwise.
inline double transfer_fidelity(const ModelParams& p, double t,
                                FidelityFrame frame = FidelityFrame::lab,
                                const SolverTolerances& tol = {}) {
    if ((p.k1 == 0.0 && p.k2 == 0.0) || is_resonant(p)) {
        return conditional_fidelity(p, t, {frame, DephasedForm::corrected});
    }
    const TimeSeries s = simulate_effective(p, Backend::nonhermitian, t, 2,
                                            ChannelType::lowering, tol, frame);
    return s.fidelity->back();
}

// ---------------------------------------------------------------------------
// Run report

struct ThetaRecord {
    double theta = 0.0;
    Backend backend = Backend::analytic;
    double transfer_time = 0.0;         ///< argmin of P1 over samples t > 0
    double fidelity_at_transfer = 0.0;  ///< F at that sample
    double fidelity_at_tstar = 0.0;     ///< F at the formula t*
    std::optional<double> fidelity_renormalized_at_tstar;  ///< nonhermitian only
    double min_population = 0.0;
    double max_population = 0.0;
    std::string file;
};

struct AgreementDelta {
    double theta = 0.0;
    Backend reference = Backend::analytic;
    Backend backend = Backend::analytic;
    double max_delta = 0.0;  ///< max over samples and P0..P3
    bool gated = false;      ///< both sides model the same dynamics
};

struct CalibrationResult {
    double k = 0.0;  ///< recovered k1 = k2
    double k1 = 0.0;
    double k2 = 0.0;
    double target_fidelity = 0.0;
    double target_theta = 0.0;
    double achieved_fidelity = 0.0;
    double t_star = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::vector<std::pair<double, double>> fidelities;  ///< (theta, F(t*)) at the published angles
};

struct RunReport {
    ModelParams params;
    double t_star_formula = 0.0;
    double t_star_published = kPublishedTransferTime;
    std::vector<ThetaRecord> records;
    std::vector<AgreementDelta> deltas;
    std::optional<CalibrationResult> calibration;
    std::vector<std::string> warnings;

    /// False when a gated backend pair disagrees by more than tol.
    bool agreement_within(double tol) const {
        for (const auto& d : deltas) {
            if (d.gated && d.max_delta > tol) return false;
        }
        return true;
    }
};

inline Json to_json(const CalibrationResult& c) {
    Json j;
    j["k"] = c.k;
    j["k1"] = c.k1;
    j["k2"] = c.k2;
    j["target_fidelity"] = c.target_fidelity;
    j["target_theta"] = c.target_theta;
    j["achieved_fidelity"] = c.achieved_fidelity;
    j["t_star"] = c.t_star;
    j["bracket"] = {c.bracket_lo, c.bracket_hi};
    Json f = Json::array();
    for (const auto& [th, fid] : c.fidelities) f.push_back({{"theta", th}, {"fidelity", fid}});
    j["fidelities"] = std::move(f);
    return j;
}

inline Json to_json(const RunReport& r) {
    Json j;
    j["params"] = params_to_json(r.params);
    j["t_star_formula"] = r.t_star_formula;
    j["t_star_published"] = r.t_star_published;
    j["t_star_relative_gap"] = (r.t_star_published - r.t_star_formula) / r.t_star_published;
    Json recs = Json::array();
    for (const auto& rec : r.records) {
        Json x;
        x["theta"] = rec.theta;
        x["backend"] = std::string(to_string(rec.backend));
        x["transfer_time"] = rec.transfer_time;
        x["fidelity_at_transfer"] = rec.fidelity_at_transfer;
        x["fidelity_at_tstar"] = rec.fidelity_at_tstar;
        x["fidelity_renormalized_at_tstar"] = rec.fidelity_renormalized_at_tstar
                                                  ? Json(*rec.fidelity_renormalized_at_tstar)
                                                  : Json(nullptr);
        x["min_population"] = rec.min_population;
        x["max_population"] = rec.max_population;
        x["file"] = rec.file;
        recs.push_back(std::move(x));
    }
    j["records"] = std::move(recs);
    Json deltas = Json::array();
    for (const auto& d : r.deltas) {
        deltas.push_back({{"theta", d.theta},
                          {"reference", std::string(to_string(d.reference))},
                          {"backend", std::string(to_string(d.backend))},
                          {"max_delta", d.max_delta},
                          {"gated", d.gated}});
    }
    j["deltas"] = std::move(deltas);
    j["calibration"] = r.calibration ? to_json(*r.calibration) : Json(nullptr);
    j["warnings"] = r.warnings;
    return j;
}

/// Index of the smallest P1 among samples k >= 1.
inline std::size_t transfer_index(const TimeSeries& s) {
    std::size_t best = 1;
    double best_p1 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < s.times.size(); ++k) {
        const double p1 = effective_columns(s, k)[1];
        if (p1 < best_p1) {
            best_p1 = p1;
            best = k;
        }
    }
    return best;
}

inline double max_population_delta(const TimeSeries& a, const TimeSeries& b) {
    if (a.times.size() != b.times.size()) throw SolverError("series have different sample counts");
    double d = 0.0;
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        const auto pa = effective_columns(a, k);
        const auto pb = effective_columns(b, k);
        for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(pa[i] - pb[i]));
    }
    return d;
}

struct RunOptions {
    bool write_files = true;
    bool parallel = true;
};

inline std::string series_path(const ScenarioConfig& c, Backend b, std::size_t theta_index) {
    return c.output + "_" + std::string(to_string(b)) + "_theta" + std::to_string(theta_index) +
           "." + std::string(to_string(c.format));
}

/// Runs every (theta, backend) pair of the scenario, writes one series file per
/// pair and aggregates transfer times, fidelities and backend agreement.
inline RunReport run_scenario(const ScenarioConfig& config, RunOptions opts = {}) {
    validate(config.params);
    RunReport report;
    report.params = config.params;
    const EffectiveParams e = effective_params(config.params);
    report.t_star_formula = e.t_star;
    if (!std::isfinite(e.t_star) && !config.t_final) {
        throw RegimeError("no finite transfer time (D = 0); set t_final explicitly");
    }
    const double t_final = config.t_final.value_or(2.0 * e.t_star);
    const SolverTolerances tol{config.rel_tol, config.abs_tol, config.fixed_step};
    const bool decaying = config.params.k1 != 0.0 || config.params.k2 != 0.0;
    const bool resonant = is_resonant(config.params);

    if (decaying && !resonant &&
        std::find(config.backends.begin(), config.backends.end(), Backend::analytic) !=
            config.backends.end()) {
        if (auto w = dephased_accuracy_warning(config.params)) report.warnings.push_back(*w);
    }
    if (decaying && std::find(config.backends.begin(), config.backends.end(),
                              Backend::schrodinger) != config.backends.end()) {
        report.warnings.push_back("schrodinger backend ignores k1, k2 (closed evolution)");
    }

    struct Task {
        std::size_t theta_index;
        Backend backend;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < config.theta_list.size(); ++i) {
        for (Backend b : config.backends) tasks.push_back({i, b});
    }

    struct Outcome {
        TimeSeries series;
        ThetaRecord record;
    };
    const Json echo = config_to_json(config);
    auto run_task = [&](const Task& task) {
        ModelParams p = config.params;
        p.theta = config.theta_list[task.theta_index];
        Outcome out;
        try {
            out.series = simulate_effective(p, task.backend, t_final, config.sample_count,
                                            config.channel_type, tol, config.fidelity_frame);
        } catch (const Error& err) {
            throw SolverError("theta = " + std::to_string(p.theta) + ", backend " +
                              std::string(to_string(task.backend)) + ": " + err.what());
        }
        ThetaRecord& rec = out.record;
        rec.theta = p.theta;
        rec.backend = task.backend;
        const std::size_t k = transfer_index(out.series);
        rec.transfer_time = out.series.times[k];
        rec.fidelity_at_transfer = out.series.fidelity->at(k);
        rec.min_population = std::numeric_limits<double>::infinity();
        rec.max_population = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < out.series.times.size(); ++s) {
            for (double v : effective_columns(out.series, s)) {
                rec.min_population = std::min(rec.min_population, v);
                rec.max_population = std::max(rec.max_population, v);
            }
        }
        if (std::isfinite(e.t_star)) {
            const TimeSeries at = simulate_effective(p, task.backend, e.t_star, 2,
                                                     config.channel_type, tol,
                                                     config.fidelity_frame);
            rec.fidelity_at_tstar = at.fidelity->back();
            if (task.backend == Backend::nonhermitian) {
                rec.fidelity_renormalized_at_tstar =
                    fidelity_series(at, p.theta, 1, config.fidelity_frame, e.phase_c, true).back();
            }
        }
        if (opts.write_files) {
            rec.file = series_path(config, task.backend, task.theta_index);
            emit(out.series, config.format, rec.file, p, echo);
        }
        return out;
    };

    std::vector<Outcome> outcomes;
    if (opts.parallel && tasks.size() > 1) {
        std::vector<std::future<Outcome>> futures;
        for (const Task& t : tasks) futures.push_back(std::async(std::launch::async, run_task, t));
        for (auto& f : futures) outcomes.push_back(f.get());
    } else {
        for (const Task& t : tasks) outcomes.push_back(run_task(t));
    }

    for (const auto& o : outcomes) report.records.push_back(o.record);

    // Agreement against the analytic series (or the first backend when absent).
    for (std::size_t i = 0; i < config.theta_list.size(); ++i) {
        const Outcome* ref = nullptr;
        for (const auto& o : outcomes) {
            if (o.record.theta == config.theta_list[i] && o.record.backend == Backend::analytic) {
                ref = &o;
            }
        }
        if (!ref) {
            for (const auto& o : outcomes) {
                if (o.record.theta == config.theta_list[i]) {
                    ref = &o;
                    break;
                }
            }
        }
        for (const auto& o : outcomes) {
            if (o.record.theta != config.theta_list[i] || &o == ref) continue;
            AgreementDelta d;
            d.theta = config.theta_list[i];
            d.reference = ref->record.backend;
            d.backend = o.record.backend;
            d.max_delta = max_population_delta(ref->series, o.series);
            auto same_physics = [&](Backend b) {
                switch (b) {
                    case Backend::analytic: return !decaying || resonant;
                    case Backend::nonhermitian: return true;
                    case Backend::schrodinger:
                    case Backend::lindblad: return !decaying;
                }
                return false;
            };
            d.gated = same_physics(d.reference) && same_physics(d.backend) &&
                      (d.reference != Backend::nonhermitian || d.backend != Backend::analytic);
            report.deltas.push_back(d);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationOptions {
    FidelityFrame frame = FidelityFrame::lab;
    /// Upper end of the k search bracket; unset = 1 / t* (at most e^{-1/2}
    /// amplitude loss over one transfer).
    std::optional<double> k_max;
    double fidelity_tol = 1e-6;
    SolverTolerances solver{1e-11, 1e-13, std::nullopt};
};

/// At t* the conditional fidelity depends on k1 - k2 only at order
/// ((k1 - k2) / B')^2, so only k1 + k2 is identifiable from fidelity targets.
///
/// Finds k = k1 = k2 such that F(t*, target_theta) = target_fidelity, then
/// reports F(t*) at the published angles.
inline CalibrationResult calibrate_dephasing(const ModelParams& base, double target_fidelity,
                                             double target_theta,
                                             CalibrationOptions opts = {}) {
    validate(base);
    const EffectiveParams e = effective_params(base);
    if (!std::isfinite(e.t_star)) throw RegimeError("no finite transfer time (D = 0)");

    auto fidelity_for = [&](double k, double theta) {
        ModelParams p = base;
        p.k1 = k;
        p.k2 = k;
        p.theta = theta;
        return transfer_fidelity(p, e.t_star, opts.frame, opts.solver);
    };

    CalibrationResult r;
    r.target_fidelity = target_fidelity;
    r.target_theta = target_theta;
    r.t_star = e.t_star;
    r.bracket_lo = 0.0;
    r.bracket_hi = opts.k_max.value_or(1.0 / e.t_star);

    const double f_lo = fidelity_for(0.0, target_theta);
    const double f_hi = fidelity_for(r.bracket_hi, target_theta);
    if (std::abs(f_lo - target_fidelity) <= 1e-12) {
        r.k = 0.0;
    } else if (target_fidelity > f_lo || target_fidelity < f_hi) {
        throw CalibrationError("target fidelity " + std::to_string(target_fidelity) +
                               " unreachable for k in [" + std::to_string(r.bracket_lo) + ", " +
                               std::to_string(r.bracket_hi) + "]: F ranges over [" +
                               std::to_string(f_hi) + ", " + std::to_string(f_lo) + "]");
    } else {
        std::uintmax_t iters = 200;
        auto g = [&](double k) { return fidelity_for(k, target_theta) - target_fidelity; };
        const auto [a, b] = boost::math::tools::toms748_solve(
            g, r.bracket_lo, r.bracket_hi, f_lo - target_fidelity, f_hi - target_fidelity,
            [&](double x, double y) {
                return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)) ||
                       std::abs(g(0.5 * (x + y))) <= opts.fidelity_tol * 1e-3;
            },
            iters);
        r.k = 0.5 * (a + b);
    }
    r.k1 = r.k;
    r.k2 = r.k;
    r.achieved_fidelity = fidelity_for(r.k, target_theta);
    if (std::abs(r.achieved_fidelity - target_fidelity) > opts.fidelity_tol) {
        throw CalibrationError("calibration did not converge: F = " +
                               std::to_string(r.achieved_fidelity));
    }
    for (double th : paper_thetas()) r.fidelities.emplace_back(th, fidelity_for(r.k, th));
    return r;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    double value = 0.0;
    double transfer_time = 0.0;         ///< t* = (pi/2)/D
    double fidelity_at_transfer = 0.0;  ///< closed-form conditional fidelity at t*
    double m2_at_transfer = 0.0;        ///< |M2(t*)|
    double mismatch = 0.0;              ///< |Delta_h| / (kappa^2 / 4 w1)
    bool resonant = false;              ///< mismatch <= 0.01
    std::optional<std::string> error;
};

/// One row per grid point of `axis` over [lo, hi] using the closed forms.
inline std::vector<SweepRow> sweep(const ModelParams& base, const std::string& axis, double lo,
                                   double hi, std::size_t steps,
                                   FidelityFrame frame = FidelityFrame::lab) {
    const ParamField& field = param_field(axis);
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("sweep range must be finite");
    if (steps == 0) throw ConfigError("sweep needs at least one step");
    if (hi < lo) throw ConfigError("sweep range must satisfy lo <= hi");
    if (lo == hi) steps = 1;
    if (steps == 1 && lo != hi) throw ConfigError("degenerate grid: one step over a nonzero range");

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < steps; ++i) {
        SweepRow row;
        row.value = steps == 1 ? lo
                               : lo + (hi - lo) * static_cast<double>(i) /
                                          static_cast<double>(steps - 1);
        ModelParams p = base;
        field.set(p, row.value);
        try {
            validate(p);
            const EffectiveParams e = effective_params(p);
            row.transfer_time = e.t_star;
            row.mismatch = resonance_mismatch(p);
            row.resonant = row.mismatch <= 0.01;
            const bool decaying = p.k1 != 0.0 || p.k2 != 0.0;
            const AmplitudeTriple m =
                decaying ? dephased_amplitudes(p, e.t_star) : amplitudes(p, e.t_star);
            row.m2_at_transfer = std::abs(m.m2);
            row.fidelity_at_transfer =
                fidelity_against_target(carbon_density(m), p.theta, frame, e.phase_c, e.t_star);
        } catch (const Error& err) {
            row.error = err.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "value,transfer_time,fidelity,m2_abs,mismatch,resonant\n";
    for (const auto& r : rows) {
        if (r.error) {
            out += format_number(r.value) + ",nan,nan,nan,nan,0\n";
            continue;
        }
        out += format_number(r.value) + "," + format_number(r.transfer_time) + "," +
               format_number(r.fidelity_at_transfer) + "," + format_number(r.m2_at_transfer) +
               "," + format_number(r.mismatch) + "," + (r.resonant ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace qstsim
