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

// Numerical time evolution: Schrödinger, Lindblad master equation and
// non-Hermitian (no-jump) evolution, sampled on a uniform time grid.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qstsim/analytic.hpp"
#include "qstsim/hamiltonian.hpp"
#include "qstsim/linalg.hpp"
#include "qstsim/model.hpp"

namespace qstsim {

enum class Backend { analytic, schrodinger, lindblad, nonhermitian };

inline std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::analytic: return "analytic";
        case Backend::schrodinger: return "schrodinger";
        case Backend::lindblad: return "lindblad";
        case Backend::nonhermitian: return "nonhermitian";
    }
    return "?";
}

inline Backend backend_from_string(std::string_view s) {
    for (Backend b : {Backend::analytic, Backend::schrodinger, Backend::lindblad,
                      Backend::nonhermitian}) {
        if (to_string(b) == s) return b;
    }
    throw ConfigError("unknown backend '" + std::string(s) + "'");
}

/// Sampled evolution. `amplitudes` is filled for pure-state backends,
/// `densities` for the Lindblad backend.
struct TimeSeries {
    Backend backend = Backend::analytic;
    HilbertDims dims{1};
    std::vector<double> times;
    std::vector<std::vector<double>> populations;
    std::vector<std::vector<Complex>> amplitudes;
    std::vector<DensityMatrix> densities;
    std::vector<double> norms;  ///< |psi|^2 or Tr(rho) per sample
    std::optional<std::vector<double>> fidelity;
};

struct CollapseChannel {
    Operator op;
    double rate = 0.0;
};

struct EvolutionSpec {
    TimeDependentHamiltonian hamiltonian;
    std::variant<StateVector, DensityMatrix> initial;
    double t_final = 0.0;
    std::size_t sample_count = 2;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::vector<CollapseChannel> collapse_ops;
    /// RK4 substeps per sample interval; unset = adaptive DOPRI5.
    std::optional<std::size_t> fixed_steps;
    /// Allowed |norm(t) - norm(0)| for trace-preserving runs; unset = 10 * rel_tol.
    std::optional<double> max_norm_drift;
    std::size_t max_steps_per_sample = 100000;
};

inline std::vector<double> uniform_times(double t_final, std::size_t count) {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
        throw SolverError("t_final must be positive and finite");
    }
    if (count < 2) throw SolverError("sample_count must be >= 2");
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) {
        t[k] = t_final * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    t.back() = t_final;
    return t;
}

namespace detail {

namespace odeint = boost::numeric::odeint;
using OdeState = std::vector<Complex>;

inline void check_spec(const EvolutionSpec& spec) {
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0)) {
        throw SolverError("solver tolerances must be positive");
    }
    if (spec.fixed_steps && *spec.fixed_steps == 0) {
        throw SolverError("fixed step count must be >= 1");
    }
}

/// dpsi/dt = -i H(t) psi
struct PureRhs {
    const TimeDependentHamiltonian* h;
    Matrix buffer;

    void operator()(const OdeState& x, OdeState& dxdt, double t) {
        h->evaluate(t, buffer);
        const auto n = static_cast<Eigen::Index>(x.size());
        Eigen::Map<const Vector> psi(x.data(), n);
        Eigen::Map<Vector> out(dxdt.data(), n);
        out.noalias() = -kI * (buffer * psi);
    }
};

/// drho/dt = -i (H rho - rho H^dag) + sum_j L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho}
struct LindbladRhs {
    const TimeDependentHamiltonian* h;
    std::vector<Matrix> jumps;
    std::vector<Matrix> jump_products;
    Matrix buffer;

    void operator()(const OdeState& x, OdeState& dxdt, double t) {
        h->evaluate(t, buffer);
        const Eigen::Index d = buffer.rows();
        Eigen::Map<const Matrix> rho(x.data(), d, d);
        Eigen::Map<Matrix> out(dxdt.data(), d, d);
        out.noalias() = -kI * (buffer * rho);
        out.noalias() += kI * (rho * buffer.adjoint());
        for (std::size_t j = 0; j < jumps.size(); ++j) {
            out.noalias() += jumps[j] * rho * jumps[j].adjoint();
            out.noalias() -= 0.5 * (jump_products[j] * rho);
            out.noalias() -= 0.5 * (rho * jump_products[j]);
        }
    }
};

template <typename Rhs, typename Observer>
void integrate(Rhs rhs, OdeState& x, const std::vector<double>& times, const EvolutionSpec& spec,
               Observer observe) {
    if (spec.fixed_steps) {
        odeint::runge_kutta4<OdeState> stepper;
        observe(x, times.front());
        for (std::size_t k = 1; k < times.size(); ++k) {
            const double h = (times[k] - times[k - 1]) / static_cast<double>(*spec.fixed_steps);
            double t = times[k - 1];
            for (std::size_t s = 0; s < *spec.fixed_steps; ++s) {
                stepper.do_step(rhs, x, t, h);
                t = times[k - 1] + static_cast<double>(s + 1) * h;
            }
            observe(x, times[k]);
        }
        return;
    }
    auto stepper = odeint::make_dense_output(spec.abs_tol, spec.rel_tol,
                                             odeint::runge_kutta_dopri5<OdeState>());
    const double dt0 = (times.back() - times.front()) / static_cast<double>(times.size()) * 1e-2;
    try {
        odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt0, observe,
                                odeint::max_step_checker(spec.max_steps_per_sample));
    } catch (const odeint::odeint_error& err) {
        throw SolverError(std::string("adaptive integrator failed (step-size underflow or "
                                      "step budget exhausted): ") +
                          err.what());
    }
    for (const Complex& c : x) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw SolverError("integrator produced non-finite state");
        }
    }
}

inline StateVector require_pure(const EvolutionSpec& spec, const char* who) {
    if (const auto* psi = std::get_if<StateVector>(&spec.initial)) {
        detail::require_same_dims(psi->dims(), spec.hamiltonian.dims(), who);
        return *psi;
    }
    throw SolverError(std::string(who) + " needs a pure initial state");
}

inline TimeSeries evolve_pure(const EvolutionSpec& spec, Backend backend) {
    check_spec(spec);
    const StateVector psi0 = require_pure(spec, to_string(backend).data());
    const std::vector<double> times = uniform_times(spec.t_final, spec.sample_count);

    TimeSeries out;
    out.backend = backend;
    out.dims = psi0.dims();
    const std::size_t n = psi0.size();
    OdeState x(psi0.amplitudes().data(), psi0.amplitudes().data() + n);
    PureRhs rhs{&spec.hamiltonian, Matrix(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n))};
    integrate(rhs, x, times, spec, [&](const OdeState& s, double t) {
        out.times.push_back(t);
        std::vector<double> pop(n);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pop[i] = std::norm(s[i]);
            norm += pop[i];
        }
        out.populations.push_back(std::move(pop));
        out.amplitudes.emplace_back(s.begin(), s.end());
        out.norms.push_back(norm);
    });
    if (out.times.size() != times.size()) throw SolverError("integrator skipped sample times");
    return out;
}

}  // namespace detail

/// Closed evolution under a Hermitian Hamiltonian.
inline TimeSeries schrodinger_evolve(const EvolutionSpec& spec) {
    if (!spec.collapse_ops.empty()) throw SolverError("schrodinger_evolve takes no collapse ops");
    if (!spec.hamiltonian.hermitian_contract()) {
        throw SolverError("schrodinger_evolve needs a Hermitian Hamiltonian");
    }
    TimeSeries out = detail::evolve_pure(spec, Backend::schrodinger);
    const double allowed = spec.max_norm_drift.value_or(10.0 * spec.rel_tol);
    double drift = 0.0;
    for (double nrm : out.norms) drift = std::max(drift, std::abs(nrm - out.norms.front()));
    if (!spec.fixed_steps && drift > allowed) {
        throw SolverError("norm drift " + std::to_string(drift) + " exceeds " +
                          std::to_string(allowed));
    }
    return out;
}

/// No-jump evolution under a possibly non-Hermitian Hamiltonian. The state
/// is never renormalized.
inline TimeSeries nonhermitian_evolve(const EvolutionSpec& spec) {
    if (!spec.collapse_ops.empty()) throw SolverError("nonhermitian_evolve takes no collapse ops");
    return detail::evolve_pure(spec, Backend::nonhermitian);
}

/// Lindblad master equation with jump operators sqrt(rate) * op. A pure
/// initial state is promoted to |psi><psi|.
inline TimeSeries lindblad_evolve(const EvolutionSpec& spec) {
    detail::check_spec(spec);
    if (!spec.hamiltonian.hermitian_contract()) {
        throw SolverError("lindblad_evolve needs a Hermitian Hamiltonian");
    }
    const DensityMatrix rho0 = std::visit(
        [](const auto& init) -> DensityMatrix {
            if constexpr (std::is_same_v<std::decay_t<decltype(init)>, StateVector>) {
                return DensityMatrix::from_state(init);
            } else {
                return init;
            }
        },
        spec.initial);
    detail::require_same_dims(rho0.dims(), spec.hamiltonian.dims(), "lindblad_evolve");

    const auto d = static_cast<Eigen::Index>(rho0.side());
    detail::LindbladRhs rhs{&spec.hamiltonian, {}, {}, Matrix(d, d)};
    for (const auto& ch : spec.collapse_ops) {
        if (ch.rate < 0.0) throw SolverError("collapse rate must be >= 0");
        detail::require_same_dims(ch.op.dims(), rho0.dims(), "collapse operator");
        const Matrix l = std::sqrt(ch.rate) * ch.op.matrix();
        rhs.jump_products.push_back(l.adjoint() * l);
        rhs.jumps.push_back(l);
    }

    const std::vector<double> times = uniform_times(spec.t_final, spec.sample_count);
    TimeSeries out;
    out.backend = Backend::lindblad;
    out.dims = rho0.dims();
    detail::OdeState x(rho0.matrix().data(), rho0.matrix().data() + d * d);
    detail::integrate(rhs, x, times, spec, [&](const detail::OdeState& s, double t) {
        Eigen::Map<const Matrix> rho(s.data(), d, d);
        out.times.push_back(t);
        std::vector<double> pop(static_cast<std::size_t>(d));
        for (Eigen::Index i = 0; i < d; ++i) pop[static_cast<std::size_t>(i)] = rho(i, i).real();
        out.populations.push_back(std::move(pop));
        out.norms.push_back(rho.trace().real());
        out.densities.emplace_back(rho0.dims(), Matrix(rho), 1e-6);
    });
    if (out.times.size() != times.size()) throw SolverError("integrator skipped sample times");

    const double allowed = spec.max_norm_drift.value_or(10.0 * spec.rel_tol);
    double drift = 0.0;
    for (double tr : out.norms) drift = std::max(drift, std::abs(tr - out.norms.front()));
    if (!spec.fixed_steps && drift > allowed) {
        throw SolverError("trace drift " + std::to_string(drift) + " exceeds " +
                          std::to_string(allowed));
    }
    return out;
}

/// Conditional fidelity of the carbon subsystem at every sample.
/// With `renormalize`, pure states are scaled to unit norm first.
inline std::vector<double> fidelity_series(const TimeSeries& series, double theta,
                                           std::size_t carbon_site,
                                           FidelityFrame frame = FidelityFrame::lab,
                                           double phase_c = 0.0, bool renormalize = false) {
    std::vector<double> f;
    f.reserve(series.times.size());
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        std::optional<DensityMatrix> rho;
        if (!series.densities.empty()) {
            rho = series.densities[k];
        } else {
            const auto& amps = series.amplitudes.at(k);
            Vector v = Eigen::Map<const Vector>(amps.data(), static_cast<Eigen::Index>(amps.size()));
            if (renormalize && v.norm() > 0.0) v /= v.norm();
            rho = DensityMatrix::from_state(StateVector(series.dims, std::move(v)));
        }
        f.push_back(fidelity_against_target(partial_trace(*rho, carbon_site), theta, frame, phase_c,
                                            series.times[k]));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Effective-model conveniences

/// Initial state cos(theta)|0>c|0>I + sin(theta)|1>c|0>I on [cavity(F), carbon].
inline StateVector effective_initial_state(double theta, std::size_t fock_levels = 2) {
    const HilbertDims dims = detail::effective_dims(fock_levels);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
    const std::size_t i00[] = {0, 0};
    const std::size_t i10[] = {1, 0};
    v(static_cast<Eigen::Index>(dims.flat_index(i00))) = std::cos(theta);
    v(static_cast<Eigen::Index>(dims.flat_index(i10))) = std::sin(theta);
    return {dims, std::move(v)};
}

/// Same physical state with the NV in its ground dressed state, on [cavity, NV, carbon].
inline StateVector three_body_initial_state(double theta, std::size_t fock_levels = 2) {
    const HilbertDims dims = detail::three_body_dims(fock_levels);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
    const std::size_t i00[] = {0, 0, 0};
    const std::size_t i10[] = {1, 0, 0};
    v(static_cast<Eigen::Index>(dims.flat_index(i00))) = std::cos(theta);
    v(static_cast<Eigen::Index>(dims.flat_index(i10))) = std::sin(theta);
    return {dims, std::move(v)};
}

enum class ChannelType { lowering, dephasing };

/// Cavity and carbon channels with rates k1, k2 on [cavity(F), carbon]:
/// lowering = {a, I_-}; dephasing = {a^dag a, I_+ I_-}.
inline std::vector<CollapseChannel> effective_collapse_ops(const ModelParams& p, ChannelType type,
                                                          std::size_t fock_levels = 2) {
    const HilbertDims dims = detail::effective_dims(fock_levels);
    if (type == ChannelType::lowering) {
        return {{embed(ops::destroy(fock_levels), dims, 0), p.k1},
                {embed(spin::carbon_minus(), dims, 1), p.k2}};
    }
    return {{embed(ops::number(fock_levels), dims, 0), p.k1},
            {embed(spin::carbon_plus() * spin::carbon_minus(), dims, 1), p.k2}};
}

// ---------------------------------------------------------------------------
// Effective-theory validation

struct EffectiveTheoryReport {
    double max_population_discrepancy = 0.0;
    double max_excited_population = 0.0;  ///< NV leakage out of |g> in the full model
    double kappa_over_omega1 = 0.0;
    double h_over_omega2 = 0.0;
    bool regime_violated = false;
    double t_final = 0.0;
    std::vector<std::string> warnings;
};

struct ValidationOptions {
    /// Threshold on kappa/|omega1| and |H|/|omega2| for the dispersive regime.
    double regime_threshold = 0.1;
    std::size_t sample_count = 401;
    /// Unset = 2 t* (one full swap and return); falls back to 20 pi / min|omega|.
    std::optional<double> t_final;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
};

/// Evolves cos(theta)|g,0,down> + sin(theta)|g,1,down> under the RWA model
/// and the effective model and reports the largest population discrepancy.
/// Missing hyperfine geometry is taken as zero (no S_z I_z shift).
inline EffectiveTheoryReport validate_effective_theory(ModelParams p, ValidationOptions opts = {}) {
    if (!p.c_par_raw) p.c_par_raw = 0.0;
    if (!p.c_perp_raw) p.c_perp_raw = 0.0;
    if (!p.theta_nv_axis) p.theta_nv_axis = 0.0;
    if (!p.eta) p.eta = 0.0;

    EffectiveTheoryReport report;
    report.kappa_over_omega1 = std::abs(p.kappa / p.omega1);
    report.h_over_omega2 = std::abs(p.h / p.omega2);
    if (report.kappa_over_omega1 > opts.regime_threshold ||
        report.h_over_omega2 > opts.regime_threshold) {
        report.regime_violated = true;
        report.warnings.push_back("dispersive regime violated: kappa/omega1 = " +
                                  std::to_string(report.kappa_over_omega1) + ", |H|/omega2 = " +
                                  std::to_string(report.h_over_omega2) + " (threshold " +
                                  std::to_string(opts.regime_threshold) + ")");
    }

    const EffectiveParams e = effective_params(p);
    double t_final = opts.t_final.value_or(2.0 * e.t_star);
    if (!std::isfinite(t_final)) {
        t_final = 20.0 * std::numbers::pi / std::min(std::abs(p.omega1), std::abs(p.omega2));
    }
    report.t_final = t_final;

    EvolutionSpec full{build_rwa_interaction(p), three_body_initial_state(p.theta), t_final,
                       opts.sample_count, opts.rel_tol, opts.abs_tol, {}, {}, {}, 1000000};
    EvolutionSpec reduced{build_effective(p), effective_initial_state(p.theta), t_final,
                          opts.sample_count, opts.rel_tol, opts.abs_tol, {}, {}, {}, 1000000};
    // Long dispersive runs accumulate more rounding than the default drift budget.
    full.max_norm_drift = 1e-7;
    reduced.max_norm_drift = 1e-7;
    const TimeSeries a = schrodinger_evolve(full);
    const TimeSeries b = schrodinger_evolve(reduced);

    const HilbertDims& fd = a.dims;
    const HilbertDims& rd = b.dims;
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        double excited = 0.0;
        for (std::size_t i = 0; i < fd.total(); ++i) {
            const auto dg = fd.digits(i);
            if (dg[1] == 1) excited += a.populations[k][i];
        }
        report.max_excited_population = std::max(report.max_excited_population, excited);
        for (std::size_t n = 0; n < 2; ++n) {
            for (std::size_t c = 0; c < 2; ++c) {
                const std::size_t fi[] = {n, 0, c};
                const std::size_t ri[] = {n, c};
                const double diff = std::abs(a.populations[k][fd.flat_index(fi)] -
                                             b.populations[k][rd.flat_index(ri)]);
                report.max_population_discrepancy =
                    std::max(report.max_population_discrepancy, diff);
            }
        }
    }
    return report;
}

inline EffectiveTheoryReport validate_effective_theory(double regime_scale,
                                                       double theta = std::numbers::pi / 4,
                                                       ValidationOptions opts = {}) {
    return validate_effective_theory(dispersive_params(regime_scale, theta), opts);
}

}  // namespace qstsim
