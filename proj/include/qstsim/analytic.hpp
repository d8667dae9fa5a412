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

// Closed-form amplitudes of the effective cavity / carbon exchange, with and
// without decay, and the conditional fidelity of the transferred state.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "qstsim/linalg.hpp"
#include "qstsim/model.hpp"

namespace qstsim {

/// Amplitudes of |0>c|0>I, |1>c|0>I and |0>c|1>I.
struct AmplitudeTriple {
    Complex m0;
    Complex m1;
    Complex m2;

    double norm_squared() const { return std::norm(m0) + std::norm(m1) + std::norm(m2); }

    /// Populations in effective-basis order {|00>, |01>, |10>, |11>} (cavity, carbon).
    std::array<double, 4> populations() const {
        return {std::norm(m0), std::norm(m2), std::norm(m1), 0.0};
    }

    StateVector to_state() const {
        Vector v(4);
        v << m0, m2, m1, 0.0;
        return {HilbertDims{2, 2}, std::move(v)};
    }
};

/// Closed-form amplitudes without decay.
inline AmplitudeTriple amplitudes(const ModelParams& p, double t) {
    const EffectiveParams e = effective_params(p);
    if (e.big_d == 0.0) throw RegimeError("degenerate spectrum: D = 0");
    const double d = e.big_d;
    const double s = std::sin(p.theta);
    const Complex m1 = (1.0 / (4.0 * d)) *
                       (4.0 * d * std::cos(d * t) + 2.0 * kI * e.delta_h * std::sin(d * t)) *
                       std::exp(kI * ((e.phase_c + e.delta12) * t)) * s;
    const Complex m2 = -kI * p.kappa * p.h * std::exp(kI * (e.phase_c * t)) /
                       (2.0 * e.omega12 * d) * std::sin(d * t) * s;
    return {Complex(std::cos(p.theta)), m1, m2};
}

/// Which reading of the decaying closed form to use.
///   corrected: B' uses w12^2, Re(A) = -(k1 + k2)/4. Exact solution of the
///              non-Hermitian effective dynamics at resonance.
///   printed:   B' uses w12 (no square), Re(A) = -(k1 + k2)/2, as typeset.
enum class DephasedForm { corrected, printed };

struct DephasedConstants {
    Complex a_const;
    double b_prime = 0.0;
    double c_deph = 0.0;  ///< (k2 - k1) / 2
};

inline DephasedConstants dephased_constants(const ModelParams& p,
                                            DephasedForm form = DephasedForm::corrected) {
    const EffectiveParams e = effective_params(p);
    const double kh = p.kappa * p.h;
    const double spread = p.k1 - p.k2;
    const double coupling_sq = form == DephasedForm::corrected
                                   ? kh * kh / (e.omega12 * e.omega12)
                                   : kh * kh / e.omega12;
    const double radicand = coupling_sq - 0.25 * spread * spread;
    if (radicand < 0.0) {
        throw RegimeError("overdamped regime: B'^2 = " + std::to_string(radicand) +
                          " < 0 (|k1 - k2| too large for the exchange coupling)");
    }
    const double decay = form == DephasedForm::corrected ? 0.25 * (p.k1 + p.k2)
                                                         : 0.5 * (p.k1 + p.k2);
    return {Complex(-decay, e.phase_c), std::sqrt(radicand), 0.5 * (p.k2 - p.k1)};
}

/// Set when the decaying closed form is used away from resonance, where it
/// omits the Delta_h contribution.
inline std::optional<std::string> dephased_accuracy_warning(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);
    if (std::abs(e.delta_h) > 1e-6 * std::abs(e.stark_cavity)) {
        return "decaying closed form assumes resonance; |Delta_h| = " +
               std::to_string(std::abs(e.delta_h)) +
               " exceeds 1e-6 * kappa^2/(4 omega1); prefer the non-Hermitian integrator";
    }
    return std::nullopt;
}

/// Closed-form amplitudes with cavity and carbon decay.
inline AmplitudeTriple dephased_amplitudes(const ModelParams& p, double t,
                                           DephasedForm form = DephasedForm::corrected) {
    const EffectiveParams e = effective_params(p);
    const DephasedConstants dc = dephased_constants(p, form);
    const double s = std::sin(p.theta);
    const double half = 0.5 * dc.b_prime * t;
    // sin(B' t / 2) / B', continuous at B' = 0.
    const double sin_over_b = dc.b_prime > 0.0 ? std::sin(half) / dc.b_prime : 0.5 * t;
    const Complex envelope = std::exp(dc.a_const * t);
    const Complex m1 = envelope * std::exp(kI * (e.delta12 * t)) *
                       (dc.c_deph * sin_over_b + std::cos(half)) * s;
    const Complex m2 = -kI * p.kappa * p.h / e.omega12 * envelope * sin_over_b * s;
    return {Complex(std::cos(p.theta)), m1, m2};
}

/// Reference frame in which the carbon state is compared with the target.
///   lab:               the amplitudes as they are.
///   phase_compensated: carbon rotated by diag(1, exp(-i C t)), removing the
///                      deterministic phase the closed form accumulates.
enum class FidelityFrame { lab, phase_compensated };

/// Carbon reduced density matrix from the three amplitudes.
inline DensityMatrix carbon_density(const AmplitudeTriple& m) {
    Matrix rho(2, 2);
    rho(0, 0) = std::norm(m.m0) + std::norm(m.m1);
    rho(0, 1) = m.m0 * std::conj(m.m2);
    rho(1, 0) = m.m2 * std::conj(m.m0);
    rho(1, 1) = std::norm(m.m2);
    return {HilbertDims{2}, std::move(rho)};
}

/// Target carbon state cos(theta)|0> + i sin(theta)|1>.
inline StateVector transfer_target(double theta) {
    Vector v(2);
    v << std::cos(theta), kI * std::sin(theta);
    return {HilbertDims{2}, std::move(v)};
}

/// <target| rho_carbon |target>, optionally after the phase-compensating rotation.
inline double fidelity_against_target(const DensityMatrix& rho_carbon, double theta,
                                      FidelityFrame frame = FidelityFrame::lab,
                                      double phase_c = 0.0, double t = 0.0) {
    if (rho_carbon.side() != 2) throw DimensionError("carbon density matrix must be 2x2");
    Matrix rho = rho_carbon.matrix();
    if (frame == FidelityFrame::phase_compensated) {
        Matrix u = Matrix::Identity(2, 2);
        u(1, 1) = std::exp(-kI * (phase_c * t));
        rho = u * rho * u.adjoint();
    }
    const StateVector target = transfer_target(theta);
    const Complex f = target.amplitudes().dot(rho * target.amplitudes());
    return std::clamp(f.real(), 0.0, 1.0);
}

struct FidelityOptions {
    FidelityFrame frame = FidelityFrame::lab;
    DephasedForm form = DephasedForm::corrected;
};

/// Conditional fidelity from the closed forms: undecayed amplitudes when
/// k1 = k2 = 0, decaying amplitudes otherwise.
inline double conditional_fidelity(const ModelParams& p, double t, FidelityOptions opts = {}) {
    const AmplitudeTriple m = (p.k1 == 0.0 && p.k2 == 0.0) ? amplitudes(p, t)
                                                           : dephased_amplitudes(p, t, opts.form);
    return fidelity_against_target(carbon_density(m), p.theta, opts.frame,
                                   effective_params(p).phase_c, t);
}

struct EigenSolution {
    Complex lambda1;  ///< i(C - D)
    Complex lambda2;  ///< i(C + D)
    double big_d = 0.0;
    double phase_c = 0.0;
    Eigen::Vector2cd v1;  ///< eigenvector of the rotating-frame coefficient matrix for lambda1
    Eigen::Vector2cd v2;
};

/// Eigenvalues of the coefficient matrix of the (M1, M2) equations in the
/// frame co-rotating with the exchange phase. Eigenvectors are computed
/// numerically rather than from closed forms.
inline EigenSolution eigen_solution(const ModelParams& p) {
    const EffectiveParams e = effective_params(p);
    EigenSolution out;
    out.big_d = e.big_d;
    out.phase_c = e.phase_c;
    out.lambda1 = kI * (e.phase_c - e.big_d);
    out.lambda2 = kI * (e.phase_c + e.big_d);

    Eigen::Matrix2cd m;
    m << -kI * e.stark_cavity, -kI * e.flip, -kI * e.flip, -kI * e.stark_carbon;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m);
    const auto& vals = es.eigenvalues();
    // lambda1 has the smaller imaginary part.
    const int i1 = vals(0).imag() <= vals(1).imag() ? 0 : 1;
    out.v1 = es.eigenvectors().col(i1);
    out.v2 = es.eigenvectors().col(1 - i1);
    return out;
}

}  // namespace qstsim
