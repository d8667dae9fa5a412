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

// Hamiltonian builders for each stage of the cavity / NV / 13C model.
//
// Subsystem order is fixed and recorded in the dims of every result:
//   cavity-NV (bare):          [cavity(F), NV(2)]        NV: 0 = |m_s=0>, 1 = |m_s=-1>
//   NV-carbon hyperfine:       [NV(3), carbon(2)]        NV: 0 = |0>, 1 = |-1>, 2 = |+1>
//   dressed / RWA / Eq-11 form: [cavity(F), NV(2), carbon(2)]  NV dressed: 0 = |g>, 1 = |e>
//   effective:                 [cavity(F), carbon(2)]
// Carbon: 0 = |down>, 1 = |up>, I_z = diag(-1/2, +1/2), I_+ = |up><down|.
// Dressed NV: S_z = |e><e| - |g><g|, S_+ = |e><g|.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "qstsim/linalg.hpp"
#include "qstsim/model.hpp"

namespace qstsim {

using Envelope = std::function<Complex(double)>;

inline Envelope constant_envelope(Complex c) {
    return [c](double) { return c; };
}

/// amplitude * exp(i * frequency * t)
inline Envelope rotating_envelope(Complex amplitude, double frequency) {
    return [amplitude, frequency](double t) { return amplitude * std::exp(kI * (frequency * t)); };
}

struct HamiltonianTerm {
    Operator op;
    Envelope envelope;
    bool constant = false;
};

/// H(t) = sum_k envelope_k(t) * op_k.
class TimeDependentHamiltonian {
  public:
    TimeDependentHamiltonian(HilbertDims dims, bool hermitian_contract)
        : dims_(std::move(dims)),
          hermitian_contract_(hermitian_contract),
          static_part_(Matrix::Zero(static_cast<Eigen::Index>(dims_.total()),
                                    static_cast<Eigen::Index>(dims_.total()))) {}

    TimeDependentHamiltonian& add(const Operator& op, Complex coefficient) {
        check(op);
        terms_.push_back({op, constant_envelope(coefficient), true});
        static_part_ += coefficient * op.matrix();
        return *this;
    }

    TimeDependentHamiltonian& add(const Operator& op, Envelope envelope) {
        check(op);
        terms_.push_back({op, std::move(envelope), false});
        return *this;
    }

    const HilbertDims& dims() const noexcept { return dims_; }
    bool hermitian_contract() const noexcept { return hermitian_contract_; }
    const std::vector<HamiltonianTerm>& terms() const noexcept { return terms_; }

    bool time_independent() const noexcept {
        for (const auto& t : terms_) {
            if (!t.constant) return false;
        }
        return true;
    }

    /// Writes H(t) into `out`, which must already have the right shape.
    void evaluate(double t, Matrix& out) const {
        out = static_part_;
        for (const auto& term : terms_) {
            if (!term.constant) out.noalias() += term.envelope(t) * term.op.matrix();
        }
    }

    Operator at(double t) const {
        Matrix m(static_part_.rows(), static_part_.cols());
        evaluate(t, m);
        return {dims_, std::move(m)};
    }

  private:
    void check(const Operator& op) const {
        if (!(op.dims() == dims_)) {
            throw DimensionError("Hamiltonian term dims " + op.dims().to_string() +
                                 " do not match " + dims_.to_string());
        }
    }

    HilbertDims dims_;
    bool hermitian_contract_;
    std::vector<HamiltonianTerm> terms_;
    Matrix static_part_;
};

/// G(s) = -H(t_end - s). Evolving under G for s in [0, t_end] runs the
/// original dynamics backwards from t_end to 0.
inline TimeDependentHamiltonian time_reversed(const TimeDependentHamiltonian& h, double t_end) {
    TimeDependentHamiltonian out(h.dims(), h.hermitian_contract());
    for (const auto& term : h.terms()) {
        if (term.constant) {
            out.add(term.op, -term.envelope(0.0));
        } else {
            out.add(term.op, [env = term.envelope, t_end](double s) { return -env(t_end - s); });
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local operators in the documented bases

namespace spin {

inline Operator carbon_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -0.5;
    m(1, 1) = 0.5;
    return {HilbertDims{2}, std::move(m)};
}
inline Operator carbon_plus() { return ops::outer(2, 1, 0); }
inline Operator carbon_minus() { return ops::outer(2, 0, 1); }
inline Operator carbon_y() {
    return (Complex(0.0, -0.5)) * (carbon_plus() - carbon_minus());
}

inline Operator dressed_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return {HilbertDims{2}, std::move(m)};
}
inline Operator dressed_plus() { return ops::outer(2, 1, 0); }
inline Operator dressed_minus() { return ops::outer(2, 0, 1); }
inline Operator dressed_excited() { return ops::projector(2, 1); }

// NV triplet, basis {|0>, |-1>, |+1>}.
inline constexpr std::size_t kMs0 = 0;
inline constexpr std::size_t kMsMinus = 1;
inline constexpr std::size_t kMsPlus = 2;

inline Operator triplet_plus() {
    return ops::outer(3, kMsPlus, kMs0) + ops::outer(3, kMs0, kMsMinus);
}
inline Operator triplet_minus() { return dagger(triplet_plus()); }
inline Operator triplet_z() { return ops::projector(3, kMsPlus) - ops::projector(3, kMsMinus); }
inline Operator triplet_y() {
    return Complex(0.0, -0.5) * (triplet_plus() - triplet_minus());
}

}  // namespace spin

namespace detail {

inline HilbertDims three_body_dims(std::size_t fock_levels) {
    if (fock_levels < 2) throw DimensionError("cavity truncation needs >= 2 Fock levels");
    return HilbertDims{fock_levels, 2, 2};
}

inline HilbertDims effective_dims(std::size_t fock_levels) {
    if (fock_levels < 2) throw DimensionError("cavity truncation needs >= 2 Fock levels");
    return HilbertDims{fock_levels, 2};
}

}  // namespace detail

/// Excitation number a^dag a + I_+ I_- on the effective space.
inline Operator effective_excitation_number(std::size_t fock_levels = 2) {
    const HilbertDims dims = detail::effective_dims(fock_levels);
    return embed(ops::number(fock_levels), dims, 0) +
           embed(spin::carbon_plus() * spin::carbon_minus(), dims, 1);
}

/// Excitation number a^dag a + |e><e| + I_+ I_- on the three-body space.
inline Operator total_excitation_number(std::size_t fock_levels = 2) {
    const HilbertDims dims = detail::three_body_dims(fock_levels);
    return embed(ops::number(fock_levels), dims, 0) + embed(spin::dressed_excited(), dims, 1) +
           embed(spin::carbon_plus() * spin::carbon_minus(), dims, 2);
}

// ---------------------------------------------------------------------------
// Builders

/// Driven NV qubit coupled to the cavity, on [cavity, NV].
inline TimeDependentHamiltonian build_cavity_nv(const ModelParams& p, std::size_t fock_levels = 2) {
    const double omega_nv = require_symbol(p.omega_nv, "omega_nv");
    const double omega_c = require_symbol(p.omega_c, "omega_c");
    const double g = require_symbol(p.g, "g");
    const double lambda = require_symbol(p.lambda_drive, "lambda_drive");
    const double omega_0 = require_symbol(p.omega_0, "omega_0");

    if (fock_levels < 2) throw DimensionError("cavity truncation needs >= 2 Fock levels");
    const HilbertDims dims{fock_levels, 2};
    const Operator a = embed(ops::destroy(fock_levels), dims, 0);
    const Operator ad = dagger(a);
    const Operator sz = embed(ops::projector(2, 1) - ops::projector(2, 0), dims, 1);
    const Operator raise = embed(ops::outer(2, 1, 0), dims, 1);  // |-1><0|
    const Operator lower = dagger(raise);

    TimeDependentHamiltonian h(dims, true);
    h.add(sz, 0.5 * omega_nv);
    h.add(ad * a, omega_c);
    h.add(raise * a, g);
    h.add(lower * ad, g);
    h.add(raise, rotating_envelope(lambda, -omega_0));
    h.add(lower, rotating_envelope(lambda, omega_0));
    return h;
}

struct HyperfineOptions {
    /// Add the C_R and C_Delta terms dropped at high field (needs c_r, c_delta).
    bool restore_high_field_terms = false;
};

/// NV-carbon hyperfine interaction on [NV(3), carbon(2)]. Time independent.
inline TimeDependentHamiltonian build_hyperfine(const ModelParams& p, HyperfineOptions opts = {}) {
    const double omega_c13 = require_symbol(p.omega_c13, "omega_c13");
    const HyperfineCoefficients hf = hyperfine_coefficients(p);

    const HilbertDims dims{3, 2};
    const Operator iz = embed(spin::carbon_z(), dims, 1);
    const Operator ip = embed(spin::carbon_plus(), dims, 1);
    const Operator im = embed(spin::carbon_minus(), dims, 1);
    const Operator proj_minus = embed(ops::projector(3, spin::kMsMinus), dims, 0);
    const Operator up_from_minus = embed(ops::outer(3, spin::kMs0, spin::kMsMinus), dims, 0);
    const Operator down_to_minus = dagger(up_from_minus);

    TimeDependentHamiltonian h(dims, true);
    h.add(iz, omega_c13);
    h.add(proj_minus * iz, hf.c_par_theta);
    h.add(up_from_minus * im, 0.5 * hf.c_perp_theta);
    h.add(down_to_minus * ip, 0.5 * hf.c_perp_theta);

    if (opts.restore_high_field_terms) {
        const double c_r = require_symbol(p.c_r, "c_r");
        const double c_delta = require_symbol(p.c_delta, "c_delta");
        const Operator sp = embed(spin::triplet_plus(), dims, 0);
        const Operator sm = embed(spin::triplet_minus(), dims, 0);
        const Operator sz = embed(spin::triplet_z(), dims, 0);
        const Operator sy = embed(spin::triplet_y(), dims, 0);
        const Operator iy = embed(spin::carbon_y(), dims, 1);
        h.add(sp * ip + sm * im, 0.5 * c_r);
        h.add(sz * iy + sy * iz, c_delta);
    }
    return h;
}

/// Full dressed-state Hamiltonian on [cavity, NV dressed, carbon].
inline TimeDependentHamiltonian build_dressed_total(const ModelParams& p,
                                                    std::size_t fock_levels = 2) {
    const double omega_big = require_symbol(p.omega_dressed, "Omega_dressed");
    const double eta = require_symbol(p.eta, "eta");
    const double omega_c = require_symbol(p.omega_c, "omega_c");
    const double omega_0 = require_symbol(p.omega_0, "omega_0");
    const double omega_c13 = require_symbol(p.omega_c13, "omega_c13");
    const HyperfineCoefficients hf = hyperfine_coefficients(p);

    const HilbertDims dims = detail::three_body_dims(fock_levels);
    const Operator a = embed(ops::destroy(fock_levels), dims, 0);
    const Operator ad = dagger(a);
    const Operator sz = embed(spin::dressed_z(), dims, 1);
    const Operator sp = embed(spin::dressed_plus(), dims, 1);
    const Operator sm = embed(spin::dressed_minus(), dims, 1);
    const Operator iz = embed(spin::carbon_z(), dims, 2);
    const Operator ip = embed(spin::carbon_plus(), dims, 2);
    const Operator im = embed(spin::carbon_minus(), dims, 2);

    const double half_c_par = 0.5 * hf.c_par_theta;
    const double half_c_perp = 0.5 * hf.c_perp_theta;
    const double ce = std::cos(eta);
    const double se = std::sin(eta);
    const double cos2 = std::cos(0.5 * eta) * std::cos(0.5 * eta);
    const double sin2 = std::sin(0.5 * eta) * std::sin(0.5 * eta);

    TimeDependentHamiltonian h(dims, true);
    h.add(sz, 0.5 * omega_big);
    h.add(ad * a, omega_c);
    h.add(sm * ad, rotating_envelope(0.5 * p.kappa, -omega_0));
    h.add(sp * a, rotating_envelope(0.5 * p.kappa, omega_0));
    h.add(iz, omega_c13 + half_c_par);
    h.add(sz * iz, half_c_par * 0.5 * ce);
    h.add(sm * iz + sp * iz, -half_c_par * 0.5 * se);

    const Operator lowering_mix = (0.5 * se) * sz + cos2 * sm - sin2 * sp;
    const Operator raising_mix = (0.5 * se) * sz - sin2 * sm + cos2 * sp;
    h.add(lowering_mix * im, rotating_envelope(half_c_perp, -omega_0));
    h.add(raising_mix * ip, rotating_envelope(half_c_perp, omega_0));
    return h;
}

/// Rotating-wave interaction-picture Hamiltonian on [cavity, NV dressed, carbon].
inline TimeDependentHamiltonian build_rwa_interaction(const ModelParams& p,
                                                      std::size_t fock_levels = 2) {
    const double eta = require_symbol(p.eta, "eta");
    const HyperfineCoefficients hf = hyperfine_coefficients(p);

    const HilbertDims dims = detail::three_body_dims(fock_levels);
    const Operator a = embed(ops::destroy(fock_levels), dims, 0);
    const Operator ad = dagger(a);
    const Operator sz = embed(spin::dressed_z(), dims, 1);
    const Operator sp = embed(spin::dressed_plus(), dims, 1);
    const Operator sm = embed(spin::dressed_minus(), dims, 1);
    const Operator iz = embed(spin::carbon_z(), dims, 2);
    const Operator ip = embed(spin::carbon_plus(), dims, 2);
    const Operator im = embed(spin::carbon_minus(), dims, 2);

    TimeDependentHamiltonian h(dims, true);
    h.add(sm * ad, rotating_envelope(0.5 * p.kappa, p.omega1));
    h.add(sp * a, rotating_envelope(0.5 * p.kappa, -p.omega1));
    h.add(sz * iz, 0.25 * hf.c_par_theta * std::cos(eta));
    h.add(sp * im, rotating_envelope(p.h, -p.omega2));
    h.add(sm * ip, rotating_envelope(p.h, p.omega2));
    return h;
}

/// Ground-dressed-state effective Hamiltonian on [cavity, carbon].
inline TimeDependentHamiltonian build_effective(const ModelParams& p, std::size_t fock_levels = 2) {
    const EffectiveParams e = effective_params(p);
    const HilbertDims dims = detail::effective_dims(fock_levels);
    const Operator a = embed(ops::destroy(fock_levels), dims, 0);
    const Operator ad = dagger(a);
    const Operator ip = embed(spin::carbon_plus(), dims, 1);
    const Operator im = embed(spin::carbon_minus(), dims, 1);

    TimeDependentHamiltonian h(dims, true);
    h.add(ad * a, e.stark_cavity);
    h.add(ad * im, rotating_envelope(e.flip, e.delta12));
    h.add(a * ip, rotating_envelope(e.flip, -e.delta12));
    h.add(ip * im, e.stark_carbon);
    return h;
}

/// Effective Hamiltonian retaining the NV dressed qubit, on [cavity, NV dressed, carbon].
inline TimeDependentHamiltonian build_effective_general(const ModelParams& p,
                                                        std::size_t fock_levels = 2) {
    const EffectiveParams e = effective_params(p);
    const HilbertDims dims = detail::three_body_dims(fock_levels);
    const Operator a = embed(ops::destroy(fock_levels), dims, 0);
    const Operator ad = dagger(a);
    const Operator sz = embed(spin::dressed_z(), dims, 1);
    const Operator sp = embed(spin::dressed_plus(), dims, 1);
    const Operator sm = embed(spin::dressed_minus(), dims, 1);
    const Operator excited = embed(spin::dressed_excited(), dims, 1);
    const Operator iz = embed(spin::carbon_z(), dims, 2);
    const Operator ip = embed(spin::carbon_plus(), dims, 2);
    const Operator im = embed(spin::carbon_minus(), dims, 2);

    TimeDependentHamiltonian h(dims, true);
    h.add(Complex(-1.0) * (sz * ad * a) - excited, e.stark_cavity);
    h.add(sz * ad * im, rotating_envelope(-e.flip, e.delta12));
    h.add(sz * a * ip, rotating_envelope(-e.flip, -e.delta12));
    h.add(sp * sm * iz - sz * ip * im, e.stark_carbon);
    return h;
}

/// Effective Hamiltonian plus the anti-Hermitian decay terms
/// -i k1/2 a^dag a - i k2/2 I_+ I_-.
inline TimeDependentHamiltonian build_effective_dephasing(const ModelParams& p,
                                                          std::size_t fock_levels = 2) {
    if (p.k1 < 0.0) throw ParameterError("k1", "decay constant must be >= 0");
    if (p.k2 < 0.0) throw ParameterError("k2", "decay constant must be >= 0");
    const TimeDependentHamiltonian closed = build_effective(p, fock_levels);
    TimeDependentHamiltonian h(closed.dims(), false);
    for (const auto& term : closed.terms()) {
        if (term.constant) {
            h.add(term.op, term.envelope(0.0));
        } else {
            h.add(term.op, term.envelope);
        }
    }
    const HilbertDims& dims = closed.dims();
    const Operator n = embed(ops::number(fock_levels), dims, 0);
    const Operator up = embed(spin::carbon_plus() * spin::carbon_minus(), dims, 1);
    h.add(n, Complex(0.0, -0.5 * p.k1));
    h.add(up, Complex(0.0, -0.5 * p.k2));
    return h;
}

}  // namespace qstsim
