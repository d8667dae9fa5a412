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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qstsim {
namespace {

using std::numbers::pi;
using testing::max_abs;
using testing::published_thetas;

// Calibrated k1 = k2 for the published parameters (tests/oracles).
constexpr double kCalibratedK = 308.19377979059493;

EvolutionSpec spec_for(TimeDependentHamiltonian h, StateVector psi0, double t_final,
                       std::size_t samples = 201) {
    return {std::move(h), std::move(psi0), t_final, samples, 1e-10, 1e-12, {}, {}, {}, 100000};
}

void expect_state(const std::vector<Complex>& got, const std::vector<Complex>& want, double tol) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_LT(std::abs(got[i] - want[i]), tol) << "index " << i;
}

TEST(UniformTimes, EndpointsAndErrors) {
    const auto t = uniform_times(2.0, 5);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 2.0);
    EXPECT_EQ(t[2], 1.0);
    EXPECT_THROW(uniform_times(0.0, 5), SolverError);
    EXPECT_THROW(uniform_times(1.0, 1), SolverError);
}

TEST(Schrodinger, ZeroHamiltonianKeepsState) {
    const StateVector psi = effective_initial_state(0.4);
    const TimeSeries s = schrodinger_evolve(spec_for(TimeDependentHamiltonian(psi.dims(), true), psi, 3.0, 4));
    for (const auto& a : s.amplitudes) expect_state(a, {psi[0], psi[1], psi[2], psi[3]}, 1e-15);
}

TEST(Schrodinger, DiagonalHamiltonianAccumulatesPhases) {
    TimeDependentHamiltonian h(HilbertDims{3}, true);
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 0.3;
    d(1, 1) = -1.1;
    d(2, 2) = 2.0;
    h.add(Operator(HilbertDims{3}, d), Complex(1.0));
    Vector v(3);
    v << 0.6, 0.0, 0.8;
    const StateVector psi(HilbertDims{3}, v);
    const TimeSeries s = schrodinger_evolve(spec_for(h, psi, 5.0, 11));
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const double t = s.times[k];
        expect_state(s.amplitudes[k], {0.6 * std::exp(-kI * 0.3 * t), 0.0, 0.8 * std::exp(-kI * 2.0 * t)}, 1e-8);
        EXPECT_NEAR(s.populations[k][0], 0.36, 1e-9);
    }
}

TEST(Schrodinger, MatchesMatrixExponentialOracle) {
    const ModelParams p = paper_params(pi / 6);
    const double t = effective_params(p).t_star / 3.0;
    const TimeSeries s = schrodinger_evolve(spec_for(build_effective(p), effective_initial_state(p.theta), t, 2));
    expect_state(s.amplitudes.back(),
                 {0.86602540378443865, {0.01648109300610596, 0.24945584578438698},
                  {0.43209666713550568, -0.028153593513230713}, 0.0},
                 1e-8);
}

TEST(Schrodinger, PopulationsMatchClosedForm) {
    for (double th : published_thetas()) {
        for (const ModelParams& p : {paper_params(th), resonant_params(th)}) {
            const double tf = 2.0 * effective_params(p).t_star;
            const TimeSeries s = schrodinger_evolve(spec_for(build_effective(p), effective_initial_state(th), tf, 200));
            for (std::size_t k = 0; k < s.times.size(); ++k) {
                const auto ref = amplitudes(p, s.times[k]).populations();
                for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s.populations[k][i], ref[i], 1e-6);
            }
        }
    }
}

TEST(Schrodinger, ConservationFocksThree) {
    const ModelParams p = paper_params(pi / 3);
    const double tf = 2.0 * effective_params(p).t_star;
    const TimeSeries s = schrodinger_evolve(spec_for(build_effective(p, 3), effective_initial_state(p.theta, 3), tf));
    const HilbertDims& d = s.dims;
    const double p00_0 = s.populations.front()[0];
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        double sum = 0.0, leak = 0.0;
        for (std::size_t i = 0; i < d.total(); ++i) {
            sum += s.populations[k][i];
            if (d.digits(i)[0] == 2) leak += s.populations[k][i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-8);
        EXPECT_LT(leak, 1e-12);
        EXPECT_NEAR(s.populations[k][0], p00_0, 1e-8);
        const std::size_t i11[] = {1, 1};
        EXPECT_LT(s.populations[k][d.flat_index(i11)], 1e-10);
    }
}

TEST(Schrodinger, TighterToleranceReducesError) {
    const ModelParams p = resonant_params(pi / 4);
    const double tf = 2.0 * effective_params(p).t_star;
    auto err = [&](double rtol) {
        EvolutionSpec sp = spec_for(build_effective(p), effective_initial_state(p.theta), tf, 51);
        sp.rel_tol = rtol;
        sp.abs_tol = rtol * 1e-2;
        const TimeSeries s = schrodinger_evolve(sp);
        const Vector ref = Vector(Eigen::Map<const Vector>(s.amplitudes.back().data(), 4));
        // Oracle: long fine run.
        EvolutionSpec fine = sp;
        fine.rel_tol = 1e-13;
        fine.abs_tol = 1e-15;
        const TimeSeries f = schrodinger_evolve(fine);
        return (ref - Eigen::Map<const Vector>(f.amplitudes.back().data(), 4)).norm();
    };
    EXPECT_LT(err(1e-10), err(1e-6));
}

TEST(Schrodinger, TimeReversalRecoversInitialState) {
    const ModelParams p = paper_params(pi / 4);
    const double tf = 1.3 * effective_params(p).t_star;
    const auto h = build_effective(p);
    const StateVector psi0 = effective_initial_state(p.theta);
    const TimeSeries fwd = schrodinger_evolve(spec_for(h, psi0, tf, 2));
    const StateVector mid(psi0.dims(), Eigen::Map<const Vector>(fwd.amplitudes.back().data(), 4));
    const TimeSeries back = schrodinger_evolve(spec_for(time_reversed(h, tf), mid, tf, 2));
    expect_state(back.amplitudes.back(), {psi0[0], psi0[1], psi0[2], psi0[3]}, 1e-6);
}

TEST(Schrodinger, RejectsInvalidSpecs) {
    const ModelParams p = paper_params();
    EvolutionSpec sp = spec_for(build_effective_dephasing(p), effective_initial_state(0.3), 1e-6);
    EXPECT_THROW(schrodinger_evolve(sp), SolverError);
    sp = spec_for(build_effective(p), effective_initial_state(0.3), 1e-6);
    sp.collapse_ops = effective_collapse_ops(p, ChannelType::lowering);
    EXPECT_THROW(schrodinger_evolve(sp), SolverError);
    sp = spec_for(build_effective(p), StateVector::basis(2, 0), 1e-6);
    EXPECT_THROW(schrodinger_evolve(sp), DimensionError);
}

TEST(Schrodinger, StepBudgetExhaustionIsReported) {
    const ModelParams p = paper_params();
    EvolutionSpec sp = spec_for(build_effective(p), effective_initial_state(0.3), 1e-4, 2);
    sp.max_steps_per_sample = 10;
    EXPECT_THROW(schrodinger_evolve(sp), SolverError);
}

TEST(FixedStep, Deterministic) {
    const ModelParams p = paper_params(pi / 6);
    EvolutionSpec sp = spec_for(build_effective(p), effective_initial_state(p.theta),
                                2.0 * effective_params(p).t_star, 50);
    sp.fixed_steps = 40;
    const TimeSeries a = schrodinger_evolve(sp);
    const TimeSeries b = schrodinger_evolve(sp);
    EXPECT_EQ(a.amplitudes, b.amplitudes);
    const auto ref = amplitudes(p, a.times.back()).populations();
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a.populations.back()[i], ref[i], 1e-6);
}

TEST(Lindblad, EmptyChannelsMatchSchrodinger) {
    const ModelParams p = paper_params(pi / 3);
    const auto sp = spec_for(build_effective(p), effective_initial_state(p.theta), 2.0 * effective_params(p).t_star, 101);
    const TimeSeries a = schrodinger_evolve(sp);
    const TimeSeries b = lindblad_evolve(sp);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(a.populations[k][i], b.populations[k][i], 1e-7);
    }
}

TEST(Lindblad, TwoLevelExponentialDecay) {
    const HilbertDims d{2};
    const double rate = 3.0;
    EvolutionSpec sp = spec_for(TimeDependentHamiltonian(d, true), StateVector::basis(2, 1), 2.0, 21);
    sp.collapse_ops = {{ops::sigma_minus(), rate}};
    const TimeSeries s = lindblad_evolve(sp);
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        EXPECT_NEAR(s.populations[k][1], std::exp(-rate * s.times[k]), 1e-6);
    }
}

TEST(Lindblad, TracePositivityAndHermiticity) {
    ModelParams p = paper_params(pi / 4);
    p.k1 = 2e5;
    p.k2 = 5e4;
    for (ChannelType type : {ChannelType::lowering, ChannelType::dephasing}) {
        EvolutionSpec sp = spec_for(build_effective(p), effective_initial_state(p.theta), 2.0 * effective_params(p).t_star, 101);
        sp.collapse_ops = effective_collapse_ops(p, type);
        const TimeSeries s = lindblad_evolve(sp);
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            EXPECT_NEAR(s.norms[k], 1.0, 1e-8);
            EXPECT_GE(s.densities[k].min_eigenvalue(), -1e-7);
            const Matrix& r = s.densities[k].matrix();
            EXPECT_LT(max_abs(r - r.adjoint()), 1e-9);
        }
    }
}

TEST(Lindblad, NegativeRateRejected) {
    EvolutionSpec sp = spec_for(TimeDependentHamiltonian(HilbertDims{2}, true), StateVector::basis(2, 1), 1.0);
    sp.collapse_ops = {{ops::sigma_minus(), -1.0}};
    EXPECT_THROW(lindblad_evolve(sp), SolverError);
}

TEST(Lindblad, CalibratedRatesReproducePublishedFidelities) {
    const std::vector<double> published = {0.992, 0.990, 0.992, 0.997};
    const auto thetas = published_thetas();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        ModelParams p = paper_params(thetas[i]);
        p.k1 = p.k2 = kCalibratedK;
        const double ts = effective_params(p).t_star;
        EvolutionSpec sp = spec_for(build_effective(p), effective_initial_state(p.theta), ts, 2);
        sp.collapse_ops = effective_collapse_ops(p, ChannelType::lowering);
        const TimeSeries s = lindblad_evolve(sp);
        EXPECT_NEAR(fidelity_series(s, p.theta, 1).back(), published[i], 2e-3);
    }
}

TEST(NonHermitian, ZeroDecayMatchesSchrodinger) {
    const ModelParams p = paper_params(pi / 6);
    const auto sp = spec_for(build_effective(p), effective_initial_state(p.theta), 2.0 * effective_params(p).t_star, 101);
    auto nh = sp;
    nh.hamiltonian = build_effective_dephasing(p);
    const TimeSeries a = schrodinger_evolve(sp);
    const TimeSeries b = nonhermitian_evolve(nh);
    for (std::size_t k = 0; k < a.times.size(); ++k) expect_state(b.amplitudes[k], a.amplitudes[k], 1e-9);
}

TEST(NonHermitian, PureCavityDecay) {
    const double k = 4.0;
    const HilbertDims d{2, 2};
    TimeDependentHamiltonian h(d, false);
    h.add(embed(ops::number(2), d, 0), Complex(0.0, -0.5 * k));
    const std::size_t one[] = {1, 0};
    const TimeSeries s = nonhermitian_evolve(spec_for(h, StateVector::basis(d, one), 1.5, 16));
    for (std::size_t i = 0; i < s.times.size(); ++i) EXPECT_NEAR(s.norms[i], std::exp(-k * s.times[i]), 1e-7);
}

TEST(NonHermitian, MatchesMatrixExponentialOracle) {
    ModelParams p = paper_params(pi / 4);
    p.k1 = p.k2 = 300.0;
    const double ts = effective_params(p).t_star;
    EvolutionSpec sp = spec_for(build_effective_dephasing(p), effective_initial_state(p.theta), ts, 2);
    sp.rel_tol = 1e-12;
    sp.abs_tol = 1e-14;
    expect_state(nonhermitian_evolve(sp).amplitudes.back(),
                 {0.70710678118654752, {0.1390037354652509, 0.69313941458146919},
                  {0.00021847821754362746, 0.0010894461662393626}, 0.0},
                 1e-9);
}

TEST(NonHermitian, NormNonIncreasing) {
    ModelParams p = paper_params(1.1);
    p.k1 = 5e4;
    p.k2 = 2e4;
    const TimeSeries s = nonhermitian_evolve(
        spec_for(build_effective_dephasing(p), effective_initial_state(p.theta), 3.0 * effective_params(p).t_star, 301));
    for (std::size_t k = 1; k < s.norms.size(); ++k) EXPECT_LE(s.norms[k], s.norms[k - 1] + 1e-12);
}

TEST(NonHermitian, MatchesCorrectedClosedFormOnModuli) {
    for (double th : published_thetas()) {
        ModelParams p = resonant_params(th);
        p.k1 = p.k2 = kCalibratedK;
        EvolutionSpec sp = spec_for(build_effective_dephasing(p), effective_initial_state(th),
                                    2.0 * effective_params(p).t_star, 201);
        sp.rel_tol = 1e-12;
        sp.abs_tol = 1e-14;
        const TimeSeries s = nonhermitian_evolve(sp);
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            const AmplitudeTriple m = dephased_amplitudes(p, s.times[k]);
            EXPECT_NEAR(std::abs(s.amplitudes[k][2]), std::abs(m.m1), 1e-6);
            EXPECT_NEAR(std::abs(s.amplitudes[k][1]), std::abs(m.m2), 1e-6);
            EXPECT_NEAR(std::abs(s.amplitudes[k][0]), std::abs(m.m0), 1e-12);
        }
    }
}

TEST(NonHermitian, PrintedReadingDisagrees) {
    ModelParams p = resonant_params(pi / 4);
    p.k1 = p.k2 = kCalibratedK;
    const double ts = effective_params(p).t_star;
    const TimeSeries s = nonhermitian_evolve(spec_for(build_effective_dephasing(p), effective_initial_state(p.theta), ts, 2));
    const AmplitudeTriple bad = dephased_amplitudes(p, ts, DephasedForm::printed);
    const AmplitudeTriple good = dephased_amplitudes(p, ts, DephasedForm::corrected);
    EXPECT_NEAR(std::abs(s.amplitudes.back()[1]), std::abs(good.m2), 1e-6);
    EXPECT_GT(std::abs(std::abs(bad.m2) - std::abs(good.m2)), 1e-2);
}

TEST(FidelitySeries, ClosedFormEqualsPipelineOnNumericState) {
    for (double th : published_thetas()) {
        const ModelParams p = paper_params(th);
        const double ts = effective_params(p).t_star;
        const TimeSeries s = schrodinger_evolve(spec_for(build_effective(p), effective_initial_state(th), ts, 11));
        const auto f = fidelity_series(s, th, 1);
        for (std::size_t k = 0; k < s.times.size(); ++k) EXPECT_NEAR(f[k], conditional_fidelity(p, s.times[k]), 1e-6);
    }
}

TEST(FidelitySeries, RenormalizedAtLeastConditional) {
    ModelParams p = paper_params(pi / 4);
    p.k1 = p.k2 = 1e4;
    const double ts = effective_params(p).t_star;
    const TimeSeries s = nonhermitian_evolve(spec_for(build_effective_dephasing(p), effective_initial_state(p.theta), ts, 2));
    EXPECT_GT(fidelity_series(s, p.theta, 1, FidelityFrame::lab, 0.0, true).back(),
              fidelity_series(s, p.theta, 1).back());
}

TEST(EffectiveTheory, DispersiveRegimeAgrees) {
    const EffectiveTheoryReport r = validate_effective_theory(0.05);
    EXPECT_FALSE(r.regime_violated);
    EXPECT_LE(r.max_population_discrepancy, 0.02);
    EXPECT_NEAR(r.kappa_over_omega1, 0.05, 1e-15);
}

TEST(EffectiveTheory, ErrorShrinksWithScale) {
    ValidationOptions o;
    o.sample_count = 201;
    const double a = validate_effective_theory(0.1, pi / 4, o).max_population_discrepancy;
    const double b = validate_effective_theory(0.05, pi / 4, o).max_population_discrepancy;
    const double c = validate_effective_theory(0.025, pi / 4, o).max_population_discrepancy;
    EXPECT_GT(a, b);
    EXPECT_GT(b, c);
    // Quadratic in the coupling scale.
    EXPECT_NEAR(a / b, 4.0, 0.6);
    EXPECT_NEAR(b / c, 4.0, 0.6);
}

TEST(EffectiveTheory, DecoupledIsExact) {
    ModelParams p = dispersive_params(0.05);
    p.kappa = 0.0;
    p.h = 0.0;
    ValidationOptions o;
    o.t_final = 50.0;
    o.sample_count = 51;
    const EffectiveTheoryReport r = validate_effective_theory(p, o);
    EXPECT_LT(r.max_population_discrepancy, 1e-12);
}

TEST(EffectiveTheory, PaperParamsFlagged) {
    ValidationOptions o;
    o.sample_count = 51;
    const EffectiveTheoryReport r = validate_effective_theory(paper_params(), o);
    EXPECT_TRUE(r.regime_violated);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(CollapseOps, ChannelsAndRates) {
    ModelParams p = paper_params();
    p.k1 = 2.0;
    p.k2 = 3.0;
    const auto low = effective_collapse_ops(p, ChannelType::lowering);
    ASSERT_EQ(low.size(), 2u);
    EXPECT_EQ(low[0].rate, 2.0);
    EXPECT_EQ(low[1].rate, 3.0);
    EXPECT_EQ(low[0].op(0, 2), Complex(1.0));  // a: |1,down> -> |0,down>
    EXPECT_EQ(low[1].op(0, 1), Complex(1.0));  // I_-: |0,up> -> |0,down>
}

}  // namespace
}  // namespace qstsim
