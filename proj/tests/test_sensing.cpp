// combalign - network-wide beam alignment simulator for sub-THz D2D links
// Copyright (C) 2026 the combalign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// -------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "combalign/channel.hpp"
#include "combalign/rng.hpp"
#include "combalign/sensing.hpp"
#include "support/measurement_oracle.hpp"
#include "support/oracles.hpp"

using namespace combalign;

TEST_CASE("draw_beam_weights: magnitudes and norms")
{
    auto rng = make_rng(42);
    BeamWeights w = draw_beam_weights(rng, 16, 8);
    REQUIRE(w.n_probes() == 16);
    REQUIRE(w.n_antennas() == 8);
    double mag = 1.0 / std::sqrt(8.0);
    for (int q = 0; q < 16; q++)
    {
        for (int i = 0; i < 8; i++)
            CHECK(std::abs(std::abs(w.w(q, i)) - mag) <= 1e-15);
        CHECK(std::abs(w.w.row(q).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("build_sampling_matrix: definition, exact unit modulus")
{
    auto rng = make_rng(7);
    int q_n = 5, n_a = 4;
    BeamWeights tx = draw_beam_weights(rng, q_n, n_a);
    BeamWeights rx = draw_beam_weights(rng, q_n, n_a);
    SamplingMatrix a = build_sampling_matrix(tx, rx);
    REQUIRE(a.a.rows() == q_n);
    REQUIRE(a.a.cols() == n_a * n_a);
    for (int q = 0; q < q_n; q++)
        for (int j = 0; j < n_a; j++)
            for (int i = 0; i < n_a; i++)
            {
                cplx got = a.a(q, i + j * n_a);
                CHECK(std::abs(got - 4.0 * tx.w(q, j) * std::conj(rx.w(q, i))) <= 1e-14);
                CHECK(std::abs(std::abs(got) - 1.0) <= 1e-12);
            }
}

TEST_CASE("sampling matrix entries: zero mean, uniform phase, decorrelated")
{
    // products of independent uniform phases stay independent uniform:
    // checked as zero empirical mean, KS-uniform phases, and small empirical
    // correlation between entries sharing one weight factor
    auto rng = make_rng(2024);
    const int draws = 12500, n_a = 4; // 12500 * 8 entries with shared factors
    cplx mean_fixed = 0.0;
    std::vector<double> phases;
    phases.reserve(draws);
    cplx corr_shared = 0.0;
    for (int d = 0; d < draws; d++)
    {
        BeamWeights tx = draw_beam_weights(rng, 1, n_a);
        BeamWeights rx = draw_beam_weights(rng, 1, n_a);
        SamplingMatrix a = build_sampling_matrix(tx, rx);
        mean_fixed += a.a(0, 5);
        for (int j = 0; j < 2; j++)
            for (int i = 0; i < 2; i++)
                phases.push_back(std::arg(a.a(0, i + j * n_a)) / (2.0 * pi) + 0.5);
        // same tx factor (column j=1), different rx rows
        corr_shared += a.a(0, 0 + 1 * n_a) * std::conj(a.a(0, 1 + 1 * n_a));
    }
    mean_fixed /= double(draws);
    corr_shared /= double(draws);
    CHECK(std::abs(mean_fixed.real()) <= 3.0 / std::sqrt(double(draws)));
    CHECK(std::abs(mean_fixed.imag()) <= 3.0 / std::sqrt(double(draws)));
    CHECK(oracles::ks_uniform_pvalue(phases) > 0.01);
    CHECK(std::abs(corr_shared) <= 0.02);
}

TEST_CASE("row_shrink: frozen values")
{
    MatrixXcd x(3, 2);
    x << cplx(3, 0), cplx(4, 0),   // norm 5
        cplx(0.3, 0),  cplx(0.4, 0), // norm 0.5 <= t
        cplx(0, 2), cplx(0, 0);    // norm 2
    row_shrink(x, 2.0);
    CHECK(std::abs(x(0, 0) - cplx(1.8, 0)) <= 1e-12);
    CHECK(std::abs(x(0, 1) - cplx(2.4, 0)) <= 1e-12);
    CHECK(x.row(1).norm() == 0.0);
    CHECK(x.row(2).norm() == 0.0); // norm exactly at threshold collapses

    MatrixXcd y = MatrixXcd::Random(4, 3);
    MatrixXcd y0 = y;
    row_shrink(y, 0.0);
    CHECK((y - y0).norm() <= 1e-15);
}

namespace
{

// planted 1-sparse measurement: one beamspace row active, unit pilot bins
MeasurementBlock planted_measurement(const SamplingMatrix &a, int row, const VectorXcd &vals,
                                     int seq_length)
{
    const int n_f = static_cast<int>(vals.size());
    MeasurementBlock y;
    y.seq_length = seq_length;
    y.noise_power = 0.0;
    y.freq_set = VectorXi::LinSpaced(n_f, 0, n_f - 1);
    double scale = 1.0 / (a.n_antennas * std::sqrt(double(seq_length)));
    y.y = (a.a.col(row) * scale) * vals.transpose();
    return y;
}

} // namespace

TEST_CASE("block_ista_solve: noiseless one-sparse recovery and monotone objective")
{
    const int n_a = 4, q_n = 8, m_s = 4, m_len = 64;
    int hits = 0;
    for (int seed = 0; seed < 20; seed++)
    {
        auto rng = make_rng(100 + seed);
        SamplingMatrix a =
            build_sampling_matrix(draw_beam_weights(rng, q_n, n_a), draw_beam_weights(rng, q_n, n_a));
        std::uniform_int_distribution<int> pick(0, n_a * n_a - 1);
        int row = pick(rng);
        VectorXcd vals = draw_cgauss(rng, m_s, 1, 1.0).col(0) * 5.0;
        MeasurementBlock y = planted_measurement(a, row, vals, m_len);

        double gamma = 0.1 * (a.a.adjoint() * y.y).rowwise().norm().maxCoeff() /
                       (a.n_antennas * std::sqrt(double(m_len)));
        BeamspaceEstimate est = block_ista_solve(y, a, gamma, 500, 1e-9);
        for (size_t i = 1; i < est.objective.size(); i++)
            CHECK(est.objective[i] <= est.objective[i - 1] + 1e-12);

        BeamPair bp = extract_beam_pair(est, n_a);
        REQUIRE(bp.ok);
        if (bp.row == row)
            hits++;
        CHECK(bp.rx_beam == bp.row % n_a);
        CHECK(bp.tx_beam == bp.row / n_a);
    }
    CHECK(hits >= 19);
}

TEST_CASE("block_ista_solve: zero shrinkage with full rank recovers least squares")
{
    const int n_a = 2, q_n = 12, m_s = 2, m_len = 16;
    auto rng = make_rng(5);
    SamplingMatrix a =
        build_sampling_matrix(draw_beam_weights(rng, q_n, n_a), draw_beam_weights(rng, q_n, n_a));
    MatrixXcd x_true = draw_cgauss(rng, n_a * n_a, m_s, 1.0);
    MeasurementBlock y;
    y.seq_length = m_len;
    y.freq_set = VectorXi::LinSpaced(m_s, 0, m_s - 1);
    y.y = a.a * x_true / (n_a * std::sqrt(double(m_len)));
    BeamspaceEstimate est = block_ista_solve(y, a, 0.0, 20000, 1e-12);
    CHECK((est.x - x_true).norm() <= 1e-5 * x_true.norm());
}

TEST_CASE("extract_beam_pair: all-zero signals failure")
{
    BeamspaceEstimate est;
    est.x = MatrixXcd::Zero(16, 4);
    BeamPair bp = extract_beam_pair(est, 4);
    CHECK(!bp.ok);
    est.x(9, 2) = cplx(0, 3); // row 9 = rx 1, tx 2
    bp = extract_beam_pair(est, 4);
    CHECK(bp.ok);
    CHECK(bp.row == 9);
    CHECK(bp.rx_beam == 1);
    CHECK(bp.tx_beam == 2);
    CHECK(bp.row_norm == doctest::Approx(3.0));
}

TEST_CASE("simulate_measurement matches the time-domain reference")
{
    const int n_a = 4, m_len = 64, m_s = 4, q_n = 3;
    const double f0 = 100e9, bw = 2e9;
    RoomSpec room;
    room.max_order = 1;
    DevicePose tx = make_pose({2, 3, 1.2}, Vec3{0.5, 0.8, 0.1}.normalized(), n_a, f0);
    DevicePose rx = make_pose({7, 6, 1.6}, Vec3{-0.4, 0.9, 0.0}.normalized(), n_a, f0);
    DiscreteChannel ch = discretize_channel(trace_paths(room, tx, rx, f0), tx, rx, bw, PulseSpec{});
    REQUIRE(ch.n_taps() <= m_len);
    Codebook cb(n_a);
    MatrixXcd bs = beamspace(to_frequency_domain(ch, m_len), cb);

    auto rng = make_rng(31);
    WeightVector w = flat_spectrum_sequence(m_s, 0.2, 50000, rng);
    double t_sample = 1.0 / bw;
    double p_tx = dbm_to_watt(-15.0);
    PilotSequence pilot = design_pilot(PilotSpec{m_len, m_s, 2, p_tx * m_len * t_sample}, w);

    BeamWeights wt = draw_beam_weights(rng, q_n, n_a);
    BeamWeights wr = draw_beam_weights(rng, q_n, n_a);
    SamplingMatrix a = build_sampling_matrix(wt, wr);

    MeasurementBlock got = simulate_measurement(bs, a, pilot, 0.0, bw, rng);
    MatrixXcd ref_full = oracles::time_domain_measurement(ch, cb, wt, wr, pilot, bw);
    MatrixXcd ref(q_n, m_s);
    for (int l = 0; l < m_s; l++)
        ref.col(l) = ref_full.col(pilot.freq_set[l]);
    CHECK((got.y - ref).norm() <= 1e-8 * ref.norm());
}

TEST_CASE("simulate_measurement: noise variance and rng discipline")
{
    const int n_a = 2, m_len = 32, m_s = 16, q_n = 40;
    auto rng = make_rng(9);
    WeightVector w = flat_spectrum_sequence(m_s, 0.3, 50000, rng);
    PilotSequence pilot = design_pilot(PilotSpec{m_len, m_s, 0, double(m_len)}, w);
    SamplingMatrix a =
        build_sampling_matrix(draw_beam_weights(rng, q_n, n_a), draw_beam_weights(rng, q_n, n_a));
    MatrixXcd bs = MatrixXcd::Zero(n_a * n_a, m_len); // signal off: pure noise

    double n0 = 1e-12, bw = 1e9;
    auto rng_a = make_rng(77);
    MeasurementBlock y = simulate_measurement(bs, a, pilot, n0, bw, rng_a);
    CHECK(y.noise_power == doctest::Approx(n0 * bw));
    double var = y.y.squaredNorm() / double(q_n * m_s);
    CHECK(std::abs(var / (n0 * bw) - 1.0) <= 0.15);

    // noiseless synthesis must not consume randomness
    auto rng_b = make_rng(123);
    auto before = rng_b();
    auto rng_c = make_rng(123);
    simulate_measurement(bs, a, pilot, 0.0, bw, rng_c);
    CHECK(rng_c() == before);
}

TEST_CASE("per-bin measurement power scales with energy over bins")
{
    const int n_a = 2, m_len = 64, q_n = 6;
    auto rng = make_rng(12);
    SamplingMatrix a =
        build_sampling_matrix(draw_beam_weights(rng, q_n, n_a), draw_beam_weights(rng, q_n, n_a));
    MatrixXcd bs = MatrixXcd::Ones(n_a * n_a, m_len); // flat beamspace
    double e = 64.0, bw = 1e9;

    WeightVector w4 = flat_spectrum_sequence(4, 0.05, 100000, rng);
    WeightVector w16 = flat_spectrum_sequence(16, 0.05, 100000, rng);
    REQUIRE(w4.converged);
    REQUIRE(w16.converged);
    MeasurementBlock y4 = simulate_measurement(
        bs, a, design_pilot(PilotSpec{m_len, 4, 0, e}, w4), 0.0, bw, rng);
    MeasurementBlock y16 = simulate_measurement(
        bs, a, design_pilot(PilotSpec{m_len, 16, 0, e}, w16), 0.0, bw, rng);
    double p4 = y4.y.squaredNorm() / 4.0;   // mean per-column power
    double p16 = y16.y.squaredNorm() / 16.0;
    CHECK(p4 / p16 == doctest::Approx(4.0).epsilon(0.03)); // E/M_s ratio
}
