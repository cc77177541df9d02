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

#include "combalign/baseline.hpp"
#include "combalign/rng.hpp"

using namespace combalign;

TEST_CASE("one_sided_beamspace: first-element row through the codebook")
{
    const int n_a = 4, m_bins = 8;
    auto rng = make_rng(3);
    FrequencyChannel ch;
    for (int m = 0; m < m_bins; m++)
        ch.bins.push_back(draw_cgauss(rng, n_a, n_a, 1.0));
    Codebook cb(n_a);
    OneSidedBeamspace bs = one_sided_beamspace(ch, cb);
    REQUIRE(bs.n_beams() == n_a);
    REQUIRE(bs.n_bins() == m_bins);
    for (int m = 0; m < m_bins; m++)
        for (int b = 0; b < n_a; b++)
        {
            cplx expect = (ch.bins[static_cast<size_t>(m)].row(0) * cb.c.col(b))(0, 0);
            CHECK(std::abs(bs.g(b, m) - expect) <= 1e-13);
        }
}

TEST_CASE("draw_probe_weights: half subsets are unit norm, signed, half active")
{
    auto rng = make_rng(21);
    BeamWeights p = draw_probe_weights(rng, 32, 8, ProbeKind::half_subset);
    double mag = std::sqrt(2.0 / 8.0);
    for (int q = 0; q < 32; q++)
    {
        int active = 0;
        for (int b = 0; b < 8; b++)
        {
            double a = std::abs(p.w(q, b));
            if (a > 0)
            {
                active++;
                CHECK(std::abs(a - mag) <= 1e-14);
                CHECK(std::abs(p.w(q, b).imag()) == 0.0);
            }
        }
        CHECK(active == 4);
        CHECK(std::abs(p.w.row(q).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("draw_probe_weights: one-hot sweep cycles the beams")
{
    auto rng = make_rng(4);
    BeamWeights p = draw_probe_weights(rng, 6, 4, ProbeKind::one_hot);
    for (int q = 0; q < 6; q++)
        for (int b = 0; b < 4; b++)
            CHECK(p.w(q, b) == ((b == q % 4) ? cplx(1, 0) : cplx(0, 0)));
}

TEST_CASE("simulate_one_sided matches the antenna-domain computation")
{
    const int n_a = 4, m_len = 32, m_s = 4;
    auto rng = make_rng(17);
    FrequencyChannel ch;
    for (int m = 0; m < m_len; m++)
        ch.bins.push_back(draw_cgauss(rng, n_a, n_a, 1.0));
    Codebook cb(n_a);
    OneSidedBeamspace bs = one_sided_beamspace(ch, cb);

    WeightVector w = flat_spectrum_sequence(m_s, 0.2, 50000, rng);
    PilotSequence pilot = design_pilot(PilotSpec{m_len, m_s, 1, double(m_len)}, w);
    BeamWeights probes = draw_probe_weights(rng, 5, n_a);
    double bw = 1e9;
    MeasurementBlock y = simulate_one_sided(bs, probes, pilot, 0.0, bw, rng);

    for (int q = 0; q < 5; q++)
    {
        VectorXcd v = cb.c * probes.w.row(q).transpose(); // antenna weights
        for (int l = 0; l < m_s; l++)
        {
            int m = pilot.freq_set[l];
            cplx expect = (ch.bins[static_cast<size_t>(m)].row(0) * v)(0, 0) *
                          pilot.spectrum[m] / std::sqrt(1.0 / bw);
            CHECK(std::abs(y.y(q, l) - expect) <= 1e-10 * std::abs(expect));
        }
    }
}

TEST_CASE("noncoherent_combine: frozen energies")
{
    MeasurementBlock b;
    b.y.resize(2, 2);
    b.y << cplx(3, 4), cplx(0, 0), cplx(1, 0), cplx(0, 2);
    VectorXd e = noncoherent_combine(b);
    CHECK(e[0] == doctest::Approx(25.0));
    CHECK(e[1] == doctest::Approx(5.0));
}

TEST_CASE("l1_solve: orthogonal sweep recovers the dominant beam exactly")
{
    const int n_a = 8, m_len = 64, m_s = 8;
    auto rng = make_rng(5);
    // single dominant transmit beam: g(b0, m) large, others zero
    OneSidedBeamspace bs;
    bs.g = MatrixXcd::Zero(n_a, m_len);
    int b0 = 5;
    for (int m = 0; m < m_len; m++)
        bs.g(b0, m) = std::polar(2.0, 0.7 * m);

    WeightVector w = flat_spectrum_sequence(m_s, 0.2, 50000, rng);
    PilotSequence pilot = design_pilot(PilotSpec{m_len, m_s, 0, double(m_len)}, w);
    BeamWeights probes = draw_probe_weights(rng, n_a, n_a, ProbeKind::one_hot);
    MeasurementBlock y = simulate_one_sided(bs, probes, pilot, 0.0, 1e9, rng);
    VectorXd e = noncoherent_combine(y);
    VectorXd g = l1_solve(e, probes, 0.0, 1e-6 * e.maxCoeff());
    REQUIRE(g.size() == n_a);
    CHECK(g.minCoeff() >= 0.0);
    Eigen::Index imax = 0;
    g.maxCoeff(&imax);
    // brute force over beams agrees
    Eigen::Index ebest = 0;
    e.maxCoeff(&ebest);
    CHECK(static_cast<int>(imax) == b0);
    CHECK(static_cast<int>(ebest) == b0);
}

TEST_CASE("l1_solve: noise floor subtraction and shrinkage suppress idle beams")
{
    const int n_a = 8;
    auto rng = make_rng(6);
    BeamWeights probes = draw_probe_weights(rng, 64, n_a, ProbeKind::half_subset);
    MatrixXd phi = probes.w.cwiseAbs2();
    VectorXd g_true = VectorXd::Zero(n_a);
    g_true[2] = 10.0;
    double floor = 0.5;
    VectorXd e = phi * g_true;
    e.array() += floor; // constant offset from noise energy
    VectorXd g = l1_solve(e, probes, floor, 0.05);
    Eigen::Index imax = 0;
    g.maxCoeff(&imax);
    CHECK(static_cast<int>(imax) == 2);
    CHECK(g[2] == doctest::Approx(10.0).epsilon(0.05));
    for (int b = 0; b < n_a; b++)
        if (b != 2)
            CHECK(g[b] <= 0.2);
}

TEST_CASE("rank1_estimate: argmax pair and failure flag")
{
    VectorXd a(4), b(4);
    a << 0.0, 3.0, 1.0, 0.0;
    b << 2.0, 0.0, 0.0, 1.0;
    OneSidedPair p = rank1_estimate(a, b);
    REQUIRE(p.ok);
    CHECK(p.beam_a == 1);
    CHECK(p.beam_b == 0);

    VectorXd z = VectorXd::Zero(4);
    CHECK(!rank1_estimate(z, b).ok);
    CHECK(!rank1_estimate(a, z).ok);
}
