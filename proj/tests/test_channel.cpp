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
#include "combalign/fft.hpp"
#include "support/oracles.hpp"

using namespace combalign;

namespace
{

RoomSpec default_room(int order, cplx gamma = cplx(-0.3, 0.0))
{
    RoomSpec r;
    r.width = 10.0;
    r.depth = 10.0;
    r.height = 3.0;
    r.reflection = gamma;
    r.max_order = order;
    return r;
}

} // namespace

TEST_CASE("raised_cosine: unit peak, Nyquist zeros, removable singularity")
{
    CHECK(raised_cosine(0.0, 0.25) == doctest::Approx(1.0));
    for (int n = 1; n <= 8; n++)
    {
        CHECK(std::abs(raised_cosine(double(n), 0.25)) <= 1e-12);
        CHECK(std::abs(raised_cosine(double(-n), 0.25)) <= 1e-12);
    }
    // the 1/(2a) singularity must match nearby values (continuity)
    double edge = 1.0 / (2.0 * 0.35);
    double v0 = raised_cosine(edge, 0.35);
    double v1 = raised_cosine(edge + 1e-7, 0.35);
    CHECK(std::abs(v0 - v1) <= 1e-5);
    CHECK(std::abs(raised_cosine(edge, 0.35) - raised_cosine(-edge, 0.35)) <= 1e-15);
}

TEST_CASE("trace_paths: image counts for bounded bounce orders")
{
    // combinatorial oracle: per axis 1 image at bounce 0, two per bounce b>=1;
    // sum over bx+by+bz <= B gives 1, 7, 25, 63
    DevicePose a = make_pose({2, 3, 1}, {1, 0, 0}, 1, 100e9);
    DevicePose b = make_pose({7, 6, 2}, {1, 0, 0}, 1, 100e9);
    CHECK(trace_paths(default_room(0), a, b, 100e9).paths.size() == 1);
    CHECK(trace_paths(default_room(1), a, b, 100e9).paths.size() == 7);
    CHECK(trace_paths(default_room(2), a, b, 100e9).paths.size() == 25);
    CHECK(trace_paths(default_room(3), a, b, 100e9).paths.size() == 63);
}

TEST_CASE("trace_paths: line-of-sight delay and free-space amplitude")
{
    // frozen by hand: d = 5 m, f0 = 100 GHz
    // tau = 5 / 299792458 = 1.66782047599076e-8 s
    // amp = (c/f0) / (4 pi 5)  = 4.77134515731523e-5
    DevicePose a = make_pose({1, 1, 1}, {1, 0, 0}, 1, 100e9);
    DevicePose b = make_pose({4, 5, 1}, {1, 0, 0}, 1, 100e9);
    PathSet ps = trace_paths(default_room(0), a, b, 100e9);
    REQUIRE(ps.paths.size() == 1);
    CHECK(ps.paths[0].bounces == 0);
    CHECK(ps.paths[0].delay == doctest::Approx(1.66782047599076e-8).epsilon(1e-12));
    CHECK(std::abs(ps.paths[0].amplitude) ==
          doctest::Approx(4.77134515731523e-5).epsilon(1e-12));
    CHECK(ps.paths[0].amplitude.imag() == 0.0);
}

TEST_CASE("trace_paths: first-order reflection geometry")
{
    // floor bounce (z = 0 wall): image at z -> -z, frozen unfolded length
    RoomSpec room = default_room(1, cplx(0.5, 0.0));
    DevicePose a = make_pose({2, 2, 1}, {1, 0, 0}, 1, 100e9);
    DevicePose b = make_pose({6, 2, 1}, {1, 0, 0}, 1, 100e9);
    PathSet ps = trace_paths(room, a, b, 100e9);
    REQUIRE(ps.paths.size() == 7);
    // find the floor image: sign.z = -1, offset.z = 0
    int found = 0;
    for (const auto &p : ps.paths)
        if (p.sign.z < 0 && std::abs(p.offset.z) < 1e-12 && p.sign.x > 0 && p.sign.y > 0 &&
            std::abs(p.offset.x) < 1e-12 && std::abs(p.offset.y) < 1e-12)
        {
            found++;
            CHECK(p.bounces == 1);
            double d = std::sqrt(16.0 + 4.0); // sqrt((6-2)^2 + (1+1)^2)
            CHECK(p.delay == doctest::Approx(d / speed_of_light).epsilon(1e-12));
            // one bounce multiplies by the reflection coefficient
            double amp = (speed_of_light / 100e9) / (4.0 * pi * d) * 0.5;
            CHECK(std::abs(p.amplitude) == doctest::Approx(amp).epsilon(1e-12));
        }
    CHECK(found == 1);
}

TEST_CASE("discretize_channel: on-grid single path hits tap zero only")
{
    DevicePose a = make_pose({1, 1, 1}, {1, 0, 0}, 1, 100e9);
    DevicePose b = make_pose({4, 5, 1}, {1, 0, 0}, 1, 100e9);
    PathSet ps = trace_paths(default_room(0), a, b, 100e9);
    DiscreteChannel ch = discretize_channel(ps, a, b, 2e9, PulseSpec{}, -60.0);
    REQUIRE(ch.n_taps() == 1); // Nyquist zeros trim everything past tap 0
    // tap0 = amp * e^{-j2pi f0 tau} * g(0)
    cplx expect = ps.paths[0].amplitude * std::polar(1.0, -2.0 * pi * 100e9 * ps.paths[0].delay);
    CHECK(std::abs(ch.taps[0](0, 0) - expect) <= 1e-15);
    CHECK(ch.tau0 == doctest::Approx(ps.paths[0].delay).epsilon(1e-15));
}

TEST_CASE("discretize_channel: off-grid single path reproduces the pulse profile")
{
    DevicePose a = make_pose({1, 1, 1}, {1, 0, 0}, 1, 100e9);
    DevicePose b = make_pose({4.123, 5.371, 1.2}, {1, 0, 0}, 1, 100e9);
    RoomSpec room = default_room(1, cplx(-0.4, 0.1));
    PathSet ps = trace_paths(room, a, b, 100e9);
    double bw = 2e9;
    PulseSpec pulse;
    DiscreteChannel ch = discretize_channel(ps, a, b, bw, pulse, -200.0);

    // independent per-tap superposition of shifted pulses
    double tau0 = ps.paths[0].delay;
    for (const auto &p : ps.paths)
        tau0 = std::min(tau0, p.delay);
    CHECK(ch.tau0 == doctest::Approx(tau0).epsilon(1e-15));
    for (int n = 0; n < ch.n_taps(); n++)
    {
        cplx expect = 0.0;
        for (const auto &p : ps.paths)
        {
            double c = (p.delay - tau0) / (1.0 / bw);
            if (std::abs(n - c) <= pulse.span)
                expect += p.amplitude * std::polar(1.0, -2.0 * pi * 100e9 * p.delay) *
                          raised_cosine(n - c, pulse.rolloff);
        }
        CHECK(std::abs(ch.taps[static_cast<size_t>(n)](0, 0) - expect) <= 1e-18);
    }
}

TEST_CASE("discretize_channel: reciprocity gives transposed taps")
{
    DevicePose a = make_pose({2, 2, 1}, Vec3{0.6, 0.8, 0}.normalized(), 4, 100e9);
    DevicePose b = make_pose({7, 6, 2}, Vec3{-0.3, 1, 0.1}.normalized(), 4, 100e9);
    RoomSpec room = default_room(2);
    PathSet fwd = trace_paths(room, a, b, 100e9);
    PathSet rev = trace_paths(room, b, a, 100e9);
    DiscreteChannel cf = discretize_channel(fwd, a, b, 2e9, PulseSpec{}, -80.0);
    DiscreteChannel cr = discretize_channel(rev, b, a, 2e9, PulseSpec{}, -80.0);
    REQUIRE(cf.n_taps() == cr.n_taps());
    CHECK(cf.tau0 == doctest::Approx(cr.tau0).epsilon(1e-15));
    for (int n = 0; n < cf.n_taps(); n++)
    {
        double diff = (cf.taps[static_cast<size_t>(n)] -
                       cr.taps[static_cast<size_t>(n)].transpose())
                          .norm();
        CHECK(diff <= 1e-16 + 1e-12 * cf.taps[static_cast<size_t>(n)].norm());
    }
}

TEST_CASE("channel_length: synthetic profiles")
{
    DiscreteChannel ch;
    ch.sample_period = 1.0;
    auto tap = [](double v) {
        MatrixXcd m(1, 1);
        m(0, 0) = v;
        return m;
    };
    ch.taps = {tap(1.0), tap(0.1), tap(1e-9)};
    CHECK(channel_length(ch, -60.0) == 2);
    ch.taps = {tap(1.0)};
    CHECK(channel_length(ch, -60.0) == 1);
    ch.taps = {tap(1.0), tap(0.5), tap(0.2)};
    CHECK(channel_length(ch, -60.0) == 3);
    ch.taps = {tap(0.0)};
    CHECK_THROWS_AS(channel_length(ch, -60.0), std::invalid_argument);
    ch.taps = {tap(1.0)};
    CHECK_THROWS_AS(channel_length(ch, 3.0), std::invalid_argument);
}

TEST_CASE("to_frequency_domain: matches direct DFT and Parseval")
{
    DevicePose a = make_pose({2, 2, 1}, Vec3{0.6, 0.8, 0}.normalized(), 2, 100e9);
    DevicePose b = make_pose({6.7, 5.1, 1.5}, Vec3{0, 1, 0}.normalized(), 2, 100e9);
    PathSet ps = trace_paths(default_room(1), a, b, 100e9);
    DiscreteChannel ch = discretize_channel(ps, a, b, 2e9, PulseSpec{}, -60.0);
    int m_bins = 128;
    REQUIRE(ch.n_taps() <= m_bins);
    FrequencyChannel fc = to_frequency_domain(ch, m_bins);

    // per-entry reference DFT
    for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++)
        {
            VectorXcd x = VectorXcd::Zero(m_bins);
            for (int n = 0; n < ch.n_taps(); n++)
                x[n] = ch.taps[static_cast<size_t>(n)](i, j);
            VectorXcd ref = oracles::reference_dft(x, -1);
            for (int m = 0; m < m_bins; m++)
                CHECK(std::abs(fc.bins[static_cast<size_t>(m)](i, j) - ref[m]) <=
                      1e-10 * ref.norm());
        }

    // Parseval with the unnormalized transform: sum_m = M * sum_n
    double et = 0.0, ef = 0.0;
    for (const auto &h : ch.taps)
        et += h.squaredNorm();
    for (const auto &h : fc.bins)
        ef += h.squaredNorm();
    CHECK(std::abs(ef - m_bins * et) <= 1e-10 * ef);

    CHECK_THROWS_AS(to_frequency_domain(ch, ch.n_taps() - 1), std::invalid_argument);
}

TEST_CASE("beamspace: on-grid line-of-sight concentrates on one row")
{
    // geometry engineered so the link direction hits exact codebook centers:
    // tx beam 1 of 8 (u = 0.25), rx beam 6 of 8 (u = -0.5)
    const int n_a = 8;
    const double f0 = 100e9;
    Vec3 e{1, 0, 0};
    DevicePose tx = make_pose({1.5, 5, 1.5}, {0.25, std::sqrt(1 - 0.0625), 0}, n_a, f0);
    DevicePose rx = make_pose({7.5, 5, 1.5}, {-0.5, std::sqrt(0.75), 0}, n_a, f0);
    CHECK(link_spatial_frequency(tx, tx.position, rx.position) == doctest::Approx(0.25));
    CHECK(link_spatial_frequency(rx, tx.position, rx.position) == doctest::Approx(-0.5));

    PathSet ps = trace_paths(default_room(0), tx, rx, f0);
    DiscreteChannel ch = discretize_channel(ps, tx, rx, 2e9, PulseSpec{}, -60.0);
    FrequencyChannel fc = to_frequency_domain(ch, 16);
    Codebook cb(n_a);
    MatrixXcd bs = beamspace(fc, cb);
    REQUIRE(bs.rows() == n_a * n_a);
    REQUIRE(bs.cols() == 16);

    VectorXd row_norms(n_a * n_a);
    for (int r = 0; r < n_a * n_a; r++)
        row_norms[r] = bs.row(r).norm();
    int best = 0;
    row_norms.maxCoeff(&best);
    int expect_rx = 6, expect_tx = 1;
    CHECK(best == expect_rx + expect_tx * n_a);

    // neighbors in each beam dimension sit far below the peak (near-field
    // residue only; exact far field would be a null)
    for (int r : {(expect_rx + 1) % n_a + expect_tx * n_a, (expect_rx + 7) % n_a + expect_tx * n_a,
                  expect_rx + ((expect_tx + 1) % n_a) * n_a,
                  expect_rx + ((expect_tx + 7) % n_a) * n_a})
        CHECK(db20(row_norms[r] / row_norms[best]) < -13.0);
}

TEST_CASE("beamspace: off-grid leakage follows the Dirichlet kernel")
{
    // tx direction halfway between beams 1 and 2: u = 3/8
    const int n_a = 8;
    const double f0 = 100e9;
    double u_tx = 3.0 / 8.0;
    DevicePose tx = make_pose({1.5, 5, 1.5}, {u_tx, std::sqrt(1 - u_tx * u_tx), 0}, n_a, f0);
    DevicePose rx = make_pose({7.5, 5, 1.5}, {-0.5, std::sqrt(0.75), 0}, n_a, f0);
    PathSet ps = trace_paths(default_room(0), tx, rx, f0);
    DiscreteChannel ch = discretize_channel(ps, tx, rx, 2e9, PulseSpec{}, -60.0);
    FrequencyChannel fc = to_frequency_domain(ch, 16);
    MatrixXcd bs = beamspace(fc, Codebook(n_a));

    int i_rx = 6;
    double ref = 0.0;
    for (int j = 0; j < n_a; j++)
        ref = std::max(ref, bs.row(i_rx + j * n_a).norm());
    for (int j = 0; j < n_a; j++)
    {
        double got = bs.row(i_rx + j * n_a).norm() / ref;
        double du = u_tx - beam_center_u(j, n_a);
        double kernel = oracles::dirichlet_gain(du, n_a) /
                        oracles::dirichlet_gain(u_tx - beam_center_u(2, n_a), n_a);
        if (kernel > 0.05) // main beams; deep sidelobes shift with near-field residue
            CHECK(std::abs(db20(got / kernel)) <= 1.5);
    }
}

TEST_CASE("device and room validation")
{
    RoomSpec room = default_room(1);
    DevicePose in = make_pose({5, 5, 1.5}, {1, 0, 0}, 4, 100e9);
    DevicePose out = make_pose({5, 5, 3.5}, {1, 0, 0}, 4, 100e9);
    CHECK_THROWS_AS(trace_paths(room, in, out, 100e9), std::invalid_argument);
    DevicePose bad_axis = in;
    bad_axis.axis = {2, 0, 0};
    CHECK_THROWS_AS(trace_paths(room, bad_axis, in, 100e9), std::invalid_argument);
    RoomSpec bad_room = room;
    bad_room.reflection = cplx(1.5, 0);
    CHECK_THROWS_AS(trace_paths(bad_room, in, in, 100e9), std::invalid_argument);
}
