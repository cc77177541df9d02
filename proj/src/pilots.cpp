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

#include "combalign/pilots.hpp"

#include "combalign/fft.hpp"
#include "combalign/rng.hpp"

namespace combalign
{

VectorXi frequency_set(int length, int bins, int offset)
{
    PilotSpec s{length, bins, offset, 1.0};
    s.validate();
    int eta = length / bins;
    VectorXi f(bins);
    for (int l = 0; l < bins; l++)
        f[l] = offset + l * eta;
    return f;
}

namespace
{

double spectral_flatness_db(const VectorXcd &z)
{
    VectorXd mag = z.cwiseAbs();
    double mean = mag.mean();
    if (mean <= 0.0)
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < mag.size(); i++)
    {
        double dev = std::abs(db20(std::max(mag[i], 1e-300) / mean));
        worst = std::max(worst, dev);
    }
    return worst;
}

} // namespace

WeightVector flat_spectrum_sequence(int n, double tol_db, int max_iter, std::mt19937_64 &rng)
{
    require(n >= 1, "flat_spectrum_sequence", "n must be positive");
    require(tol_db > 0.0, "flat_spectrum_sequence", "tol_db must be positive");
    require(max_iter >= 1, "flat_spectrum_sequence", "max_iter must be positive");

    auto random_start = [&]() {
        VectorXd phases = draw_phases(rng, n);
        VectorXcd v(n);
        for (int i = 0; i < n; i++)
            v[i] = std::polar(1.0, phases[i]);
        return v;
    };

    VectorXcd w = random_start();
    WeightVector out;
    out.weights = w;
    out.flatness_db = std::numeric_limits<double>::infinity();

    double target = std::sqrt(static_cast<double>(n)); // flat |DFT| level for unit-modulus w
    const int stall_window = 500; // restart from fresh phases when progress stops
    double window_best = std::numeric_limits<double>::infinity();
    int since_improvement = 0;

    for (int it = 0; it < max_iter; it++)
    {
        VectorXcd z = fft(w);
        double flat = spectral_flatness_db(z);
        if (flat < out.flatness_db)
        {
            out.flatness_db = flat;
            out.weights = w;
            out.iterations = it;
        }
        if (flat <= tol_db)
        {
            out.converged = true;
            break;
        }
        if (flat < window_best - 1e-9)
        {
            window_best = flat;
            since_improvement = 0;
        }
        else if (++since_improvement >= stall_window)
        {
            w = random_start();
            window_best = std::numeric_limits<double>::infinity();
            since_improvement = 0;
            continue;
        }
        // project spectrum magnitudes to the flat level, keep phases
        for (int m = 0; m < n; m++)
        {
            double a = std::abs(z[m]);
            z[m] = (a > 0.0) ? cplx(z[m] * (target / a)) : cplx(target, 0.0);
        }
        w = ifft(z);
        // project back to unit modulus
        for (int i = 0; i < n; i++)
        {
            double a = std::abs(w[i]);
            w[i] = (a > 0.0) ? cplx(w[i] / a) : cplx(1.0, 0.0);
        }
    }
    return out;
}

PilotSequence design_pilot(const PilotSpec &spec, const WeightVector &w)
{
    spec.validate();
    require(w.weights.size() == spec.bins, "design_pilot",
            "weight vector length must equal the bin count");

    int m_total = spec.length, m_s = spec.bins, k = spec.offset;
    int eta = spec.comb_spacing();

    // eta-point tone from a unit impulse at bin k
    VectorXcd impulse = VectorXcd::Zero(eta);
    impulse[k] = 1.0;
    VectorXcd tone = ifft(impulse); // (1/eta) e^{j2pi kn/eta}

    // zero-stuff by the bin count
    VectorXcd base = VectorXcd::Zero(m_total);
    for (int a = 0; a < eta; a++)
        base[a * m_s] = tone[a];

    // offset rotation keeps the weight DFT aligned with the comb bins
    VectorXcd mu(m_s);
    for (int b = 0; b < m_s; b++)
        mu[b] = w.weights[b] * std::polar(1.0, 2.0 * pi * k * b / m_total);

    // cyclic-shift combination: s[n] = sum_b mu[b] * base[(n - b) mod M]
    VectorXcd s = VectorXcd::Zero(m_total);
    for (int b = 0; b < m_s; b++)
        for (int n = 0; n < m_total; n++)
            s[n] += mu[b] * base[(n - b + m_total) % m_total];

    double e_raw = s.squaredNorm();
    require(e_raw > 0.0, "design_pilot", "degenerate construction");
    s *= std::sqrt(spec.energy / e_raw);

    PilotSequence out;
    out.spec = spec;
    out.samples = s;
    out.spectrum = fft_unitary(s);
    out.freq_set = frequency_set(m_total, m_s, k);
    return out;
}

} // namespace combalign
