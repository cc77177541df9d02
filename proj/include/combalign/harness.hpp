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
//
// Experiment orchestration: scenario configuration, Monte-Carlo alignment
// trials across sweep grids, angle-error and sum-spectral-efficiency
// aggregation, and CSV/manifest export.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "combalign/comm.hpp"
#include "combalign/netsched.hpp"

namespace combalign
{

inline constexpr const char *version_string = "combalign 0.1.0";

// Spatial frequency a device's array sees toward a peer: axis . direction.
// This is the ground-truth value of the device's best transmit beam; the
// matching receive beam sits at the reciprocal (negated) index.
double link_spatial_frequency(const DevicePose &device, const DevicePose &peer);

struct TaperConfig
{
    double beamwidth_deg = 7.0;
    double min_ripple_db = 15.0;
};

struct ExperimentConfig
{
    NetworkScenario scenario;                // default: default_scenario()
    AlignMethod method = AlignMethod::mmv;
    AlignmentConfig align;                   // base operating point
    TaperConfig taper;
    std::vector<int> q_grid;                 // pilots per round; empty = {align.n_probes}
    std::vector<int> ms_grid;                // comb sizes; empty = {align.bins}
    std::vector<double> tx_power_grid_w;     // empty = {align.tx_power_w}
    int trials = 1;
    std::uint64_t master_seed = 1;

    void validate() const;
    // Sweep axes with the base-point fallbacks applied.
    std::vector<int> effective_q_grid() const;
    std::vector<int> effective_ms_grid() const;
    std::vector<double> effective_power_grid() const;
};

// Documented default layout: 8 devices spread over the 10 m x 10 m x 3 m
// room with varied array orientations.
NetworkScenario default_scenario(int n_devices = 8, int n_antennas = 32,
                                 double carrier_hz = 100e9);

// One estimated pointing direction: the device's transmit beam toward the
// peer, against the geometric line-of-sight angle. Failed estimates fall
// back to a seeded uniform beam pick and keep ok = false.
struct AngleRecord
{
    int trial = 0;
    AlignMethod method = AlignMethod::mmv;
    int q = 0;
    int m_s = 0;
    double p_tx_w = 0.0;
    int device = 0;
    int peer = 0;
    int beam = 0;
    bool ok = false;
    double true_angle_deg = 0.0;
    double est_angle_deg = 0.0;
    double abs_err_deg = 0.0;
};

// Sum spectral efficiency over the fixed communication pairing
// (0,1), (2,3), ... using flat-top beams steered by the alignment table,
// next to the genie value for the same pairing, taper, and power.
struct SumSeRecord
{
    int trial = 0;
    AlignMethod method = AlignMethod::mmv;
    int q = 0;
    int m_s = 0;
    double p_tx_w = 0.0;
    double sum_se = 0.0;
    double genie_sum_se = 0.0;
    int n_links = 0;
    int n_failed = 0;
};

struct ResultSet
{
    int n_devices = 0;
    int n_antennas = 0;
    std::uint64_t master_seed = 0;
    std::vector<AngleRecord> angles;
    std::vector<SumSeRecord> se;
};

// Rounds needed to fill the table: ceil(log2 K) halving levels, twice that
// for the one-sided baseline (two sweep phases per level).
int alignment_rounds(AlignMethod method, int n_devices);

// Runs trials x sweep-grid alignments and evaluates each resulting table.
// Worker threads share the channel cache; records land in pre-assigned
// slots so the output is identical at any thread count. n_threads = 0
// picks the hardware concurrency.
ResultSet run_experiment(const ExperimentConfig &cfg, int n_threads = 0);

struct MaeRow
{
    AlignMethod method;
    int m_s = 0;
    int q = 0;
    int total_pilots = 0;
    double p_tx_w = 0.0;
    double mae_deg = 0.0;      // per-direction: every endpoint record counts
    double mae_link_deg = 0.0; // per-link: endpoint errors averaged per pair first
    double fail_rate = 0.0;
    int n_records = 0;
};

struct CdfRow
{
    AlignMethod method;
    double p_tx_w = 0.0;
    int q = 0;
    double err_deg = 0.0;
    double prob = 0.0;
};

struct SumSeRow
{
    AlignMethod method;
    int m_s = 0;
    int q = 0;
    int total_pilots = 0;
    double p_tx_w = 0.0;
    double mean_sum_se = 0.0;
    double genie_sum_se = 0.0;
    int n_trials = 0;
};

struct Aggregates
{
    std::vector<MaeRow> mae;       // grouped by (method, m_s, q, p_tx)
    std::vector<CdfRow> cdf;       // grouped by (method, p_tx, q), errors ascending
    std::vector<SumSeRow> sum_se;  // grouped by (method, m_s, q, p_tx)
};

Aggregates aggregate(const ResultSet &results);

// JSON configuration. Every field is optional and defaults to the values
// above; parse errors throw std::invalid_argument with the offending key.
ExperimentConfig parse_experiment_config(const std::string &json_text);
ExperimentConfig load_experiment_config(const std::string &path);
std::string experiment_config_json(const ExperimentConfig &cfg);

// CSV / manifest writers. Numeric formatting is fixed so identical inputs
// produce byte-identical files.
void write_records_csv(const ResultSet &results, std::ostream &out);
void write_mae_csv(const Aggregates &agg, std::ostream &out);
void write_cdf_csv(const Aggregates &agg, std::ostream &out);
void write_sum_se_csv(const Aggregates &agg, std::ostream &out);
void write_run_manifest(const ExperimentConfig &cfg, std::ostream &out);

const char *method_name(AlignMethod method);

} // namespace combalign
