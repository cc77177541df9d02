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

#ifndef COMBALIGN_NETSCHED_HPP
#define COMBALIGN_NETSCHED_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "combalign/baseline.hpp"
#include "combalign/channel.hpp"
#include "combalign/sensing.hpp"

namespace combalign
{

// One transmitter/receiver group pairing within a round. Every transmitter
// of a cell is estimated by every receiver of the same cell (transmitters
// are separated in frequency; other cells run concurrently).
struct RoundCell
{
    std::vector<int> transmitters;
    std::vector<int> receivers;
};

struct Round
{
    std::vector<RoundCell> cells;

    std::vector<int> transmitters() const;
    std::vector<int> receivers() const;
};

// Recursive-halving schedule. Devices are padded to the next power of two
// with dummies (removed afterwards); each unordered device pair is labeled
// in exactly one round, giving ceil(log2 K) rounds.
struct RoundPlan
{
    int n_devices = 0;
    std::vector<Round> rounds;
};

RoundPlan plan_rounds(int n_devices);

// Comb offsets for concurrent transmitters: ascending device id maps to
// k = 0, 1, .... Throws when more combs are needed than M/M_s.
std::map<int, int> assign_frequency_sets(const std::vector<int> &transmitters, int seq_length,
                                         int bins);
std::map<int, int> assign_frequency_sets(const Round &round, int seq_length, int bins);

struct TableEntry
{
    bool present = false;
    bool ok = false;      // estimator produced a nonzero solution
    bool derived = false; // filled from the reverse direction by reciprocity
    int tx_beam = 0;      // transmit beam at the row device
    int rx_beam = 0;      // receive beam at the column device
    double row_norm = 0.0;
    int round = -1;
};

// Directed beam table: entry (a, b) holds the beams for a transmitting to b.
struct AlignmentTable
{
    int n_devices = 0;
    int n_antennas = 0;
    std::vector<TableEntry> entries;

    AlignmentTable() = default;
    AlignmentTable(int k, int n_a)
        : n_devices(k), n_antennas(n_a),
          entries(static_cast<size_t>(k) * static_cast<size_t>(k))
    {
    }
    TableEntry &at(int a, int b)
    {
        return entries[static_cast<size_t>(a) * n_devices + static_cast<size_t>(b)];
    }
    const TableEntry &at(int a, int b) const
    {
        return entries[static_cast<size_t>(a) * n_devices + static_cast<size_t>(b)];
    }
};

// Static network description. All devices share one array size.
struct NetworkScenario
{
    RoomSpec room;
    std::vector<DevicePose> poses;
    double carrier_hz = 100e9;
    PulseSpec pulse;

    int n_devices() const { return static_cast<int>(poses.size()); }
    void validate() const;
};

// Per-pair channel cache. Taps are stored for every unordered pair;
// frequency responses are memoized while the total stays under a budget.
class LinkChannels
{
  public:
    LinkChannels(const NetworkScenario &scenario, double bandwidth_hz,
                 double rel_threshold_db = -60.0, std::size_t cache_budget_bytes = 256u << 20);

    const DiscreteChannel &taps(int from, int to) const;
    std::shared_ptr<const FrequencyChannel> frequency(int from, int to, int n_bins);
    double bandwidth() const { return bandwidth_hz_; }

  private:
    int n_;
    double bandwidth_hz_;
    std::size_t budget_, used_ = 0;
    std::vector<DiscreteChannel> taps_;                          // n*n directed
    std::map<std::pair<int, int>, std::shared_ptr<const FrequencyChannel>> freq_;
};

enum class AlignMethod
{
    mmv,      // comb pilots + random dual-sided probing + row-sparse recovery
    one_sided // sector sweep with omni receive, two phases per halving level
};

// Signal-chain knobs for one alignment run.
struct AlignmentConfig
{
    int seq_length = 1024;   // M
    int bins = 16;           // M_s
    int n_probes = 32;       // Q per round
    double bandwidth_hz = 2e9;
    double n0_w_per_hz = dbm_to_watt(-174.0);
    double tx_power_w = dbm_to_watt(-15.0);
    double gamma_scale = 1.0;
    double baseline_gamma_scale = 1.0;
    int ista_max_iter = 500;
    double ista_tol = 1e-7;
    double weight_tol_db = 0.2;
    int weight_max_iter = 50000;
    ProbeKind probe_kind = ProbeKind::half_subset;

    void validate() const;
};

// Per-probe wideband response of one directed link through the dual-sided
// probing chain: entry (q, m) is (C rx_q)^H H[m] (C tx_q), the antenna-domain
// equivalent of A_q hcheck[:, m] / N_a that avoids forming the N_a^2 x M
// beamspace matrix.
MatrixXcd probe_link_response(const FrequencyChannel &freq, const Codebook &codebook,
                              const BeamWeights &tx, const BeamWeights &rx);

// Sector-sweep counterpart against an omni receiver: entry (q, m) is
// p_q^T g(:, m).
MatrixXcd probe_omni_response(const OneSidedBeamspace &bs, const BeamWeights &probes);

// Power-normalized drive spectrum: bin m carries spectrum[m] / sqrt(T).
VectorXcd pilot_drive(const PilotSequence &pilot, double bandwidth_hz);

// Columns F_k of a full-band observation, packaged for the solvers.
MeasurementBlock demux_block(const MatrixXcd &y_full, const PilotSequence &pilot,
                             double noise_power);

// Runs the full multi-round alignment and returns the beam table. All
// randomness is derived from (master_seed, trial, round, device), so results
// do not depend on evaluation order. Concurrent transmissions superpose at
// each receiver over the full band before demultiplexing.
AlignmentTable run_alignment(const NetworkScenario &scenario, LinkChannels &links,
                             const RoundPlan &plan, AlignMethod method,
                             const AlignmentConfig &cfg, std::uint64_t master_seed,
                             std::uint64_t trial);

} // namespace combalign

#endif
