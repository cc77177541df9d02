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

#include "combalign/netsched.hpp"

#include <algorithm>
#include <mutex>

#include "combalign/rng.hpp"

namespace combalign
{

namespace
{

// purpose tags for derive_seed; distinct per random stream
constexpr std::uint64_t tag_tx_weights = 1;
constexpr std::uint64_t tag_rx_weights = 2;
constexpr std::uint64_t tag_noise = 3;
constexpr std::uint64_t tag_probes = 4;
constexpr std::uint64_t tag_envelope = 5;

std::vector<int> flatten_sorted(const std::vector<RoundCell> &cells, bool transmit)
{
    std::vector<int> out;
    for (const RoundCell &cell : cells)
    {
        const std::vector<int> &src = transmit ? cell.transmitters : cell.receivers;
        out.insert(out.end(), src.begin(), src.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::vector<int> Round::transmitters() const { return flatten_sorted(cells, true); }

std::vector<int> Round::receivers() const { return flatten_sorted(cells, false); }

RoundPlan plan_rounds(int n_devices)
{
    require(n_devices >= 2, "plan_rounds", "need at least two devices");
    require(n_devices <= 4096, "plan_rounds", "device count out of range");

    int block = 1, levels = 0;
    while (block < n_devices)
    {
        block <<= 1;
        levels++;
    }

    // Pad to a power of two, halve recursively: level r splits every group
    // into a transmitting lower half and a receiving upper half, so a pair
    // is labeled exactly when its members first land in different halves.
    // Ids past n_devices are dummies; cells they empty out are dropped.
    RoundPlan plan;
    plan.n_devices = n_devices;
    plan.rounds.resize(levels);
    for (int r = 0; r < levels; r++)
    {
        int group = block >> r;
        int half = group / 2;
        for (int start = 0; start < block; start += group)
        {
            RoundCell cell;
            for (int i = start; i < start + half && i < n_devices; i++)
                cell.transmitters.push_back(i);
            for (int i = start + half; i < start + group && i < n_devices; i++)
                cell.receivers.push_back(i);
            if (!cell.transmitters.empty() && !cell.receivers.empty())
                plan.rounds[r].cells.push_back(cell);
        }
    }
    return plan;
}

std::map<int, int> assign_frequency_sets(const std::vector<int> &transmitters, int seq_length,
                                         int bins)
{
    require(bins >= 1 && seq_length >= 1 && seq_length % bins == 0, "assign_frequency_sets",
            "sequence length must be a positive multiple of the bin count");
    const int n_combs = seq_length / bins;
    require(static_cast<int>(transmitters.size()) <= n_combs, "assign_frequency_sets",
            "more concurrent transmitters than disjoint combs");

    std::vector<int> ids = transmitters;
    std::sort(ids.begin(), ids.end());
    require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(), "assign_frequency_sets",
            "duplicate transmitter id");

    std::map<int, int> out;
    int k = 0;
    for (int id : ids)
        out[id] = k++;
    return out;
}

std::map<int, int> assign_frequency_sets(const Round &round, int seq_length, int bins)
{
    return assign_frequency_sets(round.transmitters(), seq_length, bins);
}

void NetworkScenario::validate() const
{
    room.validate();
    pulse.validate();
    require(carrier_hz > 0, "NetworkScenario", "carrier must be positive");
    require(poses.size() >= 2, "NetworkScenario", "need at least two devices");
    for (const DevicePose &p : poses)
        require(p.n_antennas == poses[0].n_antennas, "NetworkScenario",
                "all devices must share one array size");
}

void AlignmentConfig::validate() const
{
    require(bins >= 1 && seq_length >= bins && seq_length % bins == 0, "AlignmentConfig",
            "sequence length must be a positive multiple of the bin count");
    require(n_probes >= 1, "AlignmentConfig", "need at least one probe");
    require(bandwidth_hz > 0, "AlignmentConfig", "bandwidth must be positive");
    require(n0_w_per_hz >= 0, "AlignmentConfig", "noise density must be nonnegative");
    require(tx_power_w > 0, "AlignmentConfig", "transmit power must be positive");
    require(gamma_scale >= 0 && baseline_gamma_scale >= 0, "AlignmentConfig",
            "regularization scales must be nonnegative");
    require(ista_max_iter >= 1 && weight_max_iter >= 1, "AlignmentConfig",
            "iteration limits must be positive");
    require(ista_tol > 0 && weight_tol_db > 0, "AlignmentConfig",
            "tolerances must be positive");
}

LinkChannels::LinkChannels(const NetworkScenario &scenario, double bandwidth_hz,
                           double rel_threshold_db, std::size_t cache_budget_bytes)
    : n_(scenario.n_devices()), bandwidth_hz_(bandwidth_hz), budget_(cache_budget_bytes)
{
    scenario.validate();
    require(bandwidth_hz > 0, "LinkChannels", "bandwidth must be positive");
    taps_.resize(static_cast<size_t>(n_) * n_);
    for (int a = 0; a < n_; a++)
        for (int b = a + 1; b < n_; b++)
        {
            PathSet paths = trace_paths(scenario.room, scenario.poses[a], scenario.poses[b],
                                        scenario.carrier_hz);
            taps_[static_cast<size_t>(a) * n_ + b] =
                discretize_channel(paths, scenario.poses[a], scenario.poses[b], bandwidth_hz,
                                   scenario.pulse, rel_threshold_db);
            taps_[static_cast<size_t>(b) * n_ + a] =
                taps_[static_cast<size_t>(a) * n_ + b].transposed();
        }
}

const DiscreteChannel &LinkChannels::taps(int from, int to) const
{
    require(from >= 0 && from < n_ && to >= 0 && to < n_ && from != to, "LinkChannels::taps",
            "device index out of range");
    return taps_[static_cast<size_t>(from) * n_ + to];
}

namespace
{
std::mutex freq_cache_mutex;
}

std::shared_ptr<const FrequencyChannel> LinkChannels::frequency(int from, int to, int n_bins)
{
    const std::pair<int, int> key{from * n_ + to, n_bins};
    {
        std::lock_guard<std::mutex> lock(freq_cache_mutex);
        auto it = freq_.find(key);
        if (it != freq_.end())
            return it->second;
    }
    const DiscreteChannel &ch = taps(from, to);
    auto made = std::make_shared<const FrequencyChannel>(to_frequency_domain(ch, n_bins));
    std::size_t bytes = sizeof(cplx) * static_cast<std::size_t>(n_bins) * ch.n_rx() * ch.n_tx();
    std::lock_guard<std::mutex> lock(freq_cache_mutex);
    auto it = freq_.find(key);
    if (it != freq_.end())
        return it->second;
    if (used_ + bytes <= budget_)
    {
        freq_.emplace(key, made);
        used_ += bytes;
    }
    return made;
}

MatrixXcd probe_link_response(const FrequencyChannel &freq, const Codebook &codebook,
                              const BeamWeights &tx, const BeamWeights &rx)
{
    const int n_a = codebook.n_antennas;
    require(freq.n_rx() == n_a && freq.n_tx() == n_a, "probe_link_response",
            "channel dimensions must match the codebook");
    require(tx.n_antennas() == n_a && rx.n_antennas() == n_a, "probe_link_response",
            "weight dimensions must match the codebook");
    require(tx.n_probes() == rx.n_probes(), "probe_link_response", "probe counts must match");

    const int q_n = tx.n_probes(), m_n = freq.n_bins();
    MatrixXcd v = codebook.c * tx.w.transpose(); // antenna-domain probes, column q
    MatrixXcd u = codebook.c * rx.w.transpose();
    MatrixXcd uc = u.conjugate();
    MatrixXcd out(q_n, m_n);
    for (int m = 0; m < m_n; m++)
    {
        MatrixXcd w = freq.bins[m] * v;
        out.col(m) = uc.cwiseProduct(w).colwise().sum().transpose();
    }
    return out;
}

MatrixXcd probe_omni_response(const OneSidedBeamspace &bs, const BeamWeights &probes)
{
    require(probes.n_antennas() == bs.n_beams(), "probe_omni_response",
            "probe width must match the beam count");
    return probes.w * bs.g;
}

VectorXcd pilot_drive(const PilotSequence &pilot, double bandwidth_hz)
{
    require(bandwidth_hz > 0, "pilot_drive", "bandwidth must be positive");
    return pilot.spectrum * std::sqrt(bandwidth_hz);
}

MeasurementBlock demux_block(const MatrixXcd &y_full, const PilotSequence &pilot,
                             double noise_power)
{
    require(y_full.cols() == pilot.spec.length, "demux_block",
            "observation width must match the pilot length");
    const int n_f = static_cast<int>(pilot.freq_set.size());
    MeasurementBlock out;
    out.freq_set = pilot.freq_set;
    out.seq_length = pilot.spec.length;
    out.noise_power = noise_power;
    out.y.resize(y_full.rows(), n_f);
    for (int l = 0; l < n_f; l++)
        out.y.col(l) = y_full.col(pilot.freq_set[l]);
    return out;
}

namespace
{

// Pilot per comb offset, all rotations of one flat-envelope weight vector.
class PilotBank
{
  public:
    PilotBank(const AlignmentConfig &cfg, std::uint64_t master_seed) : cfg_(cfg)
    {
        auto rng = make_rng(derive_seed(master_seed, tag_envelope, cfg.bins));
        weights_ = flat_spectrum_sequence(cfg.bins, cfg.weight_tol_db, cfg.weight_max_iter, rng);
        energy_ = cfg.tx_power_w * cfg.seq_length / cfg.bandwidth_hz;
    }

    const PilotSequence &get(int offset)
    {
        auto it = bank_.find(offset);
        if (it == bank_.end())
        {
            PilotSpec spec;
            spec.length = cfg_.seq_length;
            spec.bins = cfg_.bins;
            spec.offset = offset;
            spec.energy = energy_;
            it = bank_.emplace(offset, design_pilot(spec, weights_)).first;
        }
        return it->second;
    }

  private:
    const AlignmentConfig &cfg_;
    WeightVector weights_;
    double energy_ = 0.0;
    std::map<int, PilotSequence> bank_;
};

void run_mmv_round(const Round &round, int round_idx, LinkChannels &links,
                   const AlignmentConfig &cfg, const Codebook &cb, PilotBank &pilots,
                   std::uint64_t master_seed, std::uint64_t trial, AlignmentTable &table)
{
    const int n_a = cb.n_antennas;
    const double sigma2 = cfg.n0_w_per_hz * cfg.bandwidth_hz;
    const std::vector<int> all_tx = round.transmitters();
    const std::map<int, int> combs = assign_frequency_sets(all_tx, cfg.seq_length, cfg.bins);

    std::map<int, BeamWeights> tx_w, rx_w;
    for (int t : all_tx)
    {
        auto rng = make_rng(derive_seed(master_seed, trial, round_idx, t, tag_tx_weights));
        tx_w.emplace(t, draw_beam_weights(rng, cfg.n_probes, n_a));
    }
    for (int r : round.receivers())
    {
        auto rng = make_rng(derive_seed(master_seed, trial, round_idx, r, tag_rx_weights));
        rx_w.emplace(r, draw_beam_weights(rng, cfg.n_probes, n_a));
    }

    for (const RoundCell &cell : round.cells)
        for (int r : cell.receivers)
        {
            // every concurrent transmitter lands at this receiver; comb
            // disjointness is what keeps the per-transmitter blocks clean
            MatrixXcd y_full = MatrixXcd::Zero(cfg.n_probes, cfg.seq_length);
            for (int t : all_tx)
            {
                auto freq = links.frequency(t, r, cfg.seq_length);
                MatrixXcd resp = probe_link_response(*freq, cb, tx_w.at(t), rx_w.at(r));
                y_full += resp * pilot_drive(pilots.get(combs.at(t)), cfg.bandwidth_hz)
                                     .asDiagonal();
            }
            if (sigma2 > 0.0)
            {
                auto rng = make_rng(derive_seed(master_seed, trial, round_idx, r, tag_noise));
                y_full += draw_cgauss(rng, cfg.n_probes, cfg.seq_length, sigma2);
            }

            for (int t : cell.transmitters)
            {
                MeasurementBlock blk = demux_block(y_full, pilots.get(combs.at(t)), sigma2);
                SamplingMatrix a = build_sampling_matrix(tx_w.at(t), rx_w.at(r));
                double gamma = default_gamma(sigma2, cfg.n_probes, cfg.bins, cfg.gamma_scale);
                BeamspaceEstimate est =
                    block_ista_solve(blk, a, gamma, cfg.ista_max_iter, cfg.ista_tol);
                BeamPair bp = extract_beam_pair(est, n_a);

                TableEntry &fwd = table.at(t, r);
                fwd.present = true;
                fwd.ok = bp.ok;
                fwd.tx_beam = bp.tx_beam;
                fwd.rx_beam = bp.rx_beam;
                fwd.row_norm = bp.row_norm;
                fwd.round = round_idx;

                TableEntry &rev = table.at(r, t);
                rev.present = true;
                rev.ok = bp.ok;
                rev.derived = true;
                rev.tx_beam = reciprocal_beam_index(bp.rx_beam, n_a);
                rev.rx_beam = reciprocal_beam_index(bp.tx_beam, n_a);
                rev.row_norm = bp.row_norm;
                rev.round = round_idx;
            }
        }
}

void run_one_sided_round(const Round &round, int round_idx, LinkChannels &links,
                         const AlignmentConfig &cfg, const Codebook &cb, PilotBank &pilots,
                         std::uint64_t master_seed, std::uint64_t trial, AlignmentTable &table)
{
    const int n_a = cb.n_antennas;
    const double sigma2 = cfg.n0_w_per_hz * cfg.bandwidth_hz;
    const double floor = sigma2 * cfg.bins;

    // per-pair transmit-beam energy profiles from the two sweep phases
    std::map<std::pair<int, int>, VectorXd> profiles; // (sweeper, listener)

    for (int phase = 0; phase < 2; phase++)
    {
        const int slot = 2 * round_idx + phase;
        std::vector<int> sweepers, listeners;
        for (const RoundCell &cell : round.cells)
        {
            const std::vector<int> &s = phase == 0 ? cell.transmitters : cell.receivers;
            const std::vector<int> &l = phase == 0 ? cell.receivers : cell.transmitters;
            sweepers.insert(sweepers.end(), s.begin(), s.end());
            listeners.insert(listeners.end(), l.begin(), l.end());
        }
        std::sort(sweepers.begin(), sweepers.end());
        const std::map<int, int> combs = assign_frequency_sets(sweepers, cfg.seq_length, cfg.bins);

        std::map<int, BeamWeights> probes;
        for (int s : sweepers)
        {
            auto rng = make_rng(derive_seed(master_seed, trial, slot, s, tag_probes));
            probes.emplace(s, draw_probe_weights(rng, cfg.n_probes, n_a, cfg.probe_kind));
        }

        for (const RoundCell &cell : round.cells)
        {
            const std::vector<int> &own = phase == 0 ? cell.transmitters : cell.receivers;
            const std::vector<int> &ears = phase == 0 ? cell.receivers : cell.transmitters;
            for (int r : ears)
            {
                MatrixXcd y_full = MatrixXcd::Zero(cfg.n_probes, cfg.seq_length);
                for (int s : sweepers)
                {
                    OneSidedBeamspace bs =
                        one_sided_beamspace(*links.frequency(s, r, cfg.seq_length), cb);
                    MatrixXcd resp = probe_omni_response(bs, probes.at(s));
                    y_full += resp * pilot_drive(pilots.get(combs.at(s)), cfg.bandwidth_hz)
                                         .asDiagonal();
                }
                if (sigma2 > 0.0)
                {
                    auto rng = make_rng(derive_seed(master_seed, trial, slot, r, tag_noise));
                    y_full += draw_cgauss(rng, cfg.n_probes, cfg.seq_length, sigma2);
                }
                for (int s : own)
                {
                    MeasurementBlock blk = demux_block(y_full, pilots.get(combs.at(s)), sigma2);
                    VectorXd energies = noncoherent_combine(blk);
                    double gamma = default_baseline_gamma(sigma2, cfg.n_probes, cfg.bins,
                                                          cfg.baseline_gamma_scale);
                    profiles[{s, r}] = l1_solve(energies, probes.at(s), floor, gamma,
                                                cfg.ista_max_iter, cfg.ista_tol);
                }
            }
        }
    }

    for (const RoundCell &cell : round.cells)
        for (int t : cell.transmitters)
            for (int r : cell.receivers)
            {
                OneSidedPair pair = rank1_estimate(profiles.at({t, r}), profiles.at({r, t}));

                TableEntry &fwd = table.at(t, r);
                fwd.present = true;
                fwd.ok = pair.ok;
                fwd.tx_beam = pair.beam_a;
                fwd.rx_beam = reciprocal_beam_index(pair.beam_b, n_a);
                fwd.round = round_idx;

                TableEntry &rev = table.at(r, t);
                rev.present = true;
                rev.ok = pair.ok;
                rev.tx_beam = pair.beam_b;
                rev.rx_beam = reciprocal_beam_index(pair.beam_a, n_a);
                rev.round = round_idx;
            }
}

} // namespace

AlignmentTable run_alignment(const NetworkScenario &scenario, LinkChannels &links,
                             const RoundPlan &plan, AlignMethod method,
                             const AlignmentConfig &cfg, std::uint64_t master_seed,
                             std::uint64_t trial)
{
    scenario.validate();
    cfg.validate();
    require(plan.n_devices == scenario.n_devices(), "run_alignment",
            "plan and scenario device counts must match");
    require(links.bandwidth() == cfg.bandwidth_hz, "run_alignment",
            "channel cache and config bandwidth must match");

    const int n_a = scenario.poses[0].n_antennas;
    Codebook cb(n_a);
    PilotBank pilots(cfg, master_seed);
    AlignmentTable table(plan.n_devices, n_a);

    for (size_t ri = 0; ri < plan.rounds.size(); ri++)
    {
        if (method == AlignMethod::mmv)
            run_mmv_round(plan.rounds[ri], static_cast<int>(ri), links, cfg, cb, pilots,
                          master_seed, trial, table);
        else
            run_one_sided_round(plan.rounds[ri], static_cast<int>(ri), links, cfg, cb, pilots,
                                master_seed, trial, table);
    }
    return table;
}

} // namespace combalign
