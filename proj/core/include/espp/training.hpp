#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "espp/data/pairing.hpp"
#include "espp/network.hpp"

namespace espp {

/// Phase-1 statistics of one hidden layer over one epoch.
struct LayerEpochMetrics {
    int epoch = 0;
    int layer = 0;                  ///< 1-based hidden layer index
    double firing_rate = 0.0;       ///< spikes / (neurons * timesteps), over all samples
    double gated_fraction = 0.0;    ///< gated timesteps / timesteps with a pair label
    double mean_fix_loss = 0.0;     ///< NaN when the epoch had no fixation timesteps
    double mean_sac_loss = 0.0;     ///< NaN when the epoch had no saccade timesteps
    std::uint64_t spikes = 0;
    std::uint64_t neuron_steps = 0;
    std::uint64_t labelled_steps = 0;
    std::uint64_t gated_steps = 0;
    std::uint64_t fix_steps = 0;
    std::uint64_t sac_steps = 0;
    double fix_loss_sum = 0.0;
    double sac_loss_sum = 0.0;

    void finalize();
};

struct Phase1Options {
    int epochs = 1;
    int batch = 1;                  ///< independent sample lanes; their updates are averaged
    PairingPolicy pairing;
    std::uint32_t augment_shift = 0;  ///< max frequency shift, 0 disables augmentation
    std::uint64_t seed = 0;
    int start_epoch = 0;            ///< epochs already completed (resume)
};

struct TrainingSnapshot {
    std::vector<Matrix> weights;
    std::vector<LayerEpochMetrics> metrics;
    int epochs_completed = 0;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
};

/// Runs the online rule over explicit streams. Each lane keeps its own membranes, traces and echoes.
class Phase1Trainer {
public:
    Phase1Trainer(Network& net, int lanes = 1);

    /// One pass over `streams` (one per lane, processed in lockstep). Returns one metrics row per layer.
    std::vector<LayerEpochMetrics> run_epoch(const Dataset& data, const std::vector<std::vector<PairedSample>>& streams,
                                             int epoch, std::uint32_t augment_shift = 0,
                                             std::mt19937_64* augment_rng = nullptr);

    std::uint64_t steps() const noexcept { return steps_; }
    const std::vector<EchoState>& echoes(int lane = 0) const { return echoes_.at(lane); }

private:
    Network& net_;
    std::vector<NetworkState> states_;
    std::vector<std::vector<EchoState>> echoes_;
    std::vector<Matrix> deltas_;
    std::uint64_t steps_ = 0;
};

/// Epoch streams: the training set is permuted, split round-robin into `batch` shards, and each
/// shard is ordered by the pairing policy. Depends only on (seed, epoch).
std::vector<std::vector<PairedSample>> epoch_streams(const Dataset& data, const Phase1Options& opts, int epoch);

using EpochCallback = std::function<void(int epoch, const std::vector<LayerEpochMetrics>&, const Network&)>;

/// Phase 1: all hidden layers learn simultaneously from their own local signal.
TrainingSnapshot train_phase1(Network& net, const Dataset& data, const Phase1Options& opts,
                              const EpochCallback& on_epoch = {});

/// Gated-update fraction per layer (outer) per epoch (inner).
std::vector<std::vector<double>> update_sparsity(const TrainingSnapshot& snapshot);

}  // namespace espp
