#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "espp/config.hpp"
#include "espp/data/raster.hpp"
#include "espp/neuron.hpp"
#include "espp/rule.hpp"

namespace espp {

/// Which populations feed a phase-2 head.
enum class ReadoutWiring { LastLayerOnly, AllLayers };

std::string to_string(ReadoutWiring w);
ReadoutWiring wiring_from_string(const std::string& s);

// Populations are numbered 0 = network input, 1..L = hidden layers.

struct LayerSpec {
    int size = 0;
    bool recurrent = false;                ///< own activity at t-1 is appended to the input
    std::vector<int> skip_sources;         ///< earlier populations read at time t
    std::vector<int> feedback_sources;     ///< later hidden populations read at t-1 (deep transition)
    EsppConfig config;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
    int input_size = 0;
    std::vector<LayerSpec> layers;
    ReadoutWiring readout_wiring = ReadoutWiring::LastLayerOnly;

    /// Throws std::invalid_argument on any inconsistency (sizes, source ordering, configs).
    void validate() const;

    int population_size(int population) const;
    /// Input width of hidden layer `layer` (0-based): feed-forward + recurrent + skip + feedback.
    int fan_in(int layer) const;
    /// Populations selected by `wiring`, in feature order.
    std::vector<int> readout_populations(ReadoutWiring wiring) const;
    std::vector<int> readout_populations() const { return readout_populations(readout_wiring); }
    int feature_size(std::span<const int> populations) const;
    int feature_size() const { return feature_size(readout_populations()); }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Plain feed-forward stack of `sizes`, every layer using `cfg`.
NetworkSpec feed_forward_spec(int input_size, std::span<const int> sizes, const EsppConfig& cfg,
                              ReadoutWiring wiring = ReadoutWiring::LastLayerOnly);

/// Per-sample dynamic state of a network. One instance per batch lane or evaluation thread.
struct NetworkState {
    std::vector<LifState> lif;
    std::vector<EligibilityTrace> traces;
    std::vector<SpikeVector> spikes;       ///< activity at the current timestep
    std::vector<SpikeVector> previous;     ///< activity at the previous timestep
    std::vector<Vector> potential;         ///< pre-reset membrane at the current timestep
    std::vector<SpikeVector> inputs;       ///< assembled layer inputs at the current timestep

    /// Zeroes membranes, traces and the t-1 activity.
    void reset_sample();
};

/// Spike counts of every population over one sample.
struct PopulationCounts {
    std::vector<Vector> counts;  ///< [0] = input, [l] = hidden layer l
};

/// Per-timestep activity of one sample, used by the few-shot head.
struct Recording {
    std::vector<Real> input_activity;                 ///< per timestep
    std::vector<std::vector<SpikeVector>> spikes;     ///< [layer][t]
};

class Network {
public:
    /// Weights drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)] as 32-bit floats.
    Network(NetworkSpec spec, std::uint64_t seed);
    Network(NetworkSpec spec, std::vector<Matrix> weights);

    const NetworkSpec& spec() const noexcept { return spec_; }
    int num_layers() const noexcept { return static_cast<int>(spec_.layers.size()); }
    const std::vector<Matrix>& weights() const noexcept { return weights_; }
    const Matrix& weights(int layer) const { return weights_.at(layer); }

    /// Adds `delta` to a layer's weights and rounds the result to float precision so that
    /// checkpoints are lossless. Throws NumericError if any entry becomes non-finite.
    void apply_delta(int layer, const Matrix& delta);

    NetworkState make_state() const;

    /// One timestep through every layer in order. Layer inputs are assembled from populations
    /// at t (feed-forward, skip) and t-1 (recurrent, feedback); traces are advanced with them.
    void forward_step(NetworkState& state, const SpikeVector& network_input) const;

    /// Runs a whole sample with fresh state; weights are not touched.
    PopulationCounts population_counts(const SpikeRaster& raster) const;
    Recording record(const SpikeRaster& raster) const;

    /// Time-summed counts of the populations chosen by `wiring`, concatenated.
    Vector collect_features(const SpikeRaster& raster, ReadoutWiring wiring) const;
    Vector collect_features(const SpikeRaster& raster) const { return collect_features(raster, spec_.readout_wiring); }

    /// FNV-1a over the raw weight bytes.
    std::uint64_t weight_checksum() const;

private:
    void assemble_input(const NetworkState& state, int layer, const SpikeVector& network_input,
                        SpikeVector& out) const;

    NetworkSpec spec_;
    std::vector<Matrix> weights_;
};

Vector assemble_features(const PopulationCounts& counts, std::span<const int> populations);

/// Feature matrix (one row per sample) for a dataset. `threads` > 1 splits samples across threads.
Matrix collect_dataset_features(const Network& net, const Dataset& data, std::span<const int> populations,
                                unsigned threads = 1);

}  // namespace espp
