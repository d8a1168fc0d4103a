#include "espp/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "espp/data/synth.hpp"

namespace espp {

void LayerEpochMetrics::finalize() {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    firing_rate = neuron_steps ? static_cast<double>(spikes) / static_cast<double>(neuron_steps) : 0.0;
    gated_fraction = labelled_steps ? static_cast<double>(gated_steps) / static_cast<double>(labelled_steps) : 0.0;
    mean_fix_loss = fix_steps ? fix_loss_sum / static_cast<double>(fix_steps) : nan;
    mean_sac_loss = sac_steps ? sac_loss_sum / static_cast<double>(sac_steps) : nan;
}

Phase1Trainer::Phase1Trainer(Network& net, int lanes) : net_(net) {
    if (lanes < 1) throw std::invalid_argument("batch size must be >= 1");
    for (int b = 0; b < lanes; ++b) {
        states_.push_back(net_.make_state());
        std::vector<EchoState> e;
        for (const auto& ls : net_.spec().layers) e.emplace_back(ls.size);
        echoes_.push_back(std::move(e));
    }
    for (int l = 0; l < net_.num_layers(); ++l)
        deltas_.push_back(Matrix::Zero(net_.spec().layers[l].size, net_.spec().fan_in(l)));
}

std::vector<LayerEpochMetrics> Phase1Trainer::run_epoch(const Dataset& data,
                                                        const std::vector<std::vector<PairedSample>>& streams,
                                                        int epoch, std::uint32_t augment_shift,
                                                        std::mt19937_64* augment_rng) {
    detail::require_dims(streams.size() <= states_.size(), "run_epoch: more streams than lanes");
    detail::require_dims(static_cast<int>(data.channels) == net_.spec().input_size, "dataset channels != input size");
    const int n_layers = net_.num_layers();
    std::vector<LayerEpochMetrics> m(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        m[l].epoch = epoch;
        m[l].layer = l + 1;
    }

    std::size_t rounds = 0;
    for (const auto& s : streams) rounds = std::max(rounds, s.size());

    std::vector<SpikeRaster> rasters(streams.size());
    std::vector<std::optional<PairLabel>> ys(streams.size());
    std::vector<std::size_t> active;
    std::vector<char> touched(n_layers);

    for (std::size_t round = 0; round < rounds; ++round) {
        active.clear();
        for (std::size_t b = 0; b < streams.size(); ++b) {
            if (round >= streams[b].size()) continue;
            const auto& item = streams[b][round];
            const Sample& src = data.samples.at(item.index);
            if (augment_shift > 0 && augment_rng)
                rasters[b] = SpikeRaster::from_sample(freq_shift_augment(src, data.channels, augment_shift, *augment_rng),
                                                      data.steps, data.channels);
            else
                rasters[b] = SpikeRaster::from_sample(src, data.steps, data.channels);
            ys[b] = item.y;
            states_[b].reset_sample();
            active.push_back(b);
        }
        const Real lane_scale = 1.0 / static_cast<Real>(active.size());

        for (std::uint32_t t = 0; t < data.steps; ++t) {
            std::fill(touched.begin(), touched.end(), 0);
            for (auto b : active) {
                const auto x = rasters[b].step(t);
                const Real iact = input_activity(x);
                auto& state = states_[b];
                net_.forward_step(state, x);
                for (int l = 0; l < n_layers; ++l) {
                    auto& echo = echoes_[b][l];
                    const auto& spikes = state.spikes[l];
                    echo.accumulate(spikes);
                    auto& ml = m[l];
                    ml.neuron_steps += static_cast<std::uint64_t>(spikes.size());
                    ml.spikes += static_cast<std::uint64_t>(spikes.sum());
                    if (!ys[b]) continue;

                    const auto& cfg = net_.spec().layers[l].config;
                    const auto rec = evaluate_rule(cfg, *ys[b], spikes, echo, iact);
                    ++ml.labelled_steps;
                    if (*ys[b] == PairLabel::Fixation) {
                        ++ml.fix_steps;
                        ml.fix_loss_sum += rec.loss;
                    } else {
                        ++ml.sac_steps;
                        ml.sac_loss_sum += rec.loss;
                    }
                    if (!rec.gated) continue;
                    ++ml.gated_steps;
                    if (accumulate_weight_update(deltas_[l], lane_scale, cfg, *ys[b], true, state.potential[l], echo,
                                                 state.traces[l]))
                        touched[l] = 1;
                }
            }
            for (int l = 0; l < n_layers; ++l) {
                if (!touched[l]) continue;
                try {
                    net_.apply_delta(l, deltas_[l]);
                } catch (const NumericError& e) {
                    throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", round " +
                                       std::to_string(round) + ", step " + std::to_string(t) + ")");
                }
                deltas_[l].setZero();
            }
            ++steps_;
        }
        for (auto b : active)
            for (auto& echo : echoes_[b]) finish_sample(echo);
    }
    for (auto& row : m) row.finalize();
    return m;
}

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(b >> 32)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

std::vector<std::vector<PairedSample>> epoch_streams(const Dataset& data, const Phase1Options& opts, int epoch) {
    const std::uint64_t epoch_seed = mix(opts.seed, static_cast<std::uint64_t>(epoch));
    const int lanes = std::max(1, opts.batch);
    std::vector<std::vector<std::size_t>> shards(lanes);
    if (lanes == 1) {
        shards[0].resize(data.size());
        std::iota(shards[0].begin(), shards[0].end(), std::size_t{0});
    } else {
        std::vector<std::size_t> perm(data.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::mt19937_64 rng(epoch_seed);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < perm.size(); ++i) shards[i % lanes].push_back(perm[i]);
    }
    std::vector<std::vector<PairedSample>> out;
    for (int b = 0; b < lanes; ++b) {
        PairingPolicy p = opts.pairing;
        p.seed = mix(epoch_seed ^ opts.pairing.seed, static_cast<std::uint64_t>(b) + 1);
        out.push_back(pair_stream(data, shards[b], p).items);
    }
    return out;
}

TrainingSnapshot train_phase1(Network& net, const Dataset& data, const Phase1Options& opts,
                              const EpochCallback& on_epoch) {
    TrainingSnapshot snap;
    snap.seed = opts.seed;
    snap.epochs_completed = opts.start_epoch;
    Phase1Trainer trainer(net, std::max(1, opts.batch));
    for (int epoch = opts.start_epoch; epoch < opts.start_epoch + opts.epochs; ++epoch) {
        const auto streams = epoch_streams(data, opts, epoch);
        std::mt19937_64 aug_rng(mix(opts.seed ^ 0xA5A5A5A5ull, static_cast<std::uint64_t>(epoch)));
        auto metrics = trainer.run_epoch(data, streams, epoch, opts.augment_shift, &aug_rng);
        snap.metrics.insert(snap.metrics.end(), metrics.begin(), metrics.end());
        snap.epochs_completed = epoch + 1;
        if (on_epoch) on_epoch(epoch, metrics, net);
    }
    snap.steps = trainer.steps();
    snap.weights = net.weights();
    return snap;
}

std::vector<std::vector<double>> update_sparsity(const TrainingSnapshot& snapshot) {
    int layers = 0;
    for (const auto& m : snapshot.metrics) layers = std::max(layers, m.layer);
    std::vector<std::vector<double>> out(layers);
    for (const auto& m : snapshot.metrics) out[m.layer - 1].push_back(m.gated_fraction);
    return out;
}

}  // namespace espp
