#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "espp/data/raster.hpp"

namespace espp {

struct SynthParams {
    std::uint16_t n_classes = 5;
    std::uint32_t channels = 20;
    std::uint32_t steps = 50;
    double rate_hi = 0.5;
    double rate_lo = 0.05;
    std::uint32_t n_samples = 1000;
    std::uint64_t seed = 0;
    /// Seed of the motif permutation, defaults to `seed`. Datasets drawn with different seeds but
    /// the same motif seed share one classification task (e.g. separate train and test files).
    std::optional<std::uint64_t> motif_seed;

    void validate() const;
};

/// Channel subsets that define each class. Disjoint, `channels / n_classes` channels each,
/// drawn from a seeded permutation.
std::vector<std::vector<std::uint32_t>> synth_motifs(const SynthParams& p);

/// Class k fires its motif channels as Bernoulli(rate_hi) per step and every other channel as
/// Bernoulli(rate_lo). Labels cycle 0..n_classes-1 so classes are balanced. Deterministic per seed.
Dataset synth_generate(const SynthParams& p);

/// Shifts every event's channel by one integer drawn uniformly from [-max_shift, max_shift];
/// events pushed outside [0, channels) are dropped.
Sample freq_shift_augment(const Sample& sample, std::uint32_t channels, std::uint32_t max_shift, std::mt19937_64& rng);

/// Fixed-shift variant.
Sample shift_channels(const Sample& sample, std::uint32_t channels, int shift);

}  // namespace espp
