#include "espp/data/synth.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace espp {

void SynthParams::validate() const {
    if (n_classes == 0) throw std::invalid_argument("synth: need at least one class");
    if (channels < n_classes)
        throw std::invalid_argument("synth: channels (" + std::to_string(channels) + ") < classes (" +
                                    std::to_string(n_classes) + "): cannot assign one motif channel per class");
    if (steps == 0 || steps > 65536u) throw std::invalid_argument("synth: steps must lie in [1, 65536]");
    if (!(rate_lo >= 0.0 && rate_lo < rate_hi && rate_hi <= 1.0))
        throw std::invalid_argument("synth: need 0 <= rate_lo < rate_hi <= 1");
}

std::vector<std::vector<std::uint32_t>> synth_motifs(const SynthParams& p) {
    p.validate();
    std::mt19937_64 rng(p.motif_seed.value_or(p.seed));
    std::vector<std::uint32_t> perm(p.channels);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);

    const std::uint32_t per_class = p.channels / p.n_classes;
    std::vector<std::vector<std::uint32_t>> motifs(p.n_classes);
    for (std::uint32_t k = 0; k < p.n_classes; ++k) {
        motifs[k].assign(perm.begin() + k * per_class, perm.begin() + (k + 1) * per_class);
        std::sort(motifs[k].begin(), motifs[k].end());
    }
    return motifs;
}

Dataset synth_generate(const SynthParams& p) {
    const auto motifs = synth_motifs(p);
    // Sample draws use a stream independent of the motif permutation.
    std::mt19937_64 rng(p.seed ^ 0x9E3779B97F4A7C15ull);
    std::bernoulli_distribution hi(p.rate_hi), lo(p.rate_lo);

    Dataset d{p.channels, p.steps, p.n_classes, {}};
    d.samples.reserve(p.n_samples);
    std::vector<char> in_motif(p.channels);
    for (std::uint32_t i = 0; i < p.n_samples; ++i) {
        Sample s;
        s.label = static_cast<ClassId>(i % p.n_classes);
        std::fill(in_motif.begin(), in_motif.end(), 0);
        for (auto ch : motifs[s.label]) in_motif[ch] = 1;
        for (std::uint32_t t = 0; t < p.steps; ++t)
            for (std::uint32_t ch = 0; ch < p.channels; ++ch)
                if (in_motif[ch] ? hi(rng) : lo(rng)) s.events.push_back({static_cast<std::uint16_t>(t), ch});
        d.samples.push_back(std::move(s));
    }
    return d;
}

Sample shift_channels(const Sample& sample, std::uint32_t channels, int shift) {
    Sample out;
    out.label = sample.label;
    out.events.reserve(sample.events.size());
    for (const auto& e : sample.events) {
        const long long ch = static_cast<long long>(e.ch) + shift;
        if (ch < 0 || ch >= static_cast<long long>(channels)) continue;
        out.events.push_back({e.t, static_cast<std::uint32_t>(ch)});
    }
    // A uniform shift preserves (t, ch) order.
    return out;
}

Sample freq_shift_augment(const Sample& sample, std::uint32_t channels, std::uint32_t max_shift, std::mt19937_64& rng) {
    if (max_shift >= channels && channels > 0) throw std::invalid_argument("freq_shift_augment: max_shift >= channels");
    if (max_shift == 0) return sample;
    std::uniform_int_distribution<int> dist(-static_cast<int>(max_shift), static_cast<int>(max_shift));
    return shift_channels(sample, channels, dist(rng));
}

}  // namespace espp
