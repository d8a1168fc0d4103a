#include "espp/data/raster.hpp"

#include <algorithm>
#include <cmath>

namespace espp {

SpikeRaster::SpikeRaster(std::uint32_t steps, std::uint32_t channels, ClassId label)
    : steps_(steps), channels_(channels), label_(label), bits_(static_cast<std::size_t>(steps) * channels, 0) {}

std::size_t SpikeRaster::index(std::uint32_t t, std::uint32_t ch) const {
    if (t >= steps_ || ch >= channels_) throw std::out_of_range("SpikeRaster: (t, ch) out of range");
    return static_cast<std::size_t>(t) * channels_ + ch;
}

SpikeRaster SpikeRaster::from_sample(const Sample& sample, std::uint32_t steps, std::uint32_t channels) {
    SpikeRaster r(steps, channels, sample.label);
    for (const auto& e : sample.events) r.set(e.t, e.ch);
    return r;
}

Sample SpikeRaster::to_sample() const {
    Sample s;
    s.label = label_;
    for (std::uint32_t t = 0; t < steps_; ++t)
        for (std::uint32_t ch = 0; ch < channels_; ++ch)
            if (bits_[static_cast<std::size_t>(t) * channels_ + ch]) s.events.push_back({static_cast<std::uint16_t>(t), ch});
    return s;
}

SpikeVector SpikeRaster::step(std::uint32_t t) const {
    if (t >= steps_) throw std::out_of_range("SpikeRaster::step: t out of range");
    SpikeVector v(channels_);
    const auto* row = bits_.data() + static_cast<std::size_t>(t) * channels_;
    for (std::uint32_t ch = 0; ch < channels_; ++ch) v[ch] = row[ch] ? 1.0 : 0.0;
    return v;
}

Vector SpikeRaster::channel_counts() const {
    Vector c = Vector::Zero(channels_);
    for (std::uint32_t t = 0; t < steps_; ++t)
        for (std::uint32_t ch = 0; ch < channels_; ++ch)
            if (bits_[static_cast<std::size_t>(t) * channels_ + ch]) c[ch] += 1.0;
    return c;
}

std::size_t SpikeRaster::event_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

SpikeRaster bin_events(std::span<const TimedEvent> events, double duration, std::uint32_t steps,
                       std::uint32_t channels) {
    SpikeRaster r(steps, channels);
    if (steps == 0) return r;
    for (const auto& e : events) {
        if (e.ch >= channels || !(e.time >= 0.0) || e.time > duration) continue;
        std::uint32_t bin = 0;
        if (duration > 0.0) {
            const double pos = std::floor(e.time / duration * static_cast<double>(steps));
            bin = static_cast<std::uint32_t>(std::min<double>(pos, steps - 1));
        }
        r.set(bin, e.ch);
    }
    return r;
}

SpikeRaster bin_events(std::span<const TimedEvent> events, std::uint32_t steps, std::uint32_t channels) {
    double duration = 0.0;
    for (const auto& e : events) duration = std::max(duration, e.time);
    return bin_events(events, duration, steps, channels);
}

std::pair<Dataset, Dataset> split_per_class(const Dataset& data, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("split fraction must lie in [0, 1]");
    Dataset a{data.channels, data.steps, data.n_classes, {}};
    Dataset b = a;
    std::vector<std::size_t> per_class(data.n_classes, 0), seen(data.n_classes, 0);
    for (const auto& s : data.samples)
        if (s.label < data.n_classes) ++per_class[s.label];
    for (const auto& s : data.samples) {
        const auto quota = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(per_class[s.label])));
        (seen[s.label]++ < quota ? a : b).samples.push_back(s);
    }
    return {std::move(a), std::move(b)};
}

}  // namespace espp
