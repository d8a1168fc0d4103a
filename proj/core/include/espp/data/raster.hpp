#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "espp/types.hpp"

namespace espp {

/// One spike of the network input: timestep and channel.
struct Event {
    std::uint16_t t = 0;
    std::uint32_t ch = 0;

    friend auto operator<=>(const Event&, const Event&) = default;
};

/// A sample stored sparsely: events sorted by (t, ch), no duplicates.
struct Sample {
    ClassId label = 0;
    std::vector<Event> events;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Dense binary raster of one sample, row-major steps x channels.
class SpikeRaster {
public:
    SpikeRaster() = default;
    SpikeRaster(std::uint32_t steps, std::uint32_t channels, ClassId label = 0);

    static SpikeRaster from_sample(const Sample& sample, std::uint32_t steps, std::uint32_t channels);
    Sample to_sample() const;

    std::uint32_t steps() const noexcept { return steps_; }
    std::uint32_t channels() const noexcept { return channels_; }
    ClassId label() const noexcept { return label_; }
    void set_label(ClassId label) noexcept { label_ = label; }

    bool at(std::uint32_t t, std::uint32_t ch) const { return bits_[index(t, ch)] != 0; }
    void set(std::uint32_t t, std::uint32_t ch, bool on = true) { bits_[index(t, ch)] = on ? 1 : 0; }

    /// Input vector at timestep t, entries 0/1.
    SpikeVector step(std::uint32_t t) const;
    /// Spikes per channel summed over all timesteps.
    Vector channel_counts() const;
    std::size_t event_count() const;

    friend bool operator==(const SpikeRaster&, const SpikeRaster&) = default;

private:
    std::size_t index(std::uint32_t t, std::uint32_t ch) const;

    std::uint32_t steps_ = 0;
    std::uint32_t channels_ = 0;
    ClassId label_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// A labelled collection of samples sharing one geometry.
struct Dataset {
    std::uint32_t channels = 0;
    std::uint32_t steps = 0;
    std::uint16_t n_classes = 0;
    std::vector<Sample> samples;

    SpikeRaster raster(std::size_t i) const { return SpikeRaster::from_sample(samples.at(i), steps, channels); }
    std::size_t size() const noexcept { return samples.size(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// An input event with a continuous timestamp, before binning.
struct TimedEvent {
    double time = 0.0;
    std::uint32_t ch = 0;
};

/// Bins events into `steps` equal-width bins over [0, duration]. A (bin, channel) cell is 1 iff
/// at least one event falls in it. Events at exactly `duration` land in the last bin; events
/// outside [0, duration] or with ch >= channels are ignored.
SpikeRaster bin_events(std::span<const TimedEvent> events, double duration, std::uint32_t steps,
                       std::uint32_t channels);

/// Same, with the duration taken as the latest event time.
SpikeRaster bin_events(std::span<const TimedEvent> events, std::uint32_t steps, std::uint32_t channels);

/// Splits a dataset into two by taking the first `fraction` of each class (order preserved).
std::pair<Dataset, Dataset> split_per_class(const Dataset& data, double fraction);

}  // namespace espp
