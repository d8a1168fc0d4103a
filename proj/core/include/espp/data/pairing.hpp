#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "espp/data/raster.hpp"

namespace espp {

struct PairingPolicy {
    enum class Mode { NaturalShuffle, Balanced };

    Mode mode = Mode::Balanced;
    double p_fix = 0.5;  ///< used by Balanced only
    std::uint64_t seed = 0;
};

/// One element of a training stream. `y` is empty for the first element, which only seeds the echo.
struct PairedSample {
    std::size_t index = 0;
    ClassId label = 0;
    std::optional<PairLabel> y;
};

struct PairStream {
    std::vector<PairedSample> items;
    std::vector<std::string> warnings;
};

/// One epoch ordering of `indices` (every index exactly once).
///   NaturalShuffle: uniform permutation; y follows from consecutive labels.
///   Balanced: each step continues with the current class with probability p_fix (while it has samples
///   left), otherwise switches to another class chosen in proportion to its remaining samples.
PairStream pair_stream(const Dataset& data, const std::vector<std::size_t>& indices, const PairingPolicy& policy);

/// Same, over the whole dataset.
PairStream pair_stream(const Dataset& data, const PairingPolicy& policy);

/// Recomputes y from consecutive labels; the first item gets none.
void assign_pair_labels(std::vector<PairedSample>& items);

}  // namespace espp
