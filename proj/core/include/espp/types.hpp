#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace espp {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary activity of a population at one timestep. Entries are exactly 0 or 1.
using SpikeVector = Eigen::VectorXd;

/// Per-neuron spike counts.
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

using ClassId = std::uint16_t;

/// Fixation (same class as the previous sample) or saccade (different class).
enum class PairLabel : int { Fixation = 1, Saccade = -1 };

constexpr Real sign_of(PairLabel y) noexcept { return static_cast<Real>(static_cast<int>(y)); }

constexpr PairLabel pair_label_for(ClassId previous, ClassId current) noexcept {
    return previous == current ? PairLabel::Fixation : PairLabel::Saccade;
}

/// Thrown for inconsistent shapes. Always a programming error, never a data condition.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a weight matrix becomes non-finite during training.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require_dims(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}
}  // namespace detail

}  // namespace espp
