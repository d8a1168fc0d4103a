#pragma once

#include <numbers>

#include "espp/types.hpp"

namespace espp {

/// Leaky integrate-and-fire population state.
struct LifState {
    Vector membrane;
    Real threshold = 1.0;
    Real decay = 0.9;

    LifState() = default;
    LifState(Eigen::Index size, Real threshold, Real decay);

    Eigen::Index size() const noexcept { return membrane.size(); }
    void reset() { membrane.setZero(); }
};

/// Result of one LIF step. `potential` is the membrane before the spike reset; it is the
/// value the surrogate gradient is evaluated at.
struct LifOutput {
    SpikeVector spikes;
    Vector potential;
};

/// V <- decay * V + W * input; neurons with V >= threshold spike and have threshold subtracted.
LifOutput lif_step(LifState& state, const Matrix& weights, const SpikeVector& input);

/// Presynaptic eligibility trace, one entry per input line.
struct EligibilityTrace {
    Vector trace;
    Real decay = 0.9;

    EligibilityTrace() = default;
    EligibilityTrace(Eigen::Index fan_in, Real decay);

    Eigen::Index size() const noexcept { return trace.size(); }
    void reset() { trace.setZero(); }
};

/// trace <- decay * trace + input.
void trace_step(EligibilityTrace& trace, const SpikeVector& input);

/// Derivative of the arctan spike surrogate:
///   (slope / 2) / (1 + (pi * slope * (v - threshold) / 2)^2)
/// which peaks at slope / 2 when v == threshold.
inline Real surrogate(Real v, Real threshold, Real slope) noexcept {
    const Real x = std::numbers::pi * slope * (v - threshold) / 2.0;
    return (slope / 2.0) / (1.0 + x * x);
}

Vector surrogate(const Vector& membrane, Real threshold, Real slope);

}  // namespace espp
