#include "espp/neuron.hpp"

namespace espp {

LifState::LifState(Eigen::Index size, Real threshold_, Real decay_)
    : membrane(Vector::Zero(size)), threshold(threshold_), decay(decay_) {
    if (!(threshold > 0.0)) throw std::invalid_argument("LIF threshold must be > 0");
    if (!(decay >= 0.0 && decay <= 1.0)) throw std::invalid_argument("LIF decay must lie in [0, 1]");
}

LifOutput lif_step(LifState& state, const Matrix& weights, const SpikeVector& input) {
    detail::require_dims(weights.cols() == input.size(), "lif_step: input length != weight fan-in");
    detail::require_dims(weights.rows() == state.size(), "lif_step: weight rows != layer size");

    LifOutput out;
    out.potential.noalias() = state.decay * state.membrane;
    out.potential.noalias() += weights * input;
    out.spikes = (out.potential.array() >= state.threshold).cast<Real>();
    state.membrane = out.potential - state.threshold * out.spikes;
    return out;
}

EligibilityTrace::EligibilityTrace(Eigen::Index fan_in, Real decay_) : trace(Vector::Zero(fan_in)), decay(decay_) {
    if (!(decay >= 0.0 && decay <= 1.0)) throw std::invalid_argument("trace decay must lie in [0, 1]");
}

void trace_step(EligibilityTrace& t, const SpikeVector& input) {
    detail::require_dims(input.size() == t.size(), "trace_step: input length != trace length");
    t.trace = t.decay * t.trace + input;
}

Vector surrogate(const Vector& membrane, Real threshold, Real slope) {
    return membrane.unaryExpr([=](Real v) { return surrogate(v, threshold, slope); });
}

}  // namespace espp
