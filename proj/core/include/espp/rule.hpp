#pragma once

#include "espp/config.hpp"
#include "espp/neuron.hpp"
#include "espp/types.hpp"

namespace espp {

/// The normalized activity of a layer over the previous sample, plus the running
/// spike counts of the current one.
struct EchoState {
    Vector echo;           ///< L1-normalized, or all zero when the previous sample was silent
    CountVector counts;    ///< spikes per neuron in the current sample
    std::int64_t total_spikes = 0;  ///< n_tot of the sample that produced `echo`

    EchoState() = default;
    explicit EchoState(Eigen::Index size);

    Eigen::Index size() const noexcept { return echo.size(); }
    void accumulate(const SpikeVector& spikes);
};

/// Diagnostics of one (layer, timestep) evaluation of the rule.
struct UpdateRecord {
    bool gated = false;
    Real similarity = 0.0;
    Real adaptive_threshold = 0.0;
    Real input_activity = 0.0;
    Real loss = 0.0;
};

/// Fraction of active channels in the input to the whole network.
Real input_activity(const SpikeVector& network_input);

/// c(y) scaled by the network input activity.
Real adaptive_threshold(const EsppConfig& cfg, PairLabel y, Real input_act);

struct LossValue {
    Real loss = 0.0;
    Real similarity = 0.0;
};

/// Hinge loss max(0, c_tilde - y * <spikes, echo>).
LossValue espp_loss(const SpikeVector& spikes, const EchoState& echo, PairLabel y, Real c_tilde);

/// The update gate: true iff c_tilde >= y * similarity and input_act >= input_threshold.
bool gate(const EsppConfig& cfg, PairLabel y, Real similarity, Real c_tilde, Real input_act);

/// Weight change for one layer and timestep (already signed for descent):
///   lr * y * (surr(V) .* echo) (x) trace   if gated, else 0.
/// Only this layer's membrane, echo and trace plus the global y are read.
Matrix weight_update(const EsppConfig& cfg, PairLabel y, bool gated, const Vector& membrane, const EchoState& echo,
                     const EligibilityTrace& trace);

/// Accumulating variant used by the training loop: dst += scale * update. Returns false if nothing was added.
bool accumulate_weight_update(Matrix& dst, Real scale, const EsppConfig& cfg, PairLabel y, bool gated,
                              const Vector& membrane, const EchoState& echo, const EligibilityTrace& trace);

/// Ends a sample: echo <- counts / sum(counts) (zero if no spikes) and clears the counts.
void finish_sample(EchoState& echo);

/// Evaluates loss and gate for one layer at one timestep.
UpdateRecord evaluate_rule(const EsppConfig& cfg, PairLabel y, const SpikeVector& spikes, const EchoState& echo,
                           Real input_act);

}  // namespace espp
