#include "espp/rule.hpp"

#include <algorithm>

namespace espp {

EchoState::EchoState(Eigen::Index size) : echo(Vector::Zero(size)), counts(CountVector::Zero(size)) {}

void EchoState::accumulate(const SpikeVector& spikes) {
    detail::require_dims(spikes.size() == counts.size(), "EchoState::accumulate: size mismatch");
    for (Eigen::Index j = 0; j < spikes.size(); ++j)
        if (spikes[j] != 0.0) ++counts[j];
}

Real input_activity(const SpikeVector& network_input) {
    detail::require_dims(network_input.size() > 0, "input_activity: empty input");
    Eigen::Index active = 0;
    for (Eigen::Index i = 0; i < network_input.size(); ++i)
        if (network_input[i] != 0.0) ++active;
    return static_cast<Real>(active) / static_cast<Real>(network_input.size());
}

Real adaptive_threshold(const EsppConfig& cfg, PairLabel y, Real input_act) {
    return cfg.margin_constant(y) * input_act;
}

LossValue espp_loss(const SpikeVector& spikes, const EchoState& echo, PairLabel y, Real c_tilde) {
    detail::require_dims(spikes.size() == echo.size(), "espp_loss: spikes and echo differ in size");
    LossValue out;
    out.similarity = spikes.dot(echo.echo);
    out.loss = std::max(0.0, c_tilde - sign_of(y) * out.similarity);
    return out;
}

bool gate(const EsppConfig& cfg, PairLabel y, Real similarity, Real c_tilde, Real input_act) {
    return c_tilde >= sign_of(y) * similarity && input_act >= cfg.input_threshold;
}

bool accumulate_weight_update(Matrix& dst, Real scale, const EsppConfig& cfg, PairLabel y, bool gated,
                              const Vector& membrane, const EchoState& echo, const EligibilityTrace& trace) {
    detail::require_dims(membrane.size() == echo.size(), "weight_update: membrane and echo differ in size");
    detail::require_dims(dst.rows() == membrane.size() && dst.cols() == trace.size(),
                         "weight_update: destination shape != (layer size x fan-in)");
    if (!gated) return false;

    const Real factor = scale * cfg.learning_rate * sign_of(y);
    bool touched = false;
    for (Eigen::Index j = 0; j < membrane.size(); ++j) {
        const Real e = echo.echo[j];
        if (e == 0.0) continue;
        const Real post = factor * surrogate(membrane[j], cfg.theta, cfg.slope) * e;
        dst.row(j) += post * trace.trace.transpose();
        touched = true;
    }
    return touched;
}

Matrix weight_update(const EsppConfig& cfg, PairLabel y, bool gated, const Vector& membrane, const EchoState& echo,
                     const EligibilityTrace& trace) {
    Matrix dw = Matrix::Zero(membrane.size(), trace.size());
    accumulate_weight_update(dw, 1.0, cfg, y, gated, membrane, echo, trace);
    return dw;
}

void finish_sample(EchoState& e) {
    const std::int64_t total = e.counts.sum();
    e.total_spikes = total;
    if (total > 0)
        e.echo = e.counts.cast<Real>() / static_cast<Real>(total);
    else
        e.echo.setZero();
    e.counts.setZero();
}

UpdateRecord evaluate_rule(const EsppConfig& cfg, PairLabel y, const SpikeVector& spikes, const EchoState& echo,
                           Real input_act) {
    UpdateRecord r;
    r.input_activity = input_act;
    r.adaptive_threshold = adaptive_threshold(cfg, y, input_act);
    const auto lv = espp_loss(spikes, echo, y, r.adaptive_threshold);
    r.similarity = lv.similarity;
    r.loss = lv.loss;
    r.gated = gate(cfg, y, r.similarity, r.adaptive_threshold, input_act);
    return r;
}

}  // namespace espp
