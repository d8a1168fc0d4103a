#include "espp/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <thread>

namespace espp {

std::string to_string(ReadoutWiring w) { return w == ReadoutWiring::AllLayers ? "all" : "last"; }

ReadoutWiring wiring_from_string(const std::string& s) {
    if (s == "all" || s == "all_layers") return ReadoutWiring::AllLayers;
    if (s == "last" || s == "last_layer_only") return ReadoutWiring::LastLayerOnly;
    throw std::invalid_argument("unknown readout wiring '" + s + "' (expected last|all)");
}

void NetworkSpec::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("network spec: " + msg); };
    if (input_size <= 0) fail("input_size must be positive");
    if (layers.empty()) fail("at least one hidden layer is required");
    const int n = static_cast<int>(layers.size());
    for (int l = 0; l < n; ++l) {
        const auto& ls = layers[l];
        const auto name = "layer " + std::to_string(l + 1);
        if (ls.size <= 0) fail(name + ": size must be positive");
        std::set<int> seen;
        for (int src : ls.skip_sources) {
            // The feed-forward source is population l; skips must come strictly before it.
            if (src < 0 || src >= l) fail(name + ": skip source " + std::to_string(src) + " does not precede it");
            if (!seen.insert(src).second) fail(name + ": duplicate skip source");
        }
        seen.clear();
        for (int src : ls.feedback_sources) {
            if (src <= l + 1 || src > n)
                fail(name + ": feedback source " + std::to_string(src) + " must be a later hidden layer");
            if (!seen.insert(src).second) fail(name + ": duplicate feedback source");
        }
        try {
            ls.config.validate();
        } catch (const std::invalid_argument& e) {
            fail(name + ": " + e.what());
        }
    }
}

int NetworkSpec::population_size(int population) const {
    if (population == 0) return input_size;
    return layers.at(population - 1).size;
}

int NetworkSpec::fan_in(int layer) const {
    const auto& ls = layers.at(layer);
    int n = population_size(layer);
    if (ls.recurrent) n += ls.size;
    for (int s : ls.skip_sources) n += population_size(s);
    for (int s : ls.feedback_sources) n += population_size(s);
    return n;
}

std::vector<int> NetworkSpec::readout_populations(ReadoutWiring wiring) const {
    const int n = static_cast<int>(layers.size());
    if (wiring == ReadoutWiring::LastLayerOnly) return {n};
    std::vector<int> all(n + 1);
    for (int p = 0; p <= n; ++p) all[p] = p;
    return all;
}

int NetworkSpec::feature_size(std::span<const int> populations) const {
    int n = 0;
    for (int p : populations) n += population_size(p);
    return n;
}

NetworkSpec feed_forward_spec(int input_size, std::span<const int> sizes, const EsppConfig& cfg, ReadoutWiring wiring) {
    NetworkSpec spec;
    spec.input_size = input_size;
    spec.readout_wiring = wiring;
    for (int s : sizes) {
        LayerSpec ls;
        ls.size = s;
        ls.config = cfg;
        spec.layers.push_back(std::move(ls));
    }
    return spec;
}

void NetworkState::reset_sample() {
    for (auto& s : lif) s.reset();
    for (auto& t : traces) t.reset();
    for (auto& p : previous) p.setZero();
    for (auto& s : spikes) s.setZero();
}

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
    spec_.validate();
    std::mt19937_64 rng(seed);
    for (int l = 0; l < num_layers(); ++l) {
        const int fan_in = spec_.fan_in(l);
        const float k = 1.0f / std::sqrt(static_cast<float>(fan_in));
        std::uniform_real_distribution<float> dist(-k, k);
        Matrix w(spec_.layers[l].size, fan_in);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = static_cast<Real>(dist(rng));
        weights_.push_back(std::move(w));
    }
}

Network::Network(NetworkSpec spec, std::vector<Matrix> weights) : spec_(std::move(spec)), weights_(std::move(weights)) {
    spec_.validate();
    detail::require_dims(static_cast<int>(weights_.size()) == num_layers(), "Network: one weight matrix per layer");
    for (int l = 0; l < num_layers(); ++l)
        detail::require_dims(weights_[l].rows() == spec_.layers[l].size && weights_[l].cols() == spec_.fan_in(l),
                             "Network: weight matrix shape does not match spec");
}

void Network::apply_delta(int layer, const Matrix& delta) {
    auto& w = weights_.at(layer);
    detail::require_dims(delta.rows() == w.rows() && delta.cols() == w.cols(), "apply_delta: shape mismatch");
    w = (w + delta).cast<float>().cast<Real>();
    if (!w.allFinite()) throw NumericError("non-finite weight in layer " + std::to_string(layer + 1));
}

NetworkState Network::make_state() const {
    NetworkState s;
    for (int l = 0; l < num_layers(); ++l) {
        const auto& ls = spec_.layers[l];
        s.lif.emplace_back(ls.size, ls.config.theta, ls.config.beta);
        s.traces.emplace_back(spec_.fan_in(l), ls.config.beta);
        s.spikes.push_back(SpikeVector::Zero(ls.size));
        s.previous.push_back(SpikeVector::Zero(ls.size));
        s.potential.push_back(Vector::Zero(ls.size));
        s.inputs.push_back(SpikeVector::Zero(spec_.fan_in(l)));
    }
    return s;
}

void Network::assemble_input(const NetworkState& state, int layer, const SpikeVector& network_input,
                             SpikeVector& out) const {
    const auto& ls = spec_.layers[layer];
    auto now = [&](int population) -> const SpikeVector& {
        return population == 0 ? network_input : state.spikes[population - 1];
    };
    Eigen::Index at = 0;
    auto put = [&](const SpikeVector& v) {
        out.segment(at, v.size()) = v;
        at += v.size();
    };
    put(now(layer));
    if (ls.recurrent) put(state.previous[layer]);
    for (int s : ls.skip_sources) put(now(s));
    for (int s : ls.feedback_sources) put(state.previous[s - 1]);
}

void Network::forward_step(NetworkState& state, const SpikeVector& network_input) const {
    detail::require_dims(network_input.size() == spec_.input_size, "forward_step: network input size mismatch");
    std::swap(state.previous, state.spikes);
    for (int l = 0; l < num_layers(); ++l) {
        assemble_input(state, l, network_input, state.inputs[l]);
        trace_step(state.traces[l], state.inputs[l]);
        auto out = lif_step(state.lif[l], weights_[l], state.inputs[l]);
        state.spikes[l] = std::move(out.spikes);
        state.potential[l] = std::move(out.potential);
    }
}

PopulationCounts Network::population_counts(const SpikeRaster& raster) const {
    detail::require_dims(static_cast<int>(raster.channels()) == spec_.input_size, "raster channels != input size");
    auto state = make_state();
    PopulationCounts pc;
    pc.counts.push_back(Vector::Zero(spec_.input_size));
    for (const auto& ls : spec_.layers) pc.counts.push_back(Vector::Zero(ls.size));
    for (std::uint32_t t = 0; t < raster.steps(); ++t) {
        const auto x = raster.step(t);
        forward_step(state, x);
        pc.counts[0] += x;
        for (int l = 0; l < num_layers(); ++l) pc.counts[l + 1] += state.spikes[l];
    }
    return pc;
}

Recording Network::record(const SpikeRaster& raster) const {
    detail::require_dims(static_cast<int>(raster.channels()) == spec_.input_size, "raster channels != input size");
    auto state = make_state();
    Recording rec;
    rec.spikes.resize(num_layers());
    for (std::uint32_t t = 0; t < raster.steps(); ++t) {
        const auto x = raster.step(t);
        forward_step(state, x);
        rec.input_activity.push_back(input_activity(x));
        for (int l = 0; l < num_layers(); ++l) rec.spikes[l].push_back(state.spikes[l]);
    }
    return rec;
}

Vector assemble_features(const PopulationCounts& counts, std::span<const int> populations) {
    Eigen::Index n = 0;
    for (int p : populations) n += counts.counts.at(p).size();
    Vector f(n);
    Eigen::Index at = 0;
    for (int p : populations) {
        const auto& c = counts.counts[p];
        f.segment(at, c.size()) = c;
        at += c.size();
    }
    return f;
}

Vector Network::collect_features(const SpikeRaster& raster, ReadoutWiring wiring) const {
    const auto pops = spec_.readout_populations(wiring);
    return assemble_features(population_counts(raster), pops);
}

std::uint64_t Network::weight_checksum() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& w : weights_) {
        const auto* p = reinterpret_cast<const unsigned char*>(w.data());
        for (std::size_t i = 0; i < static_cast<std::size_t>(w.size()) * sizeof(Real); ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    }
    return h;
}

Matrix collect_dataset_features(const Network& net, const Dataset& data, std::span<const int> populations,
                                unsigned threads) {
    Matrix f(static_cast<Eigen::Index>(data.size()), net.spec().feature_size(populations));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            f.row(static_cast<Eigen::Index>(i)) = assemble_features(net.population_counts(data.raster(i)), populations);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(data.size(), 1))));
    if (threads == 1) {
        work(0, data.size());
        return f;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (data.size() + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
        const std::size_t b = k * chunk, e = std::min(data.size(), b + chunk);
        if (b < e) pool.emplace_back(work, b, e);
    }
    pool.clear();
    return f;
}

}  // namespace espp
