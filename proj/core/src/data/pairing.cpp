#include "espp/data/pairing.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace espp {

void assign_pair_labels(std::vector<PairedSample>& items) {
    for (std::size_t i = 0; i < items.size(); ++i)
        items[i].y = i == 0 ? std::nullopt : std::optional(pair_label_for(items[i - 1].label, items[i].label));
}

namespace {

std::vector<PairedSample> natural_order(const Dataset& data, const std::vector<std::size_t>& indices,
                                        std::mt19937_64& rng) {
    std::vector<PairedSample> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back({i, data.samples.at(i).label, std::nullopt});
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

std::vector<PairedSample> balanced_order(const Dataset& data, const std::vector<std::size_t>& indices, double p_fix,
                                         std::mt19937_64& rng) {
    std::vector<std::vector<std::size_t>> pools(std::max<std::size_t>(data.n_classes, 1));
    for (auto i : indices) {
        const auto label = data.samples.at(i).label;
        if (label >= pools.size()) pools.resize(label + 1);
        pools[label].push_back(i);
    }
    for (auto& pool : pools) std::shuffle(pool.begin(), pool.end(), rng);

    std::size_t remaining = indices.size();
    auto pick_class = [&](std::optional<std::size_t> exclude) -> std::optional<std::size_t> {
        std::size_t total = 0;
        for (std::size_t k = 0; k < pools.size(); ++k)
            if (k != exclude) total += pools[k].size();
        if (total == 0) return std::nullopt;
        std::uniform_int_distribution<std::size_t> dist(0, total - 1);
        auto r = dist(rng);
        for (std::size_t k = 0; k < pools.size(); ++k) {
            if (k == exclude) continue;
            if (r < pools[k].size()) return k;
            r -= pools[k].size();
        }
        return std::nullopt;
    };

    std::vector<PairedSample> out;
    out.reserve(indices.size());
    std::bernoulli_distribution fixation(p_fix);
    std::optional<std::size_t> current;
    while (remaining > 0) {
        std::optional<std::size_t> next;
        if (!current) {
            next = pick_class(std::nullopt);
        } else {
            const bool want_fix = fixation(rng);
            if (want_fix && !pools[*current].empty()) next = current;
            else next = pick_class(current);
            if (!next) next = current;  // only the current class has samples left
        }
        auto& pool = pools[*next];
        out.push_back({pool.back(), static_cast<ClassId>(*next), std::nullopt});
        pool.pop_back();
        --remaining;
        current = next;
    }
    return out;
}

}  // namespace

PairStream pair_stream(const Dataset& data, const std::vector<std::size_t>& indices, const PairingPolicy& policy) {
    if (!(policy.p_fix >= 0.0 && policy.p_fix <= 1.0)) throw std::invalid_argument("p_fix must lie in [0, 1]");
    PairStream s;
    std::mt19937_64 rng(policy.seed);

    std::vector<bool> seen(std::max<std::size_t>(data.n_classes, 1), false);
    std::size_t distinct = 0;
    for (auto i : indices) {
        const auto label = data.samples.at(i).label;
        if (label >= seen.size()) seen.resize(label + 1, false);
        if (!seen[label]) {
            seen[label] = true;
            ++distinct;
        }
    }
    if (distinct == 1 && indices.size() > 1)
        s.warnings.emplace_back("pairing: dataset has a single class; every pair is a fixation");

    s.items = policy.mode == PairingPolicy::Mode::Balanced ? balanced_order(data, indices, policy.p_fix, rng)
                                                           : natural_order(data, indices, rng);
    assign_pair_labels(s.items);
    return s;
}

PairStream pair_stream(const Dataset& data, const PairingPolicy& policy) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return pair_stream(data, all, policy);
}

}  // namespace espp
