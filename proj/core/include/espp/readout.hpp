#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "espp/network.hpp"

namespace espp {

struct AdamParams {
    Real learning_rate = 1e-3;
    Real beta1 = 0.9;
    Real beta2 = 0.999;
    Real epsilon = 1e-8;

    friend bool operator==(const AdamParams&, const AdamParams&) = default;
};

/// Non-leaky integrator output layer trained with softmax cross-entropy. Because the output
/// neurons do not decay, their final membrane is `weights * features` with features the
/// time-summed inputs.
struct GdHead {
    Matrix weights;   ///< n_classes x feature dim
    Matrix first_moment;
    Matrix second_moment;
    std::int64_t step = 0;
    AdamParams adam;

    GdHead() = default;
    GdHead(int n_classes, int feature_dim, AdamParams adam = {});

    int n_classes() const noexcept { return static_cast<int>(weights.rows()); }
    Vector logits(const Vector& features) const { return weights * features; }
};

Vector softmax(const Vector& logits);

/// Cross-entropy gradient w.r.t. the weights: (softmax(W f) - onehot(label)) (x) f.
Matrix gd_gradient(const GdHead& head, const Vector& features, ClassId label);

/// One Adam step on the cross-entropy gradient of a single sample.
void gd_update(GdHead& head, const Vector& features, ClassId label);

/// `epochs` passes over the rows of `features` in a seeded random order.
void gd_fit(GdHead& head, const Matrix& features, std::span<const ClassId> labels, int epochs, std::uint64_t seed);

/// Linear map from features to one-hot targets, fitted in closed form.
struct LsqHead {
    Matrix weights;  ///< n_classes x feature dim

    int n_classes() const noexcept { return static_cast<int>(weights.rows()); }
};

/// Minimizes ||F W^T - Y||^2. With ridge == 0 this is the minimum-norm solution (complete
/// orthogonal decomposition), so rank-deficient designs are fine; ridge > 0 adds ridge * ||W||^2.
LsqHead lsq_fit(const Matrix& features, std::span<const ClassId> labels, int n_classes, Real ridge = 0.0);

Matrix one_hot(std::span<const ClassId> labels, int n_classes);

/// Per-class, per-layer normalized activity references.
struct FewShotTable {
    std::vector<std::vector<Vector>> references;  ///< [class][layer]
    std::vector<bool> silent;                     ///< class produced no spikes in some layer

    int n_classes() const noexcept { return static_cast<int>(references.size()); }
};

/// Builds references from explicit per-class sample lists.
FewShotTable fewshot_build(const Network& net, const Dataset& data,
                           const std::vector<std::vector<std::size_t>>& samples_per_class);

/// Picks `shots` random samples of every class (all of them if a class has fewer).
std::vector<std::vector<std::size_t>> fewshot_select(const Dataset& data, int shots, std::uint64_t seed);

struct FewShotPrediction {
    ClassId label = 0;
    bool low_confidence = false;   ///< all class scores were equal
    std::vector<Real> scores;
};

/// Score of each class: sum over timesteps of max(0, c_pos * i_t - <s_t, reference>). `layer` is
/// the 0-based hidden layer; std::nullopt sums the scores of every layer. Prediction is the
/// argmin, ties to the lowest class id.
FewShotPrediction fewshot_predict(const Network& net, const FewShotTable& table, const SpikeRaster& raster,
                                  std::optional<int> layer);
FewShotPrediction fewshot_predict(const Network& net, const FewShotTable& table, const Recording& recording,
                                  std::optional<int> layer);

using ReadoutHead = std::variant<GdHead, LsqHead, FewShotTable>;

std::string head_name(const ReadoutHead& head);

ClassId argmax(const Vector& v);

/// Top-1 accuracy of a linear head (GD or LSQ) on precomputed features.
double linear_accuracy(const Matrix& weights, const Matrix& features, std::span<const ClassId> labels);

double fewshot_accuracy(const Network& net, const FewShotTable& table, const Dataset& data, std::optional<int> layer);

std::vector<ClassId> dataset_labels(const Dataset& data);

/// Rounds head parameters to float precision, matching what a checkpoint stores.
void quantize(ReadoutHead& head);

}  // namespace espp
