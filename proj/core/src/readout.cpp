#include "espp/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace espp {

GdHead::GdHead(int n_classes, int feature_dim, AdamParams adam_)
    : weights(Matrix::Zero(n_classes, feature_dim)),
      first_moment(Matrix::Zero(n_classes, feature_dim)),
      second_moment(Matrix::Zero(n_classes, feature_dim)),
      adam(adam_) {}

Vector softmax(const Vector& logits) {
    const Real top = logits.maxCoeff();
    Vector e = (logits.array() - top).exp().matrix();
    return e / e.sum();
}

Matrix gd_gradient(const GdHead& head, const Vector& features, ClassId label) {
    detail::require_dims(features.size() == head.weights.cols(), "gd_gradient: feature size mismatch");
    detail::require_dims(label < head.n_classes(), "gd_gradient: label out of range");
    Vector err = softmax(head.logits(features));
    err[label] -= 1.0;
    return err * features.transpose();
}

void gd_update(GdHead& head, const Vector& features, ClassId label) {
    const Matrix g = gd_gradient(head, features, label);
    const auto& a = head.adam;
    ++head.step;
    head.first_moment = a.beta1 * head.first_moment + (1.0 - a.beta1) * g;
    head.second_moment = a.beta2 * head.second_moment + (1.0 - a.beta2) * g.cwiseProduct(g);
    const Real c1 = 1.0 - std::pow(a.beta1, static_cast<Real>(head.step));
    const Real c2 = 1.0 - std::pow(a.beta2, static_cast<Real>(head.step));
    head.weights.array() -=
        a.learning_rate * (head.first_moment.array() / c1) / ((head.second_moment.array() / c2).sqrt() + a.epsilon);
}

void gd_fit(GdHead& head, const Matrix& features, std::span<const ClassId> labels, int epochs, std::uint64_t seed) {
    detail::require_dims(static_cast<std::size_t>(features.rows()) == labels.size(), "gd_fit: rows != labels");
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (int e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) gd_update(head, features.row(static_cast<Eigen::Index>(i)).transpose(), labels[i]);
    }
}

Matrix one_hot(std::span<const ClassId> labels, int n_classes) {
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        detail::require_dims(labels[i] < n_classes, "one_hot: label out of range");
        y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return y;
}

LsqHead lsq_fit(const Matrix& features, std::span<const ClassId> labels, int n_classes, Real ridge) {
    detail::require_dims(static_cast<std::size_t>(features.rows()) == labels.size(), "lsq_fit: rows != labels");
    if (features.rows() == 0) throw std::invalid_argument("lsq_fit: need at least one sample");
    if (ridge < 0.0) throw std::invalid_argument("lsq_fit: ridge must be >= 0");
    const Eigen::MatrixXd f = features;
    const Eigen::MatrixXd y = one_hot(labels, n_classes);
    Eigen::MatrixXd wt;
    if (ridge == 0.0) {
        wt = f.completeOrthogonalDecomposition().solve(y);
    } else {
        Eigen::MatrixXd gram = f.transpose() * f;
        gram.diagonal().array() += ridge;
        wt = gram.ldlt().solve(f.transpose() * y);
    }
    return LsqHead{wt.transpose()};
}

std::vector<std::vector<std::size_t>> fewshot_select(const Dataset& data, int shots, std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("fewshot_select: shots must be positive");
    std::vector<std::vector<std::size_t>> per_class(data.n_classes);
    for (std::size_t i = 0; i < data.size(); ++i) per_class.at(data.samples[i].label).push_back(i);
    std::mt19937_64 rng(seed);
    for (auto& idx : per_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        if (idx.size() > static_cast<std::size_t>(shots)) idx.resize(shots);
        std::sort(idx.begin(), idx.end());
    }
    return per_class;
}

FewShotTable fewshot_build(const Network& net, const Dataset& data,
                           const std::vector<std::vector<std::size_t>>& samples_per_class) {
    FewShotTable table;
    const int layers = net.num_layers();
    for (const auto& indices : samples_per_class) {
        std::vector<Vector> sums;
        for (const auto& ls : net.spec().layers) sums.push_back(Vector::Zero(ls.size));
        for (auto i : indices) {
            const auto counts = net.population_counts(data.raster(i));
            for (int l = 0; l < layers; ++l) sums[l] += counts.counts[l + 1];
        }
        bool silent = false;
        for (auto& s : sums) {
            const Real total = s.sum();
            if (total > 0.0) s /= total;
            else silent = true;
        }
        table.references.push_back(std::move(sums));
        table.silent.push_back(silent);
    }
    return table;
}

FewShotPrediction fewshot_predict(const Network& net, const FewShotTable& table, const Recording& rec,
                                  std::optional<int> layer) {
    const int layers = net.num_layers();
    if (layer && (*layer < 0 || *layer >= layers)) throw std::out_of_range("fewshot_predict: layer out of range");
    FewShotPrediction out;
    out.scores.assign(table.n_classes(), 0.0);
    const int first = layer ? *layer : 0;
    const int last = layer ? *layer + 1 : layers;
    for (int k = 0; k < table.n_classes(); ++k) {
        Real score = 0.0;
        for (int l = first; l < last; ++l) {
            const Real c_pos = net.spec().layers[l].config.c_pos;
            const auto& ref = table.references[k].at(l);
            for (std::size_t t = 0; t < rec.input_activity.size(); ++t)
                score += std::max(0.0, c_pos * rec.input_activity[t] - rec.spikes[l][t].dot(ref));
        }
        out.scores[k] = score;
    }
    if (!out.scores.empty()) {
        const auto it = std::min_element(out.scores.begin(), out.scores.end());
        out.label = static_cast<ClassId>(it - out.scores.begin());
        out.low_confidence = std::all_of(out.scores.begin(), out.scores.end(), [&](Real s) { return s == *it; });
    }
    return out;
}

FewShotPrediction fewshot_predict(const Network& net, const FewShotTable& table, const SpikeRaster& raster,
                                  std::optional<int> layer) {
    return fewshot_predict(net, table, net.record(raster), layer);
}

std::string head_name(const ReadoutHead& head) {
    switch (head.index()) {
        case 0: return "gd";
        case 1: return "lsq";
        default: return "fewshot";
    }
}

ClassId argmax(const Vector& v) {
    Eigen::Index best = 0;
    v.maxCoeff(&best);
    return static_cast<ClassId>(best);
}

double linear_accuracy(const Matrix& weights, const Matrix& features, std::span<const ClassId> labels) {
    if (labels.empty()) throw std::invalid_argument("evaluate: empty dataset");
    detail::require_dims(static_cast<std::size_t>(features.rows()) == labels.size(), "evaluate: rows != labels");
    detail::require_dims(features.cols() == weights.cols(), "evaluate: feature size != head input size");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Vector logits = weights * features.row(static_cast<Eigen::Index>(i)).transpose();
        if (argmax(logits) == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double fewshot_accuracy(const Network& net, const FewShotTable& table, const Dataset& data, std::optional<int> layer) {
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (fewshot_predict(net, table, data.raster(i), layer).label == data.samples[i].label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<ClassId> dataset_labels(const Dataset& data) {
    std::vector<ClassId> out;
    out.reserve(data.size());
    for (const auto& s : data.samples) out.push_back(s.label);
    return out;
}

void quantize(ReadoutHead& head) {
    auto round = [](Matrix& m) { m = m.template cast<float>().template cast<Real>(); };
    std::visit(
        [&](auto& h) {
            using H = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<H, FewShotTable>) {
                for (auto& per_class : h.references)
                    for (auto& r : per_class) r = r.template cast<float>().template cast<Real>();
            } else {
                round(h.weights);
            }
        },
        head);
}

}  // namespace espp
