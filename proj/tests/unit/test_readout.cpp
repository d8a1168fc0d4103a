#include <doctest.h>

#include <random>

#include "espp/data/synth.hpp"
#include "espp/readout.hpp"
#include "support/oracles.hpp"

using namespace espp;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
    std::vector<std::vector<double>> r(m.rows(), std::vector<double>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
    return r;
}

std::vector<double> to_vec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

double orthogonality_residual(const Matrix& f, const LsqHead& h, std::span<const ClassId> labels, int k) {
    const Matrix resid = f * h.weights.transpose() - one_hot(labels, k);
    return (f.transpose() * resid).norm();
}

}  // namespace

TEST_CASE("softmax is shift invariant and normalized") {
    Vector z(3);
    z << 1.0, 2.0, 3.0;
    const auto p = softmax(z);
    CHECK(p.sum() == doctest::Approx(1.0));
    CHECK((softmax(z.array() + 1000.0) - p).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(softmax(Vector::Constant(4, 7.0)).isApproxToConstant(0.25));
}

TEST_CASE("gd gradient: hand-computed two-class case") {
    GdHead h(2, 2);
    Vector f(2);
    f << 1.0, 0.0;
    const auto g = gd_gradient(h, f, 0);
    CHECK(g(0, 0) == doctest::Approx(-0.5));
    CHECK(g(1, 0) == doctest::Approx(0.5));
    CHECK(g(0, 1) == 0.0);
    CHECK(g(1, 1) == 0.0);
}

TEST_CASE("gd update with a saturated prediction leaves weights unchanged but advances moments") {
    GdHead h(2, 1);
    h.weights << 1e4, -1e4;
    Vector f(1);
    f << 1.0;
    const Matrix before = h.weights;
    CHECK(gd_gradient(h, f, 0).isZero());
    gd_update(h, f, 0);
    CHECK(h.weights == before);
    CHECK(h.step == 1);
}

TEST_CASE("gd gradient matches finite differences of cross-entropy") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick_k(2, 6), pick_d(1, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = pick_k(rng), d = pick_d(rng);
        GdHead h(k, d);
        h.weights = random_matrix(rng, k, d, 0.5);
        const Vector f = random_matrix(rng, d, 1, 2.0).col(0);
        const ClassId label = static_cast<ClassId>(std::uniform_int_distribution<int>(0, k - 1)(rng));
        const Matrix g = gd_gradient(h, f, label);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < d; ++j) {
                auto loss = [&](double w) {
                    Matrix m = h.weights;
                    m(i, j) = w;
                    return oracle::cross_entropy(to_rows(m), to_vec(f), label);
                };
                const double fd = oracle::central_difference(loss, h.weights(i, j), 1e-6);
                CHECK(g(i, j) == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
            }
    }
}

TEST_CASE("gd_fit separates a linearly separable set") {
    Matrix f(40, 3);
    std::vector<ClassId> labels;
    for (int i = 0; i < 40; ++i) {
        const int k = i % 2;
        f.row(i) << (k ? 5.0 : 1.0), (k ? 1.0 : 5.0), 1.0;
        labels.push_back(static_cast<ClassId>(k));
    }
    GdHead h(2, 3, AdamParams{.learning_rate = 0.05});
    gd_fit(h, f, labels, 50, 3);
    CHECK(linear_accuracy(h.weights, f, labels) == 1.0);
}

TEST_CASE("lsq: identity and exact fit") {
    const Matrix eye = Matrix::Identity(4, 4);
    const std::vector<ClassId> labels{0, 1, 2, 3};
    CHECK(lsq_fit(eye, labels, 4).weights.isApprox(eye, 1e-14));

    // One feature, one target column equal to it: weight exactly 1.
    Matrix f(3, 1);
    f << 1.0, 2.0, 3.0;
    Matrix y(3, 1);
    y << 1.0, 2.0, 3.0;
    const Matrix w = f.completeOrthogonalDecomposition().solve(y);
    CHECK(w(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    // Same through the head: all labels 0 with features (1,1,1) map to exactly 1.
    const std::vector<ClassId> zeros{0, 0, 0};
    const Matrix ones = Matrix::Ones(3, 1);
    CHECK(lsq_fit(ones, zeros, 1).weights(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lsq residual is orthogonal to the column space") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick_k(0, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 60, d = 12, k = 5;
        std::vector<ClassId> labels;
        for (int i = 0; i < n; ++i) labels.push_back(static_cast<ClassId>(pick_k(rng)));

        const Matrix full = random_matrix(rng, n, d, 3.0);
        const auto h1 = lsq_fit(full, labels, k);
        CHECK(orthogonality_residual(full, h1, labels, k) <= 1e-8 * full.norm() * std::sqrt(double(n)));

        // Rank 4 design with duplicated and zero columns.
        Matrix deficient = random_matrix(rng, n, 4, 3.0) * random_matrix(rng, 4, d);
        deficient.col(0).setZero();
        deficient.col(1) = deficient.col(2);
        const auto h2 = lsq_fit(deficient, labels, k);
        CHECK(orthogonality_residual(deficient, h2, labels, k) <= 1e-8 * deficient.norm() * std::sqrt(double(n)));
        // Minimum norm: nothing is placed on the zero column.
        CHECK(h2.weights.col(0).norm() < 1e-10);
    }
}

TEST_CASE("lsq ridge shrinks the weights") {
    std::mt19937_64 rng(6);
    const Matrix f = random_matrix(rng, 30, 5);
    std::vector<ClassId> labels(30);
    for (int i = 0; i < 30; ++i) labels[i] = static_cast<ClassId>(i % 3);
    CHECK(lsq_fit(f, labels, 3, 10.0).weights.norm() < lsq_fit(f, labels, 3).weights.norm());
    CHECK_THROWS(lsq_fit(Matrix(0, 5), std::span<const ClassId>{}, 3));
}

TEST_CASE("evaluate: separable set, chance level, empty set") {
    Matrix f = Matrix::Identity(3, 3);
    const std::vector<ClassId> labels{0, 1, 2};
    CHECK(linear_accuracy(lsq_fit(f, labels, 3).weights, f, labels) == 1.0);
    CHECK_THROWS_AS(linear_accuracy(f, Matrix(0, 3), std::span<const ClassId>{}), std::invalid_argument);

    std::mt19937_64 rng(1);
    const int n = 4000, k = 4;
    const Matrix x = random_matrix(rng, n, 10);
    std::vector<ClassId> y;
    for (int i = 0; i < n; ++i) y.push_back(static_cast<ClassId>(i % k));
    const double acc = linear_accuracy(random_matrix(rng, k, 10), x, y);
    CHECK(std::abs(acc - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / n));
}

namespace {

// A one-layer network of `size` neurons over `inputs` channels; only its config matters for scoring.
Network scoring_net(int inputs, int size, Real c_pos) {
    EsppConfig cfg;
    cfg.c_pos = c_pos;
    const std::array sizes{size};
    return Network(feed_forward_spec(inputs, sizes, cfg), 0);
}

}  // namespace

TEST_CASE("few-shot references are normalized summed counts") {
    // Weights chosen so that one hidden neuron copies each input channel.
    const std::array sizes{2};
    Network net(feed_forward_spec(2, sizes, EsppConfig{}), std::vector<Matrix>{Matrix::Identity(2, 2)});
    Dataset d{2, 4, 1, {}};
    d.samples.push_back(Sample{0, {{0, 0}, {1, 0}, {1, 1}, {2, 0}}});  // counts (3, 1)
    const auto table = fewshot_build(net, d, {{0}});
    CHECK(table.references[0][0].isApprox((Vector(2) << 0.75, 0.25).finished()));
    CHECK_FALSE(table.silent[0]);

    d.samples.push_back(d.samples[0]);
    d.samples.push_back(d.samples[0]);
    CHECK(fewshot_build(net, d, {{0, 1, 2}}).references[0][0] == table.references[0][0]);

    Dataset z{2, 4, 1, {Sample{0, {}}}};
    const auto silent = fewshot_build(net, z, {{0}});
    CHECK(silent.silent[0]);
    CHECK(silent.references[0][0].isZero());
}

TEST_CASE("few-shot prediction: separable pattern, zero activity, brute force") {
    const auto net = scoring_net(3, 3, 2.0);
    FewShotTable table;
    for (int k = 0; k < 3; ++k) {
        Vector r = Vector::Zero(3);
        r[k] = 1.0;
        table.references.push_back({r});
        table.silent.push_back(false);
    }

    Recording match;
    match.input_activity = {0.3, 0.3};
    match.spikes = {{(SpikeVector(3) << 0, 1, 0).finished(), (SpikeVector(3) << 0, 1, 0).finished()}};
    CHECK(fewshot_predict(net, table, match, 0).label == 1);

    Recording zero;
    zero.input_activity = {0.0, 0.0};
    zero.spikes = {{SpikeVector::Zero(3), SpikeVector::Zero(3)}};
    const auto pz = fewshot_predict(net, table, zero, std::nullopt);
    CHECK(pz.label == 0);
    CHECK(pz.low_confidence);

    std::mt19937_64 rng(4);
    std::bernoulli_distribution spike(0.4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        FewShotTable t;
        for (int k = 0; k < 3; ++k) {
            Vector r(3);
            r << u(rng), u(rng), u(rng);
            t.references.push_back({r / r.sum()});
            t.silent.push_back(false);
        }
        Recording rec;
        rec.spikes.resize(1);
        for (int s = 0; s < 6; ++s) {
            rec.input_activity.push_back(u(rng) * 0.5);
            SpikeVector v(3);
            for (int j = 0; j < 3; ++j) v[j] = spike(rng) ? 1.0 : 0.0;
            rec.spikes[0].push_back(v);
        }
        std::vector<double> brute(3, 0.0);
        for (int k = 0; k < 3; ++k)
            for (int s = 0; s < 6; ++s) {
                double dot = 0.0;
                for (int j = 0; j < 3; ++j) dot += rec.spikes[0][s][j] * t.references[k][0][j];
                brute[k] += std::max(0.0, 2.0 * rec.input_activity[s] - dot);
            }
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (brute[k] < brute[best]) best = k;
        const auto p = fewshot_predict(net, t, rec, 0);
        REQUIRE(p.label == best);
        for (int k = 0; k < 3; ++k) REQUIRE(p.scores[k] == doctest::Approx(brute[k]).epsilon(1e-12));
    }
    CHECK_THROWS(fewshot_predict(net, table, match, 1));
}

TEST_CASE("few-shot selection") {
    SynthParams p{.n_classes = 3, .channels = 6, .steps = 4, .n_samples = 31, .seed = 2};
    const auto d = synth_generate(p);
    const auto sel = fewshot_select(d, 5, 9);
    REQUIRE(sel.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(sel[k].size() == 5);
        for (auto i : sel[k]) CHECK(d.samples[i].label == k);
    }
    CHECK(fewshot_select(d, 5, 9) == sel);
    const auto all = fewshot_select(d, 100, 9);
    CHECK(all[0].size() == 11);
    CHECK(all[2].size() == 10);
}

TEST_CASE("quantize rounds every head to float") {
    ReadoutHead h = LsqHead{Matrix::Constant(2, 2, 0.1)};
    quantize(h);
    CHECK(std::get<LsqHead>(h).weights(0, 0) == static_cast<double>(0.1f));
    CHECK(head_name(h) == "lsq");
    CHECK(head_name(ReadoutHead{GdHead(2, 2)}) == "gd");
    CHECK(head_name(ReadoutHead{FewShotTable{}}) == "fewshot");
}
