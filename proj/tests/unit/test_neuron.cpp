#include <doctest.h>

#include <random>

#include "espp/neuron.hpp"
#include "support/oracles.hpp"

using namespace espp;

TEST_CASE("lif_step: identity weights at exactly threshold") {
    LifState s(2, 1.0, 0.0);
    Matrix w = Matrix::Identity(2, 2);
    SpikeVector in(2);
    in << 1, 0;
    auto out = lif_step(s, w, in);
    CHECK(out.spikes == Vector::Unit(2, 0));
    CHECK(s.membrane == Vector::Zero(2));
}

TEST_CASE("lif_step: pure decay without drive") {
    LifState s(2, 1.0, 0.9);
    s.membrane << 0.5, 0.5;
    Matrix w = Matrix::Zero(2, 3);
    SpikeVector in = SpikeVector::Ones(3);
    auto out = lif_step(s, w, in);
    CHECK(out.spikes == Vector::Zero(2));
    CHECK(s.membrane[0] == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(s.membrane[1] == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("lif_step: two-neuron recurrence matches hand computation") {
    // V = 0.9 * (0.5, 0.9) + (0.6, 0.3) = (1.05, 1.11); both spike; subtract theta.
    LifState s(2, 1.0, 0.9);
    s.membrane << 0.5, 0.9;
    Matrix w(2, 1);
    w << 0.6, 0.3;
    SpikeVector in(1);
    in << 1;
    auto out = lif_step(s, w, in);
    CHECK(out.potential[0] == doctest::Approx(1.05).epsilon(1e-12));
    CHECK(out.potential[1] == doctest::Approx(1.11).epsilon(1e-12));
    CHECK(out.spikes == Vector::Ones(2));
    CHECK(s.membrane[0] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(s.membrane[1] == doctest::Approx(0.11).epsilon(1e-12));
}

TEST_CASE("lif_step: beta=1 and zero weights conserve the membrane exactly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    LifState s(16, 1.0, 1.0);
    for (auto& v : s.membrane) v = u(rng);
    const Vector before = s.membrane;
    Matrix w = Matrix::Zero(16, 4);
    for (int t = 0; t < 100; ++t) lif_step(s, w, SpikeVector::Ones(4));
    CHECK(s.membrane == before);
}

TEST_CASE("lif_step: dimension mismatch is a hard error") {
    LifState s(2, 1.0, 0.9);
    CHECK_THROWS_AS(lif_step(s, Matrix::Zero(2, 3), SpikeVector::Zero(2)), DimensionError);
    CHECK_THROWS_AS(lif_step(s, Matrix::Zero(3, 2), SpikeVector::Zero(2)), DimensionError);
}

TEST_CASE("LifState rejects invalid parameters") {
    CHECK_THROWS_AS(LifState(2, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(LifState(2, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(EligibilityTrace(2, -0.1), std::invalid_argument);
}

TEST_CASE("trace_step examples") {
    EligibilityTrace t(2, 0.9);
    SpikeVector a(2), b(2);
    a << 1, 0;
    b << 1, 1;
    trace_step(t, a);
    CHECK(t.trace == a);
    trace_step(t, b);
    CHECK(t.trace[0] == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(t.trace[1] == 1.0);
    CHECK_THROWS_AS(trace_step(t, SpikeVector::Zero(3)), DimensionError);
}

TEST_CASE("trace_step: constant input follows the geometric series") {
    EligibilityTrace t(1, 0.9);
    for (int T = 1; T <= 60; ++T) {
        trace_step(t, SpikeVector::Ones(1));
        CHECK(t.trace[0] == doctest::Approx((1.0 - std::pow(0.9, T)) / 0.1).epsilon(1e-12));
    }
}

TEST_CASE("trace_step: exhaustive binary sequences of length 8 match the closed form") {
    for (const double beta : {0.0, 0.5, 0.9, 0.95, 1.0}) {
        for (int mask = 0; mask < 256; ++mask) {
            std::vector<int> seq(8);
            EligibilityTrace t(1, beta);
            for (int k = 0; k < 8; ++k) {
                seq[k] = (mask >> k) & 1;
                SpikeVector in(1);
                in << seq[k];
                trace_step(t, in);
            }
            REQUIRE(t.trace[0] == doctest::Approx(oracle::geometric_trace(seq, beta)).epsilon(1e-13));
            REQUIRE(t.trace[0] >= 0.0);
        }
    }
}

TEST_CASE("surrogate: peak, tails and a plugged-in point") {
    CHECK(surrogate(1.0, 1.0, 2.0) == 1.0);
    CHECK(surrogate(1.0 + 1.0 / std::numbers::pi, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(surrogate(1e9, 1.0, 2.0) < 1e-15);
    CHECK(surrogate(-1e9, 1.0, 2.0) < 1e-15);
    CHECK(surrogate(1.3, 1.0, 2.0) == doctest::Approx(oracle::arctan_surrogate(1.3, 1.0, 2.0)).epsilon(1e-15));
}

TEST_CASE("surrogate: symmetric about the threshold and strictly positive") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(-5.0, 5.0), a(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double d = x(rng), slope = a(rng);
        CHECK(surrogate(1.0 + d, 1.0, slope) == doctest::Approx(surrogate(1.0 - d, 1.0, slope)).epsilon(1e-15));
        CHECK(surrogate(1.0 + d, 1.0, slope) > 0.0);
        CHECK(surrogate(1.0 + d, 1.0, slope) <= surrogate(1.0, 1.0, slope));
    }
}

TEST_CASE("surrogate: matches the finite-difference derivative of the smoothed step") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(-2.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        const double x = v(rng), slope = 2.0, th = 1.0;
        const double fd =
            oracle::central_difference([&](double z) { return oracle::smoothed_step(z, th, slope); }, x, 1e-5);
        CHECK(surrogate(x, th, slope) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("surrogate: vector form is elementwise") {
    Vector v(3);
    v << 0.0, 1.0, 2.5;
    const Vector s = surrogate(v, 1.0, 2.0);
    for (int j = 0; j < 3; ++j) CHECK(s[j] == surrogate(v[j], 1.0, 2.0));
}
