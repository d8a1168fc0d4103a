#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "espp/checkpoint.hpp"
#include "espp/config.hpp"
#include "espp/data/synth.hpp"

using namespace espp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("espp_test_" + name)) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Checkpoint trained_checkpoint(ReadoutHead head) {
    SynthParams p{.n_classes = 3, .channels = 12, .steps = 10, .n_samples = 30, .seed = 1};
    const auto d = synth_generate(p);
    NetworkSpec spec = feed_forward_spec(12, std::array{8, 6}, EsppConfig{.learning_rate = 1e-2}, ReadoutWiring::AllLayers);
    spec.layers[1].recurrent = true;
    spec.layers[1].skip_sources = {0};
    Network net(spec, 3);
    Phase1Options opts;
    opts.seed = 4;
    const auto snap = train_phase1(net, d, opts);
    quantize(head);
    Checkpoint c;
    c.spec = spec;
    c.weights = net.weights();
    c.head = std::move(head);
    c.head_wiring = ReadoutWiring::AllLayers;
    c.run_config_json = R"({"epochs":1,"seed":4})";
    c.metrics = snap.metrics;
    c.seed = 4;
    c.epochs_completed = snap.epochs_completed;
    c.steps = snap.steps;
    return c;
}

}  // namespace

TEST_CASE("network spec JSON round-trip") {
    NetworkSpec spec = feed_forward_spec(5, std::array{4, 3, 2}, EsppConfig{.beta = 0.95, .c_pos = 1.5, .c_neg = -1.5});
    spec.layers[0].feedback_sources = {3};
    spec.layers[2].skip_sources = {0, 1};
    spec.layers[1].recurrent = true;
    CHECK(network_spec_from_json(network_spec_to_json(spec)) == spec);
}

TEST_CASE("checkpoint round-trip is lossless for every head type") {
    GdHead gd(3, 26);
    gd.weights.setConstant(0.3);
    FewShotTable fs;
    fs.references = {{Vector::Constant(8, 0.125), Vector::Constant(6, 1.0 / 6)}, {Vector::Zero(8), Vector::Zero(6)}};
    fs.silent = {false, true};
    for (ReadoutHead head : {ReadoutHead{gd}, ReadoutHead{LsqHead{Matrix::Constant(3, 26, -0.7)}}, ReadoutHead{fs}}) {
        TempDir dir("ckpt_" + head_name(head));
        const auto c = trained_checkpoint(head);
        save_checkpoint(c, dir.path);
        CHECK(fs::exists(dir.path / kManifestName));
        CHECK(fs::exists(dir.path / kBlobName));
        const auto r = load_checkpoint(dir.path);
        CHECK(r.spec == c.spec);
        CHECK(r.weights == c.weights);
        CHECK(r.seed == 4);
        CHECK(r.steps == c.steps);
        CHECK(r.epochs_completed == 1);
        CHECK(r.head_wiring == ReadoutWiring::AllLayers);
        CHECK(r.metrics.size() == c.metrics.size());
        CHECK(r.metrics[1].gated_steps == c.metrics[1].gated_steps);
        CHECK(r.run_config_json.find("\"seed\":4") != std::string::npos);
        REQUIRE(r.head.has_value());
        CHECK(r.head->index() == head.index());
        if (auto* g = std::get_if<GdHead>(&*r.head)) CHECK(g->weights == std::get<GdHead>(*c.head).weights);
        if (auto* l = std::get_if<LsqHead>(&*r.head)) CHECK(l->weights == std::get<LsqHead>(*c.head).weights);
        if (auto* f = std::get_if<FewShotTable>(&*r.head)) {
            CHECK(f->references == std::get<FewShotTable>(*c.head).references);
            CHECK(f->silent == fs.silent);
        }

        // Saving the reloaded checkpoint reproduces the blob byte for byte.
        TempDir again("ckpt_again_" + head_name(head));
        save_checkpoint(r, again.path);
        std::ifstream a(dir.path / kBlobName, std::ios::binary), b(again.path / kBlobName, std::ios::binary);
        CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));
    }
}

TEST_CASE("damaged checkpoints are rejected") {
    TempDir dir("ckpt_damaged");
    save_checkpoint(trained_checkpoint(LsqHead{Matrix::Zero(3, 26)}), dir.path);
    fs::resize_file(dir.path / kBlobName, 16);
    CHECK_THROWS_AS(load_checkpoint(dir.path), std::runtime_error);
    CHECK_THROWS_AS(load_checkpoint(dir.path / "missing"), std::runtime_error);
    {
        std::ofstream(dir.path / kManifestName) << "{\"format\":\"something-else\"}";
    }
    CHECK_THROWS_AS(load_checkpoint(dir.path), std::runtime_error);
}

TEST_CASE("built-in presets carry the published hyperparameters") {
    const auto n = builtin_preset("nmnist");
    REQUIRE(n);
    CHECK(n->rule.beta == 0.9);
    CHECK(n->rule.c_pos == 2.0);
    CHECK(n->rule.c_neg == -1.0);
    CHECK(n->rule.input_threshold == 0.02);
    CHECK(n->rule.learning_rate == 1e-4);
    CHECK(n->steps == 10);
    CHECK(n->hidden_size == 200);
    CHECK(n->hidden_layers == 3);
    CHECK(n->epochs == 300);

    const auto s = builtin_preset("shd");
    REQUIRE(s);
    CHECK(s->rule.beta == 0.95);
    CHECK(s->rule.c_pos == 1.5);
    CHECK(s->rule.c_neg == -1.5);
    CHECK(s->rule.input_threshold == 0.05);
    CHECK(s->rule.learning_rate == 1e-4);
    CHECK(s->steps == 100);
    CHECK(s->hidden_size == 450);
    CHECK(s->hidden_layers == 3);
    CHECK(s->epochs == 1000);

    CHECK_FALSE(builtin_preset("mnist"));
}

TEST_CASE("preset text format") {
    const auto kv = parse_key_values("# comment\nbeta = 0.8\n\n  epochs=5 # trailing\n");
    CHECK(kv.at("beta") == "0.8");
    CHECK(kv.at("epochs") == "5");
    CHECK_THROWS_WITH(parse_key_values("ok = 1\nbroken\n"), doctest::Contains("line 2"));

    const auto p = apply_key_values(*builtin_preset("shd"), kv);
    CHECK(p.rule.beta == 0.8);
    CHECK(p.epochs == 5);
    CHECK(p.rule.c_pos == 1.5);
    CHECK_THROWS(apply_key_values(p, {{"gamma", "1"}}));
    CHECK_THROWS(apply_key_values(p, {{"c_pos", "-1"}}));
    CHECK_THROWS(apply_key_values(p, {{"epochs", "1.5"}}));

    const auto round = apply_key_values(Preset{}, parse_key_values(format_preset(p)));
    CHECK(round.rule == p.rule);
    CHECK(round.name == p.name);
    CHECK(round.steps == p.steps);

    TempDir dir("preset");
    fs::create_directories(dir.path);
    std::ofstream(dir.path / "x.conf") << "base = nmnist\nlearning_rate = 3e-3\n";
    const auto f = load_preset_file(dir.path / "x.conf");
    CHECK(f.rule.learning_rate == 3e-3);
    CHECK(f.hidden_size == 200);
}

TEST_CASE("rule config validation") {
    CHECK_NOTHROW(EsppConfig{}.validate());
    CHECK_THROWS(EsppConfig{.beta = 1.5}.validate());
    CHECK_THROWS(EsppConfig{.c_pos = 0.0}.validate());
    CHECK_THROWS(EsppConfig{.c_neg = 0.5}.validate());
    CHECK_THROWS(EsppConfig{.input_threshold = -0.1}.validate());
    CHECK(EsppConfig{}.margin_constant(PairLabel::Saccade) == -1.0);
}
