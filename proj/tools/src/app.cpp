#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "espp/checkpoint.hpp"
#include "espp/config.hpp"
#include "espp/data/format.hpp"
#include "espp/data/synth.hpp"
#include "espp/readout.hpp"
#include "espp/training.hpp"
#include "manifest.hpp"
#include "run_config.hpp"

namespace espp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("ESPP_OUT_DIR"); env && *env) return env;
    return "espp_out";
}

/// Runs `f`, turning std::invalid_argument into a usage error.
template <typename F>
void as_usage(F&& f) {
    try {
        f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

json epoch_json(const LayerEpochMetrics& m) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"type", "epoch"},
            {"epoch", m.epoch + 1},
            {"layer", m.layer},
            {"firing_rate", m.firing_rate},
            {"gated_fraction", m.gated_fraction},
            {"mean_fix_loss", num(m.mean_fix_loss)},
            {"mean_sac_loss", num(m.mean_sac_loss)}};
}

struct Evaluation {
    std::string head;
    std::string scope;
    std::optional<double> train_acc;
    std::optional<double> test_acc;
    bool baseline = false;
};

json eval_json(const Evaluation& e) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return {{"type", "eval"},       {"head", e.head},           {"layer_scope", e.scope},
            {"train_acc", opt(e.train_acc)}, {"test_acc", opt(e.test_acc)}, {"baseline", e.baseline}};
}

Dataset load_dataset(const std::string& path, int expected_channels = -1) {
    auto d = load_espk(path);
    if (expected_channels >= 0 && static_cast<int>(d.channels) != expected_channels)
        throw std::runtime_error(path + ": dataset has " + std::to_string(d.channels) +
                                 " channels but the network expects " + std::to_string(expected_channels));
    return d;
}

int class_count(const Dataset* a, const Dataset* b) {
    int k = 0;
    for (const Dataset* d : {a, b})
        if (d) k = std::max(k, static_cast<int>(d->n_classes));
    return k;
}

struct HeadOptions {
    std::string kind;
    ReadoutWiring wiring = ReadoutWiring::AllLayers;
    int shots = 20;
    int epochs = 100;
    double learning_rate = 1e-3;
    double ridge = 0.0;
    std::uint64_t seed = 0;
};

ReadoutHead fit_head(const Network& net, const Dataset& train, int n_classes, const HeadOptions& h, unsigned threads) {
    ReadoutHead head;
    if (h.kind == "fewshot") {
        head = fewshot_build(net, train, fewshot_select(train, h.shots, h.seed));
    } else {
        const auto pops = net.spec().readout_populations(h.wiring);
        const Matrix f = collect_dataset_features(net, train, pops, threads);
        const auto labels = dataset_labels(train);
        if (h.kind == "gd") {
            GdHead g(n_classes, static_cast<int>(f.cols()), AdamParams{.learning_rate = h.learning_rate});
            gd_fit(g, f, labels, h.epochs, h.seed);
            head = std::move(g);
        } else {
            head = lsq_fit(f, labels, n_classes, h.ridge);
        }
    }
    quantize(head);
    return head;
}

std::vector<Evaluation> evaluate_head(const Network& net, const ReadoutHead& head, ReadoutWiring wiring,
                                      const Dataset* train, const Dataset* test, unsigned threads, bool baseline) {
    std::vector<Evaluation> out;
    if (const auto* table = std::get_if<FewShotTable>(&head)) {
        std::vector<std::optional<int>> scopes;
        for (int l = 0; l < net.num_layers(); ++l) scopes.emplace_back(l);
        scopes.emplace_back(std::nullopt);
        for (const auto& s : scopes) {
            Evaluation e{"fewshot", s ? "layer" + std::to_string(*s + 1) : "all", {}, {}, baseline};
            if (train) e.train_acc = fewshot_accuracy(net, *table, *train, s);
            if (test) e.test_acc = fewshot_accuracy(net, *table, *test, s);
            out.push_back(e);
        }
        return out;
    }
    const Matrix& w = std::holds_alternative<GdHead>(head) ? std::get<GdHead>(head).weights
                                                          : std::get<LsqHead>(head).weights;
    const auto pops = net.spec().readout_populations(wiring);
    Evaluation e{head_name(head), to_string(wiring), {}, {}, baseline};
    auto acc = [&](const Dataset& d) {
        return linear_accuracy(w, collect_dataset_features(net, d, pops, threads), dataset_labels(d));
    };
    if (train) e.train_acc = acc(*train);
    if (test) e.test_acc = acc(*test);
    out.push_back(e);
    return out;
}

void write_json(const fs::path& path, const json& j) {
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream o(tmp);
        if (!o) throw std::runtime_error("cannot write " + tmp.string());
        o << j.dump(2) << '\n';
    }
    fs::rename(tmp, path);
}

json report_json(const std::string& command, const json& run_config, const Checkpoint& ckpt,
                 const std::vector<Evaluation>& evals, const std::string& checkpoint_path) {
    json phase1 = json::array();
    for (const auto& m : ckpt.metrics)
        if (m.epoch + 1 == ckpt.epochs_completed) {
            auto row = epoch_json(m);
            row.erase("type");
            phase1.push_back(row);
        }
    json ev = json::array();
    for (const auto& e : evals) {
        auto row = eval_json(e);
        row.erase("type");
        ev.push_back(row);
    }
    return {{"format", "espp-report"},
            {"version", 1},
            {"command", command},
            {"run_config", run_config},
            {"seed", ckpt.seed},
            {"epochs_completed", ckpt.epochs_completed},
            {"steps", ckpt.steps},
            {"checkpoint", checkpoint_path},
            {"phase1", phase1},
            {"evaluations", ev}};
}

// ---------------------------------------------------------------------------------------------
// synth

struct SynthArgs {
    SynthParams p;
    std::string out;
};

void add_synth(CLI::App& app, SynthArgs& a) {
    auto* c = app.add_subcommand("synth", "Generate a synthetic motif dataset (ESPK)");
    c->add_option("--classes", a.p.n_classes, "Number of classes")->capture_default_str();
    c->add_option("--channels", a.p.channels, "Input channels")->capture_default_str();
    c->add_option("--steps", a.p.steps, "Timesteps per sample")->capture_default_str();
    c->add_option("--samples", a.p.n_samples, "Number of samples")->capture_default_str();
    c->add_option("--rate-hi", a.p.rate_hi, "Firing probability of motif channels")->capture_default_str();
    c->add_option("--rate-lo", a.p.rate_lo, "Firing probability of other channels")->capture_default_str();
    c->add_option("--seed", a.p.seed, "Random seed")->capture_default_str();
    c->add_option("--motif-seed", a.p.motif_seed, "Seed of the class motifs (default: --seed)");
    c->add_option("--out", a.out, "Output file (default $ESPP_OUT_DIR/synth.espk)");
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    as_usage([&] { a.p.validate(); });
    const fs::path path = a.out.empty() ? default_out_dir() / "synth.espk" : fs::path(a.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const auto data = synth_generate(a.p);
    const auto bytes = encode_espk(data);
    save_espk(data, path);
    out << "wrote " << path.string() << ": " << data.size() << " samples, " << data.channels << " channels, "
        << data.steps << " steps, " << data.n_classes << " classes, " << format_checksum(espk_checksum(bytes))
        << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string train, test, preset = "nmnist", resume, out;
    std::vector<int> layers;
    std::optional<double> beta, c_pos, c_neg, input_threshold, lr, theta, slope;
    std::optional<int> epochs;
    std::string pairing = "balanced";
    double p_fix = 0.5;
    int batch = 1;
    std::uint64_t seed = 0;
    std::uint32_t augment_shift = 0;
    std::string head = "lsq";
    std::string wiring = "all";
    int shots = 20;
    int head_epochs = 100;
    double head_lr = 1e-3;
    double ridge = 0.0;
    bool baseline = false, recurrent = false, deep_transition = false, quiet = false;
    unsigned threads = 1;
    int checkpoint_every = 1;
};

void add_train(CLI::App& app, TrainArgs& a) {
    auto* c = app.add_subcommand("train", "Phase 1 (ESPP) then an optional readout head");
    c->add_option("--train", a.train, "Training set (ESPK)");
    c->add_option("--test", a.test, "Test set (ESPK)");
    c->add_option("--preset", a.preset, "Built-in preset (nmnist|shd) or preset file")->capture_default_str();
    c->add_option("--layers", a.layers, "Hidden layer sizes, e.g. 64,64")->delimiter(',');
    c->add_option("--beta", a.beta, "Membrane and trace decay");
    c->add_option("--c-pos", a.c_pos, "Margin constant for fixations");
    c->add_option("--c-neg", a.c_neg, "Margin constant for saccades");
    c->add_option("--input-threshold", a.input_threshold, "Minimum input activity for an update");
    c->add_option("--lr", a.lr, "ESPP learning rate");
    c->add_option("--theta", a.theta, "Spike threshold");
    c->add_option("--slope", a.slope, "Surrogate slope");
    c->add_option("--epochs", a.epochs, "Phase-1 epochs (total, when resuming)");
    c->add_option("--pairing", a.pairing, "balanced|natural")->capture_default_str();
    c->add_option("--p-fix", a.p_fix, "Fixation probability for balanced pairing")->capture_default_str();
    c->add_option("--batch", a.batch, "Sample lanes whose updates are averaged")->capture_default_str();
    c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    c->add_option("--augment-shift", a.augment_shift, "Max random channel shift, 0 = off")->capture_default_str();
    c->add_option("--head", a.head, "none|gd|lsq|fewshot")->capture_default_str();
    c->add_option("--wiring", a.wiring, "Readout populations: last|all")->capture_default_str();
    c->add_option("--shots", a.shots, "Few-shot samples per class")->capture_default_str();
    c->add_option("--head-epochs", a.head_epochs, "GD head epochs")->capture_default_str();
    c->add_option("--head-lr", a.head_lr, "GD head Adam learning rate")->capture_default_str();
    c->add_option("--ridge", a.ridge, "LSQ ridge penalty (0 = minimum norm)")->capture_default_str();
    c->add_flag("--baseline", a.baseline, "Also evaluate the head on the untrained network");
    c->add_flag("--recurrent", a.recurrent, "Make every hidden layer recurrent");
    c->add_flag("--deep-transition", a.deep_transition, "Feed the last layer's previous activity to the first");
    c->add_option("--resume", a.resume, "Continue from a checkpoint directory");
    c->add_option("--out", a.out, "Output directory (default $ESPP_OUT_DIR or ./espp_out)");
    c->add_option("--threads", a.threads, "Threads for feature collection")->capture_default_str();
    c->add_option("--checkpoint-every", a.checkpoint_every, "Save a checkpoint every N epochs")->capture_default_str();
    c->add_flag("--quiet", a.quiet, "Only print the final summary");
}

Preset resolve_preset(const std::string& name) {
    if (auto p = builtin_preset(name)) return *p;
    if (fs::exists(name)) return load_preset_file(name);
    throw UsageError("unknown preset '" + name + "' (expected nmnist, shd or a preset file)");
}

RunConfig run_config_from_args(const TrainArgs& a, const Dataset& train) {
    RunConfig rc;
    rc.train_path = a.train;
    rc.test_path = a.test;
    rc.seed = a.seed;
    rc.batch = a.batch;
    rc.augment_shift = a.augment_shift;
    rc.head = a.head;
    rc.shots = a.shots;
    rc.head_epochs = a.head_epochs;
    rc.head_learning_rate = a.head_lr;
    rc.ridge = a.ridge;
    rc.baseline = a.baseline;
    as_usage([&] {
        const Preset preset = resolve_preset(a.preset);
        rc.preset = preset.name;
        EsppConfig cfg = preset.rule;
        if (a.beta) cfg.beta = *a.beta;
        if (a.c_pos) cfg.c_pos = *a.c_pos;
        if (a.c_neg) cfg.c_neg = *a.c_neg;
        if (a.input_threshold) cfg.input_threshold = *a.input_threshold;
        if (a.lr) cfg.learning_rate = *a.lr;
        if (a.theta) cfg.theta = *a.theta;
        if (a.slope) cfg.slope = *a.slope;
        cfg.validate();
        rc.epochs = a.epochs.value_or(preset.epochs);

        std::vector<int> sizes = a.layers;
        if (sizes.empty()) sizes.assign(static_cast<std::size_t>(std::max(preset.hidden_layers, 0)), preset.hidden_size);
        rc.wiring = wiring_from_string(a.wiring);
        rc.spec = feed_forward_spec(static_cast<int>(train.channels), sizes, cfg, rc.wiring);
        for (auto& ls : rc.spec.layers) ls.recurrent = a.recurrent;
        if (a.deep_transition && rc.spec.layers.size() >= 2)
            rc.spec.layers.front().feedback_sources = {static_cast<int>(rc.spec.layers.size())};
        rc.spec.validate();

        rc.pairing.mode = pairing_from_string(a.pairing);
        rc.pairing.p_fix = a.p_fix;
        rc.pairing.seed = a.seed;
        if (!(a.p_fix >= 0.0 && a.p_fix <= 1.0)) throw std::invalid_argument("--p-fix must lie in [0, 1]");
    });
    return rc;
}

void check_train_args(const RunConfig& rc) {
    if (rc.epochs < 0) throw UsageError("--epochs must be >= 0");
    if (rc.batch < 1) throw UsageError("--batch must be >= 1");
    if (rc.head != "none" && rc.head != "gd" && rc.head != "lsq" && rc.head != "fewshot")
        throw UsageError("unknown head '" + rc.head + "' (expected none|gd|lsq|fewshot)");
    if (rc.shots < 1) throw UsageError("--shots must be >= 1");
    if (rc.head_epochs < 0) throw UsageError("--head-epochs must be >= 0");
    if (rc.ridge < 0.0) throw UsageError("--ridge must be >= 0");
}

json nan_dump(const Network& net, const std::string& what) {
    json layers = json::array();
    for (int l = 0; l < net.num_layers(); ++l) {
        const auto& w = net.weights(l);
        layers.push_back({{"layer", l + 1},
                          {"non_finite", (!w.array().isFinite()).count()},
                          {"rows", w.rows()},
                          {"cols", w.cols()}});
    }
    return {{"error", what}, {"layers", layers}};
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
    std::optional<Checkpoint> resumed;
    std::optional<Dataset> loaded;
    RunConfig rc;
    if (!a.resume.empty()) {
        resumed = load_checkpoint(a.resume);
        rc = run_config_from_json(json::parse(resumed->run_config_json));
        if (a.epochs) rc.epochs = *a.epochs;
        if (!a.out.empty()) rc.out_dir = a.out;
        loaded = load_dataset(rc.train_path, rc.spec.input_size);
    } else {
        if (a.train.empty()) throw UsageError("--train is required");
        loaded = load_dataset(a.train);
        rc = run_config_from_args(a, *loaded);
        rc.out_dir = a.out.empty() ? default_out_dir().string() : a.out;
    }
    check_train_args(rc);
    if (a.checkpoint_every < 1) throw UsageError("--checkpoint-every must be >= 1");

    const Dataset& train = *loaded;
    std::optional<Dataset> test;
    if (!rc.test_path.empty()) test = load_dataset(rc.test_path, rc.spec.input_size);

    const fs::path out_dir = rc.out_dir;
    const fs::path ckpt_dir = out_dir / "checkpoint";
    fs::create_directories(out_dir);
    const json rc_json = to_json(rc);

    Checkpoint ckpt;
    ckpt.spec = rc.spec;
    ckpt.seed = rc.seed;
    ckpt.run_config_json = rc_json.dump();
    ckpt.head_wiring = rc.wiring;

    Network net = resumed ? Network(resumed->spec, resumed->weights) : Network(rc.spec, rc.seed);
    const Network initial = resumed ? Network(rc.spec, rc.seed) : net;
    if (resumed) {
        ckpt.metrics = resumed->metrics;
        ckpt.epochs_completed = resumed->epochs_completed;
        ckpt.steps = resumed->steps;
        if (ckpt.epochs_completed > rc.epochs)
            throw UsageError("checkpoint already has " + std::to_string(ckpt.epochs_completed) + " epochs, more than --epochs " +
                             std::to_string(rc.epochs));
    }

    std::ofstream metrics(out_dir / "metrics.jsonl", resumed ? std::ios::app : std::ios::trunc);
    if (!metrics) throw std::runtime_error("cannot write " + (out_dir / "metrics.jsonl").string());

    Phase1Options opts;
    opts.epochs = rc.epochs - ckpt.epochs_completed;
    opts.batch = rc.batch;
    opts.pairing = rc.pairing;
    opts.augment_shift = rc.augment_shift;
    opts.seed = rc.seed;
    opts.start_epoch = ckpt.epochs_completed;

    const std::uint64_t steps_before = ckpt.steps;
    auto on_epoch = [&](int epoch, const std::vector<LayerEpochMetrics>& rows, const Network& n) {
        for (const auto& m : rows) {
            metrics << epoch_json(m).dump() << '\n';
            if (!a.quiet)
                out << "epoch " << epoch + 1 << "/" << rc.epochs << " layer " << m.layer << ": firing "
                    << m.firing_rate << ", gated " << m.gated_fraction << '\n';
        }
        metrics.flush();
        ckpt.metrics.insert(ckpt.metrics.end(), rows.begin(), rows.end());
        ckpt.epochs_completed = epoch + 1;
        if ((epoch + 1) % a.checkpoint_every == 0 || epoch + 1 == rc.epochs) {
            ckpt.weights = n.weights();
            save_checkpoint(ckpt, ckpt_dir);
        }
    };

    try {
        const auto snap = train_phase1(net, train, opts, on_epoch);
        ckpt.steps = steps_before + snap.steps;
    } catch (const NumericError& e) {
        write_json(out_dir / "nan_dump.json", nan_dump(net, e.what()));
        throw;
    }
    ckpt.weights = net.weights();

    std::vector<Evaluation> evals;
    if (rc.head != "none") {
        const int k = class_count(&train, test ? &*test : nullptr);
        const HeadOptions h{rc.head, rc.wiring, rc.shots, rc.head_epochs, rc.head_learning_rate, rc.ridge, rc.seed};
        const auto head = fit_head(net, train, k, h, a.threads);
        evals = evaluate_head(net, head, rc.wiring, &train, test ? &*test : nullptr, a.threads, false);
        ckpt.head = head;
        if (rc.baseline) {
            const auto base = fit_head(initial, train, k, h, a.threads);
            const auto b = evaluate_head(initial, base, rc.wiring, &train, test ? &*test : nullptr, a.threads, true);
            evals.insert(evals.end(), b.begin(), b.end());
        }
        for (const auto& e : evals) metrics << eval_json(e).dump() << '\n';
    }
    save_checkpoint(ckpt, ckpt_dir);
    const auto report = report_json("train", rc_json, ckpt, evals, ckpt_dir.string());
    write_json(out_dir / "report.json", report);

    out << "checkpoint " << ckpt_dir.string() << ", " << ckpt.epochs_completed << " epochs, " << ckpt.steps
        << " steps\n";
    for (const auto& e : evals) {
        out << e.head << (e.baseline ? " baseline" : "") << " [" << e.scope << "]";
        if (e.train_acc) out << " train " << *e.train_acc;
        if (e.test_acc) out << " test " << *e.test_acc;
        out << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string checkpoint, data, train, head, wiring, report;
    int shots = 20;
    unsigned threads = 1;
};

void add_eval(CLI::App& app, EvalArgs& a) {
    auto* c = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    c->add_option("--checkpoint", a.checkpoint, "Checkpoint directory")->required();
    c->add_option("--data", a.data, "Dataset to evaluate (reported as test accuracy)")->required();
    c->add_option("--train", a.train, "Training set; fits a new head when --head is given");
    c->add_option("--head", a.head, "Refit this head (gd|lsq|fewshot) instead of the stored one");
    c->add_option("--wiring", a.wiring, "Readout populations for a refitted head: last|all");
    c->add_option("--shots", a.shots, "Few-shot samples per class")->capture_default_str();
    c->add_option("--report", a.report, "Also write the report JSON here");
    c->add_option("--threads", a.threads, "Threads for feature collection")->capture_default_str();
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const auto ckpt = load_checkpoint(a.checkpoint);
    const Network net(ckpt.spec, ckpt.weights);
    const auto test = load_dataset(a.data, ckpt.spec.input_size);
    std::optional<Dataset> train;
    if (!a.train.empty()) train = load_dataset(a.train, ckpt.spec.input_size);

    json rc_json = json::parse(ckpt.run_config_json);
    ReadoutWiring wiring = ckpt.head_wiring;
    std::optional<ReadoutHead> head = ckpt.head;
    if (!a.head.empty()) {
        if (a.head != "gd" && a.head != "lsq" && a.head != "fewshot")
            throw UsageError("unknown head '" + a.head + "' (expected gd|lsq|fewshot)");
        if (!train) throw UsageError("--head needs --train to fit the head");
        if (a.shots < 1) throw UsageError("--shots must be >= 1");
        if (!a.wiring.empty()) as_usage([&] { wiring = wiring_from_string(a.wiring); });
        HeadOptions h{a.head, wiring, a.shots, 100, 1e-3, 0.0, ckpt.seed};
        if (rc_json.is_object()) {
            h.epochs = rc_json.value("head_epochs", h.epochs);
            h.learning_rate = rc_json.value("head_learning_rate", h.learning_rate);
            h.ridge = rc_json.value("ridge", h.ridge);
        }
        head = fit_head(net, *train, class_count(&*train, &test), h, a.threads);
    }
    if (!head) throw std::runtime_error("checkpoint has no readout head; pass --head and --train");

    const auto evals = evaluate_head(net, *head, wiring, train ? &*train : nullptr, &test, a.threads, false);
    const auto report = report_json("eval", rc_json, ckpt, evals, a.checkpoint);
    if (!a.report.empty()) write_json(a.report, report);
    out << report.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// inspect / validate

struct InspectArgs {
    std::string data;
};

void add_inspect(CLI::App& app, InspectArgs& a) {
    auto* c = app.add_subcommand("inspect", "Validate an ESPK file and print a summary");
    c->add_option("data", a.data, "ESPK file")->required();
}

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
    std::ifstream in(a.data, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + a.data);
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::span<const std::byte> bytes(reinterpret_cast<const std::byte*>(raw.data()), raw.size());
    const auto d = decode_espk(bytes);
    std::vector<std::size_t> per_class(d.n_classes, 0);
    std::vector<std::size_t> counts;
    std::size_t events = 0;
    for (const auto& s : d.samples) {
        ++per_class[s.label];
        counts.push_back(s.events.size());
        events += s.events.size();
    }
    const json j{{"file", a.data},          {"channels", d.channels},         {"steps", d.steps},
                 {"n_classes", d.n_classes}, {"n_samples", d.size()},          {"events", events},
                 {"class_counts", per_class}, {"checksum", format_checksum(espk_checksum(bytes))},
                 {"event_counts", counts}};
    out << j.dump() << '\n';
    return kExitOk;
}

struct ValidateArgs {
    std::string manifest;
};

void add_validate(CLI::App& app, ValidateArgs& a) {
    auto* c = app.add_subcommand("validate", "Check a converter manifest against its ESPK files");
    c->add_option("manifest", a.manifest, "Manifest JSON")->required();
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    const auto check = check_manifest(a.manifest);
    for (const auto& n : check.notes) out << n << '\n';
    for (const auto& e : check.errors) err << "error: " << e << '\n';
    out << (check.ok() ? "manifest OK\n" : "manifest INVALID\n");
    return check.ok() ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"EchoSpike Predictive Plasticity: train and evaluate spiking networks", "espp"};
    app.require_subcommand(1);
    SynthArgs synth;
    TrainArgs train;
    EvalArgs eval;
    InspectArgs inspect;
    ValidateArgs validate;
    add_synth(app, synth);
    add_train(app, train);
    add_eval(app, eval);
    add_inspect(app, inspect);
    add_validate(app, validate);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << "run 'espp " << sub->get_name() << " --help' for usage\n";
        else
            err << "run 'espp --help' for usage\n";
        return kExitUsage;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const auto& name = sub->get_name();
        if (name == "synth") return cmd_synth(synth, out);
        if (name == "train") return cmd_train(train, out);
        if (name == "eval") return cmd_eval(eval, out);
        if (name == "inspect") return cmd_inspect(inspect, out);
        return cmd_validate(validate, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace espp::cli
