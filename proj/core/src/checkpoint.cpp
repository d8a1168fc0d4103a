#include "espp/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include <json.hpp>

namespace espp {

using nlohmann::json;

namespace {

json config_to_json(const EsppConfig& c) {
    return {{"beta", c.beta},           {"c_pos", c.c_pos},
            {"c_neg", c.c_neg},         {"input_threshold", c.input_threshold},
            {"learning_rate", c.learning_rate}, {"theta", c.theta},
            {"slope", c.slope}};
}

EsppConfig config_from_json(const json& j) {
    EsppConfig c;
    c.beta = j.at("beta").get<Real>();
    c.c_pos = j.at("c_pos").get<Real>();
    c.c_neg = j.at("c_neg").get<Real>();
    c.input_threshold = j.at("input_threshold").get<Real>();
    c.learning_rate = j.at("learning_rate").get<Real>();
    c.theta = j.at("theta").get<Real>();
    c.slope = j.at("slope").get<Real>();
    return c;
}

json spec_to_json(const NetworkSpec& s) {
    json layers = json::array();
    for (const auto& l : s.layers)
        layers.push_back({{"size", l.size},
                          {"recurrent", l.recurrent},
                          {"skip_sources", l.skip_sources},
                          {"feedback_sources", l.feedback_sources},
                          {"config", config_to_json(l.config)}});
    return {{"input_size", s.input_size}, {"readout_wiring", to_string(s.readout_wiring)}, {"layers", layers}};
}

NetworkSpec spec_from_json(const json& j) {
    NetworkSpec s;
    s.input_size = j.at("input_size").get<int>();
    s.readout_wiring = wiring_from_string(j.at("readout_wiring").get<std::string>());
    for (const auto& l : j.at("layers")) {
        LayerSpec ls;
        ls.size = l.at("size").get<int>();
        ls.recurrent = l.at("recurrent").get<bool>();
        ls.skip_sources = l.at("skip_sources").get<std::vector<int>>();
        ls.feedback_sources = l.at("feedback_sources").get<std::vector<int>>();
        ls.config = config_from_json(l.at("config"));
        s.layers.push_back(std::move(ls));
    }
    s.validate();
    return s;
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double from_nullable(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json metrics_to_json(const LayerEpochMetrics& m) {
    return {{"epoch", m.epoch},
            {"layer", m.layer},
            {"firing_rate", m.firing_rate},
            {"gated_fraction", m.gated_fraction},
            {"mean_fix_loss", nullable(m.mean_fix_loss)},
            {"mean_sac_loss", nullable(m.mean_sac_loss)},
            {"spikes", m.spikes},
            {"neuron_steps", m.neuron_steps},
            {"labelled_steps", m.labelled_steps},
            {"gated_steps", m.gated_steps},
            {"fix_steps", m.fix_steps},
            {"sac_steps", m.sac_steps},
            {"fix_loss_sum", m.fix_loss_sum},
            {"sac_loss_sum", m.sac_loss_sum}};
}

LayerEpochMetrics metrics_from_json(const json& j) {
    LayerEpochMetrics m;
    m.epoch = j.at("epoch").get<int>();
    m.layer = j.at("layer").get<int>();
    m.firing_rate = j.at("firing_rate").get<double>();
    m.gated_fraction = j.at("gated_fraction").get<double>();
    m.mean_fix_loss = from_nullable(j.at("mean_fix_loss"));
    m.mean_sac_loss = from_nullable(j.at("mean_sac_loss"));
    m.spikes = j.at("spikes").get<std::uint64_t>();
    m.neuron_steps = j.at("neuron_steps").get<std::uint64_t>();
    m.labelled_steps = j.at("labelled_steps").get<std::uint64_t>();
    m.gated_steps = j.at("gated_steps").get<std::uint64_t>();
    m.fix_steps = j.at("fix_steps").get<std::uint64_t>();
    m.sac_steps = j.at("sac_steps").get<std::uint64_t>();
    m.fix_loss_sum = j.at("fix_loss_sum").get<double>();
    m.sac_loss_sum = j.at("sac_loss_sum").get<double>();
    return m;
}

class BlobWriter {
public:
    json add(const std::string& name, const Eigen::Ref<const Matrix>& m) {
        json entry = {{"name", name}, {"offset", bytes_.size()}, {"rows", m.rows()}, {"cols", m.cols()}};
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j)));
                for (int b = 0; b < 4; ++b) bytes_.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
            }
        return entry;
    }
    const std::vector<char>& bytes() const noexcept { return bytes_; }

private:
    std::vector<char> bytes_;
};

class BlobReader {
public:
    BlobReader(std::vector<char> bytes, const json& tensors) : bytes_(std::move(bytes)) {
        for (const auto& t : tensors) index_[t.at("name").get<std::string>()] = t;
    }

    bool has(const std::string& name) const { return index_.contains(name); }

    Matrix get(const std::string& name) const {
        const auto it = index_.find(name);
        if (it == index_.end()) throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
        const auto& t = it->second;
        const auto offset = t.at("offset").get<std::size_t>();
        const auto rows = t.at("rows").get<Eigen::Index>();
        const auto cols = t.at("cols").get<Eigen::Index>();
        const std::size_t n = static_cast<std::size_t>(rows * cols);
        if (offset > bytes_.size() || (bytes_.size() - offset) / 4 < n)
            throw std::runtime_error("checkpoint: tensor '" + name + "' exceeds blob size");
        Matrix m(rows, cols);
        const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data()) + offset;
        for (std::size_t k = 0; k < n; ++k, p += 4) {
            const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                       (static_cast<std::uint32_t>(p[2]) << 16) |
                                       (static_cast<std::uint32_t>(p[3]) << 24);
            m.data()[k] = static_cast<Real>(std::bit_cast<float>(bits));
        }
        return m;
    }

private:
    std::vector<char> bytes_;
    std::map<std::string, json> index_;
};

void write_file(const std::filesystem::path& path, const char* data, std::size_t n) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(data, static_cast<std::streamsize>(n));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string network_spec_to_json(const NetworkSpec& spec) { return spec_to_json(spec).dump(); }
NetworkSpec network_spec_from_json(const std::string& text) { return spec_from_json(json::parse(text)); }

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    BlobWriter blobs;
    json tensors = json::array();
    for (std::size_t l = 0; l < c.weights.size(); ++l)
        tensors.push_back(blobs.add("layer" + std::to_string(l + 1) + ".weight", c.weights[l]));

    json head = nullptr;
    if (c.head) {
        head = {{"type", head_name(*c.head)}, {"wiring", to_string(c.head_wiring)}};
        if (const auto* gd = std::get_if<GdHead>(&*c.head)) {
            tensors.push_back(blobs.add("head.weight", gd->weights));
            head["adam"] = {{"learning_rate", gd->adam.learning_rate},
                            {"beta1", gd->adam.beta1},
                            {"beta2", gd->adam.beta2},
                            {"epsilon", gd->adam.epsilon},
                            {"step", gd->step}};
        } else if (const auto* lsq = std::get_if<LsqHead>(&*c.head)) {
            tensors.push_back(blobs.add("head.weight", lsq->weights));
        } else {
            const auto& fs = std::get<FewShotTable>(*c.head);
            head["n_classes"] = fs.n_classes();
            std::vector<bool> silent(fs.silent.begin(), fs.silent.end());
            head["silent"] = silent;
            for (int k = 0; k < fs.n_classes(); ++k)
                for (std::size_t l = 0; l < fs.references[k].size(); ++l)
                    tensors.push_back(blobs.add("fewshot.class" + std::to_string(k) + ".layer" + std::to_string(l + 1),
                                                fs.references[k][l].transpose()));
        }
    }

    json metrics = json::array();
    for (const auto& m : c.metrics) metrics.push_back(metrics_to_json(m));

    json manifest = {{"format", "espp-checkpoint"},
                     {"version", 1},
                     {"seed", c.seed},
                     {"epochs_completed", c.epochs_completed},
                     {"steps", c.steps},
                     {"run_config", json::parse(c.run_config_json)},
                     {"network", spec_to_json(c.spec)},
                     {"head", head},
                     {"metrics", metrics},
                     {"blob", {{"file", kBlobName}, {"dtype", "float32"}, {"endian", "little"}, {"order", "row-major"}}},
                     {"tensors", tensors}};

    write_file(dir / kBlobName, blobs.bytes().data(), blobs.bytes().size());
    const auto text = manifest.dump(2) + "\n";
    write_file(dir / kManifestName, text.data(), text.size());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
    const auto raw = read_file(dir / kManifestName);
    json m;
    try {
        m = json::parse(raw.begin(), raw.end());
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint manifest: " + std::string(e.what()));
    }
    try {
        if (m.at("format") != "espp-checkpoint" || m.at("version") != 1)
            throw std::runtime_error("checkpoint: unsupported manifest format/version");
        const auto blob_file = m.at("blob").at("file").get<std::string>();
        BlobReader blobs(read_file(dir / blob_file), m.at("tensors"));

        Checkpoint c;
        c.seed = m.at("seed").get<std::uint64_t>();
        c.epochs_completed = m.at("epochs_completed").get<int>();
        c.steps = m.at("steps").get<std::uint64_t>();
        c.run_config_json = m.at("run_config").dump();
        c.spec = spec_from_json(m.at("network"));
        for (std::size_t l = 0; l < c.spec.layers.size(); ++l)
            c.weights.push_back(blobs.get("layer" + std::to_string(l + 1) + ".weight"));
        for (const auto& row : m.at("metrics")) c.metrics.push_back(metrics_from_json(row));

        const auto& h = m.at("head");
        if (!h.is_null()) {
            const auto type = h.at("type").get<std::string>();
            c.head_wiring = wiring_from_string(h.at("wiring").get<std::string>());
            if (type == "gd") {
                GdHead gd;
                gd.weights = blobs.get("head.weight");
                gd.first_moment = Matrix::Zero(gd.weights.rows(), gd.weights.cols());
                gd.second_moment = gd.first_moment;
                const auto& a = h.at("adam");
                gd.adam = {a.at("learning_rate").get<Real>(), a.at("beta1").get<Real>(), a.at("beta2").get<Real>(),
                           a.at("epsilon").get<Real>()};
                gd.step = a.at("step").get<std::int64_t>();
                c.head = std::move(gd);
            } else if (type == "lsq") {
                c.head = LsqHead{blobs.get("head.weight")};
            } else if (type == "fewshot") {
                FewShotTable fs;
                const int n = h.at("n_classes").get<int>();
                const auto silent = h.at("silent").get<std::vector<bool>>();
                for (int k = 0; k < n; ++k) {
                    std::vector<Vector> refs;
                    for (std::size_t l = 0; l < c.spec.layers.size(); ++l)
                        refs.push_back(
                            blobs.get("fewshot.class" + std::to_string(k) + ".layer" + std::to_string(l + 1)).row(0).transpose());
                    fs.references.push_back(std::move(refs));
                }
                fs.silent.assign(silent.begin(), silent.end());
                c.head = std::move(fs);
            } else {
                throw std::runtime_error("checkpoint: unknown head type '" + type + "'");
            }
        }
        return c;
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint manifest: " + std::string(e.what()));
    }
}

}  // namespace espp
