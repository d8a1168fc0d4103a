#include "espp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace espp {

void EsppConfig::validate() const {
    auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
    if (!(beta >= 0.0 && beta <= 1.0)) fail("beta must lie in [0, 1]");
    if (!(c_pos > 0.0)) fail("c_pos must be > 0");
    if (!(c_neg < 0.0)) fail("c_neg must be < 0");
    if (!(input_threshold >= 0.0 && input_threshold <= 1.0)) fail("input_threshold must lie in [0, 1]");
    if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
    if (!(theta > 0.0)) fail("theta must be > 0");
    if (!(slope > 0.0)) fail("slope must be > 0");
}

std::optional<Preset> builtin_preset(std::string_view name) {
    // Hyperparameters used for the N-MNIST and SHD experiments.
    if (name == "nmnist") {
        Preset p;
        p.name = "nmnist";
        p.rule = EsppConfig{.beta = 0.9, .c_pos = 2.0, .c_neg = -1.0, .input_threshold = 0.02, .learning_rate = 1e-4};
        p.steps = 10;
        p.hidden_size = 200;
        p.hidden_layers = 3;
        p.epochs = 300;
        return p;
    }
    if (name == "shd") {
        Preset p;
        p.name = "shd";
        p.rule = EsppConfig{.beta = 0.95, .c_pos = 1.5, .c_neg = -1.5, .input_threshold = 0.05, .learning_rate = 1e-4};
        p.steps = 100;
        p.hidden_size = 450;
        p.hidden_layers = 3;
        p.epochs = 1000;
        return p;
    }
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

Real to_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const Real v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("preset key '" + key + "': not a number: '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    int v = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw std::runtime_error("preset key '" + key + "': not an integer: '" + value + "'");
    return v;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty key or value");
        out[std::string(key)] = std::string(value);
    }
    return out;
}

Preset apply_key_values(Preset p, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "name") p.name = value;
        else if (key == "steps") p.steps = to_int(key, value);
        else if (key == "hidden_size") p.hidden_size = to_int(key, value);
        else if (key == "hidden_layers") p.hidden_layers = to_int(key, value);
        else if (key == "epochs") p.epochs = to_int(key, value);
        else if (key == "beta") p.rule.beta = to_real(key, value);
        else if (key == "c_pos") p.rule.c_pos = to_real(key, value);
        else if (key == "c_neg") p.rule.c_neg = to_real(key, value);
        else if (key == "input_threshold") p.rule.input_threshold = to_real(key, value);
        else if (key == "learning_rate") p.rule.learning_rate = to_real(key, value);
        else if (key == "theta") p.rule.theta = to_real(key, value);
        else if (key == "slope") p.rule.slope = to_real(key, value);
        else throw std::runtime_error("unknown preset key '" + key + "'");
    }
    p.rule.validate();
    return p;
}

Preset load_preset_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open preset file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto kv = parse_key_values(buf.str());

    Preset base;
    if (auto it = kv.find("base"); it != kv.end()) {
        auto found = builtin_preset(it->second);
        if (!found) throw std::runtime_error("unknown base preset '" + it->second + "'");
        base = *found;
    }
    auto rest = kv;
    rest.erase("base");
    return apply_key_values(base, rest);
}

std::string format_preset(const Preset& p) {
    std::ostringstream os;
    os.precision(17);
    os << "name = " << p.name << '\n'
       << "steps = " << p.steps << '\n'
       << "hidden_size = " << p.hidden_size << '\n'
       << "hidden_layers = " << p.hidden_layers << '\n'
       << "epochs = " << p.epochs << '\n'
       << "beta = " << p.rule.beta << '\n'
       << "c_pos = " << p.rule.c_pos << '\n'
       << "c_neg = " << p.rule.c_neg << '\n'
       << "input_threshold = " << p.rule.input_threshold << '\n'
       << "learning_rate = " << p.rule.learning_rate << '\n'
       << "theta = " << p.rule.theta << '\n'
       << "slope = " << p.rule.slope << '\n';
    return os.str();
}

}  // namespace espp
