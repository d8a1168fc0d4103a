#include "run_config.hpp"

#include "espp/checkpoint.hpp"

namespace espp::cli {

std::string to_string(PairingPolicy::Mode mode) {
    return mode == PairingPolicy::Mode::Balanced ? "balanced" : "natural";
}

PairingPolicy::Mode pairing_from_string(const std::string& s) {
    if (s == "balanced") return PairingPolicy::Mode::Balanced;
    if (s == "natural") return PairingPolicy::Mode::NaturalShuffle;
    throw std::invalid_argument("unknown pairing '" + s + "' (expected balanced|natural)");
}

nlohmann::json to_json(const RunConfig& rc) {
    return {
        {"train", rc.train_path},
        {"test", rc.test_path},
        {"preset", rc.preset},
        {"network", nlohmann::json::parse(network_spec_to_json(rc.spec))},
        {"pairing", {{"mode", to_string(rc.pairing.mode)}, {"p_fix", rc.pairing.p_fix}, {"seed", rc.pairing.seed}}},
        {"epochs", rc.epochs},
        {"batch", rc.batch},
        {"seed", rc.seed},
        {"augment_shift", rc.augment_shift},
        {"head", rc.head},
        {"wiring", to_string(rc.wiring)},
        {"shots", rc.shots},
        {"head_epochs", rc.head_epochs},
        {"head_learning_rate", rc.head_learning_rate},
        {"ridge", rc.ridge},
        {"baseline", rc.baseline},
        {"out_dir", rc.out_dir},
    };
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig rc;
    rc.train_path = j.at("train").get<std::string>();
    rc.test_path = j.at("test").get<std::string>();
    rc.preset = j.at("preset").get<std::string>();
    rc.spec = network_spec_from_json(j.at("network").dump());
    const auto& p = j.at("pairing");
    rc.pairing.mode = pairing_from_string(p.at("mode").get<std::string>());
    rc.pairing.p_fix = p.at("p_fix").get<double>();
    rc.pairing.seed = p.at("seed").get<std::uint64_t>();
    rc.epochs = j.at("epochs").get<int>();
    rc.batch = j.at("batch").get<int>();
    rc.seed = j.at("seed").get<std::uint64_t>();
    rc.augment_shift = j.at("augment_shift").get<std::uint32_t>();
    rc.head = j.at("head").get<std::string>();
    rc.wiring = wiring_from_string(j.at("wiring").get<std::string>());
    rc.shots = j.at("shots").get<int>();
    rc.head_epochs = j.at("head_epochs").get<int>();
    rc.head_learning_rate = j.at("head_learning_rate").get<double>();
    rc.ridge = j.at("ridge").get<double>();
    rc.baseline = j.at("baseline").get<bool>();
    rc.out_dir = j.at("out_dir").get<std::string>();
    return rc;
}

}  // namespace espp::cli
