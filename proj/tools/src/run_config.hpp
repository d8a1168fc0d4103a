#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "espp/data/pairing.hpp"
#include "espp/network.hpp"

namespace espp::cli {

/// Everything that determines a training run. Serialized into every checkpoint and report.
struct RunConfig {
    std::string train_path;
    std::string test_path;
    std::string preset;
    NetworkSpec spec;
    PairingPolicy pairing;
    int epochs = 0;
    int batch = 1;
    std::uint64_t seed = 0;
    std::uint32_t augment_shift = 0;
    std::string head = "lsq";  ///< none | gd | lsq | fewshot
    ReadoutWiring wiring = ReadoutWiring::AllLayers;
    int shots = 20;
    int head_epochs = 100;
    double head_learning_rate = 1e-3;
    double ridge = 0.0;
    bool baseline = false;
    std::string out_dir;
};

nlohmann::json to_json(const RunConfig& rc);
RunConfig run_config_from_json(const nlohmann::json& j);

std::string to_string(PairingPolicy::Mode mode);
PairingPolicy::Mode pairing_from_string(const std::string& s);

}  // namespace espp::cli
