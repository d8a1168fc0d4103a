#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "espp/network.hpp"
#include "espp/readout.hpp"
#include "espp/training.hpp"

namespace espp {

/// Everything needed to resume training or evaluate a trained network.
///
/// On disk a checkpoint is a directory with `manifest.json` and `weights.bin`. The manifest
/// holds the network spec, rule configs, run config, metrics and seed, plus one tensor entry
/// per matrix: {name, offset, rows, cols}. Tensors are stored back to back in `weights.bin`
/// as row-major little-endian float32.
struct Checkpoint {
    NetworkSpec spec;
    std::vector<Matrix> weights;
    std::optional<ReadoutHead> head;
    ReadoutWiring head_wiring = ReadoutWiring::LastLayerOnly;
    std::string run_config_json = "{}";  ///< arbitrary JSON object, stored verbatim
    std::vector<LayerEpochMetrics> metrics;
    std::uint64_t seed = 0;
    int epochs_completed = 0;
    std::uint64_t steps = 0;
};

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kBlobName = "weights.bin";

/// Writes atomically (temporary files renamed into place).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// JSON text of a network spec, and the inverse.
std::string network_spec_to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const std::string& text);

}  // namespace espp
