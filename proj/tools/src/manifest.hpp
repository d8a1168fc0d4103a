#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace espp::cli {

/// Result of checking a converter manifest against the ESPK files it describes.
struct ManifestCheck {
    std::vector<std::string> errors;
    std::vector<std::string> notes;

    bool ok() const noexcept { return errors.empty(); }
};

/// Loads every split listed in the manifest (paths relative to the manifest's directory) and
/// compares geometry, sample count, per-sample event counts and checksum.
ManifestCheck check_manifest(const std::filesystem::path& manifest_path);

std::string format_checksum(std::uint64_t h);

}  // namespace espp::cli
