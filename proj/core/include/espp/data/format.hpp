#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "espp/data/raster.hpp"

namespace espp {

// ESPK layout, all little-endian:
//   header  "ESPK" | version u16 | channels u32 | steps u32 | n_samples u32 | n_classes u16
//   sample  label u16 | n_events u32 | n_events x (t u16, ch u32)
// Events are strictly increasing in (t, ch).

inline constexpr std::uint16_t kEspkVersion = 1;
inline constexpr std::size_t kEspkHeaderSize = 20;
inline constexpr std::size_t kEspkSampleHeaderSize = 6;
inline constexpr std::size_t kEspkEventSize = 6;

/// Malformed ESPK payload; `offset()` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(std::size_t offset, const std::string& what);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

std::vector<std::byte> encode_espk(const Dataset& data);
Dataset decode_espk(std::span<const std::byte> bytes);

void save_espk(const Dataset& data, const std::filesystem::path& path);
Dataset load_espk(const std::filesystem::path& path);

/// FNV-1a 64 over the encoded file, for reproducibility checks.
std::uint64_t espk_checksum(std::span<const std::byte> bytes);

}  // namespace espp
