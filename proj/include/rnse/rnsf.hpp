#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "rnse/field.hpp"

namespace rnse {

// Binary field file:
//   "RNSF" | u32 version = 1 | u32 n | f64 box_length | u32 ncomp = 3 |
//   u8 domain (0 physical f64, 1 spectral complex f64 re/im) | payload
// All little-endian, payload component-major then k1, k2, k3 (or i1, i2, i3).
// A sidecar "<file>.meta.json" carries the grid, flags and `extra`.
inline constexpr std::uint32_t kRnsfVersion = 1;

void write_rnsf(const std::filesystem::path& path, const SpectralField& f,
                const nlohmann::json& extra = nlohmann::json::object());
void write_rnsf(const std::filesystem::path& path, const PhysicalField& u,
                const nlohmann::json& extra = nlohmann::json::object());

using AnyField = std::variant<SpectralField, PhysicalField>;

// Throws FormatError on a bad magic, version, truncated payload or an
// unreadable file. The dealias fraction and the spectral flags come from
// the sidecar when it exists.
AnyField read_rnsf(const std::filesystem::path& path);

// Spectral view of whatever the file holds.
SpectralField read_rnsf_spectral(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace rnse
