#pragma once

#include <cstddef>
#include <string>

namespace dds {

// Hex digest of the input bytes, for provenance fields in schedules,
// sample sidecars, and manifests.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::string& path);

}  // namespace dds
