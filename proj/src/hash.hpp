#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ocean {

// FNV-1a, used for artifact provenance digests (not cryptographic).
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t value);

} // namespace ocean
