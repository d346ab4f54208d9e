#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cxg {

// Lower-cases, splits on whitespace, and separates trailing punctuation
// (.,!?;:"') into their own tokens.
std::vector<std::string> tokenize(std::string_view text);

// FNV-1a, 64-bit. Used for manifest and config fingerprints.
std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace cxg
