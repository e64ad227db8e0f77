#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace sharelm {

/// Random (version 4) UUID in lowercase canonical form. Only raw engine output
/// is consumed, so a seeded engine yields the same ids on every platform.
std::string make_uuid(std::mt19937_64& engine);

/// Exactly 36 chars: 8-4-4-4-12 lowercase hex groups.
bool is_uuid(std::string_view text);

}  // namespace sharelm
