#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace sharelm {

/// Wall-clock UTC instant at seconds precision. All release timestamps use it.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr Seconds kUploadDelay{24 * 60 * 60};

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp ts);

/// Accepts only the canonical form produced by format_rfc3339.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Lenient normalization for heterogeneous source data. Accepts
/// "YYYY-MM-DD" (mapped to midnight UTC), "YYYY-MM-DD[T ]HH:MM[:SS[.frac]]"
/// with an optional "Z" or "+HH:MM"/"-HH:MM" offset, and plain decimal unix
/// epoch seconds. Fractional seconds are truncated.
std::optional<Timestamp> normalize_timestamp(std::string_view text);

Timestamp from_unix_seconds(long long seconds);

/// True when the year is within the four-digit range RFC 3339 can express.
bool is_rfc3339_representable(Timestamp ts);

}  // namespace sharelm
