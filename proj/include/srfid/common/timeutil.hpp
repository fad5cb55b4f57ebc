#pragma once

#include <string>

namespace srfid {

/// Current UTC time as ISO-8601 with millisecond precision, e.g.
/// "2026-10-17T09:30:00.123Z".
std::string utc_now_iso8601();

/// Report timestamp: honours SOURCE_DATE_EPOCH when set so reruns are
/// byte-identical, otherwise the current UTC time (second precision).
std::string report_timestamp();

std::string format_utc_seconds(long long epoch_seconds);

}  // namespace srfid
