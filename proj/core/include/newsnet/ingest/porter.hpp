#pragma once

#include <string>
#include <string_view>

namespace newsnet::ingest {

/// Porter (1980) suffix-stripping stemmer, steps 1a through 5b.
///
/// Follows Martin Porter's reference implementation, including its two
/// departures from the original text (`bli` -> `ble` in step 2 and the
/// additional `logi` -> `log` rule), because the published vocabulary/output
/// pair was produced by that code. Words of length <= 2 are returned as-is.
/// Input is expected lowercase ASCII letters; anything containing another
/// character is returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace newsnet::ingest
