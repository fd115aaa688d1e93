#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "newsnet/store/network_store.hpp"

namespace newsnet::store {

inline constexpr int kSnapshotVersion = 1;

/// Writes the store as newline-delimited JSON records in canonical order.
/// See docs/snapshot-format.md for the record layout.
void save_snapshot(const NetworkStore& store, std::ostream& out);
void save_snapshot(const NetworkStore& store, const std::filesystem::path& path);

/// Throws SnapshotError(version) for an unknown header/version and
/// SnapshotError(corrupt) for malformed, inconsistent or truncated content.
NetworkStore load_snapshot(std::istream& in);
NetworkStore load_snapshot(const std::filesystem::path& path);

std::string snapshot_string(const NetworkStore& store);

}  // namespace newsnet::store
