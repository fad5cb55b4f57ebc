#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "srfid/common/jsonl.hpp"

namespace srfid::service {

inline constexpr double kDefaultTrapRate = 1.0 / 15.0;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path data_dir;
  std::string admin_token;  // empty disables the admin routes
  double trap_rate = kDefaultTrapRate;
  std::filesystem::path images_dir;
  std::optional<std::filesystem::path> ui_dir;  // static assets mounted at /
  std::uint64_t seed = 0;

  /// Throws ArgumentError on an invalid value.
  void validate() const;
};

/// Parses "host:port", "host" or ":port".
void parse_bind_address(const std::string& text, std::string& host, int& port);

/// Config file: {bind_address, data_dir, admin_token, trap_rate, images_dir}
/// plus optional ui_dir and seed. Relative paths are resolved against the
/// file's directory. Throws IoError if unreadable and ArgumentError if invalid.
ServiceConfig load_service_config(const std::filesystem::path& path);
ServiceConfig config_from_json(const Json& j, const std::filesystem::path& base_dir);

}  // namespace srfid::service
