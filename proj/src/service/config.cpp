#include "srfid/service/config.hpp"

#include <charconv>

#include "srfid/common/error.hpp"

namespace srfid::service {

void ServiceConfig::validate() const {
  if (host.empty()) throw ArgumentError("bind host is empty");
  if (port < 0 || port > 65535) throw ArgumentError("port out of range");
  if (data_dir.empty()) throw ArgumentError("data_dir is required");
  if (!(trap_rate >= 0.0 && trap_rate <= 1.0)) throw ArgumentError("trap_rate must be in [0, 1]");
}

void parse_bind_address(const std::string& text, std::string& host, int& port) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    host = text;
    return;
  }
  if (colon > 0) host = text.substr(0, colon);
  const std::string p = text.substr(colon + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), value);
  if (ec != std::errc() || ptr != p.data() + p.size()) throw ArgumentError("bad port in bind_address '" + text + "'");
  port = value;
}

ServiceConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path = p;
    return path.is_relative() ? base_dir / path : path;
  };
  ServiceConfig c;
  try {
    if (j.contains("bind_address")) parse_bind_address(j["bind_address"].get<std::string>(), c.host, c.port);
    if (!j.contains("data_dir")) throw ArgumentError("config lacks data_dir");
    c.data_dir = resolve(j["data_dir"].get<std::string>());
    if (j.contains("admin_token")) c.admin_token = j["admin_token"].get<std::string>();
    if (j.contains("trap_rate")) c.trap_rate = j["trap_rate"].get<double>();
    c.images_dir = j.contains("images_dir") ? resolve(j["images_dir"].get<std::string>()) : c.data_dir;
    if (j.contains("ui_dir") && !j["ui_dir"].is_null()) c.ui_dir = resolve(j["ui_dir"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace srfid::service
