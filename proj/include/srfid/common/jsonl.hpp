#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace srfid {

using Json = nlohmann::json;

/// Calls `fn(record, line_number)` for every non-blank line of a JSON-lines
/// file. Malformed JSON raises ParseError with the 1-based line number;
/// a missing file raises IoError.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const Json&, std::size_t)>& fn);

/// Same as read_jsonl but over an in-memory buffer.
void parse_jsonl(const std::string& text,
                 const std::function<void(const Json&, std::size_t)>& fn);

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);
std::string to_jsonl(const std::vector<Json>& records);

/// Writes `content` to `path` via a temp file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Append-only JSON-lines file. Every append is written and fsync'ed before
/// returning, so an acknowledged record survives a crash. Appends from
/// several threads are serialized.
class AppendLog {
 public:
  explicit AppendLog(std::filesystem::path path);
  ~AppendLog();
  AppendLog(const AppendLog&) = delete;
  AppendLog& operator=(const AppendLog&) = delete;

  void append(const Json& record);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mutex_;
};

// Typed field access with ParseError on mismatch.
std::string require_string(const Json& j, const char* key, std::size_t line);
double require_number(const Json& j, const char* key, std::size_t line);
bool require_bool(const Json& j, const char* key, std::size_t line);

}  // namespace srfid
