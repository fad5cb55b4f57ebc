#pragma once

#include <memory>
#include <string>

#include "srfid/service/config.hpp"
#include "srfid/study/store.hpp"

namespace srfid::service {

/// HTTP annotation service over a StudyStore.
///   POST /api/session                 {annotator_name} -> {session_id, annotator_id, total_pairs}
///   GET  /api/session/{id}/next       -> {pair_id, gt_url, sr_url, remaining} | {done: true}
///   POST /api/session/{id}/answer     {pair_id, answer, latency_ms} -> {accepted, remaining}
///   GET  /images/{pair_id}/{gt|sr}    -> stored bytes
///   GET  /api/admin/export?what=...   -> JSON-lines (X-Admin-Token)
///   GET  /api/progress                -> counters
/// Answers are appended and fsync'ed before the response is written.
/// Non-admin payloads never carry trap markers.
class AnnotationServer {
 public:
  /// Opens the store at config.data_dir. Throws on a bad config or store.
  explicit AnnotationServer(ServiceConfig config);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds the socket and returns the bound port. Throws IoError on failure.
  int bind();
  /// Serves until stop(); call after bind().
  void run();
  void stop();
  bool running() const;

  const ServiceConfig& config() const noexcept;
  study::StudyStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace srfid::service
