#pragma once

#include "iclef/annotation.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

namespace iclef {

struct AnnotationServerOptions {
  std::string host = "127.0.0.1";
  int port = 8787;  // 0 picks a free port
  std::string token;
  /// Served verbatim at GET /reports/sweep when present.
  std::filesystem::path sweep_report;
  bool dispreferred_as_unacceptable = false;
};

/// REST front end of an AnnotationStore.
///
///   GET  /health                       no token required
///   GET  /tasks?kind=&status=&annotator=
///   GET  /tasks/{id}
///   POST /judgments                    {task_id, annotator_id, choice, correction?}
///   GET  /reports/agreement
///   GET  /reports/preference
///   GET  /reports/sweep
///
/// Other requests need the `X-ICLEF-Token` header when a token is set.
/// Errors answer {"error": kind, "message": text} with 400 (schema), 401,
/// 404 (unknown task), 409 (already done) or 422 (no overlap).
class AnnotationServer {
 public:
  AnnotationServer(AnnotationStore& store, AnnotationServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  int start();
  /// Serves on the calling thread until stop() is called from elsewhere.
  void run();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  AnnotationServerOptions options_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace iclef
