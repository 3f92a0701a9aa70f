#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "convqa/pipeline.hpp"

namespace convqa {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string config_digest;
    std::optional<std::filesystem::path> ui_dir;         // served under /ui when set
    std::optional<std::filesystem::path> snapshot_path;  // sessions loaded on start, saved on stop
};

/// HTTP adapter over a Pipeline:
///
///   POST /v1/sessions                 -> {"session_id"}
///   POST /v1/sessions/{id}/turns      {"question"} -> TurnResult
///        ?trace=false drops the trace, ?timings=false drops elapsed_us
///   GET  /v1/sessions/{id}            -> Conversation
///   GET  /v1/health                   -> {"status": "ok", "config_digest"}
///
/// Errors are {"error": message} with 400 (bad body), 404 (unknown session),
/// 409 (turn already running), 500, or 502 for stage failures, which also
/// carry "stage" and "role".
class Service {
  public:
    Service(std::shared_ptr<const Pipeline> pipeline, PipelineConfig config, ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread. Returns the bound port.
    /// Throws IoError when the address cannot be bound.
    int start();
    /// Blocks serving on the calling thread until stop() is called from
    /// elsewhere (e.g. a signal handler thread).
    void run();
    /// Stops serving and writes the snapshot, if configured. Idempotent.
    void stop();

    [[nodiscard]] int port() const noexcept;
    [[nodiscard]] std::vector<std::string> session_ids() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct SessionSnapshot {
    std::string id;
    PipelineConfig config;
    Conversation conversation;
};

/// {"sessions": [{"id", "config", "conversation"}]}
[[nodiscard]] Json encode_sessions(const std::vector<SessionSnapshot>& sessions);
[[nodiscard]] std::vector<SessionSnapshot> decode_sessions(const Json& j);

}  // namespace convqa
