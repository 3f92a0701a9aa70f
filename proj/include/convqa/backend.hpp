#pragma once

#include <atomic>
#include <deque>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "convqa/http.hpp"

namespace convqa {

/// Which model a generation call stands for: question reformulation,
/// keyword extraction, check-and-respond, or pairwise judging.
enum class BackendRole { refiner, keyword_extractor, responder, judge };

[[nodiscard]] std::string_view to_string(BackendRole role);
[[nodiscard]] BackendRole parse_backend_role(std::string_view name);

struct GenerationRequest {
    BackendRole role = BackendRole::responder;
    std::string prompt;
    int max_output_tokens = 512;
    double temperature = 0.0;
};

/// Text-in, text-out model handle. Implementations must be safe to call
/// concurrently.
class TextBackend {
  public:
    virtual ~TextBackend() = default;

    /// Throws Error("empty prompt") for a blank prompt; other failures are
    /// implementation specific.
    [[nodiscard]] virtual std::string generate(const GenerationRequest& request) = 0;
};

enum class MatchKind { exact, substring };

struct ScriptedRule {
    MatchKind kind = MatchKind::exact;
    std::string pattern;
    std::string response;
    std::optional<BackendRole> role;  // unset: matches every role
};

/// Deterministic backend for tests and offline runs. Rules are tried in
/// registration order and the first match wins; an unmatched prompt throws
/// UnmatchedPromptError.
class ScriptedBackend final : public TextBackend {
  public:
    ScriptedBackend() = default;
    ScriptedBackend(const ScriptedBackend&) = delete;
    ScriptedBackend& operator=(const ScriptedBackend&) = delete;

    /// Returns the rule's index.
    std::size_t add_rule(ScriptedRule rule);
    std::size_t add_exact(std::string pattern, std::string response, std::optional<BackendRole> role = {});
    std::size_t add_substring(std::string pattern, std::string response, std::optional<BackendRole> role = {});

    [[nodiscard]] std::size_t rule_count() const;
    /// How many prompts the rule has answered so far.
    [[nodiscard]] long consumed_count(std::size_t rule_index) const;

    [[nodiscard]] std::string generate(const GenerationRequest& request) override;

  private:
    struct Entry {
        ScriptedRule rule;
        std::atomic<long> consumed{0};
        explicit Entry(ScriptedRule r) : rule(std::move(r)) {}
    };

    mutable std::shared_mutex mutex_;
    std::deque<Entry> rules_;
};

struct HttpBackendConfig {
    HttpEndpoint endpoint;
    std::string model;
    RetryPolicy retry;
};

/// Chat-completions style remote model:
///   request  {"model", "messages": [{"role": "user", "content": prompt}],
///             "temperature", "max_tokens"}
///   response {"choices": [{"message": {"content": text}}]}
///            (a legacy {"choices": [{"text": ...}]} body is also accepted)
class HttpBackend final : public TextBackend {
  public:
    explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

    [[nodiscard]] std::string generate(const GenerationRequest& request) override;
    [[nodiscard]] const HttpBackendConfig& config() const noexcept { return config_; }

  private:
    HttpBackendConfig config_;
};

}  // namespace convqa
