#pragma once

#include <filesystem>
#include <string>

#include "convqa/codec.hpp"
#include "convqa/pipeline.hpp"

namespace convqa {

/// Parsed application config. Layout:
///
///   {
///     "pipeline":   { PipelineConfig fields },
///     "backend":    { backend section }            one instance for every role
///     "backends":   { "default"|"<role>": section }  per-role instances
///     "connector":  {"type": "offline", "corpus": path}
///                 | {"type": "remote", "endpoint": url, "headers": {...}}
///     "scorer":     {"type": "lexical"} | {"type": "remote", "endpoint": url}
///     "embeddings": path,
///     "templates":  { name: text | {"file": path} }
///   }
///
/// Backend sections are {"type": "scripted", "rules": [...], "rules_file": path}
/// or {"type": "http", "endpoint", "model", "headers", "timeout_seconds",
/// "auth_header", "auth_env", "auth_prefix", "retry": {...}}. Either kind may
/// carry "templates": {slot: template name} to pick which named template
/// fills a pipeline slot (reformulate, extract_keywords, ...).
///
/// Relative paths resolve against the config file's directory.
struct AppConfig {
    PipelineConfig pipeline;
    /// Normalized form: defaults filled in, paths absolute, rule and template
    /// files inlined, data files represented by content digests. Values read
    /// from the environment are not included.
    Json effective;

    /// 16 hex digits, FNV-1a 64 over effective.dump().
    [[nodiscard]] std::string digest() const;
};

/// Throws FormatError / IoError on malformed input.
[[nodiscard]] AppConfig parse_config(const Json& j, const std::filesystem::path& base_dir);
[[nodiscard]] AppConfig load_config(const std::filesystem::path& path);

/// Instantiates backends, connector, scorer, embeddings and templates.
[[nodiscard]] PipelineComponents build_components(const AppConfig& config);

/// Environment variable naming the config file when --config is absent.
inline constexpr const char* kConfigEnvVar = "CONVQA_CONFIG";

[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

}  // namespace convqa
