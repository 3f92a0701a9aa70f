#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "convqa/config.hpp"
#include "convqa/pipeline.hpp"

namespace convqa::testing {

/// Absolute path of a file under tests/data.
[[nodiscard]] std::filesystem::path data_path(const std::string& name);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

/// tests/data/config.json: scripted backends over the offline corpus.
[[nodiscard]] AppConfig fixture_config();
[[nodiscard]] std::shared_ptr<Pipeline> fixture_pipeline();

/// Fixture corpus, vectors and lexical scorer with no backends bound.
[[nodiscard]] PipelineComponents retrieval_components();

/// Backend whose replies come from a callable.
class FunctionBackend final : public TextBackend {
  public:
    using Fn = std::function<std::string(const GenerationRequest&)>;
    explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
    std::string generate(const GenerationRequest& request) override { return fn_(request); }

  private:
    Fn fn_;
};

/// retrieval_components() with every role bound to `fn`.
[[nodiscard]] std::shared_ptr<Pipeline> function_pipeline(FunctionBackend::Fn fn);

}  // namespace convqa::testing
