#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "convqa/tokenizer.hpp"

namespace convqa {

using Vector = std::vector<double>;

/// Static word vectors (fastText / word2vec text format). Read-only once
/// loaded, so one instance can be shared across threads.
class EmbeddingModel {
  public:
    explicit EmbeddingModel(std::size_t dimension = 0) : dimension_(dimension) {}

    /// Throws Error when the vector's size differs from the dimension.
    /// Re-adding a token replaces its vector.
    void add(std::string token, Vector vector);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return vectors_.size(); }
    [[nodiscard]] bool contains(std::string_view token) const { return vectors_.count(std::string(token)) != 0; }

    /// Exact token first, then its ASCII-lowercased form. nullptr when unknown.
    [[nodiscard]] const Vector* find(std::string_view token) const;

    /// Stored vector or the zero vector for unknown tokens.
    [[nodiscard]] Vector lookup(std::string_view token) const;

  private:
    std::size_t dimension_;
    std::unordered_map<std::string, Vector> vectors_;
};

/// "token v1 ... vd" per line, with an optional leading "count dim" header.
/// A token repeated later in the file keeps its first vector.
[[nodiscard]] EmbeddingModel load_embeddings(const std::filesystem::path& path);

/// Mean of the vectors of in-vocabulary tokens; the zero vector when none are.
[[nodiscard]] Vector embed(std::string_view text, const EmbeddingModel& model,
                           TokenizerMode mode = TokenizerMode::unicode);

enum class ScoreFunction { cosine, dot };

[[nodiscard]] ScoreFunction parse_score_function(std::string_view name);
[[nodiscard]] std::string_view to_string(ScoreFunction fn);

/// Cosine similarity; 0 when either side is the zero vector.
[[nodiscard]] double cosine(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double similarity(ScoreFunction fn, std::span<const double> a, std::span<const double> b);

}  // namespace convqa
