#pragma once

#include <span>
#include <vector>

#include "convqa/embedding.hpp"
#include "convqa/types.hpp"

namespace convqa {

/// Paragraph relevance against the refined question and its keywords:
///
///   s(p) = f(E(q'), E(p)) + sum_{k in K} f(E(k), E(p))
///
/// The keyword terms are summed in ascending order of value, so the score is
/// exactly invariant to keyword order.
class RecallScorer {
  public:
    RecallScorer(const RefinedQuestion& refined, const KeywordSet& keywords, const EmbeddingModel& model,
                 ScoreFunction fn = ScoreFunction::cosine, TokenizerMode mode = TokenizerMode::unicode);

    [[nodiscard]] double score(const Paragraph& paragraph) const;
    [[nodiscard]] double score_embedding(std::span<const double> paragraph_vector) const;

  private:
    const EmbeddingModel* model_;
    ScoreFunction fn_;
    TokenizerMode mode_;
    Vector question_;
    std::vector<Vector> keywords_;
};

[[nodiscard]] double recall_score(const RefinedQuestion& refined, const KeywordSet& keywords,
                                  const Paragraph& paragraph, const EmbeddingModel& model,
                                  ScoreFunction fn = ScoreFunction::cosine);

/// Strict ordering used by recall and rerank: higher score first, then
/// smaller document rank, then smaller index_in_doc, then doc_id.
[[nodiscard]] bool ranks_before(double score_a, const Paragraph& a, double score_b, const Paragraph& b);

/// The `k_recall` highest-scoring paragraphs, best first. Throws Error when
/// k_recall < 1.
[[nodiscard]] std::vector<ScoredParagraph> recall_top(const RefinedQuestion& refined, const KeywordSet& keywords,
                                                      const std::vector<Paragraph>& paragraphs,
                                                      const EmbeddingModel& model, std::size_t k_recall,
                                                      ScoreFunction fn = ScoreFunction::cosine);

}  // namespace convqa
