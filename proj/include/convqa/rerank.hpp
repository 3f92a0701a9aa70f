#pragma once

#include <string>
#include <vector>

#include "convqa/http.hpp"
#include "convqa/types.hpp"

namespace convqa {

/// Cross-scores a query against each passage; one finite score per passage.
class RerankScorer {
  public:
    virtual ~RerankScorer() = default;
    [[nodiscard]] virtual std::vector<double> score(const std::string& query,
                                                    const std::vector<std::string>& passages) = 0;
};

/// Normalized bigram overlap between query and passage:
///   |B(q) ∩ B(p)| / sqrt(|B(q)| * |B(p)|)
/// over case-folded, punctuation-free token bigrams (multiset intersection).
/// 0 when either side has no bigram. Pure.
class LexicalRerankScorer final : public RerankScorer {
  public:
    [[nodiscard]] std::vector<double> score(const std::string& query,
                                            const std::vector<std::string>& passages) override;

    [[nodiscard]] static double bigram_overlap(const std::string& query, const std::string& passage);
};

/// Remote cross-encoder service.
///   POST {"query": str, "passages": [str, ...]}
///   ->   {"scores": [num, ...]}  or  [{"index": int, "score": num}, ...]
class RemoteRerankScorer final : public RerankScorer {
  public:
    RemoteRerankScorer(HttpEndpoint endpoint, RetryPolicy retry)
        : endpoint_(std::move(endpoint)), retry_(std::move(retry)) {}

    [[nodiscard]] std::vector<double> score(const std::string& query,
                                            const std::vector<std::string>& passages) override;

  private:
    HttpEndpoint endpoint_;
    RetryPolicy retry_;
};

struct RerankOutcome {
    std::vector<ScoredParagraph> top;
    bool fell_back = false;  // scorer failed; recall order was kept
    std::string error;
};

/// Rescores `candidates` against the refined question only and keeps the
/// best `n` (same tie-break as recall), assigning final_rank 1..n. When the
/// scorer throws, the first `n` candidates in their given order are kept and
/// the outcome is flagged. Throws Error when n < 1.
[[nodiscard]] RerankOutcome rerank(const RefinedQuestion& refined, const std::vector<ScoredParagraph>& candidates,
                                   RerankScorer& scorer, std::size_t n);

}  // namespace convqa
