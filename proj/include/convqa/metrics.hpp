#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convqa/codec.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {

using TokenSeq = std::vector<std::string>;

// Token-level metrics. All return values in [0, 1]; an empty candidate scores
// 0, and a non-empty candidate identical to its reference scores 1 for BLEU
// and ROUGE (including orders longer than the sequence).

/// Cumulative BLEU-n: brevity penalty times the geometric mean of clipped
/// n-gram precisions of orders 1..n, uniform weights, no smoothing.
[[nodiscard]] double bleu_tokens(std::span<const std::string> candidate, std::span<const std::string> reference,
                                 int n);
/// ROUGE-n F1 over clipped n-gram overlap.
[[nodiscard]] double rouge_n_tokens(std::span<const std::string> candidate, std::span<const std::string> reference,
                                    int n);
/// ROUGE-L F1 over the longest common subsequence.
[[nodiscard]] double rouge_l_tokens(std::span<const std::string> candidate, std::span<const std::string> reference);

/// Exact-match METEOR (no stemming or synonym stages):
///   Fmean = 10PR / (R + 9P),  penalty = 0.5 (chunks / matches)^3,
///   score = Fmean (1 - penalty).
/// Alignment: candidate tokens left to right; each takes the reference
/// occurrence right after the previous match when that position holds the
/// same token, otherwise the leftmost unused occurrence.
[[nodiscard]] double meteor_tokens(std::span<const std::string> candidate, std::span<const std::string> reference);

[[nodiscard]] double bleu_n(std::string_view candidate, std::string_view reference, int n,
                            TokenizerMode mode = TokenizerMode::unicode);
[[nodiscard]] double rouge_n(std::string_view candidate, std::string_view reference, int n,
                             TokenizerMode mode = TokenizerMode::unicode);
[[nodiscard]] double rouge_l(std::string_view candidate, std::string_view reference,
                             TokenizerMode mode = TokenizerMode::unicode);
[[nodiscard]] double meteor_basic(std::string_view candidate, std::string_view reference,
                                  TokenizerMode mode = TokenizerMode::unicode);

/// Score of the identity pair of length m: 1 - 0.5 / m^3.
[[nodiscard]] double meteor_identity_value(std::size_t length);

/// BLEU-1..4, METEOR, ROUGE-1, ROUGE-2, ROUGE-L, in that order.
struct MetricScores {
    static constexpr std::size_t kCount = 8;
    static constexpr std::array<const char*, kCount> kNames{"bleu1", "bleu2", "bleu3", "bleu4",
                                                            "meteor", "rouge1", "rouge2", "rougeL"};
    static constexpr std::array<const char*, kCount> kLabels{"BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4",
                                                             "METEOR", "ROUGE-1", "ROUGE-2", "ROUGE-L"};
    std::array<double, kCount> values{};

    [[nodiscard]] double bleu(int n) const { return values.at(static_cast<std::size_t>(n - 1)); }
    [[nodiscard]] double meteor() const { return values[4]; }
    [[nodiscard]] double rouge1() const { return values[5]; }
    [[nodiscard]] double rouge2() const { return values[6]; }
    [[nodiscard]] double rouge_l() const { return values[7]; }
};

[[nodiscard]] MetricScores score_pair(std::string_view candidate, std::string_view reference,
                                      TokenizerMode mode = TokenizerMode::unicode);

struct MetricReport {
    std::vector<MetricScores> per_example;
    MetricScores aggregate;  // arithmetic mean over examples
};

/// Throws Error when the lists differ in length.
[[nodiscard]] MetricReport evaluate_run(const std::vector<std::string>& predictions,
                                        const std::vector<std::string>& references,
                                        TokenizerMode mode = TokenizerMode::unicode);

[[nodiscard]] Json encode(const MetricScores& scores);
[[nodiscard]] Json encode(const MetricReport& report);
[[nodiscard]] MetricScores decode_metric_scores(const Json& j);

/// Aggregate line per metric, x100 with two decimals.
[[nodiscard]] std::string format_metric_report(const MetricReport& report);

}  // namespace convqa
