#include "convqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "convqa/error.hpp"

namespace convqa {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(std::span<const std::string> tokens, int n) {
    NgramCounts out;
    const auto len = static_cast<std::size_t>(n);
    if (tokens.size() < len) return out;
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
        ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                       tokens.begin() + static_cast<std::ptrdiff_t>(i + len))];
    }
    return out;
}

int clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
    int shared = 0;
    for (const auto& [g, c] : cand) {
        if (auto it = ref.find(g); it != ref.end()) shared += std::min(c, it->second);
    }
    return shared;
}

bool identical(std::span<const std::string> a, std::span<const std::string> b) {
    return !a.empty() && std::equal(a.begin(), a.end(), b.begin(), b.end());
}

double f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

double bleu_tokens(std::span<const std::string> candidate, std::span<const std::string> reference, int n) {
    if (n < 1 || n > 4) throw Error("BLEU order must be in 1..4");
    if (candidate.empty()) return 0.0;
    if (identical(candidate, reference)) return 1.0;

    double log_sum = 0.0;
    for (int order = 1; order <= n; ++order) {
        const NgramCounts c = ngrams(candidate, order);
        const std::size_t total = candidate.size() >= static_cast<std::size_t>(order)
                                      ? candidate.size() - static_cast<std::size_t>(order) + 1
                                      : 0;
        if (total == 0) return 0.0;
        const int matched = clipped_overlap(c, ngrams(reference, order));
        if (matched == 0) return 0.0;
        log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
    }
    const auto c_len = static_cast<double>(candidate.size());
    const auto r_len = static_cast<double>(reference.size());
    const double bp = c_len > r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
    return bp * std::exp(log_sum / n);
}

double rouge_n_tokens(std::span<const std::string> candidate, std::span<const std::string> reference, int n) {
    if (n < 1) throw Error("ROUGE order must be >= 1");
    if (candidate.empty()) return 0.0;
    if (identical(candidate, reference)) return 1.0;
    const NgramCounts c = ngrams(candidate, n);
    const NgramCounts r = ngrams(reference, n);
    int c_total = 0;
    int r_total = 0;
    for (const auto& [g, k] : c) c_total += k;
    for (const auto& [g, k] : r) r_total += k;
    if (c_total == 0 || r_total == 0) return 0.0;
    const int shared = clipped_overlap(c, r);
    return f1(static_cast<double>(shared) / c_total, static_cast<double>(shared) / r_total);
}

double rouge_l_tokens(std::span<const std::string> candidate, std::span<const std::string> reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    std::vector<std::size_t> prev(reference.size() + 1, 0);
    std::vector<std::size_t> cur(reference.size() + 1, 0);
    for (std::size_t i = 1; i <= candidate.size(); ++i) {
        for (std::size_t j = 1; j <= reference.size(); ++j) {
            cur[j] = candidate[i - 1] == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    const auto lcs = static_cast<double>(prev[reference.size()]);
    return f1(lcs / static_cast<double>(candidate.size()), lcs / static_cast<double>(reference.size()));
}

double meteor_tokens(std::span<const std::string> candidate, std::span<const std::string> reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    std::vector<bool> used(reference.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> alignment;  // (candidate pos, reference pos)
    std::optional<std::size_t> last_ref;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        std::optional<std::size_t> pick;
        if (last_ref && *last_ref + 1 < reference.size() && !used[*last_ref + 1] &&
            reference[*last_ref + 1] == candidate[i]) {
            pick = *last_ref + 1;
        } else {
            for (std::size_t j = 0; j < reference.size(); ++j) {
                if (!used[j] && reference[j] == candidate[i]) {
                    pick = j;
                    break;
                }
            }
        }
        if (pick) {
            used[*pick] = true;
            alignment.emplace_back(i, *pick);
            last_ref = pick;
        } else {
            last_ref.reset();
        }
    }
    const auto matches = static_cast<double>(alignment.size());
    if (matches == 0) return 0.0;

    // a chunk is a run adjacent in both sequences
    std::size_t chunks = 1;
    for (std::size_t k = 1; k < alignment.size(); ++k) {
        const bool contiguous = alignment[k].first == alignment[k - 1].first + 1 &&
                                alignment[k].second == alignment[k - 1].second + 1;
        if (!contiguous) ++chunks;
    }
    const double precision = matches / static_cast<double>(candidate.size());
    const double recall = matches / static_cast<double>(reference.size());
    const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
    const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / matches, 3.0);
    return fmean * (1.0 - penalty);
}

double meteor_identity_value(std::size_t length) {
    if (length == 0) return 0.0;
    return 1.0 - 0.5 / std::pow(static_cast<double>(length), 3.0);
}

double bleu_n(std::string_view candidate, std::string_view reference, int n, TokenizerMode mode) {
    return bleu_tokens(token_strings(candidate, mode), token_strings(reference, mode), n);
}

double rouge_n(std::string_view candidate, std::string_view reference, int n, TokenizerMode mode) {
    return rouge_n_tokens(token_strings(candidate, mode), token_strings(reference, mode), n);
}

double rouge_l(std::string_view candidate, std::string_view reference, TokenizerMode mode) {
    return rouge_l_tokens(token_strings(candidate, mode), token_strings(reference, mode));
}

double meteor_basic(std::string_view candidate, std::string_view reference, TokenizerMode mode) {
    return meteor_tokens(token_strings(candidate, mode), token_strings(reference, mode));
}

MetricScores score_pair(std::string_view candidate, std::string_view reference, TokenizerMode mode) {
    const TokenSeq c = token_strings(candidate, mode);
    const TokenSeq r = token_strings(reference, mode);
    MetricScores s;
    for (int n = 1; n <= 4; ++n) s.values[static_cast<std::size_t>(n - 1)] = bleu_tokens(c, r, n);
    s.values[4] = meteor_tokens(c, r);
    s.values[5] = rouge_n_tokens(c, r, 1);
    s.values[6] = rouge_n_tokens(c, r, 2);
    s.values[7] = rouge_l_tokens(c, r);
    return s;
}

MetricReport evaluate_run(const std::vector<std::string>& predictions, const std::vector<std::string>& references,
                          TokenizerMode mode) {
    if (predictions.size() != references.size()) {
        throw Error("length mismatch: " + std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(references.size()) + " references");
    }
    MetricReport report;
    report.per_example.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        report.per_example.push_back(score_pair(predictions[i], references[i], mode));
    }
    if (!report.per_example.empty()) {
        for (std::size_t m = 0; m < MetricScores::kCount; ++m) {
            double sum = 0.0;
            for (const MetricScores& s : report.per_example) sum += s.values[m];
            report.aggregate.values[m] = sum / static_cast<double>(report.per_example.size());
        }
    }
    return report;
}

Json encode(const MetricScores& scores) {
    Json j = Json::object();
    for (std::size_t m = 0; m < MetricScores::kCount; ++m) j[MetricScores::kNames[m]] = scores.values[m];
    return j;
}

Json encode(const MetricReport& report) {
    Json per = Json::array();
    for (const MetricScores& s : report.per_example) per.push_back(encode(s));
    return Json{{"count", report.per_example.size()}, {"aggregate", encode(report.aggregate)},
                {"per_example", std::move(per)}};
}

MetricScores decode_metric_scores(const Json& j) {
    MetricScores s;
    for (std::size_t m = 0; m < MetricScores::kCount; ++m) s.values[m] = codec::require_number(j, MetricScores::kNames[m]);
    return s;
}

std::string format_metric_report(const MetricReport& report) {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-10s %8zu\n", "examples", report.per_example.size());
    out += buf;
    for (std::size_t m = 0; m < MetricScores::kCount; ++m) {
        std::snprintf(buf, sizeof buf, "%-10s %8.2f\n", MetricScores::kLabels[m], report.aggregate.values[m] * 100.0);
        out += buf;
    }
    return out;
}

}  // namespace convqa
