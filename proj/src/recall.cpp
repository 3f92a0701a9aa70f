#include "convqa/recall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "convqa/error.hpp"

namespace convqa {

RecallScorer::RecallScorer(const RefinedQuestion& refined, const KeywordSet& keywords, const EmbeddingModel& model,
                           ScoreFunction fn, TokenizerMode mode)
    : model_(&model), fn_(fn), mode_(mode), question_(embed(refined.text, model, mode)) {
    keywords_.reserve(keywords.size());
    for (const std::string& k : keywords.keywords()) keywords_.push_back(embed(k, model, mode));
}

double RecallScorer::score_embedding(std::span<const double> p) const {
    thread_local std::vector<double> terms;
    terms.clear();
    for (const Vector& k : keywords_) terms.push_back(similarity(fn_, k, p));
    std::sort(terms.begin(), terms.end());
    double keyword_sum = 0.0;
    for (double t : terms) keyword_sum += t;
    return similarity(fn_, question_, p) + keyword_sum;
}

double RecallScorer::score(const Paragraph& paragraph) const {
    return score_embedding(embed(paragraph.text, *model_, mode_));
}

double recall_score(const RefinedQuestion& refined, const KeywordSet& keywords, const Paragraph& paragraph,
                    const EmbeddingModel& model, ScoreFunction fn) {
    return RecallScorer(refined, keywords, model, fn).score(paragraph);
}

bool ranks_before(double score_a, const Paragraph& a, double score_b, const Paragraph& b) {
    if (score_a != score_b) return score_a > score_b;
    if (a.doc_rank != b.doc_rank) return a.doc_rank < b.doc_rank;
    if (a.index_in_doc != b.index_in_doc) return a.index_in_doc < b.index_in_doc;
    return a.doc_id < b.doc_id;
}

std::vector<ScoredParagraph> recall_top(const RefinedQuestion& refined, const KeywordSet& keywords,
                                        const std::vector<Paragraph>& paragraphs, const EmbeddingModel& model,
                                        std::size_t k_recall, ScoreFunction fn) {
    if (k_recall < 1) throw Error("k_recall must be >= 1");
    const RecallScorer scorer(refined, keywords, model, fn);

    std::vector<double> scores(paragraphs.size());
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        scores[i] = scorer.score(paragraphs[i]);
        if (!std::isfinite(scores[i])) throw Error("non-finite recall score for paragraph " + paragraphs[i].doc_id);
    }

    std::vector<std::size_t> order(paragraphs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t keep = std::min(k_recall, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b] || paragraphs[a].doc_rank != paragraphs[b].doc_rank ||
                              paragraphs[a].index_in_doc != paragraphs[b].index_in_doc ||
                              paragraphs[a].doc_id != paragraphs[b].doc_id) {
                              return ranks_before(scores[a], paragraphs[a], scores[b], paragraphs[b]);
                          }
                          return a < b;
                      });

    std::vector<ScoredParagraph> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back({paragraphs[order[i]], scores[order[i]], {}, {}});
    return out;
}

}  // namespace convqa
