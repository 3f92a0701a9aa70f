#include "convqa/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "convqa/error.hpp"
#include "convqa/recall.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {
namespace {

std::map<std::pair<std::string, std::string>, int> bigrams(const std::string& text) {
    const std::vector<std::string> terms = match_terms(text);
    std::map<std::pair<std::string, std::string>, int> out;
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) ++out[{terms[i], terms[i + 1]}];
    return out;
}

int total(const std::map<std::pair<std::string, std::string>, int>& m) {
    int n = 0;
    for (const auto& [k, c] : m) n += c;
    return n;
}

}  // namespace

double LexicalRerankScorer::bigram_overlap(const std::string& query, const std::string& passage) {
    const auto q = bigrams(query);
    const auto p = bigrams(passage);
    const int nq = total(q);
    const int np = total(p);
    if (nq == 0 || np == 0) return 0.0;
    int shared = 0;
    for (const auto& [k, c] : q) {
        if (auto it = p.find(k); it != p.end()) shared += std::min(c, it->second);
    }
    return static_cast<double>(shared) / std::sqrt(static_cast<double>(nq) * static_cast<double>(np));
}

std::vector<double> LexicalRerankScorer::score(const std::string& query, const std::vector<std::string>& passages) {
    std::vector<double> out;
    out.reserve(passages.size());
    for (const std::string& p : passages) out.push_back(bigram_overlap(query, p));
    return out;
}

std::vector<double> RemoteRerankScorer::score(const std::string& query, const std::vector<std::string>& passages) {
    const nlohmann::json request{{"query", query}, {"passages", passages}};
    const HttpResponse res = post_json(endpoint_, request.dump(), retry_);
    const nlohmann::json reply = nlohmann::json::parse(res.body, nullptr, false);

    std::vector<double> scores(passages.size(), std::nan(""));
    try {
        if (reply.is_object() && reply.contains("scores")) {
            const auto& arr = reply.at("scores");
            if (arr.size() != passages.size()) throw Error("score count mismatch");
            for (std::size_t i = 0; i < arr.size(); ++i) scores[i] = arr.at(i).get<double>();
        } else if (reply.is_array()) {
            for (const auto& item : reply) {
                const auto idx = item.at("index").get<std::size_t>();
                if (idx >= scores.size()) throw Error("score index out of range");
                scores[idx] = item.at("score").get<double>();
            }
        } else {
            throw Error("unrecognized body");
        }
    } catch (const std::exception& e) {
        throw TransportError(endpoint_.url + ": malformed rerank response (" + e.what() + ")", res.status);
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw TransportError(endpoint_.url + ": missing or non-finite rerank score", res.status);
    }
    return scores;
}

RerankOutcome rerank(const RefinedQuestion& refined, const std::vector<ScoredParagraph>& candidates,
                     RerankScorer& scorer, std::size_t n) {
    if (n < 1) throw Error("n must be >= 1");
    RerankOutcome outcome;
    const std::size_t keep = std::min(n, candidates.size());

    std::vector<double> scores;
    try {
        std::vector<std::string> passages;
        passages.reserve(candidates.size());
        for (const ScoredParagraph& c : candidates) passages.push_back(c.paragraph.text);
        if (!passages.empty()) scores = scorer.score(refined.text, passages);
        if (scores.size() != candidates.size()) throw Error("scorer returned wrong number of scores");
        for (double s : scores) {
            if (!std::isfinite(s)) throw Error("scorer returned a non-finite score");
        }
    } catch (const std::exception& e) {
        outcome.fell_back = true;
        outcome.error = e.what();
        for (std::size_t i = 0; i < keep; ++i) {
            ScoredParagraph p = candidates[i];
            p.rerank_score.reset();
            p.final_rank = static_cast<int>(i) + 1;
            outcome.top.push_back(std::move(p));
        }
        return outcome;
    }

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(scores[a], candidates[a].paragraph, scores[b], candidates[b].paragraph);
    });
    for (std::size_t i = 0; i < keep; ++i) {
        ScoredParagraph p = candidates[order[i]];
        p.rerank_score = scores[order[i]];
        p.final_rank = static_cast<int>(i) + 1;
        outcome.top.push_back(std::move(p));
    }
    return outcome;
}

}  // namespace convqa
