#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "convqa/embedding.hpp"
#include "convqa/error.hpp"
#include "convqa/recall.hpp"
#include "convqa/rerank.hpp"
#include "convqa/search.hpp"
#include "convqa/segment.hpp"
#include "convqa/tokenizer.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace convqa;
using convqa::testing::data_path;
using convqa::testing::TempDir;
using convqa::testing::write_file;

namespace {

Document doc(std::string id, std::string body, std::optional<std::string> title = std::nullopt) {
    Document d;
    d.doc_id = std::move(id);
    d.body = std::move(body);
    d.title = std::move(title);
    return d;
}

Paragraph para(std::string text, std::string doc_id = "d", int index = 0, int rank = 1) {
    return {std::move(text), std::move(doc_id), index, rank, std::nullopt};
}

std::vector<ScoredParagraph> candidates(const std::vector<std::string>& texts) {
    std::vector<ScoredParagraph> out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out.push_back({para(texts[i], "d", static_cast<int>(i)), 1.0 - 0.1 * static_cast<double>(i), {}, {}});
    }
    return out;
}

class ThrowingScorer final : public RerankScorer {
  public:
    std::vector<double> score(const std::string&, const std::vector<std::string>&) override {
        throw TransportError("rerank down", 503);
    }
};

std::vector<std::string> ids(const std::vector<Document>& docs) {
    std::vector<std::string> out;
    for (const Document& d : docs) out.push_back(d.doc_id);
    return out;
}

}  // namespace

TEST(OfflineCorpus, TitleMatchFindsDocument) {
    OfflineCorpusConnector c({doc("a", "nothing here", "Great Wall"), doc("b", "unrelated")});
    const auto hits = c.search("wall", 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].doc_id, "a");
    EXPECT_EQ(hits[0].rank, 1);
}

TEST(OfflineCorpus, NoMatchIsEmpty) {
    OfflineCorpusConnector c({doc("a", "tea")});
    EXPECT_TRUE(c.search("coffee", 5).empty());
}

TEST(OfflineCorpus, OrdersByDistinctOverlapThenId) {
    OfflineCorpusConnector c({doc("z", "wall wall wall"), doc("y", "great wall"), doc("x", "wall"), doc("w", "great")});
    EXPECT_EQ(ids(c.search("Great WALL!", 5)), (std::vector<std::string>{"y", "w", "x", "z"}));
    EXPECT_EQ(ids(c.search("great wall", 2)), (std::vector<std::string>{"y", "w"}));
}

TEST(OfflineCorpus, FixtureCorpusAgreesWithFullScan) {
    const auto corpus = load_corpus(data_path("corpus.jsonl"));
    OfflineCorpusConnector c(corpus);
    for (const std::string q : {"great wall history", "beijing capital", "春节 传统", "tea"}) {
        // full scan: count distinct matched query terms per document
        std::vector<std::pair<long, std::string>> scored;
        auto q_terms = match_terms(q);
        std::sort(q_terms.begin(), q_terms.end());
        q_terms.erase(std::unique(q_terms.begin(), q_terms.end()), q_terms.end());
        for (const Document& d : corpus) {
            const auto terms = match_terms(d.title.value_or("") + " " + d.body);
            long n = 0;
            for (const auto& t : q_terms) n += std::find(terms.begin(), terms.end(), t) != terms.end();
            if (n > 0) scored.emplace_back(-n, d.doc_id);
        }
        std::sort(scored.begin(), scored.end());
        std::vector<std::string> expected;
        for (std::size_t i = 0; i < scored.size() && i < 3; ++i) expected.push_back(scored[i].second);
        const auto hits = c.search(q, 3);
        EXPECT_EQ(ids(hits), expected) << q;
        for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i].rank, static_cast<int>(i) + 1);
    }
}

TEST(OfflineCorpus, DuplicateIdRejected) {
    EXPECT_THROW(OfflineCorpusConnector({doc("a", "x"), doc("a", "y")}), FormatError);
}

TEST(SearchDocuments, EmptyKeywordsRejected) {
    OfflineCorpusConnector c({doc("a", "x")});
    EXPECT_THROW((void)search_documents(KeywordSet(), c, 5), Error);
    EXPECT_EQ(search_documents(KeywordSet({"x"}), c, 5).size(), 1u);
}

TEST(LoadCorpus, ErrorsNameTheLine) {
    TempDir dir;
    write_file(dir / "c.jsonl", "{\"doc_id\":\"a\",\"body\":\"x\"}\n{\"body\":\"y\"}\n");
    try {
        (void)load_corpus(dir / "c.jsonl");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(Segment, SplitsAtBlankLines) {
    Document d = doc("d", "a\n\nb");
    d.rank = 2;
    d.url = "https://d";
    const auto ps = segment_paragraphs(d);
    ASSERT_EQ(ps.size(), 2u);
    EXPECT_EQ(ps[0], (Paragraph{"a", "d", 0, 2, std::string("https://d")}));
    EXPECT_EQ(ps[1].text, "b");
    EXPECT_EQ(ps[1].index_in_doc, 1);
}

TEST(Segment, EmptyAndWhitespaceBodies) {
    EXPECT_TRUE(segment_paragraphs(doc("d", "")).empty());
    EXPECT_TRUE(segment_paragraphs(doc("d", " \n\n \t\n")).empty());
    EXPECT_EQ(segment_paragraphs(doc("d", "one\ntwo\n \n\nthree\r\n\r\n")).size(), 2u);
}

TEST(Segment, LongBlockIsPackedBySentence) {
    std::string body;
    for (int s = 0; s < 200; ++s) body += "w" + std::to_string(s) + " x y z y.";  // 6 tokens each
    ASSERT_EQ(count_tokens(body), 1200u);
    const auto ps = segment_paragraphs(doc("d", body));
    ASSERT_GE(ps.size(), 3u);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        EXPECT_LE(count_tokens(ps[i].text), kMaxParagraphTokens);
        EXPECT_EQ(ps[i].index_in_doc, static_cast<int>(i));
        const auto at = body.find(ps[i].text, pos);
        ASSERT_NE(at, std::string::npos);
        pos = at + ps[i].text.size();
    }
    EXPECT_EQ(pos, body.size());
}

TEST(Segment, OverlongSentenceIsCutAtTokens) {
    std::string body;
    for (int i = 0; i < 25; ++i) body += "t" + std::to_string(i) + " ";
    const auto ps = segment_paragraphs(doc("d", body), 10);
    ASSERT_EQ(ps.size(), 3u);
    EXPECT_EQ(count_tokens(ps[0].text), 10u);
    EXPECT_EQ(count_tokens(ps[2].text), 5u);
    EXPECT_EQ(ps[1].text.rfind("t10 ", 0), 0u);
}

TEST(SegmentProperty, FragmentsCoverEveryToken) {
    std::mt19937 rng(5);
    const std::vector<std::string> pieces{"word ", "长", "城", ". ", "! ", "\n", "\n\n", "x", "？", "…", " "};
    for (int trial = 0; trial < 200; ++trial) {
        std::string body;
        const int n = static_cast<int>(rng() % 80);
        for (int i = 0; i < n; ++i) body += pieces[rng() % pieces.size()];
        const std::size_t limit = 1 + rng() % 8;
        const auto ps = segment_paragraphs(doc("d", body), limit);
        std::size_t total = 0;
        for (const auto& p : ps) {
            EXPECT_FALSE(p.text.empty());
            EXPECT_LE(count_tokens(p.text), limit) << body;
            total += count_tokens(p.text);
        }
        EXPECT_EQ(total, count_tokens(body)) << body;
    }
}

TEST(Embeddings, LoadsHeaderAndVectors) {
    const EmbeddingModel m = load_embeddings(data_path("vectors.txt"));
    EXPECT_EQ(m.dimension(), 8u);
    EXPECT_EQ(m.size(), 309u);
}

TEST(Embeddings, LoadErrors) {
    TempDir dir;
    write_file(dir / "a.txt", "2 2\nx 1 0\ny 1 zz\n");
    try {
        (void)load_embeddings(dir / "a.txt");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    }
    write_file(dir / "b.txt", "x 1 0\ny 1 0 2\n");
    EXPECT_THROW((void)load_embeddings(dir / "b.txt"), FormatError);
    write_file(dir / "c.txt", "x 1 0\nx 5 5\n");
    EXPECT_EQ(*load_embeddings(dir / "c.txt").find("x"), (Vector{1, 0}));
    EXPECT_THROW((void)load_embeddings(dir / "missing.txt"), IoError);
}

TEST(Embeddings, MeanOfKnownTokens) {
    EmbeddingModel m(2);
    m.add("a", {1, 0});
    m.add("b", {0, 1});
    EXPECT_EQ(embed("a", m), (Vector{1, 0}));
    EXPECT_EQ(embed("a b", m), (Vector{0.5, 0.5}));
    EXPECT_EQ(embed("A, unknown b", m), (Vector{0.5, 0.5}));
    EXPECT_EQ(embed("none here", m), (Vector{0, 0}));
    EXPECT_THROW(m.add("c", {1, 2, 3}), Error);
}

TEST(Similarity, CosineAndDot) {
    const Vector a{1, 0};
    const Vector b{1, 1};
    EXPECT_NEAR(cosine(a, b), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(cosine(a, Vector{0, 0}), 0.0);
    EXPECT_EQ(dot(a, b), 1.0);
    EXPECT_EQ(parse_score_function("dot"), ScoreFunction::dot);
    EXPECT_THROW((void)parse_score_function("l2"), FormatError);
}

TEST(Recall, HandComputedScore) {
    EmbeddingModel m(2);
    m.add("a", {1, 0});
    m.add("b", {0, 1});
    // E(q') = (1,0), E(k) = (0,1), E(p) = (0.5,0.5): 1/sqrt2 + 1/sqrt2
    const double s = recall_score({"a", 1}, KeywordSet({"b"}), para("a b"), m);
    EXPECT_NEAR(s, 1.41421356237, 1e-9);
    EXPECT_NEAR(recall_score({"a", 1}, KeywordSet(), para("a"), m), 1.0, 1e-12);
    EXPECT_EQ(recall_score({"a", 1}, KeywordSet({"b"}), para("zzz"), m), 0.0);
    EXPECT_EQ(recall_score({"a b", 1}, KeywordSet({"a", "b"}), para("a b"), m, ScoreFunction::dot), 1.5);
}

TEST(Recall, TieBreakByRankThenIndexThenId) {
    EmbeddingModel m(1);
    m.add("x", {1});
    const std::vector<Paragraph> ps{para("x", "b", 0, 2), para("x", "a", 1, 1), para("x", "c", 0, 1),
                                    para("x", "a", 0, 1)};
    const auto top = recall_top({"x", 1}, KeywordSet(), ps, m, 10);
    ASSERT_EQ(top.size(), 4u);
    EXPECT_EQ(top[0].paragraph, ps[3]);
    EXPECT_EQ(top[1].paragraph, ps[2]);
    EXPECT_EQ(top[2].paragraph, ps[1]);
    EXPECT_EQ(top[3].paragraph, ps[0]);
    EXPECT_THROW((void)recall_top({"x", 1}, KeywordSet(), ps, m, 0), Error);
}

TEST(RecallProperty, MatchesBruteForceOracle) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = oracle::random_recall_instance(rng, 200, 12);
        const std::size_t k = 1 + rng() % 30;
        const auto got = recall_top(inst.refined, KeywordSet(inst.keywords), inst.paragraphs, inst.model, k);
        const auto want = oracle::recall_top(inst, k);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].paragraph, want[i].paragraph) << "trial " << trial << " pos " << i;
            EXPECT_EQ(got[i].recall_score, want[i].recall_score);
        }
    }
}

TEST(RecallProperty, KeywordOrderAndVectorScale) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = oracle::random_recall_instance(rng, 40, 8);
        const KeywordSet kw(inst.keywords);
        auto reversed = inst.keywords;
        std::reverse(reversed.begin(), reversed.end());
        EmbeddingModel scaled(inst.model.dimension());
        const double lambda = 0.25 + static_cast<double>(rng() % 1000) / 100.0;
        for (const auto& [w, v] : inst.vocab) {
            Vector s = v;
            for (double& x : s) x *= lambda;
            scaled.add(w, s);
        }
        for (const Paragraph& p : inst.paragraphs) {
            const double base = recall_score(inst.refined, kw, p, inst.model);
            EXPECT_EQ(recall_score(inst.refined, KeywordSet(reversed), p, inst.model), base);
            EXPECT_NEAR(recall_score(inst.refined, kw, p, scaled), base, 1e-9);
        }
    }
}

TEST(Rerank, BigramOverlapHandValue) {
    // query bigrams: (the,great) (great,wall); passage: (great,wall) (wall,of) (of,china)
    EXPECT_NEAR(LexicalRerankScorer::bigram_overlap("The great wall", "Great wall of China"), 1.0 / std::sqrt(6.0),
                1e-15);
    EXPECT_EQ(LexicalRerankScorer::bigram_overlap("one", "one two"), 0.0);
    EXPECT_EQ(LexicalRerankScorer::bigram_overlap("a b", "a b"), 1.0);
}

TEST(Rerank, KeepsBestNWithFinalRanks) {
    LexicalRerankScorer s;
    const auto c = candidates({"tea is a drink", "the great wall of china", "great wall", "unrelated words here"});
    const RerankOutcome out = rerank({"the great wall", 1}, c, s, 2);
    ASSERT_EQ(out.top.size(), 2u);
    EXPECT_FALSE(out.fell_back);
    EXPECT_EQ(out.top[0].paragraph.text, "the great wall of china");
    EXPECT_EQ(out.top[1].paragraph.text, "great wall");
    EXPECT_EQ(out.top[0].final_rank, 1);
    EXPECT_EQ(out.top[1].final_rank, 2);
    EXPECT_EQ(out.top[0].recall_score, c[1].recall_score);
    EXPECT_THROW((void)rerank({"q", 1}, c, s, 0), Error);
}

TEST(Rerank, NLargerThanCandidates) {
    LexicalRerankScorer s;
    const auto out = rerank({"q", 1}, candidates({"a", "b"}), s, 3);
    EXPECT_EQ(out.top.size(), 2u);
    EXPECT_TRUE(rerank({"q", 1}, {}, s, 3).top.empty());
}

TEST(Rerank, ScorerFailureKeepsRecallOrder) {
    ThrowingScorer s;
    const auto c = candidates({"a", "b", "c", "d"});
    const RerankOutcome out = rerank({"q", 1}, c, s, 3);
    EXPECT_TRUE(out.fell_back);
    EXPECT_NE(out.error.find("rerank down"), std::string::npos);
    ASSERT_EQ(out.top.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(out.top[i].paragraph, c[i].paragraph);
        EXPECT_FALSE(out.top[i].rerank_score.has_value());
        EXPECT_EQ(out.top[i].final_rank, static_cast<int>(i) + 1);
    }
}

TEST(RerankProperty, MatchesBruteForceSelection) {
    std::mt19937 rng(9);
    const std::vector<std::string> words{"great", "wall", "china", "tea", "the", "of", "history"};
    LexicalRerankScorer s;
    for (int trial = 0; trial < 200; ++trial) {
        auto sentence = [&] {
            std::string out;
            for (int i = 0, n = 1 + static_cast<int>(rng() % 6); i < n; ++i) out += words[rng() % words.size()] + " ";
            return out;
        };
        std::vector<ScoredParagraph> c;
        for (int i = 0, n = static_cast<int>(rng() % 12); i < n; ++i) {
            c.push_back({para(sentence(), "d" + std::to_string(rng() % 3), i, 1 + static_cast<int>(rng() % 3)), 0.0,
                         {}, {}});
        }
        const std::string q = sentence();
        const std::size_t n = 1 + rng() % 5;
        const RerankOutcome out = rerank({q, 1}, c, s, n);

        std::vector<std::tuple<double, int, int, std::string, std::size_t>> all;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto& p = c[i].paragraph;
            all.emplace_back(-LexicalRerankScorer::bigram_overlap(q, p.text), p.doc_rank, p.index_in_doc, p.doc_id, i);
        }
        std::sort(all.begin(), all.end());
        ASSERT_EQ(out.top.size(), std::min(n, c.size()));
        for (std::size_t i = 0; i < out.top.size(); ++i) {
            EXPECT_EQ(out.top[i].paragraph, c[std::get<4>(all[i])].paragraph);
            EXPECT_EQ(*out.top[i].rerank_score, -std::get<0>(all[i]));
        }
    }
}
