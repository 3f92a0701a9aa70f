#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace convqa {

/// One question/response exchange.
struct Turn {
    std::string question;
    std::string response;  // empty only while the turn is in progress

    friend bool operator==(const Turn&, const Turn&) = default;
};

/// Ordered, append-only conversation history. An empty conversation is a
/// valid context (the first turn has nothing before it).
class Conversation {
  public:
    Conversation() = default;
    explicit Conversation(std::string id, std::vector<Turn> turns = {})
        : id_(std::move(id)), turns_(std::move(turns)) {}

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const std::vector<Turn>& turns() const noexcept { return turns_; }
    [[nodiscard]] std::size_t size() const noexcept { return turns_.size(); }
    [[nodiscard]] bool empty() const noexcept { return turns_.empty(); }

    /// Throws FormatError when the question is blank.
    void append(Turn turn);

    friend bool operator==(const Conversation&, const Conversation&) = default;

  private:
    std::string id_;
    std::vector<Turn> turns_;
};

/// The context-resolved rewrite of the current question.
struct RefinedQuestion {
    std::string text;
    int source_turn_index = 1;  // 1-based number of the turn being answered

    friend bool operator==(const RefinedQuestion&, const RefinedQuestion&) = default;
};

/// Ordered, duplicate-free retrieval keywords.
class KeywordSet {
  public:
    KeywordSet() = default;
    /// Normalizes whitespace, drops empties and duplicates (first occurrence wins).
    explicit KeywordSet(const std::vector<std::string>& raw);

    [[nodiscard]] const std::vector<std::string>& keywords() const noexcept { return keywords_; }
    [[nodiscard]] bool empty() const noexcept { return keywords_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return keywords_.size(); }

    /// Keywords joined by single spaces; the document-search query.
    [[nodiscard]] std::string joined() const;

    friend bool operator==(const KeywordSet&, const KeywordSet&) = default;

  private:
    std::vector<std::string> keywords_;
};

struct Paragraph {
    std::string text;
    std::string doc_id;
    int index_in_doc = 0;
    int doc_rank = 1;  // connector rank of the source document, 1-based
    std::optional<std::string> source_url;

    friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct ScoredParagraph {
    Paragraph paragraph;
    double recall_score = 0.0;
    std::optional<double> rerank_score;
    std::optional<int> final_rank;

    friend bool operator==(const ScoredParagraph&, const ScoredParagraph&) = default;
};

/// Self-check outcome for one member of P_top, keyed by its final rank.
struct HelpfulnessVerdict {
    int paragraph_rank = 0;
    bool helpful = true;
    std::optional<std::string> rationale;

    friend bool operator==(const HelpfulnessVerdict&, const HelpfulnessVerdict&) = default;
};

}  // namespace convqa
