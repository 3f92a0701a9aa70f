#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "convqa/http.hpp"
#include "convqa/types.hpp"

namespace convqa {

struct Document {
    std::string doc_id;
    std::optional<std::string> title;
    std::string body;
    std::optional<std::string> snippet;
    std::optional<std::string> url;
    int rank = 1;  // 1-based position in the result set

    friend bool operator==(const Document&, const Document&) = default;
};

/// Document-level search engine. Results are ordered by rank and hold at
/// most `max_documents` entries; an empty result is not an error.
class SearchConnector {
  public:
    virtual ~SearchConnector() = default;
    [[nodiscard]] virtual std::vector<Document> search(const std::string& query, std::size_t max_documents) = 0;
};

/// Exhaustive scan over an in-memory corpus. A document's score is the
/// number of distinct query terms occurring in its title or body
/// (case-folded, punctuation ignored); zero-score documents are not returned
/// and ties go to the smaller doc_id.
class OfflineCorpusConnector final : public SearchConnector {
  public:
    /// Throws FormatError on duplicate doc_id.
    explicit OfflineCorpusConnector(std::vector<Document> corpus);

    [[nodiscard]] std::vector<Document> search(const std::string& query, std::size_t max_documents) override;
    [[nodiscard]] const std::vector<Document>& corpus() const noexcept { return corpus_; }

  private:
    std::vector<Document> corpus_;
    std::vector<std::vector<std::string>> terms_;  // sorted unique terms per document
};

/// One JSON object per line: {"doc_id", "title"?, "body", "snippet"?, "url"?}.
[[nodiscard]] std::vector<Document> load_corpus(const std::filesystem::path& path);

/// Remote search service.
///   POST {"query": str, "max_documents": int}
///   ->   {"documents": [{"doc_id", "title"?, "body"?, "snippet"?, "url"?}, ...]}
/// Documents returned without a body but with a url are fetched with GET,
/// concurrently; results keep the service's order.
class RemoteSearchConnector final : public SearchConnector {
  public:
    RemoteSearchConnector(HttpEndpoint endpoint, RetryPolicy retry)
        : endpoint_(std::move(endpoint)), retry_(std::move(retry)) {}

    [[nodiscard]] std::vector<Document> search(const std::string& query, std::size_t max_documents) override;

  private:
    HttpEndpoint endpoint_;
    RetryPolicy retry_;
};

/// Issues the keywords as one space-joined query. Throws Error when the
/// keyword set is empty.
[[nodiscard]] std::vector<Document> search_documents(const KeywordSet& keywords, SearchConnector& connector,
                                                     std::size_t max_documents);

}  // namespace convqa
