#include "convqa/search.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>

#include "convqa/codec.hpp"
#include "convqa/error.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {
namespace {

std::vector<std::string> unique_terms(std::string_view text) {
    std::vector<std::string> terms = match_terms(text);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

Document decode_document(const Json& j) {
    Document d;
    d.doc_id = codec::require_string(j, "doc_id");
    d.title = codec::optional_string(j, "title");
    d.body = codec::optional_string(j, "body").value_or("");
    d.snippet = codec::optional_string(j, "snippet");
    d.url = codec::optional_string(j, "url");
    return d;
}

}  // namespace

OfflineCorpusConnector::OfflineCorpusConnector(std::vector<Document> corpus) : corpus_(std::move(corpus)) {
    std::set<std::string> ids;
    terms_.reserve(corpus_.size());
    for (const Document& d : corpus_) {
        if (!ids.insert(d.doc_id).second) throw FormatError("duplicate doc_id '" + d.doc_id + "' in corpus");
        terms_.push_back(unique_terms(d.title.value_or("") + "\n" + d.body));
    }
}

std::vector<Document> OfflineCorpusConnector::search(const std::string& query, std::size_t max_documents) {
    const std::vector<std::string> query_terms = unique_terms(query);
    struct Hit {
        std::size_t index;
        std::size_t overlap;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
        std::size_t overlap = 0;
        for (const std::string& t : query_terms) {
            if (std::binary_search(terms_[i].begin(), terms_[i].end(), t)) ++overlap;
        }
        if (overlap > 0) hits.push_back({i, overlap});
    }
    std::sort(hits.begin(), hits.end(), [this](const Hit& a, const Hit& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        return corpus_[a.index].doc_id < corpus_[b.index].doc_id;
    });
    if (hits.size() > max_documents) hits.resize(max_documents);

    std::vector<Document> out;
    out.reserve(hits.size());
    for (const Hit& h : hits) {
        Document d = corpus_[h.index];
        d.rank = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file " + path.string());
    std::vector<Document> docs;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            docs.push_back(decode_document(Json::parse(line)));
        } catch (const std::exception& e) {
            throw FormatError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return docs;
}

std::vector<Document> RemoteSearchConnector::search(const std::string& query, std::size_t max_documents) {
    const Json request{{"query", query}, {"max_documents", max_documents}};
    const HttpResponse res = post_json(endpoint_, request.dump(), retry_);
    const Json reply = Json::parse(res.body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("documents") || !reply["documents"].is_array()) {
        throw TransportError(endpoint_.url + ": malformed search response", res.status);
    }

    std::vector<Document> docs;
    for (const Json& j : reply["documents"]) {
        if (docs.size() >= max_documents) break;
        Document d = decode_document(j);
        d.rank = static_cast<int>(docs.size()) + 1;
        docs.push_back(std::move(d));
    }

    // Fetch missing bodies concurrently; futures are joined in rank order.
    std::vector<std::pair<std::size_t, std::future<std::string>>> fetches;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (!docs[i].body.empty() || !docs[i].url) continue;
        HttpEndpoint page{*docs[i].url, endpoint_.headers, endpoint_.timeout_seconds};
        fetches.emplace_back(i, std::async(std::launch::async, [page, retry = retry_] {
                                 return http_get(page, retry).body;
                             }));
    }
    for (auto& [i, f] : fetches) docs[i].body = f.get();
    return docs;
}

std::vector<Document> search_documents(const KeywordSet& keywords, SearchConnector& connector,
                                       std::size_t max_documents) {
    if (keywords.empty()) throw Error("search requires at least one keyword");
    return connector.search(keywords.joined(), max_documents);
}

}  // namespace convqa
