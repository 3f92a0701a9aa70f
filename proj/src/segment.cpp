#include "convqa/segment.hpp"

#include <string_view>

namespace convqa {
namespace {

bool ends_sentence(const Token& t) {
    if (t.kind != TokenKind::punct) return false;
    static constexpr std::string_view kEnds[] = {".", "!", "?", "\xE3\x80\x82", "\xEF\xBC\x81", "\xEF\xBC\x9F",
                                                 "\xE2\x80\xA6"};
    for (std::string_view e : kEnds) {
        if (t.text == e) return true;
    }
    return false;
}

// Byte ranges [begin, end) of the fragments of one over-long block.
std::vector<std::pair<std::size_t, std::size_t>> split_block(std::string_view block, std::size_t max_tokens,
                                                             TokenizerMode mode) {
    const std::vector<Token> tokens = tokenize(block, mode);
    auto token_end = [&](std::size_t i) { return tokens[i].offset + tokens[i].text.size(); };

    // sentence spans as token index ranges [first, last]
    std::vector<std::pair<std::size_t, std::size_t>> sentences;
    std::size_t first = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const bool boundary = ends_sentence(tokens[i]) && (i + 1 == tokens.size() || !ends_sentence(tokens[i + 1]));
        if (boundary || i + 1 == tokens.size()) {
            sentences.emplace_back(first, i);
            first = i + 1;
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> out;  // token index ranges
    std::size_t frag_first = 0;
    std::size_t frag_count = 0;
    auto close = [&](std::size_t last) {
        out.emplace_back(frag_first, last);
        frag_first = last + 1;
        frag_count = 0;
    };
    for (const auto& [s_first, s_last] : sentences) {
        const std::size_t len = s_last - s_first + 1;
        if (frag_count > 0 && frag_count + len > max_tokens) close(s_first - 1);
        if (len > max_tokens) {
            std::size_t start = s_first;
            while (s_last + 1 - start > max_tokens) {
                close(start + max_tokens - 1);
                start += max_tokens;
            }
            frag_count = s_last + 1 - start;
        } else {
            frag_count += len;
        }
    }
    if (frag_count > 0) close(tokens.size() - 1);

    std::vector<std::pair<std::size_t, std::size_t>> bytes;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const std::size_t begin = k == 0 ? 0 : tokens[out[k].first].offset;
        const std::size_t end = k + 1 == out.size() ? block.size() : token_end(out[k].second);
        bytes.emplace_back(begin, end);
    }
    return bytes;
}

}  // namespace

std::vector<Paragraph> segment_paragraphs(const Document& document, std::size_t max_tokens, TokenizerMode mode) {
    std::vector<Paragraph> out;
    auto emit = [&](std::string_view text) {
        const std::string_view t = trim(text);
        if (t.empty()) return;
        Paragraph p;
        p.text = std::string(t);
        p.doc_id = document.doc_id;
        p.index_in_doc = static_cast<int>(out.size());
        p.doc_rank = document.rank;
        p.source_url = document.url;
        out.push_back(std::move(p));
    };
    auto emit_block = [&](std::string_view block) {
        block = trim(block);
        if (block.empty()) return;
        if (count_tokens(block, mode) <= max_tokens) {
            emit(block);
            return;
        }
        for (const auto& [b, e] : split_block(block, max_tokens, mode)) emit(block.substr(b, e - b));
    };

    const std::string_view body = document.body;
    std::size_t block_begin = 0;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const std::size_t nl = body.find('\n', pos);
        const std::size_t line_end = nl == std::string_view::npos ? body.size() : nl;
        if (trim(body.substr(pos, line_end - pos)).empty()) {
            emit_block(body.substr(block_begin, pos - block_begin));
            block_begin = line_end + 1;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (block_begin < body.size()) emit_block(body.substr(block_begin));
    return out;
}

}  // namespace convqa
