#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace convqa {

/// How text is cut into tokens for statistics, segmentation, retrieval and
/// metrics.
///
/// - `unicode` (default): every CJK ideograph / kana / hangul syllable is one
///   token, a contiguous run of letters and digits is one token, every
///   punctuation mark is its own token, whitespace separates.
/// - `whitespace`: maximal runs of non-whitespace.
/// - `character`: every non-whitespace codepoint is one token.
enum class TokenizerMode { unicode, whitespace, character };

enum class TokenKind { word, cjk, punct };

struct Token {
    std::string_view text;
    std::size_t offset = 0;  // byte offset into the tokenized string
    TokenKind kind = TokenKind::word;
};

/// Tokens reference `text`; keep it alive while they are in use.
[[nodiscard]] std::vector<Token> tokenize(std::string_view text, TokenizerMode mode = TokenizerMode::unicode);

/// Token surfaces as owned strings.
[[nodiscard]] std::vector<std::string> token_strings(std::string_view text,
                                                     TokenizerMode mode = TokenizerMode::unicode);

[[nodiscard]] std::size_t count_tokens(std::string_view text, TokenizerMode mode = TokenizerMode::unicode);

/// Like `token_strings`, but drops punctuation and ASCII-lowercases; used for
/// lexical matching (offline search, lexical rerank).
[[nodiscard]] std::vector<std::string> match_terms(std::string_view text);

[[nodiscard]] TokenizerMode parse_tokenizer_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(TokenizerMode mode);

/// Trim ASCII and common Unicode whitespace from both ends.
[[nodiscard]] std::string_view trim(std::string_view text);

/// Trim and collapse internal whitespace runs to one ASCII space.
[[nodiscard]] std::string normalize_whitespace(std::string_view text);

}  // namespace convqa
