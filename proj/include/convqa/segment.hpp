#pragma once

#include <vector>

#include "convqa/search.hpp"
#include "convqa/tokenizer.hpp"
#include "convqa/types.hpp"

namespace convqa {

inline constexpr std::size_t kMaxParagraphTokens = 512;

/// Splits a document body into paragraphs at blank lines. Blocks longer than
/// `max_tokens` are packed into fragments at sentence ends (. ! ? 。！？ …);
/// a single sentence over the limit is cut at token boundaries. Paragraphs
/// are trimmed, never empty, and numbered from 0.
[[nodiscard]] std::vector<Paragraph> segment_paragraphs(const Document& document,
                                                        std::size_t max_tokens = kMaxParagraphTokens,
                                                        TokenizerMode mode = TokenizerMode::unicode);

}  // namespace convqa
