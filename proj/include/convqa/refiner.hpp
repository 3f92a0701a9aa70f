#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "convqa/backend.hpp"
#include "convqa/prompt.hpp"
#include "convqa/types.hpp"

namespace convqa {

struct RefinerOptions {
    std::size_t max_context_turns = 10;  // oldest turns are dropped first
    int max_output_tokens = 128;
    double temperature = 0.0;
};

/// "Q: ..." / "A: ..." lines for the last `max_turns` turns, oldest first,
/// each line newline-terminated. Empty for an empty conversation.
[[nodiscard]] std::string serialize_context(const Conversation& context, std::size_t max_turns);

struct Reformulation {
    RefinedQuestion question;
    std::string raw_output;
    std::vector<std::string> flags;  // "multi_line_output", "empty_output_fallback"
};

/// Context-resolved rewrite of `question`. The first non-blank line of the
/// model output is used; a blank output falls back to the question itself.
/// Backend failures surface as StageError(stage "refine", role "refiner").
[[nodiscard]] Reformulation reformulate(const Conversation& context, std::string_view question, TextBackend& backend,
                                        const TemplateSet& templates, const RefinerOptions& options = {});

struct KeywordExtraction {
    KeywordSet keywords;
    std::string raw_output;
    std::vector<std::string> flags;  // "empty_output_fallback"
};

/// Keywords for the refined question; when the model yields none, the refined
/// question text becomes the single keyword.
/// Backend failures surface as StageError(stage "extract", role "keyword_extractor").
[[nodiscard]] KeywordExtraction extract_keywords(const Conversation& context, std::string_view question,
                                                 const RefinedQuestion& refined, TextBackend& backend,
                                                 const TemplateSet& templates, const RefinerOptions& options = {});

/// Splits on ';', '；', ',', '，', '、' and newlines, trims, drops empties and
/// keeps the first occurrence of duplicates.
[[nodiscard]] KeywordSet parse_keyword_output(std::string_view raw);

}  // namespace convqa
