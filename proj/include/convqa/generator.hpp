#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "convqa/backend.hpp"
#include "convqa/prompt.hpp"
#include "convqa/types.hpp"

namespace convqa {

struct GeneratorOptions {
    std::size_t max_context_turns = 10;
    int max_output_tokens = 512;
    double temperature = 0.0;
};

/// "Evidence paragraphs:\n[k] text\n...\n\n" numbered by final_rank, or ""
/// when there is no evidence.
[[nodiscard]] std::string format_evidence(const std::vector<ScoredParagraph>& p_top);

struct ParsedSelfCheck {
    std::vector<HelpfulnessVerdict> verdicts;  // sorted by rank, one per rank at most
    std::string response;
    bool has_answer_marker = false;
};

/// Reads "[k] helpful" / "[k] not helpful" lines (case-insensitive, optional
/// trailing rationale) before the "ANSWER:" marker; the response is the
/// trimmed text after the marker. Ranks outside 1..expected_count are
/// ignored, and the first verdict for a rank wins. Without a marker the whole
/// trimmed text is the response and no verdicts are returned.
[[nodiscard]] ParsedSelfCheck parse_self_check_output(std::string_view raw, std::size_t expected_count);

/// Paragraphs judged helpful, in their original order. Paragraphs with no
/// verdict are kept.
[[nodiscard]] std::vector<ScoredParagraph> filter_helpful(const std::vector<ScoredParagraph>& p_top,
                                                          const std::vector<HelpfulnessVerdict>& verdicts);

struct GenerationOutcome {
    std::vector<HelpfulnessVerdict> verdicts;  // empty when self-check is off
    std::string response;
    std::vector<ScoredParagraph> helpful;  // evidence that survived the check
    std::string raw_output;
    std::vector<std::string> flags;  // "self_check_unparseable", "self_check_incomplete"
};

/// One model call producing verdicts and the answer (or just the answer when
/// self-check is disabled). With self-check on, an unparseable verdict block
/// keeps every paragraph (each gets a helpful verdict) and is flagged;
/// missing verdicts are filled the same way. Backend failures surface as
/// StageError(stage "generate", role "responder"). Every member of `p_top`
/// must carry a final_rank.
[[nodiscard]] GenerationOutcome self_check_and_respond(const Conversation& context, std::string_view question,
                                                       const std::vector<ScoredParagraph>& p_top,
                                                       TextBackend& backend, const TemplateSet& templates,
                                                       bool self_check_enabled, const GeneratorOptions& options = {});

}  // namespace convqa
