#include "convqa/generator.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "convqa/error.hpp"
#include "convqa/refiner.hpp"
#include "convqa/tokenizer.hpp"
#include "convqa/trace.hpp"

namespace convqa {
namespace {

constexpr std::string_view kAnswerMarker = "ANSWER:";

const std::regex& verdict_pattern() {
    static const std::regex re(R"(^\s*\[\s*(\d+)\s*\]\s*(not[\s_-]*helpful|unhelpful|helpful)\b\s*[:.,-]?\s*(.*)$)",
                               std::regex::icase);
    return re;
}

}  // namespace

std::string format_evidence(const std::vector<ScoredParagraph>& p_top) {
    if (p_top.empty()) return "";
    std::string out = "Evidence paragraphs:\n";
    for (const ScoredParagraph& p : p_top) {
        out += "[" + std::to_string(p.final_rank.value_or(0)) + "] " + normalize_whitespace(p.paragraph.text) + "\n";
    }
    out += "\n";
    return out;
}

ParsedSelfCheck parse_self_check_output(std::string_view raw, std::size_t expected_count) {
    ParsedSelfCheck out;
    const auto marker = raw.find(kAnswerMarker);
    if (marker == std::string_view::npos) {
        out.response = std::string(trim(raw));
        return out;
    }
    out.has_answer_marker = true;
    out.response = std::string(trim(raw.substr(marker + kAnswerMarker.size())));

    std::set<int> seen;
    std::string_view block = raw.substr(0, marker);
    while (!block.empty()) {
        const auto nl = block.find('\n');
        const std::string line(block.substr(0, nl));
        std::smatch m;
        if (std::regex_match(line, m, verdict_pattern())) {
            const long rank = std::stol(m[1].str());
            if (rank >= 1 && static_cast<std::size_t>(rank) <= expected_count && seen.insert(static_cast<int>(rank)).second) {
                std::string label = m[2].str();
                std::transform(label.begin(), label.end(), label.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                HelpfulnessVerdict v{static_cast<int>(rank), label == "helpful", std::nullopt};
                if (std::string rationale(trim(m[3].str())); !rationale.empty()) v.rationale = std::move(rationale);
                out.verdicts.push_back(std::move(v));
            }
        }
        if (nl == std::string_view::npos) break;
        block.remove_prefix(nl + 1);
    }
    std::sort(out.verdicts.begin(), out.verdicts.end(),
              [](const HelpfulnessVerdict& a, const HelpfulnessVerdict& b) { return a.paragraph_rank < b.paragraph_rank; });
    return out;
}

std::vector<ScoredParagraph> filter_helpful(const std::vector<ScoredParagraph>& p_top,
                                            const std::vector<HelpfulnessVerdict>& verdicts) {
    std::vector<ScoredParagraph> out;
    for (const ScoredParagraph& p : p_top) {
        const auto it = std::find_if(verdicts.begin(), verdicts.end(), [&](const HelpfulnessVerdict& v) {
            return p.final_rank && v.paragraph_rank == *p.final_rank;
        });
        if (it == verdicts.end() || it->helpful) out.push_back(p);
    }
    return out;
}

GenerationOutcome self_check_and_respond(const Conversation& context, std::string_view question,
                                         const std::vector<ScoredParagraph>& p_top, TextBackend& backend,
                                         const TemplateSet& templates, bool self_check_enabled,
                                         const GeneratorOptions& options) {
    for (const ScoredParagraph& p : p_top) {
        if (!p.final_rank) throw Error("P_top member without final_rank");
    }

    GenerationOutcome out;
    try {
        const PromptTemplate& tmpl =
            templates.get(self_check_enabled ? templates::respond_with_self_check : templates::respond_plain);
        const std::string prompt = tmpl.render({{"context", serialize_context(context, options.max_context_turns)},
                                                {"paragraphs", format_evidence(p_top)},
                                                {"question", std::string(question)}});
        out.raw_output =
            backend.generate({BackendRole::responder, prompt, options.max_output_tokens, options.temperature});
    } catch (const std::exception& e) {
        throw StageError(stage::generate, std::string(to_string(BackendRole::responder)), e.what());
    }

    if (!self_check_enabled) {
        out.response = out.raw_output;
        out.helpful = p_top;
        return out;
    }

    ParsedSelfCheck parsed = parse_self_check_output(out.raw_output, p_top.size());
    out.response = std::move(parsed.response);
    if (!p_top.empty()) {
        if (parsed.verdicts.empty()) {
            out.flags.emplace_back("self_check_unparseable");
        } else if (parsed.verdicts.size() < p_top.size()) {
            out.flags.emplace_back("self_check_incomplete");
        }
        for (const ScoredParagraph& p : p_top) {
            const int rank = *p.final_rank;
            const auto it = std::find_if(parsed.verdicts.begin(), parsed.verdicts.end(),
                                         [&](const HelpfulnessVerdict& v) { return v.paragraph_rank == rank; });
            if (it != parsed.verdicts.end()) {
                out.verdicts.push_back(*it);
            } else {
                out.verdicts.push_back({rank, true, std::string("no verdict emitted; kept")});
            }
        }
        std::sort(out.verdicts.begin(), out.verdicts.end(),
                  [](const HelpfulnessVerdict& a, const HelpfulnessVerdict& b) { return a.paragraph_rank < b.paragraph_rank; });
    }
    out.helpful = filter_helpful(p_top, out.verdicts);
    return out;
}

}  // namespace convqa
