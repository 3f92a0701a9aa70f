#include "convqa/refiner.hpp"

#include <array>

#include "convqa/error.hpp"
#include "convqa/tokenizer.hpp"
#include "convqa/trace.hpp"

namespace convqa {
namespace {

template <typename Fn>
std::string call_stage(const char* stage_name, BackendRole role, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage_name, std::string(to_string(role)), e.what());
    }
}

}  // namespace

std::string serialize_context(const Conversation& context, std::size_t max_turns) {
    const auto& turns = context.turns();
    const std::size_t first = turns.size() > max_turns ? turns.size() - max_turns : 0;
    std::string out;
    for (std::size_t i = first; i < turns.size(); ++i) {
        out += "Q: " + normalize_whitespace(turns[i].question) + "\n";
        out += "A: " + normalize_whitespace(turns[i].response) + "\n";
    }
    return out;
}

Reformulation reformulate(const Conversation& context, std::string_view question, TextBackend& backend,
                          const TemplateSet& templates, const RefinerOptions& options) {
    if (trim(question).empty()) throw Error("question must not be blank");
    Reformulation result;
    result.question.source_turn_index = static_cast<int>(context.size()) + 1;
    result.raw_output = call_stage(stage::refine, BackendRole::refiner, [&] {
        const std::string prompt = templates.get(templates::reformulate)
                                       .render({{"context", serialize_context(context, options.max_context_turns)},
                                                {"question", std::string(question)}});
        return backend.generate({BackendRole::refiner, prompt, options.max_output_tokens, options.temperature});
    });

    std::string_view rest = result.raw_output;
    std::string first_line;
    int non_blank_lines = 0;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        const std::string_view line = trim(rest.substr(0, nl));
        if (!line.empty()) {
            if (non_blank_lines++ == 0) first_line = std::string(line);
        }
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    if (non_blank_lines > 1) result.flags.emplace_back("multi_line_output");
    if (first_line.empty()) {
        result.flags.emplace_back("empty_output_fallback");
        result.question.text = std::string(trim(question));
    } else {
        result.question.text = std::move(first_line);
    }
    return result;
}

KeywordExtraction extract_keywords(const Conversation& context, std::string_view question,
                                   const RefinedQuestion& refined, TextBackend& backend,
                                   const TemplateSet& templates, const RefinerOptions& options) {
    if (trim(refined.text).empty()) throw Error("refined question must not be blank");
    KeywordExtraction result;
    result.raw_output = call_stage(stage::extract, BackendRole::keyword_extractor, [&] {
        const std::string prompt = templates.get(templates::extract_keywords)
                                       .render({{"context", serialize_context(context, options.max_context_turns)},
                                                {"question", std::string(question)},
                                                {"refined", refined.text}});
        return backend.generate(
            {BackendRole::keyword_extractor, prompt, options.max_output_tokens, options.temperature});
    });
    result.keywords = parse_keyword_output(result.raw_output);
    if (result.keywords.empty()) {
        result.flags.emplace_back("empty_output_fallback");
        result.keywords = KeywordSet({refined.text});
    }
    return result;
}

KeywordSet parse_keyword_output(std::string_view raw) {
    static constexpr std::array<std::string_view, 3> kWideSeparators{"\xEF\xBC\x9B",  // ；
                                                                     "\xEF\xBC\x8C",  // ，
                                                                     "\xE3\x80\x81"};  // 、
    std::vector<std::string> parts;
    std::string current;
    std::size_t i = 0;
    while (i < raw.size()) {
        const char c = raw[i];
        if (c == ';' || c == ',' || c == '\n') {
            parts.push_back(std::move(current));
            current.clear();
            ++i;
            continue;
        }
        bool wide = false;
        for (std::string_view sep : kWideSeparators) {
            if (raw.substr(i, sep.size()) == sep) {
                parts.push_back(std::move(current));
                current.clear();
                i += sep.size();
                wide = true;
                break;
            }
        }
        if (!wide) {
            current.push_back(c);
            ++i;
        }
    }
    parts.push_back(std::move(current));
    return KeywordSet(parts);
}

}  // namespace convqa
