#include "convqa/prompt.hpp"

#include <cctype>

#include "convqa/error.hpp"

namespace convqa {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of the placeholder starting at `i` (including braces), or 0.
std::size_t placeholder_at(const std::string& text, std::size_t i) {
    if (text[i] != '{' || i + 2 >= text.size() || !ident_start(text[i + 1])) return 0;
    std::size_t j = i + 2;
    while (j < text.size() && ident_char(text[j])) ++j;
    if (j >= text.size() || text[j] != '}') return 0;
    return j - i + 1;
}

const char* const kReformulate =
    "Rewrite the final question so that it can be understood without the conversation. "
    "Resolve pronouns and omitted references using the history. "
    "Reply with the rewritten question on a single line.\n"
    "\n"
    "Conversation:\n"
    "{context}"
    "Question to rewrite: {question}\n"
    "Rewritten:";

const char* const kExtractKeywords =
    "Extract the search keywords that capture the intent of the rewritten question. "
    "Reply with the keywords separated by semicolons.\n"
    "\n"
    "Conversation:\n"
    "{context}"
    "Original question: {question}\n"
    "Rewritten question: {refined}\n"
    "Keywords:";

const char* const kRespondWithSelfCheck =
    "Answer the final question of the conversation.\n"
    "First judge every numbered evidence paragraph on its own line, written as \"[k] helpful\" or "
    "\"[k] not helpful\". Then write \"ANSWER:\" followed by the answer. Use only the helpful "
    "paragraphs and your own knowledge.\n"
    "\n"
    "Conversation:\n"
    "{context}"
    "{paragraphs}"
    "Current question: {question}\n";

const char* const kRespondPlain =
    "Answer the final question of the conversation using the numbered evidence paragraphs and your "
    "own knowledge.\n"
    "\n"
    "Conversation:\n"
    "{context}"
    "{paragraphs}"
    "Current question: {question}\n"
    "Answer:";

const char* const kPairwiseJudge =
    "Two assistants answered the final question of a conversation. Decide which answer is more "
    "helpful, correct and relevant. Reply with exactly one of: A, B, tie.\n"
    "\n"
    "Conversation:\n"
    "{context}"
    "Question: {question}\n"
    "\n"
    "[Answer A]\n"
    "{answer_1}\n"
    "\n"
    "[Answer B]\n"
    "{answer_2}\n"
    "\n"
    "Verdict:";

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string text) : name_(std::move(name)), text_(std::move(text)) {
    for (std::size_t i = 0; i < text_.size(); ++i) {
        if (std::size_t len = placeholder_at(text_, i)) {
            required_.insert(text_.substr(i + 1, len - 2));
            i += len - 1;
        }
    }
}

std::string PromptTemplate::render(const Bindings& bindings) const {
    for (const std::string& name : required_) {
        if (bindings.find(name) == bindings.end()) throw TemplateError("missing placeholder " + name);
    }
    std::string out;
    out.reserve(text_.size());
    for (std::size_t i = 0; i < text_.size(); ++i) {
        if (std::size_t len = placeholder_at(text_, i)) {
            out += bindings.at(text_.substr(i + 1, len - 2));
            i += len - 1;
        } else {
            out.push_back(text_[i]);
        }
    }
    return out;
}

TemplateSet::TemplateSet() {
    set({templates::reformulate, kReformulate});
    set({templates::extract_keywords, kExtractKeywords});
    set({templates::respond_with_self_check, kRespondWithSelfCheck});
    set({templates::respond_plain, kRespondPlain});
    set({templates::pairwise_judge, kPairwiseJudge});
}

void TemplateSet::set(PromptTemplate tmpl) {
    std::string key = tmpl.name();
    templates_.insert_or_assign(std::move(key), std::move(tmpl));
}

const PromptTemplate& TemplateSet::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw TemplateError("unknown template " + name);
    return it->second;
}

}  // namespace convqa
