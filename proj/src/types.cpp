#include "convqa/types.hpp"

#include <algorithm>

#include "convqa/error.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {

void Conversation::append(Turn turn) {
    if (trim(turn.question).empty()) throw FormatError("turn question must not be blank");
    turns_.push_back(std::move(turn));
}

KeywordSet::KeywordSet(const std::vector<std::string>& raw) {
    for (const std::string& k : raw) {
        std::string norm = normalize_whitespace(k);
        if (norm.empty()) continue;
        if (std::find(keywords_.begin(), keywords_.end(), norm) != keywords_.end()) continue;
        keywords_.push_back(std::move(norm));
    }
}

std::string KeywordSet::joined() const {
    std::string out;
    for (const std::string& k : keywords_) {
        if (!out.empty()) out.push_back(' ');
        out += k;
    }
    return out;
}

}  // namespace convqa
