#include "convqa/tokenizer.hpp"

#include <cctype>

#include "convqa/error.hpp"

namespace convqa {
namespace {

struct Codepoint {
    char32_t value = 0;
    std::size_t length = 1;
};

// Invalid sequences decode as a single byte with value U+FFFD.
Codepoint decode(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (i + len > s.size()) return {0xFFFD, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

bool is_space(char32_t c) {
    switch (c) {
        case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
        case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
        case 0x205F: case 0x3000: case 0xFEFF:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200B;
    }
}

bool is_cjk(char32_t c) {
    return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
           (c >= 0x20000 && c <= 0x2FA1F) || (c >= 0xF900 && c <= 0xFAFF) ||
           (c >= 0x3040 && c <= 0x30FF) || (c >= 0xAC00 && c <= 0xD7AF) ||
           (c >= 0x3100 && c <= 0x312F);
}

bool is_punct(char32_t c) {
    if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
    if (c >= 0x00A1 && c <= 0x00BF) return true;
    if (c == 0x00D7 || c == 0x00F7) return true;
    if (c >= 0x2010 && c <= 0x206F) return true;
    if (c >= 0x3001 && c <= 0x303F) return true;
    if (c >= 0xFE30 && c <= 0xFE6F) return true;
    if (c >= 0xFF01 && c <= 0xFF65) {
        // fullwidth digits and letters are word characters
        const bool alnum = (c >= 0xFF10 && c <= 0xFF19) || (c >= 0xFF21 && c <= 0xFF3A) ||
                           (c >= 0xFF41 && c <= 0xFF5A);
        return !alnum;
    }
    if (c >= 0x2190 && c <= 0x2BFF) return true;  // arrows, math, box drawing, symbols
    if (c == 0xFFFD) return true;                 // also every undecodable byte
    return false;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, TokenizerMode mode) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t word_start = std::string_view::npos;
    auto flush_word = [&](std::size_t end) {
        if (word_start != std::string_view::npos) {
            out.push_back({text.substr(word_start, end - word_start), word_start, TokenKind::word});
            word_start = std::string_view::npos;
        }
    };
    while (i < text.size()) {
        const Codepoint cp = decode(text, i);
        if (is_space(cp.value)) {
            flush_word(i);
        } else if (mode == TokenizerMode::whitespace) {
            if (word_start == std::string_view::npos) word_start = i;
        } else if (mode == TokenizerMode::character) {
            const TokenKind kind = is_cjk(cp.value)     ? TokenKind::cjk
                                   : is_punct(cp.value) ? TokenKind::punct
                                                        : TokenKind::word;
            out.push_back({text.substr(i, cp.length), i, kind});
        } else if (is_cjk(cp.value)) {
            flush_word(i);
            out.push_back({text.substr(i, cp.length), i, TokenKind::cjk});
        } else if (is_punct(cp.value)) {
            flush_word(i);
            out.push_back({text.substr(i, cp.length), i, TokenKind::punct});
        } else if (word_start == std::string_view::npos) {
            word_start = i;
        }
        i += cp.length;
    }
    flush_word(text.size());
    return out;
}

std::vector<std::string> token_strings(std::string_view text, TokenizerMode mode) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(text, mode)) out.emplace_back(t.text);
    return out;
}

std::size_t count_tokens(std::string_view text, TokenizerMode mode) { return tokenize(text, mode).size(); }

std::vector<std::string> match_terms(std::string_view text) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(text, TokenizerMode::unicode)) {
        if (t.kind == TokenKind::punct) continue;
        std::string s(t.text);
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(s));
    }
    return out;
}

TokenizerMode parse_tokenizer_mode(std::string_view name) {
    if (name == "unicode") return TokenizerMode::unicode;
    if (name == "whitespace") return TokenizerMode::whitespace;
    if (name == "character") return TokenizerMode::character;
    throw FormatError("unknown tokenizer mode '" + std::string(name) + "'");
}

std::string_view to_string(TokenizerMode mode) {
    switch (mode) {
        case TokenizerMode::unicode: return "unicode";
        case TokenizerMode::whitespace: return "whitespace";
        case TokenizerMode::character: return "character";
    }
    return "unicode";
}

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    while (begin < text.size()) {
        const Codepoint cp = decode(text, begin);
        if (!is_space(cp.value)) break;
        begin += cp.length;
    }
    std::size_t end = begin;
    std::size_t i = begin;
    while (i < text.size()) {
        const Codepoint cp = decode(text, i);
        i += cp.length;
        if (!is_space(cp.value)) end = i;
    }
    return text.substr(begin, end - begin);
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const Codepoint cp = decode(text, i);
        if (is_space(cp.value)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.append(text.substr(i, cp.length));
        }
        i += cp.length;
    }
    return out;
}

}  // namespace convqa
