#pragma once

#include <map>
#include <set>
#include <string>

namespace convqa {

using Bindings = std::map<std::string, std::string>;

/// Prompt text with `{name}` placeholders. A placeholder is a brace-enclosed
/// identifier (`[A-Za-z_][A-Za-z0-9_]*`); any other brace is literal text.
class PromptTemplate {
  public:
    PromptTemplate() = default;
    PromptTemplate(std::string name, std::string text);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] const std::set<std::string>& required_placeholders() const noexcept { return required_; }

    /// Single-pass substitution: bound values are inserted literally and are
    /// never re-expanded. Throws TemplateError("missing placeholder <name>").
    [[nodiscard]] std::string render(const Bindings& bindings) const;

  private:
    std::string name_;
    std::string text_;
    std::set<std::string> required_;
};

/// Named templates used by the pipeline and the judge. Starts with the
/// built-in defaults; entries can be replaced from config.
class TemplateSet {
  public:
    TemplateSet();

    void set(PromptTemplate tmpl);
    [[nodiscard]] const PromptTemplate& get(const std::string& name) const;
    [[nodiscard]] bool contains(const std::string& name) const { return templates_.count(name) != 0; }
    [[nodiscard]] const std::map<std::string, PromptTemplate>& all() const noexcept { return templates_; }

  private:
    std::map<std::string, PromptTemplate> templates_;
};

namespace templates {
inline constexpr const char* reformulate = "reformulate";
inline constexpr const char* extract_keywords = "extract_keywords";
inline constexpr const char* respond_with_self_check = "respond_with_self_check";
inline constexpr const char* respond_plain = "respond_plain";
inline constexpr const char* pairwise_judge = "pairwise_judge";
}  // namespace templates

}  // namespace convqa
