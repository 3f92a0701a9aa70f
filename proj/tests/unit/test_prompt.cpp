#include <gtest/gtest.h>

#include "convqa/error.hpp"
#include "convqa/prompt.hpp"

using namespace convqa;

TEST(PromptTemplate, FindsIdentifierPlaceholdersOnly) {
    const PromptTemplate t("t", "A {x} b {y_2} {not valid} {} {{z}} {3d}");
    EXPECT_EQ(t.required_placeholders(), (std::set<std::string>{"x", "y_2", "z"}));
}

TEST(PromptTemplate, RendersLiterallyInOnePass) {
    const PromptTemplate t("t", "Q: {question} / {context}!");
    EXPECT_EQ(t.render({{"question", "{context}"}, {"context", "ctx"}}), "Q: {context} / ctx!");
}

TEST(PromptTemplate, MissingBindingThrows) {
    const PromptTemplate t("t", "{a}{b}");
    try {
        (void)t.render({{"a", "1"}});
        FAIL();
    } catch (const TemplateError& e) {
        EXPECT_STREQ(e.what(), "missing placeholder b");
    }
}

TEST(PromptTemplate, ExtraBindingsAreIgnored) {
    EXPECT_EQ(PromptTemplate("t", "x").render({{"unused", "y"}}), "x");
}

TEST(TemplateSet, DefaultsDeclareTheirPlaceholders) {
    const TemplateSet set;
    using S = std::set<std::string>;
    EXPECT_EQ(set.get(templates::reformulate).required_placeholders(), (S{"context", "question"}));
    EXPECT_EQ(set.get(templates::extract_keywords).required_placeholders(), (S{"context", "question", "refined"}));
    EXPECT_EQ(set.get(templates::respond_with_self_check).required_placeholders(),
              (S{"context", "paragraphs", "question"}));
    EXPECT_EQ(set.get(templates::respond_plain).required_placeholders(), (S{"context", "paragraphs", "question"}));
    EXPECT_EQ(set.get(templates::pairwise_judge).required_placeholders(),
              (S{"context", "question", "answer_1", "answer_2"}));
}

TEST(TemplateSet, ReplaceAndUnknown) {
    TemplateSet set;
    set.set({templates::reformulate, "R {question}"});
    EXPECT_EQ(set.get(templates::reformulate).render({{"question", "q"}}), "R q");
    EXPECT_FALSE(set.contains("nope"));
    EXPECT_THROW((void)set.get("nope"), TemplateError);
}
