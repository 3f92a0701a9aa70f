#include <gtest/gtest.h>

#include <random>

#include "convqa/error.hpp"
#include "convqa/refiner.hpp"

using namespace convqa;

namespace {

using Strings = std::vector<std::string>;

// Records every prompt and answers with a fixed string.
class FixedBackend final : public TextBackend {
  public:
    explicit FixedBackend(std::string reply) : reply_(std::move(reply)) {}
    std::string generate(const GenerationRequest& r) override {
        prompts.push_back(r.prompt);
        roles.push_back(r.role);
        return reply_;
    }
    Strings prompts;
    std::vector<BackendRole> roles;

  private:
    std::string reply_;
};

class FailingBackend final : public TextBackend {
  public:
    std::string generate(const GenerationRequest&) override { throw TransportError("down", 503); }
};

Conversation hunayn() {
    return Conversation("c", {{"What was the Battle of Hunayn?", "A battle fought by Muhammad and his followers."}});
}

}  // namespace

TEST(SerializeContext, AlternatingLinesOldestFirst) {
    const Conversation c("c", {{"q1", "a1"}, {"q2  two", "a2\nmore"}});
    EXPECT_EQ(serialize_context(c, 10), "Q: q1\nA: a1\nQ: q2 two\nA: a2 more\n");
    EXPECT_EQ(serialize_context(c, 1), "Q: q2 two\nA: a2 more\n");
    EXPECT_EQ(serialize_context(Conversation("e"), 10), "");
}

TEST(SerializeContext, KeepsOnlyTheLastTurns) {
    Conversation c("c");
    for (int i = 1; i <= 12; ++i) c.append({"q" + std::to_string(i), "a" + std::to_string(i)});
    const std::string s = serialize_context(c, 10);
    EXPECT_EQ(s.find("Q: q1\n"), std::string::npos);
    EXPECT_EQ(s.find("Q: q2\n"), std::string::npos);
    EXPECT_EQ(s.rfind("Q: q3\n", 0), 0u);
}

TEST(Reformulate, ResolvesReferenceFromContext) {
    ScriptedBackend b;
    b.add_substring("Question to rewrite: When did the battle happen?\n", "When did the Battle of Hunayn happen?");
    const TemplateSet t;
    const Reformulation r = reformulate(hunayn(), "When did the battle happen?", b, t);
    EXPECT_EQ(r.question.text, "When did the Battle of Hunayn happen?");
    EXPECT_EQ(r.question.source_turn_index, 2);
    EXPECT_TRUE(r.flags.empty());
}

TEST(Reformulate, SelfContainedQuestionEchoed) {
    ScriptedBackend b;
    b.add_substring("Question to rewrite: What is tea?\n", "What is tea?");
    const Reformulation r = reformulate(Conversation("c"), "What is tea?", b, TemplateSet());
    EXPECT_EQ(r.question.text, "What is tea?");
    EXPECT_EQ(r.question.source_turn_index, 1);
}

TEST(Reformulate, PromptCarriesContextLines) {
    FixedBackend b("x");
    (void)reformulate(hunayn(), "When?", b, TemplateSet());
    ASSERT_EQ(b.prompts.size(), 1u);
    EXPECT_NE(b.prompts[0].find("Q: What was the Battle of Hunayn?\nA: A battle"), std::string::npos);
    EXPECT_EQ(b.roles[0], BackendRole::refiner);
}

TEST(Reformulate, MultiLineOutputTakesFirstNonBlankLine) {
    FixedBackend b("\n  \n  Rewritten one.  \nExplanation follows\n");
    const Reformulation r = reformulate(hunayn(), "q?", b, TemplateSet());
    EXPECT_EQ(r.question.text, "Rewritten one.");
    EXPECT_EQ(r.flags, Strings{"multi_line_output"});
}

TEST(Reformulate, BlankOutputFallsBackToQuestion) {
    FixedBackend b(" \n\t");
    const Reformulation r = reformulate(hunayn(), "  original? ", b, TemplateSet());
    EXPECT_EQ(r.question.text, "original?");
    EXPECT_EQ(r.flags, Strings{"empty_output_fallback"});
}

TEST(Reformulate, BackendFailureIsAStageError) {
    FailingBackend b;
    try {
        (void)reformulate(hunayn(), "q", b, TemplateSet());
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "refine");
        EXPECT_EQ(e.role(), "refiner");
    }
    EXPECT_THROW((void)reformulate(hunayn(), " ", b, TemplateSet()), Error);
}

TEST(ExtractKeywords, ParsesModelOutput) {
    FixedBackend b("Battle of Hunayn; date");
    const RefinedQuestion q{"When did the Battle of Hunayn happen?", 2};
    const KeywordExtraction k = extract_keywords(hunayn(), "When?", q, b, TemplateSet());
    EXPECT_EQ(k.keywords.keywords(), (Strings{"Battle of Hunayn", "date"}));
    EXPECT_NE(b.prompts[0].find("Rewritten question: When did the Battle of Hunayn happen?\n"), std::string::npos);
    EXPECT_NE(b.prompts[0].find("Original question: When?\n"), std::string::npos);
    EXPECT_EQ(b.roles[0], BackendRole::keyword_extractor);
}

TEST(ExtractKeywords, DuplicatesRemoved) {
    FixedBackend b("a; a; b");
    EXPECT_EQ(extract_keywords(hunayn(), "q", {"r", 2}, b, TemplateSet()).keywords.keywords(), (Strings{"a", "b"}));
}

TEST(ExtractKeywords, EmptyOutputFallsBackToRefinedQuestion) {
    FixedBackend b(" ; ");
    const KeywordExtraction k = extract_keywords(hunayn(), "q", {"the refined question", 2}, b, TemplateSet());
    EXPECT_EQ(k.keywords.keywords(), Strings{"the refined question"});
    EXPECT_EQ(k.flags, Strings{"empty_output_fallback"});
}

TEST(ExtractKeywords, BackendFailureIsAStageError) {
    FailingBackend b;
    try {
        (void)extract_keywords(hunayn(), "q", {"r", 2}, b, TemplateSet());
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "extract");
        EXPECT_EQ(e.role(), "keyword_extractor");
    }
}

TEST(ParseKeywordOutput, Separators) {
    EXPECT_EQ(parse_keyword_output("x, y").keywords(), (Strings{"x", "y"}));
    EXPECT_EQ(parse_keyword_output("x，y\nz").keywords(), (Strings{"x", "y", "z"}));
    EXPECT_EQ(parse_keyword_output("长城；历史、朝代").keywords(), (Strings{"长城", "历史", "朝代"}));
    EXPECT_TRUE(parse_keyword_output(" ; ;").empty());
}

TEST(ParseKeywordOutputProperty, Idempotent) {
    const Strings pieces{"a", "b c", " ", ";", ",", "\n", "，", "；", "、", "长城", "x", "a"};
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::string raw;
        const int n = static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) raw += pieces[rng() % pieces.size()];
        const KeywordSet once = parse_keyword_output(raw);
        std::string joined;
        for (const std::string& k : once.keywords()) joined += k + "; ";
        EXPECT_EQ(parse_keyword_output(joined), once) << raw;
        for (const std::string& k : once.keywords()) EXPECT_FALSE(k.empty());
    }
}
