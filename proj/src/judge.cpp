#include "convqa/judge.hpp"

#include <cctype>
#include <cstdio>
#include <random>

#include "convqa/error.hpp"
#include "convqa/refiner.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {
namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

JudgeVerdict bare(std::string_view s) {
    s = trim(s);
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ']' || s.back() == '"')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == '[' || s.front() == '"')) s.remove_prefix(1);
    const std::string u = upper(trim(s));
    if (u == "A") return JudgeVerdict::first;
    if (u == "B") return JudgeVerdict::second;
    if (u == "TIE") return JudgeVerdict::tie;
    return JudgeVerdict::unparsed;
}

}  // namespace

JudgeVerdict parse_judge_verdict(std::string_view raw) {
    if (JudgeVerdict v = bare(raw); v != JudgeVerdict::unparsed) return v;
    const std::string u = upper(raw);
    for (const char* tag : {"[[A]]", "[[B]]", "[[TIE]]"}) {
        if (u.find(tag) != std::string::npos) return bare(tag);
    }
    if (const auto pos = u.rfind("VERDICT:"); pos != std::string::npos) {
        std::string_view rest = std::string_view(raw).substr(pos + 8);
        rest = rest.substr(0, rest.find('\n'));
        return bare(rest);
    }
    return JudgeVerdict::unparsed;
}

WinTally pairwise_judge(const Conversation& context, std::string_view question, std::string_view answer_a,
                        std::string_view answer_b, TextBackend& judge, int trials, const TemplateSet& templates,
                        const JudgeOptions& options) {
    if (trials < 1) throw Error("trials must be >= 1");
    const PromptTemplate& tmpl = templates.get(templates::pairwise_judge);
    const std::string ctx = serialize_context(context, options.max_context_turns);

    WinTally tally;
    for (int t = 0; t < trials; ++t) {
        bool swapped = false;
        if (options.randomize_positions) {
            std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                              static_cast<std::uint32_t>(t)};
            std::mt19937_64 rng(seq);
            swapped = std::bernoulli_distribution(0.5)(rng);
        }
        const std::string_view first = swapped ? answer_b : answer_a;
        const std::string_view second = swapped ? answer_a : answer_b;
        const std::string prompt = tmpl.render({{"context", ctx},
                                                {"question", std::string(question)},
                                                {"answer_1", std::string(first)},
                                                {"answer_2", std::string(second)}});
        const std::string raw = judge.generate({BackendRole::judge, prompt, 16, 0.0});
        switch (parse_judge_verdict(raw)) {
            case JudgeVerdict::first: ++(swapped ? tally.b_wins : tally.a_wins); break;
            case JudgeVerdict::second: ++(swapped ? tally.a_wins : tally.b_wins); break;
            case JudgeVerdict::tie: ++tally.ties; break;
            case JudgeVerdict::unparsed:
                ++tally.ties;
                ++tally.unparsed;
                break;
        }
    }
    return tally;
}

void accumulate(WinTally& into, const WinTally& other) {
    into.a_wins += other.a_wins;
    into.b_wins += other.b_wins;
    into.ties += other.ties;
    into.unparsed += other.unparsed;
}

Json encode(const WinTally& t) {
    return Json{{"a_wins", t.a_wins}, {"b_wins", t.b_wins}, {"ties", t.ties}, {"unparsed", t.unparsed}};
}

std::string format_win_table(const std::string& name_a, const std::string& name_b, const WinTally& tally) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %8s\n%-20s %8ld\n%-20s %8ld\n%-20s %8ld\n", "Model", "Wins", name_a.c_str(),
                  tally.a_wins, name_b.c_str(), tally.b_wins, "(tie)", tally.ties);
    return buf;
}

}  // namespace convqa
