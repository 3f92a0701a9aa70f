#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "convqa/backend.hpp"
#include "convqa/codec.hpp"
#include "convqa/prompt.hpp"
#include "convqa/types.hpp"

namespace convqa {

/// Verdict in terms of display position: the answer shown first or second.
enum class JudgeVerdict { first, second, tie, unparsed };

/// Accepts a bare "A" / "B" / "tie" (case-insensitive, trailing punctuation
/// ignored), "[[A]]"-style brackets, or a "Verdict: X" line.
[[nodiscard]] JudgeVerdict parse_judge_verdict(std::string_view raw);

struct WinTally {
    long a_wins = 0;
    long b_wins = 0;
    long ties = 0;
    long unparsed = 0;  // counted in ties as well

    [[nodiscard]] long trials() const noexcept { return a_wins + b_wins + ties; }
    friend bool operator==(const WinTally&, const WinTally&) = default;
};

struct JudgeOptions {
    std::uint64_t seed = 0;
    bool randomize_positions = true;  // when false, answer_a is always shown first
    std::size_t max_context_turns = 10;
};

/// Runs `trials` judge calls. Trial t draws its A/B display order from an
/// independent stream seeded by (seed, t), and the verdict is mapped back to
/// the original answers. Unparseable verdicts count as ties.
[[nodiscard]] WinTally pairwise_judge(const Conversation& context, std::string_view question,
                                      std::string_view answer_a, std::string_view answer_b, TextBackend& judge,
                                      int trials, const TemplateSet& templates, const JudgeOptions& options = {});

/// Adds `other` into `into`.
void accumulate(WinTally& into, const WinTally& other);

[[nodiscard]] Json encode(const WinTally& tally);

/// Two-row win-count table, e.g. for "system A vs system B".
[[nodiscard]] std::string format_win_table(const std::string& name_a, const std::string& name_b,
                                           const WinTally& tally);

}  // namespace convqa
