#pragma once

#include <map>
#include <string>
#include <vector>

#include "convqa/codec.hpp"
#include "convqa/metrics.hpp"

namespace convqa {

/// Component-removal comparison table: one row per run, the eight metric
/// columns in BLEU-1..4, METEOR, ROUGE-1/2/L order.
struct AblationTable {
    struct Row {
        std::string label;
        MetricScores scores;
    };
    std::vector<Row> rows;

    /// Aligned text, values x100 with two decimals.
    [[nodiscard]] std::string render() const;
    [[nodiscard]] Json encode() const;
};

/// Rows ordered full, -QF, -FR, -SC, -ALL, then any other labels
/// alphabetically. Keys are Ablations::label() strings. Throws Error on
/// empty input.
[[nodiscard]] AblationTable ablation_report(const std::map<std::string, MetricScores>& runs);

}  // namespace convqa
