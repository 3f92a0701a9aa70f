#include "convqa/ablation_report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "convqa/error.hpp"

namespace convqa {

AblationTable ablation_report(const std::map<std::string, MetricScores>& runs) {
    if (runs.empty()) throw Error("ablation report needs at least one run");
    static constexpr std::array<const char*, 5> kOrder{"full", "-QF", "-FR", "-SC", "-ALL"};
    AblationTable table;
    for (const char* label : kOrder) {
        if (auto it = runs.find(label); it != runs.end()) table.rows.push_back({it->first, it->second});
    }
    for (const auto& [label, scores] : runs) {  // std::map iterates alphabetically
        if (std::find(kOrder.begin(), kOrder.end(), label) == kOrder.end()) table.rows.push_back({label, scores});
    }
    return table;
}

std::string AblationTable::render() const {
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-10s", "Method");
    out += buf;
    for (const char* label : MetricScores::kLabels) {
        std::snprintf(buf, sizeof buf, " %8s", label);
        out += buf;
    }
    out += "\n";
    for (const Row& row : rows) {
        std::snprintf(buf, sizeof buf, "%-10s", row.label.c_str());
        out += buf;
        for (double v : row.scores.values) {
            std::snprintf(buf, sizeof buf, " %8.2f", v * 100.0);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

Json AblationTable::encode() const {
    Json arr = Json::array();
    for (const Row& row : rows) arr.push_back(Json{{"label", row.label}, {"scores", convqa::encode(row.scores)}});
    return arr;
}

}  // namespace convqa
