#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "convqa/backend.hpp"

namespace convqa {

namespace stage {
inline constexpr const char* refine = "refine";
inline constexpr const char* extract = "extract";
inline constexpr const char* search = "search";
inline constexpr const char* segment = "segment";
inline constexpr const char* recall = "recall";
inline constexpr const char* rerank = "rerank";
inline constexpr const char* generate = "generate";
inline constexpr const char* self_check = "self_check";
}  // namespace stage

enum class StageStatus { executed, ablated };

struct TraceEvent {
    std::string stage;
    StageStatus status = StageStatus::executed;
    std::optional<BackendRole> role;  // set iff the stage called a model
    std::vector<std::string> flags;   // degradations and fallbacks, e.g. "rerank_fallback"
    std::string detail;
    std::chrono::microseconds elapsed{0};

    [[nodiscard]] bool has_flag(const std::string& flag) const {
        return std::find(flags.begin(), flags.end(), flag) != flags.end();
    }
};

/// Stage events of one turn in execution order. Ablated stages appear as
/// events with status `ablated`.
struct Trace {
    std::vector<TraceEvent> events;

    [[nodiscard]] std::vector<const TraceEvent*> executed() const {
        std::vector<const TraceEvent*> out;
        for (const TraceEvent& e : events) {
            if (e.status == StageStatus::executed) out.push_back(&e);
        }
        return out;
    }

    [[nodiscard]] bool has_flag(const std::string& flag) const {
        return std::any_of(events.begin(), events.end(), [&](const TraceEvent& e) { return e.has_flag(flag); });
    }
};

}  // namespace convqa
