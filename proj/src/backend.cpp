#include "convqa/backend.hpp"

#include <mutex>

#include <json.hpp>

#include "convqa/error.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {

std::string_view to_string(BackendRole role) {
    switch (role) {
        case BackendRole::refiner: return "refiner";
        case BackendRole::keyword_extractor: return "keyword_extractor";
        case BackendRole::responder: return "responder";
        case BackendRole::judge: return "judge";
    }
    return "responder";
}

BackendRole parse_backend_role(std::string_view name) {
    if (name == "refiner") return BackendRole::refiner;
    if (name == "keyword_extractor") return BackendRole::keyword_extractor;
    if (name == "responder") return BackendRole::responder;
    if (name == "judge") return BackendRole::judge;
    throw FormatError("unknown backend role '" + std::string(name) + "'");
}

std::size_t ScriptedBackend::add_rule(ScriptedRule rule) {
    std::unique_lock lock(mutex_);
    rules_.emplace_back(std::move(rule));
    return rules_.size() - 1;
}

std::size_t ScriptedBackend::add_exact(std::string pattern, std::string response, std::optional<BackendRole> role) {
    return add_rule({MatchKind::exact, std::move(pattern), std::move(response), role});
}

std::size_t ScriptedBackend::add_substring(std::string pattern, std::string response,
                                           std::optional<BackendRole> role) {
    return add_rule({MatchKind::substring, std::move(pattern), std::move(response), role});
}

std::size_t ScriptedBackend::rule_count() const {
    std::shared_lock lock(mutex_);
    return rules_.size();
}

long ScriptedBackend::consumed_count(std::size_t rule_index) const {
    std::shared_lock lock(mutex_);
    return rules_.at(rule_index).consumed.load();
}

std::string ScriptedBackend::generate(const GenerationRequest& request) {
    if (trim(request.prompt).empty()) throw Error("empty prompt");
    std::shared_lock lock(mutex_);
    for (Entry& e : rules_) {
        if (e.rule.role && *e.rule.role != request.role) continue;
        const bool hit = e.rule.kind == MatchKind::exact ? request.prompt == e.rule.pattern
                                                         : request.prompt.find(e.rule.pattern) != std::string::npos;
        if (hit) {
            e.consumed.fetch_add(1);
            return e.rule.response;
        }
    }
    throw UnmatchedPromptError(request.prompt);
}

std::string HttpBackend::generate(const GenerationRequest& request) {
    if (trim(request.prompt).empty()) throw Error("empty prompt");
    nlohmann::json body{
        {"model", config_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_output_tokens},
    };
    const HttpResponse res = post_json(config_.endpoint, body.dump(), config_.retry);

    nlohmann::json reply = nlohmann::json::parse(res.body, nullptr, false);
    if (reply.is_discarded()) throw TransportError(config_.endpoint.url + ": response is not JSON", res.status);
    try {
        const auto& choice = reply.at("choices").at(0);
        if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
        return choice.at("text").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw TransportError(config_.endpoint.url + ": response has no completion text", res.status);
    }
}

}  // namespace convqa
