#include "convqa/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "convqa/error.hpp"

namespace convqa {
namespace fs = std::filesystem;
namespace {

constexpr const char* kSlots[] = {templates::reformulate, templates::extract_keywords,
                                  templates::respond_with_self_check, templates::respond_plain,
                                  templates::pairwise_judge};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_relative()) path = base / path;
    return path.lexically_normal();
}

[[noreturn]] void rethrow_in(const std::string& where, const std::exception& e) {
    throw FormatError(where + ": " + e.what());
}

Json normalize_retry(const Json& j) {
    RetryPolicy defaults;
    Json out{{"max_attempts", defaults.max_attempts},
             {"initial_backoff_ms", defaults.initial_backoff.count()},
             {"multiplier", defaults.multiplier}};
    if (j.is_null()) return out;
    if (!j.is_object()) throw FormatError("field 'retry': expected object");
    if (auto v = codec::optional_int(j, "max_attempts")) {
        if (*v < 1) throw FormatError("field 'retry.max_attempts': must be >= 1");
        out["max_attempts"] = *v;
    }
    if (auto v = codec::optional_int(j, "initial_backoff_ms")) out["initial_backoff_ms"] = *v;
    if (auto v = codec::optional_number(j, "multiplier")) out["multiplier"] = *v;
    return out;
}

Json normalize_endpoint(const Json& j) {
    Json out{{"endpoint", codec::require_string(j, "endpoint")}};
    (void)split_url(out["endpoint"].get<std::string>());
    Json headers = Json::object();
    if (auto it = j.find("headers"); it != j.end()) {
        if (!it->is_object()) throw FormatError("field 'headers': expected object");
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) throw FormatError("field 'headers." + k + "': expected string");
            headers[k] = v;
        }
    }
    out["headers"] = headers;
    out["timeout_seconds"] = codec::optional_number(j, "timeout_seconds").value_or(30.0);
    out["retry"] = normalize_retry(j.value("retry", Json()));
    return out;
}

Json normalize_rule(const Json& r) {
    const std::string match = r.value("match", std::string("substring"));
    if (match != "exact" && match != "substring") throw FormatError("field 'match': expected exact or substring");
    Json out{{"match", match}, {"pattern", codec::require_string(r, "pattern")},
             {"response", codec::require_string(r, "response")}};
    if (auto role = codec::optional_string(r, "role")) out["role"] = std::string(to_string(parse_backend_role(*role)));
    return out;
}

Json normalize_backend(const Json& j, const fs::path& base) {
    if (!j.is_object()) throw FormatError("backend section must be an object");
    const std::string type = codec::require_string(j, "type");
    Json out;
    if (type == "scripted") {
        out = Json{{"type", type}};
        Json rules = Json::array();
        if (auto file = codec::optional_string(j, "rules_file")) {
            const Json loaded = Json::parse(read_file(resolve(base, *file)));
            if (!loaded.is_array()) throw FormatError("rules_file must hold a JSON array");
            for (const Json& r : loaded) rules.push_back(normalize_rule(r));
        }
        if (auto it = j.find("rules"); it != j.end()) {
            if (!it->is_array()) throw FormatError("field 'rules': expected array");
            for (const Json& r : *it) rules.push_back(normalize_rule(r));
        }
        out["rules"] = std::move(rules);
    } else if (type == "http") {
        out = Json{{"type", type}};
        out.update(normalize_endpoint(j));
        out["model"] = codec::require_string(j, "model");
        out["auth_header"] = j.value("auth_header", std::string("Authorization"));
        out["auth_prefix"] = j.value("auth_prefix", std::string("Bearer "));
        if (auto env = codec::optional_string(j, "auth_env")) out["auth_env"] = *env;
    } else {
        throw FormatError("unknown backend type '" + type + "'");
    }
    Json slots = Json::object();
    if (auto it = j.find("templates"); it != j.end()) {
        if (!it->is_object()) throw FormatError("field 'templates': expected object");
        for (const auto& [slot, name] : it->items()) {
            bool known = false;
            for (const char* s : kSlots) known = known || slot == s;
            if (!known) throw FormatError("unknown template slot '" + slot + "'");
            if (!name.is_string()) throw FormatError("template slot '" + slot + "': expected a template name");
            slots[slot] = name;
        }
    }
    out["templates"] = std::move(slots);
    return out;
}

Json normalize_connector(const Json& j, const fs::path& base) {
    if (!j.is_object()) throw FormatError("missing connector section");
    const std::string type = codec::require_string(j, "type");
    if (type == "offline") {
        const fs::path corpus = resolve(base, codec::require_string(j, "corpus"));
        return Json{{"type", type}, {"corpus", corpus.string()}, {"corpus_digest", fnv1a_hex(read_file(corpus))}};
    }
    if (type == "remote") {
        Json out{{"type", type}};
        out.update(normalize_endpoint(j));
        return out;
    }
    throw FormatError("unknown connector type '" + type + "'");
}

Json normalize_scorer(const Json& j) {
    if (j.is_null()) return Json{{"type", "lexical"}};
    const std::string type = codec::require_string(j, "type");
    if (type == "lexical") return Json{{"type", type}};
    if (type == "remote") {
        Json out{{"type", type}};
        out.update(normalize_endpoint(j));
        return out;
    }
    throw FormatError("unknown scorer type '" + type + "'");
}

HttpEndpoint endpoint_from(const Json& j) {
    HttpEndpoint e;
    e.url = j.at("endpoint").get<std::string>();
    for (const auto& [k, v] : j.at("headers").items()) e.headers[k] = v.get<std::string>();
    e.timeout_seconds = j.at("timeout_seconds").get<double>();
    return e;
}

RetryPolicy retry_from(const Json& j) {
    RetryPolicy r;
    r.max_attempts = j.at("max_attempts").get<int>();
    r.initial_backoff = std::chrono::milliseconds(j.at("initial_backoff_ms").get<long>());
    r.multiplier = j.at("multiplier").get<double>();
    return r;
}

std::shared_ptr<TextBackend> make_backend(const Json& j) {
    if (j.at("type") == "scripted") {
        auto backend = std::make_shared<ScriptedBackend>();
        for (const Json& r : j.at("rules")) {
            ScriptedRule rule;
            rule.kind = r.at("match") == "exact" ? MatchKind::exact : MatchKind::substring;
            rule.pattern = r.at("pattern").get<std::string>();
            rule.response = r.at("response").get<std::string>();
            if (r.contains("role")) rule.role = parse_backend_role(r.at("role").get<std::string>());
            backend->add_rule(std::move(rule));
        }
        return backend;
    }
    HttpBackendConfig cfg;
    cfg.endpoint = endpoint_from(j);
    cfg.model = j.at("model").get<std::string>();
    cfg.retry = retry_from(j.at("retry"));
    if (j.contains("auth_env")) {
        const char* value = std::getenv(j.at("auth_env").get<std::string>().c_str());
        if (value != nullptr && *value != '\0') {
            cfg.endpoint.headers[j.at("auth_header").get<std::string>()] = j.at("auth_prefix").get<std::string>() + value;
        }
    }
    return std::make_shared<HttpBackend>(std::move(cfg));
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string AppConfig::digest() const { return fnv1a_hex(effective.dump()); }

AppConfig parse_config(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    AppConfig cfg;
    const fs::path base = fs::absolute(base_dir);
    auto section = [&](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const FormatError& e) {
            rethrow_in(name, e);
        } catch (const nlohmann::json::exception& e) {
            rethrow_in(name, e);
        }
        return Json();
    };

    Json eff = Json::object();
    eff["pipeline"] = section("pipeline", [&] {
        cfg.pipeline = decode_pipeline_config(j.value("pipeline", Json::object()));
        return encode(cfg.pipeline);
    });

    eff["backends"] = section("backends", [&] {
        Json backends = Json::object();
        if (j.contains("backend") && j.contains("backends")) throw FormatError("give either 'backend' or 'backends'");
        if (auto it = j.find("backend"); it != j.end()) {
            backends["default"] = normalize_backend(*it, base);
        } else if (auto it2 = j.find("backends"); it2 != j.end()) {
            if (!it2->is_object()) throw FormatError("expected object");
            for (const auto& [key, value] : it2->items()) {
                const std::string name = key == "default" ? key : std::string(to_string(parse_backend_role(key)));
                backends[name] = normalize_backend(value, base);
            }
        } else {
            throw FormatError("missing backend section");
        }
        for (BackendRole role : {BackendRole::refiner, BackendRole::keyword_extractor, BackendRole::responder}) {
            if (!backends.contains("default") && !backends.contains(std::string(to_string(role)))) {
                throw FormatError("no backend for role " + std::string(to_string(role)));
            }
        }
        return backends;
    });

    eff["connector"] = section("connector", [&] { return normalize_connector(j.value("connector", Json()), base); });
    eff["scorer"] = section("scorer", [&] { return normalize_scorer(j.value("scorer", Json())); });

    eff["embeddings"] = section("embeddings", [&] {
        if (auto p = codec::optional_string(j, "embeddings")) {
            const fs::path path = resolve(base, *p);
            return Json{{"path", path.string()}, {"digest", fnv1a_hex(read_file(path))}};
        }
        return Json();
    });

    eff["templates"] = section("templates", [&] {
        Json out = Json::object();
        if (auto it = j.find("templates"); it != j.end()) {
            if (!it->is_object()) throw FormatError("expected object");
            for (const auto& [name, value] : it->items()) {
                if (value.is_string()) {
                    out[name] = value;
                } else if (value.is_object() && value.contains("file")) {
                    out[name] = read_file(resolve(base, value.at("file").get<std::string>()));
                } else {
                    throw FormatError("template '" + name + "': expected text or {\"file\": path}");
                }
            }
        }
        const TemplateSet defaults;
        for (const auto& [key, b] : eff["backends"].items()) {
            for (const auto& [slot, name] : b.at("templates").items()) {
                const std::string n = name.get<std::string>();
                if (!out.contains(n) && !defaults.contains(n)) throw FormatError("unknown template '" + n + "'");
            }
        }
        return out;
    });

    cfg.effective = std::move(eff);
    return cfg;
}

AppConfig load_config(const fs::path& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    try {
        return parse_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

PipelineComponents build_components(const AppConfig& config) {
    const Json& eff = config.effective;
    PipelineComponents c;

    for (const auto& [name, text] : eff.at("templates").items()) c.templates.set({name, text.get<std::string>()});

    const Json& backends = eff.at("backends");
    std::shared_ptr<TextBackend> fallback;
    if (backends.contains("default")) fallback = make_backend(backends.at("default"));
    const TemplateSet named = c.templates;
    auto apply_slots = [&](const Json& section) {
        for (const auto& [slot, name] : section.at("templates").items()) {
            c.templates.set({slot, named.get(name.get<std::string>()).text()});
        }
    };
    if (backends.contains("default")) apply_slots(backends.at("default"));
    for (BackendRole role :
         {BackendRole::refiner, BackendRole::keyword_extractor, BackendRole::responder, BackendRole::judge}) {
        const std::string key(to_string(role));
        if (backends.contains(key)) {
            c.backends[role] = make_backend(backends.at(key));
            apply_slots(backends.at(key));
        } else if (fallback) {
            c.backends[role] = fallback;
        }
    }

    const Json& conn = eff.at("connector");
    if (conn.at("type") == "offline") {
        c.connector = std::make_shared<OfflineCorpusConnector>(load_corpus(conn.at("corpus").get<std::string>()));
    } else {
        c.connector = std::make_shared<RemoteSearchConnector>(endpoint_from(conn), retry_from(conn.at("retry")));
    }

    const Json& scorer = eff.at("scorer");
    if (scorer.at("type") == "lexical") {
        c.scorer = std::make_shared<LexicalRerankScorer>();
    } else {
        c.scorer = std::make_shared<RemoteRerankScorer>(endpoint_from(scorer), retry_from(scorer.at("retry")));
    }

    if (const Json& emb = eff.at("embeddings"); !emb.is_null()) {
        c.embeddings = std::make_shared<const EmbeddingModel>(load_embeddings(emb.at("path").get<std::string>()));
    }
    return c;
}

}  // namespace convqa
