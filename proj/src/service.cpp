#include "convqa/service.hpp"

#include <httplib.h>

#include <fstream>
#include <random>
#include <shared_mutex>
#include <thread>

#include "convqa/error.hpp"
#include "convqa/tokenizer.hpp"

namespace convqa {
namespace {

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, Json{{"error", message}});
}

bool query_false(const httplib::Request& req, const char* key) {
    return req.has_param(key) && (req.get_param_value(key) == "false" || req.get_param_value(key) == "0");
}

}  // namespace

struct Service::Impl {
    std::shared_ptr<const Pipeline> pipeline;
    PipelineConfig config;
    ServiceOptions options;
    httplib::Server server;
    std::thread thread;
    int bound_port = 0;
    bool stopped = false;
    std::mutex lifecycle;

    mutable std::shared_mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::mt19937_64 id_rng{std::random_device{}()};

    std::shared_ptr<Session> find(const std::string& id) const {
        std::shared_lock lock(sessions_mutex);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    std::string create_session() {
        std::unique_lock lock(sessions_mutex);
        std::string id;
        do {
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id_rng()));
            id = buf;
        } while (sessions.count(id) != 0);
        sessions.emplace(id, std::make_shared<Session>(id, config, Conversation(id)));
        return id;
    }

    void routes() {
        server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, Json{{"status", "ok"}, {"config_digest", options.config_digest}});
        });

        server.Post("/v1/sessions", [this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, Json{{"session_id", create_session()}});
        });

        server.Get(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto session = find(req.matches[1]);
            if (!session) return reply_error(res, 404, "unknown session " + std::string(req.matches[1]));
            reply(res, 200, encode(session->conversation()));
        });

        server.Post(R"(/v1/sessions/([^/]+)/turns)", [this](const httplib::Request& req, httplib::Response& res) {
            auto session = find(req.matches[1]);
            if (!session) return reply_error(res, 404, "unknown session " + std::string(req.matches[1]));
            std::string question;
            try {
                const Json body = Json::parse(req.body);
                question = body.at("question").get<std::string>();
            } catch (const std::exception&) {
                return reply_error(res, 400, "body must be {\"question\": string}");
            }
            if (trim(question).empty()) return reply_error(res, 400, "question is empty");
            try {
                const TurnResult result = pipeline->answer_turn(*session, question);
                EncodeOptions opts;
                opts.include_trace = !query_false(req, "trace");
                opts.include_timings = !query_false(req, "timings");
                reply(res, 200, encode(result, opts));
            } catch (const SessionBusyError& e) {
                reply_error(res, 409, e.what());
            } catch (const StageError& e) {
                reply(res, 502, Json{{"error", e.what()}, {"stage", e.stage()}, {"role", e.role()}});
            } catch (const std::exception& e) {
                reply_error(res, 500, e.what());
            }
        });

        if (options.ui_dir) {
            if (!server.set_mount_point("/ui", options.ui_dir->string())) {
                throw IoError("cannot serve UI directory " + options.ui_dir->string());
            }
        }
    }

    void load_snapshot() {
        if (!options.snapshot_path || !std::filesystem::exists(*options.snapshot_path)) return;
        std::ifstream in(*options.snapshot_path);
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(options.snapshot_path->string() + ": " + e.what());
        }
        for (SessionSnapshot& s : decode_sessions(j)) {
            auto session = std::make_shared<Session>(s.id, s.config, std::move(s.conversation));
            sessions.emplace(s.id, std::move(session));
        }
    }

    void save_snapshot() const {
        if (!options.snapshot_path) return;
        std::vector<SessionSnapshot> snap;
        {
            std::shared_lock lock(sessions_mutex);
            for (const auto& [id, s] : sessions) snap.push_back({id, s->config(), s->conversation()});
        }
        std::ofstream out(*options.snapshot_path, std::ios::trunc);
        if (!out) throw IoError("cannot write " + options.snapshot_path->string());
        out << encode_sessions(snap).dump() << "\n";
    }

    int bind() {
        if (options.port == 0) {
            bound_port = server.bind_to_any_port(options.host);
        } else {
            bound_port = server.bind_to_port(options.host, options.port) ? options.port : -1;
        }
        if (bound_port < 0) {
            throw IoError("cannot bind " + options.host + ":" + std::to_string(options.port));
        }
        return bound_port;
    }
};

Service::Service(std::shared_ptr<const Pipeline> pipeline, PipelineConfig config, ServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
    if (!pipeline) throw Error("service needs a pipeline");
    config.validate();
    impl_->pipeline = std::move(pipeline);
    impl_->config = config;
    impl_->options = std::move(options);
    impl_->load_snapshot();
    impl_->routes();
}

Service::~Service() {
    try {
        stop();
    } catch (...) {
    }
}

int Service::start() {
    const int port = impl_->bind();
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void Service::run() {
    impl_->bind();
    impl_->server.listen_after_bind();
}

void Service::stop() {
    std::lock_guard lock(impl_->lifecycle);
    if (impl_->stopped) return;
    impl_->stopped = true;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
    impl_->save_snapshot();
}

int Service::port() const noexcept { return impl_->bound_port; }

std::vector<std::string> Service::session_ids() const {
    std::shared_lock lock(impl_->sessions_mutex);
    std::vector<std::string> ids;
    for (const auto& [id, s] : impl_->sessions) ids.push_back(id);
    return ids;
}

Json encode_sessions(const std::vector<SessionSnapshot>& sessions) {
    Json arr = Json::array();
    for (const SessionSnapshot& s : sessions) {
        arr.push_back(Json{{"id", s.id}, {"config", encode(s.config)}, {"conversation", encode(s.conversation)}});
    }
    return Json{{"sessions", std::move(arr)}};
}

std::vector<SessionSnapshot> decode_sessions(const Json& j) {
    std::vector<SessionSnapshot> out;
    for (const Json& s : codec::require_array(j, "sessions")) {
        out.push_back({codec::require_string(s, "id"), decode_pipeline_config(codec::require(s, "config")),
                       decode_conversation(codec::require(s, "conversation"))});
    }
    return out;
}

}  // namespace convqa
