#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "convqa/backend.hpp"
#include "convqa/codec.hpp"
#include "convqa/error.hpp"
#include "convqa/http.hpp"
#include "convqa/rerank.hpp"
#include "convqa/search.hpp"
#include "stub_server.hpp"

using namespace convqa;
using convqa::testing::StubServer;
using namespace std::chrono_literals;

namespace {

RetryPolicy no_wait(std::vector<std::chrono::milliseconds>* waits = nullptr) {
    RetryPolicy r;
    r.sleep = [waits](std::chrono::milliseconds d) {
        if (waits) waits->push_back(d);
    };
    return r;
}

}  // namespace

TEST(ScriptedBackend, FirstMatchingRuleWins) {
    ScriptedBackend b;
    const auto exact = b.add_exact("hello", "exact");
    const auto sub = b.add_substring("ell", "substring");
    EXPECT_EQ(b.generate({BackendRole::responder, "hello"}), "exact");
    EXPECT_EQ(b.generate({BackendRole::responder, "yellow"}), "substring");
    EXPECT_EQ(b.consumed_count(exact), 1);
    EXPECT_EQ(b.consumed_count(sub), 1);
    EXPECT_EQ(b.rule_count(), 2u);
}

TEST(ScriptedBackend, RoleFilter) {
    ScriptedBackend b;
    b.add_substring("x", "for refiner", BackendRole::refiner);
    b.add_substring("x", "for anyone");
    EXPECT_EQ(b.generate({BackendRole::refiner, "x"}), "for refiner");
    EXPECT_EQ(b.generate({BackendRole::responder, "x"}), "for anyone");
}

TEST(ScriptedBackend, UnmatchedAndEmptyPrompts) {
    ScriptedBackend b;
    b.add_exact("a", "b");
    try {
        (void)b.generate({BackendRole::responder, "zzz"});
        FAIL();
    } catch (const UnmatchedPromptError& e) {
        EXPECT_EQ(e.prompt(), "zzz");
    }
    EXPECT_THROW((void)b.generate({BackendRole::responder, "  "}), Error);
}

TEST(ScriptedBackend, ConcurrentCallsAreCounted) {
    ScriptedBackend b;
    const auto rule = b.add_substring("q", "r");
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 250; ++i) EXPECT_EQ(b.generate({BackendRole::responder, "q"}), "r");
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(b.consumed_count(rule), 2000);
}

TEST(BackendRole, Names) {
    for (auto r : {BackendRole::refiner, BackendRole::keyword_extractor, BackendRole::responder, BackendRole::judge}) {
        EXPECT_EQ(parse_backend_role(to_string(r)), r);
    }
    EXPECT_THROW((void)parse_backend_role("critic"), Error);
}

TEST(Http, SplitUrl) {
    EXPECT_EQ(split_url("http://h:1/v1/x").origin, "http://h:1");
    EXPECT_EQ(split_url("http://h:1/v1/x").path, "/v1/x");
    EXPECT_EQ(split_url("https://h").path, "/");
    EXPECT_THROW((void)split_url("h/x"), FormatError);
}

TEST(Http, BackoffGrowsExponentially) {
    RetryPolicy r;
    EXPECT_EQ(r.backoff_before(2), 250ms);
    EXPECT_EQ(r.backoff_before(3), 500ms);
    EXPECT_EQ(r.backoff_before(4), 1000ms);
}

TEST(HttpBackend, SendsChatCompletionRequest) {
    StubServer stub;
    Json seen;
    std::string auth;
    stub.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = Json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"pong"}}]})", "application/json");
    });
    stub.start();
    HttpBackend b({{stub.url("/v1/chat/completions"), {{"Authorization", "Bearer k"}}, 5.0}, "m-1", no_wait()});
    EXPECT_EQ(b.generate({BackendRole::refiner, "ping", 64, 0.5}), "pong");
    EXPECT_EQ(seen["model"], "m-1");
    EXPECT_EQ(seen["messages"][0]["role"], "user");
    EXPECT_EQ(seen["messages"][0]["content"], "ping");
    EXPECT_EQ(seen["max_tokens"], 64);
    EXPECT_EQ(seen["temperature"], 0.5);
    EXPECT_EQ(auth, "Bearer k");
}

TEST(HttpBackend, RetriesServerErrorsThenSucceeds) {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
        if (++calls < 3) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"choices":[{"text":"legacy"}]})", "application/json");
    });
    stub.start();
    std::vector<std::chrono::milliseconds> waits;
    HttpBackend b({{stub.url("/c"), {}, 5.0}, "m", no_wait(&waits)});
    EXPECT_EQ(b.generate({BackendRole::responder, "p"}), "legacy");
    EXPECT_EQ(calls.load(), 3);
    EXPECT_EQ(waits, (std::vector<std::chrono::milliseconds>{250ms, 500ms}));
}

TEST(HttpBackend, GivesUpAfterMaxAttempts) {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
    });
    stub.start();
    HttpBackend b({{stub.url("/c"), {}, 5.0}, "m", no_wait()});
    try {
        (void)b.generate({BackendRole::responder, "p"});
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.status(), 500);
    }
    EXPECT_EQ(calls.load(), 3);
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
    StubServer stub;
    std::atomic<int> calls{0};
    stub.server.Post("/c", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 401;
    });
    stub.start();
    HttpBackend b({{stub.url("/c"), {}, 5.0}, "m", no_wait()});
    EXPECT_THROW((void)b.generate({BackendRole::responder, "p"}), TransportError);
    EXPECT_EQ(calls.load(), 1);
}

TEST(HttpBackend, MalformedReplyIsATransportError) {
    StubServer stub;
    stub.server.Post("/c", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices":[]})", "application/json");
    });
    stub.start();
    HttpBackend b({{stub.url("/c"), {}, 5.0}, "m", no_wait()});
    EXPECT_THROW((void)b.generate({BackendRole::responder, "p"}), TransportError);
}

TEST(HttpBackend, UnreachableHostRetriesThenFails) {
    int port = 0;
    {
        StubServer probe;  // grab a free port, then release it
        probe.start();
        port = probe.port();
    }
    std::vector<std::chrono::milliseconds> waits;
    HttpBackend b({{"http://127.0.0.1:" + std::to_string(port) + "/c", {}, 1.0}, "m", no_wait(&waits)});
    try {
        (void)b.generate({BackendRole::responder, "p"});
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.status(), 0);
    }
    EXPECT_EQ(waits.size(), 2u);
}

TEST(RemoteSearchConnector, RanksResultsAndFetchesMissingBodies) {
    StubServer stub;
    Json seen;
    stub.server.Post("/search", [&](const httplib::Request& req, httplib::Response& res) {
        seen = Json::parse(req.body);
        const std::string page = stub.url("/page/");
        res.set_content(Json{{"documents",
                              {{{"doc_id", "a"}, {"body", "inline body"}, {"snippet", "s-a"}},
                               {{"doc_id", "b"}, {"url", page + "b"}},
                               {{"doc_id", "c"}, {"url", page + "c"}, {"title", "C"}},
                               {{"doc_id", "d"}, {"body", "dropped"}}}}}
                            .dump(),
                        "application/json");
    });
    stub.server.Get(R"(/page/(\w+))", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content("fetched " + std::string(req.matches[1]), "text/plain");
    });
    stub.start();
    RemoteSearchConnector conn({stub.url("/search"), {}, 5.0}, no_wait());
    const auto docs = conn.search("great wall", 3);
    EXPECT_EQ(seen["query"], "great wall");
    EXPECT_EQ(seen["max_documents"], 3);
    ASSERT_EQ(docs.size(), 3u);
    EXPECT_EQ(docs[0].rank, 1);
    EXPECT_EQ(docs[0].snippet, std::optional<std::string>("s-a"));
    EXPECT_EQ(docs[1].body, "fetched b");
    EXPECT_EQ(docs[2].body, "fetched c");
    EXPECT_EQ(docs[2].rank, 3);
}

TEST(RemoteRerankScorer, AcceptsBothResponseShapes) {
    StubServer stub;
    stub.server.Post("/a", [](const httplib::Request& req, httplib::Response& res) {
        const Json body = Json::parse(req.body);
        Json scores = Json::array();
        for (std::size_t i = 0; i < body["passages"].size(); ++i) scores.push_back(0.1 * static_cast<double>(i));
        res.set_content(Json{{"scores", scores}}.dump(), "application/json");
    });
    stub.server.Post("/b", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"([{"index":1,"score":0.9},{"index":0,"score":0.2}])", "application/json");
    });
    stub.server.Post("/bad", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"scores":[1]})", "application/json");
    });
    stub.start();
    RemoteRerankScorer a({stub.url("/a"), {}, 5.0}, no_wait());
    EXPECT_EQ(a.score("q", {"x", "y", "z"}), (std::vector<double>{0.0, 0.1, 0.2}));
    RemoteRerankScorer b({stub.url("/b"), {}, 5.0}, no_wait());
    EXPECT_EQ(b.score("q", {"x", "y"}), (std::vector<double>{0.2, 0.9}));
    RemoteRerankScorer bad({stub.url("/bad"), {}, 5.0}, no_wait());
    EXPECT_THROW((void)bad.score("q", {"x", "y"}), TransportError);
}
