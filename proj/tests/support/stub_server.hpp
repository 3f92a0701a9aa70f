#pragma once

#include <httplib.h>

#include <string>
#include <thread>

namespace convqa::testing {

/// httplib server on a free loopback port, serving on a background thread
/// for the lifetime of the object. Register handlers on `server` before
/// calling start().
class StubServer {
  public:
    httplib::Server server;

    StubServer() = default;
    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;
    ~StubServer() {
        server.stop();
        if (thread_.joinable()) thread_.join();
    }

    void start() {
        port_ = server.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    [[nodiscard]] int port() const noexcept { return port_; }
    [[nodiscard]] std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

  private:
    std::thread thread_;
    int port_ = 0;
};

}  // namespace convqa::testing
