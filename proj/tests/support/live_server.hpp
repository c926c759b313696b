#pragma once

// A Server on an ephemeral loopback port, run on its own thread.

#include <memory>
#include <stdexcept>
#include <thread>

#include "viva/server.hpp"

namespace vt {

class LiveServer {
public:
    explicit LiveServer(const std::filesystem::path& config_dir)
        : session_(std::make_unique<viva::Session>(viva::load_config(config_dir))),
          server_(std::make_unique<viva::Server>(*session_)) {
        port_ = server_->bind("127.0.0.1", 0);
        if (port_ <= 0) throw std::runtime_error("bind failed");
        thread_ = std::thread([this] { server_->listen_after_bind(); });
        server_->wait_until_ready();
    }

    ~LiveServer() {
        server_->stop();
        if (thread_.joinable()) thread_.join();
    }

    LiveServer(const LiveServer&) = delete;
    LiveServer& operator=(const LiveServer&) = delete;

    int port() const { return port_; }
    viva::Session& session() { return *session_; }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(30, 0);
        return c;
    }

private:
    std::unique_ptr<viva::Session> session_;
    std::unique_ptr<viva::Server> server_;
    std::thread thread_;
    int port_ = -1;
};

/// Multipart upload of (dataset name, CSV) pairs.
inline httplib::Result upload(httplib::Client& c, const std::vector<std::pair<std::string, std::string>>& files) {
    httplib::MultipartFormDataItems items;
    for (const auto& [name, bytes] : files) items.push_back({"files", bytes, name + ".csv", "text/csv"});
    return c.Post("/api/data", items);
}

inline nlohmann::json body(const httplib::Result& r) { return nlohmann::json::parse(r->body); }

} // namespace vt
