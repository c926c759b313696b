#pragma once

/**
 * @file server.hpp
 * @brief HTTP routes over a Session.
 *
 * Bodies are JSON. Errors come back as {code, message, details}. The route
 * table lives in src/server.cpp.
 */

#include <filesystem>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "viva/session.hpp"

namespace viva {

inline int http_status(ErrorCode c) {
    switch (c) {
    case ErrorCode::BadRequest:
    case ErrorCode::MalformedCsv:
    case ErrorCode::MissingColumn:
    case ErrorCode::NoTimeAttribute: return 400;
    case ErrorCode::UnknownSeq: return 404;
    case ErrorCode::DependencyViolation: return 409;
    case ErrorCode::IoError: return 500;
    default: return 422;
    }
}

inline nlohmann::json error_body(const Error& e) {
    return {{"code", to_string(e.code())}, {"message", e.what()}, {"details", e.details()}};
}

namespace detail {

inline nlohmann::json parse_body(const httplib::Request& req) {
    try {
        return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::BadRequest, std::string("request body is not valid JSON: ") + e.what());
    }
}

inline bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes"; }

inline ChartRequest chart_request(const httplib::Request& req) {
    ChartRequest c;
    c.mode = req.get_param_value("mode");
    if (c.mode.empty()) fail(ErrorCode::BadRequest, "missing mode");
    c.dataset_id = req.get_param_value("dataset_id");
    const auto n = req.get_param_value_count("attribute");
    for (std::size_t i = 0; i < n; ++i) c.attributes.push_back(req.get_param_value("attribute", i));
    if (req.has_param("granularity")) c.granularity = parse_granularity(req.get_param_value("granularity"));
    if (req.has_param("value_mode")) c.value_mode = parse_value_mode(req.get_param_value("value_mode"));
    if (req.has_param("accumulate")) c.accumulate = truthy(req.get_param_value("accumulate"));
    if (req.has_param("bins")) {
        const auto v = parse_number(req.get_param_value("bins"));
        if (!v || *v < 1 || *v > 1000 || *v != std::floor(*v)) fail(ErrorCode::InvalidParams, "bins must be 1..1000");
        c.bins = static_cast<std::size_t>(*v);
    }
    return c;
}

inline std::string dataset_name_for(const httplib::MultipartFormData& f) {
    if (f.name != "file" && f.name != "files" && !f.name.empty()) return f.name;
    return std::filesystem::path(f.filename).stem().string();
}

inline constexpr const char* kIndexPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>VIVA</title></head>
<body>
<h1>VIVA</h1>
<form method="post" action="/api/data" enctype="multipart/form-data">
<input type="file" name="files" accept=".csv" multiple>
<button type="submit">Upload</button>
</form>
<p>API: <a href="/api/catalog">/api/catalog</a>, <a href="/api/health">/api/health</a></p>
</body></html>
)";

} // namespace detail

class Server {
public:
    explicit Server(Session& session) : session_(session) { routes(); }

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Returns the bound port, or -1.
    int bind(const std::string& host, int port) {
        if (port == 0) return svr_.bind_to_any_port(host);
        return svr_.bind_to_port(host, port) ? port : -1;
    }

    bool listen_after_bind() { return svr_.listen_after_bind(); }
    void stop() { svr_.stop(); }
    void wait_until_ready() const { svr_.wait_until_ready(); }

private:
    void routes();

    Session& session_;
    httplib::Server svr_;
};

} // namespace viva
