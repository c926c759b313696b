#include "viva/server.hpp"

namespace viva {

namespace {

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            res.status = http_status(e.code());
            res.set_content(error_body(e).dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(nlohmann::json{{"code", "Internal"}, {"message", e.what()}, {"details", nlohmann::json::object()}}.dump(),
                            "application/json");
        }
    };
}

void json_reply(httplib::Response& res, const nlohmann::json& j) {
    res.set_content(j.dump(), "application/json");
}

} // namespace

void Server::routes() {
    svr_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(detail::kIndexPage, "text/html; charset=utf-8");
    });
    svr_.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        json_reply(res, {{"status", "ok"}});
    });
    svr_.Post("/api/data", guarded([this](const httplib::Request& req, httplib::Response& res) {
        std::vector<UploadFile> files;
        for (const auto& [_, f] : req.files) files.push_back({detail::dataset_name_for(f), f.content});
        json_reply(res, session_.upload(files));
    }));
    svr_.Get("/api/catalog", guarded([this](const httplib::Request&, httplib::Response& res) {
        json_reply(res, session_.catalog());
    }));
    svr_.Put("/api/range", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto body = detail::parse_body(req);
        const auto start = parse_date(viva::detail::get_or<std::string>(body, "start", ""));
        const auto end = parse_date(viva::detail::get_or<std::string>(body, "end", ""));
        if (!start || !end) fail(ErrorCode::InvalidRange, "start and end must be YYYY-MM-DD dates");
        session_.set_range(TimeRange(*start, *end));
        const auto s = session_.snapshot();
        json_reply(res, {{"start", format_date(s->range.start())}, {"end", format_date(s->range.end())}});
    }));
    svr_.Get("/api/chart", guarded([this](const httplib::Request& req, httplib::Response& res) {
        json_reply(res, session_.chart(detail::chart_request(req)));
    }));
    svr_.Get("/api/export/svg", guarded([this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(session_.export_svg(detail::chart_request(req)), "image/svg+xml");
    }));
    svr_.Post("/api/ops", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto op = operation_from_json(detail::parse_body(req));
        json_reply(res, session_.apply_op(std::move(op)));
    }));
    svr_.Get("/api/ops", guarded([this](const httplib::Request&, httplib::Response& res) {
        json_reply(res, session_.history());
    }));
    svr_.Delete(R"(/api/ops/(-?\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto seq = std::stoll(req.matches[1]);
        const bool cascade = detail::truthy(req.get_param_value("cascade"));
        json_reply(res, session_.remove(seq, cascade));
    }));
    svr_.Post("/api/undo", guarded([this](const httplib::Request&, httplib::Response& res) {
        json_reply(res, session_.undo());
    }));
    svr_.Post("/api/concerns", guarded([this](const httplib::Request& req, httplib::Response& res) {
        json_reply(res, session_.edit_concerns(concern_edit_from_json(detail::parse_body(req))));
    }));
}

} // namespace viva
