#include "witchbayes/http.hpp"

#include "witchbayes/error.hpp"

#include "httplib.h"

namespace witchbayes {

struct HttpFrontend::Impl {
    explicit Impl(SessionService& s) : service(s) {}
    SessionService& service;
    httplib::Server server;
};

HttpFrontend::HttpFrontend(SessionService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svc = impl_->service;
    impl_->server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"format":1,"status":200,"result":{"ok":true}})", "application/json");
    });
    impl_->server.Post(R"(/v1/([a-z_]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json request = nlohmann::json::object();
        if (!req.body.empty()) {
            try {
                request = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::exception& e) {
                request = nullptr;
            }
        }
        nlohmann::json response;
        if (!request.is_object()) {
            response = {{"format", 1},
                        {"status", 400},
                        {"error", {{"kind", "BadRequest"}, {"message", "body must be a JSON object"}}}};
        } else {
            request["op"] = req.matches[1].str();
            response = svc.handle(request);
        }
        res.status = SessionService::status_of(response);
        res.set_content(response.dump(), "application/json; charset=utf-8");
    });
}

HttpFrontend::~HttpFrontend() = default;

int HttpFrontend::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpFrontend::run() { return impl_->server.listen_after_bind(); }

void HttpFrontend::stop() { impl_->server.stop(); }

std::pair<std::string, int> parse_bind_address(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon + 1 == text.size()) {
        throw Error(ErrorKind::InvalidArgument, "bind address must be host:port, got '" + text + "'");
    }
    try {
        std::size_t used = 0;
        const int port = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range("port");
        return {text.substr(0, colon), port};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidArgument, "bad port in '" + text + "'");
    }
}

}  // namespace witchbayes
