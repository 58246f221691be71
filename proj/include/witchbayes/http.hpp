#pragma once

// HTTP transport for SessionService.
//
//   POST /v1/<op>   body: request JSON without "op"; response: the same
//                   envelope the stdio transport prints, HTTP status = "status".
//   GET  /v1/health
//
// Request and response payloads are identical to stdio; only the op moves
// into the path.

#include "witchbayes/session.hpp"

#include <memory>
#include <string>

namespace witchbayes {

class HttpFrontend {
public:
    explicit HttpFrontend(SessionService& service);
    ~HttpFrontend();
    HttpFrontend(const HttpFrontend&) = delete;
    HttpFrontend& operator=(const HttpFrontend&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks serving until stop().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// "host:port" split; throws Error(InvalidArgument) on malformed input.
std::pair<std::string, int> parse_bind_address(const std::string& text);

}  // namespace witchbayes
