#pragma once

// HTTP facade over the gateway. The same operations remain callable in-process
// (the simulator embeds the gateway directly); this layer only translates
// JSON bodies to and from the library types.
//
//   POST /v1/actions                   submit an action for enforcement
//   PUT  /v1/policy?domain=<d>         parse, validate, activate a rule pack
//   GET  /v1/trust/:agent              trust snapshot (fresh for unknown ids)
//   GET  /v1/escalations?status=<s>    tickets in creation order
//   POST /v1/escalations/:id/resolve   {"resolution": "approve"|"deny", "reviewer": ...}
//   GET  /healthz
//
// Errors map to status codes: malformed submissions 400, unknown domain or
// ticket 404, no active policy 503, rejected policy documents 422, repeated
// resolution 409.

#include <memory>
#include <string>

#include "gaas/gateway.hpp"

namespace gaas {

class HttpService {
public:
    explicit HttpService(std::shared_ptr<Gateway> gateway);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// binds and serves on a background thread; port 0 picks a free port
    void start(const std::string& host, int port);
    void stop();
    int bound_port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// "host:port" split; defaults to 127.0.0.1 when the host part is empty
std::pair<std::string, int> parse_listen_address(const std::string& listen);

}  // namespace gaas
