#include "gaas/http_service.hpp"

#include <ctime>
#include <thread>

#include "gaas/detail/chrono.hpp"
#include "gaas/detail/num.hpp"
#include "gaas/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gaas {

using nlohmann::json;

namespace {

json error_body(const std::string& kind, const std::string& what) {
    return json{{"error", kind}, {"detail", what}};
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::int64_t read_timestamp(const json& j) {
    if (!j.contains("timestamp")) return static_cast<std::int64_t>(std::time(nullptr));
    const json& t = j.at("timestamp");
    if (t.is_number_integer()) return t.get<std::int64_t>();
    if (t.is_string()) {
        const auto ts = detail::parse_iso8601(t.get<std::string>());
        if (!ts) throw ValidationFailed("timestamp is not ISO-8601: " + t.get<std::string>());
        return *ts;
    }
    throw ValidationFailed("timestamp must be unix seconds or an ISO-8601 string");
}

ActionSubmission parse_submission(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ValidationFailed(std::string("body is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationFailed("body must be a JSON object");

    ActionSubmission s;
    try {
        s.domain = j.at("domain").get<std::string>();
        s.action.agent_id = j.at("agent_id").get<std::string>();
        const std::string kind = j.value("kind", std::string("text_output"));
        if (kind == "text_output") {
            s.action.kind = ActionKind::text_output;
            s.action.text = j.at("text").get<std::string>();
        } else if (kind == "trade_order") {
            s.action.kind = ActionKind::trade_order;
            const json& o = j.at("order");
            TradeOrder order;
            order.asset = o.at("asset").get<std::string>();
            const auto side = order_side_from_string(o.at("side").get<std::string>());
            if (!side) throw ValidationFailed("order.side must be buy or sell");
            order.side = *side;
            order.quantity = o.at("quantity").get<std::int64_t>();
            order.limit_price = o.at("limit_price").get<double>();
            s.action.order = order;
        } else {
            throw ValidationFailed("kind must be text_output or trade_order");
        }
        s.action.timestamp = read_timestamp(j);
        s.action.sequence = j.value("sequence", std::int64_t{0});
        if (j.contains("idempotency_key"))
            s.idempotency_key = j.at("idempotency_key").get<std::string>();
        if (j.contains("portfolio")) {
            const json& p = j.at("portfolio");
            s.portfolio.cash = p.value("cash", 0.0);
            if (p.contains("holdings"))
                for (const auto& [asset, qty] : p.at("holdings").items())
                    s.portfolio.holdings[asset] = qty.get<std::int64_t>();
            if (p.contains("trades_today"))
                for (const auto& [asset, n] : p.at("trades_today").items())
                    s.portfolio.trades_today[asset] = n.get<int>();
        }
        if (j.contains("market")) {
            const json& m = j.at("market");
            if (m.contains("last_close"))
                for (const auto& [asset, px] : m.at("last_close").items())
                    s.market.last_close[asset] = px.get<double>();
            if (m.contains("rsi"))
                for (const auto& [asset, r] : m.at("rsi").items())
                    s.market.rsi[asset] = r.get<double>();
        }
    } catch (const json::exception& e) {
        throw ValidationFailed(std::string("submission: ") + e.what());
    }
    return s;
}

json render_response(const EnforcementResponse& r) {
    json triggering = json::array();
    for (const auto& [rule, verdict] : r.decision.triggering)
        triggering.push_back({{"rule_id", rule}, {"verdict", to_string(verdict)}});
    json j{{"verdict", to_string(r.decision.verdict)},
           {"reason", to_string(r.decision.reason)},
           {"trust_before", r.decision.trust_before},
           {"trust_after", r.decision.trust_after},
           {"escalation_flag", r.decision.escalation_flag},
           {"triggering", triggering},
           {"policy_version", r.policy_version}};
    if (r.ticket_id) j["ticket_id"] = *r.ticket_id;
    return j;
}

json render_ticket(const EscalationTicket& t) {
    return json{{"id", t.id},
                {"status", to_string(t.status)},
                {"agent_id", t.action.agent_id},
                {"timestamp", detail::format_iso8601(t.action.timestamp)},
                {"verdict", to_string(t.decision.verdict)},
                {"reason", to_string(t.decision.reason)},
                {"reviewer", t.reviewer}};
}

}  // namespace

struct HttpService::Impl {
    std::shared_ptr<Gateway> gateway;
    httplib::Server server;
    std::thread worker;
    int port{0};

    explicit Impl(std::shared_ptr<Gateway> gw) : gateway(std::move(gw)) { route(); }

    void route() {
        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, json{{"status", "ok"}});
        });

        server.Post("/v1/actions", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const auto sub = parse_submission(req.body);
                reply(res, 200, render_response(gateway->intercept(sub)));
            } catch (const ValidationFailed& e) {
                reply(res, 400, error_body("validation_failed", e.what()));
            } catch (const UnknownDomain& e) {
                reply(res, 404, error_body("unknown_domain", e.what()));
            } catch (const Unavailable& e) {
                reply(res, 503, error_body("unavailable", e.what()));
            }
        });

        server.Put("/v1/policy", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string domain = req.get_param_value("domain");
            if (domain.empty()) {
                reply(res, 400, error_body("validation_failed", "domain query parameter required"));
                return;
            }
            try {
                const int version = gateway->put_policy(domain, req.body);
                reply(res, 200, json{{"domain", domain}, {"version", version}});
            } catch (const ParseError& e) {
                reply(res, 422, error_body("parse_error", e.what()));
            } catch (const SchemaError& e) {
                reply(res, 422, error_body("schema_error", e.what()));
            } catch (const CompileError& e) {
                reply(res, 422, error_body("compile_error", e.what()));
            }
        });

        server.Get("/v1/trust/:agent", [this](const httplib::Request& req, httplib::Response& res) {
            const auto t = gateway->get_trust(req.path_params.at("agent"));
            json per_rule = json::object();
            for (const auto& [rule, n] : t.per_rule_counts) per_rule[rule] = n;
            reply(res, 200,
                  json{{"agent_id", t.agent_id},
                       {"n_actions", t.n_actions},
                       {"v_coercive", t.v_coercive},
                       {"v_normative", t.v_normative},
                       {"v_mimetic", t.v_mimetic},
                       {"current_tf", t.current_tf},
                       {"per_rule_counts", per_rule}});
        });

        server.Get("/v1/escalations", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<TicketStatus> filter;
            if (req.has_param("status")) {
                const std::string s = req.get_param_value("status");
                if (s == "pending") filter = TicketStatus::pending;
                else if (s == "approved") filter = TicketStatus::approved;
                else if (s == "denied") filter = TicketStatus::denied;
                else {
                    reply(res, 400, error_body("validation_failed", "unknown status filter"));
                    return;
                }
            }
            json out = json::array();
            for (const auto& t : gateway->list_escalations(filter)) out.push_back(render_ticket(t));
            reply(res, 200, out);
        });

        server.Post("/v1/escalations/:id/resolve",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        json j;
                        try {
                            j = json::parse(req.body);
                        } catch (const json::parse_error& e) {
                            reply(res, 400, error_body("validation_failed", e.what()));
                            return;
                        }
                        const std::string resolution = j.value("resolution", std::string());
                        if (resolution != "approve" && resolution != "deny") {
                            reply(res, 400,
                                  error_body("validation_failed",
                                             "resolution must be approve or deny"));
                            return;
                        }
                        try {
                            const auto r = gateway->resolve_escalation(
                                req.path_params.at("id"), resolution == "approve",
                                j.value("reviewer", std::string("operator")));
                            reply(res, 200, render_response(r));
                        } catch (const UnknownTicket& e) {
                            reply(res, 404, error_body("unknown_ticket", e.what()));
                        } catch (const AlreadyResolved& e) {
                            reply(res, 409, error_body("already_resolved", e.what()));
                        }
                    });

        server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                        std::exception_ptr ep) {
            std::string what = "unexpected error";
            try {
                if (ep) std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            reply(res, 500, error_body("internal", what));
        });
    }
};

HttpService::HttpService(std::shared_ptr<Gateway> gateway)
    : impl_(std::make_unique<Impl>(std::move(gateway))) {}

HttpService::~HttpService() { stop(); }

void HttpService::start(const std::string& host, int port) {
    if (impl_->worker.joinable()) throw Error("service already started");
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(host);
        if (impl_->port <= 0) throw Unavailable("cannot bind " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw Unavailable("cannot bind " + host + ":" + std::to_string(port));
        impl_->port = port;
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpService::stop() {
    if (!impl_) return;
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int HttpService::bound_port() const { return impl_->port; }

std::pair<std::string, int> parse_listen_address(const std::string& listen) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos)
        throw ConfigError("listen address must look like host:port, got '" + listen + "'");
    std::string host = listen.substr(0, colon);
    if (host.empty()) host = "127.0.0.1";
    const auto port = detail::parse_int(listen.substr(colon + 1));
    if (!port || *port < 0 || *port > 65535)
        throw ConfigError("listen port out of range: " + listen);
    return {host, static_cast<int>(*port)};
}

}  // namespace gaas
