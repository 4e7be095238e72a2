#include "socialsim/service.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "socialsim/dsl.hpp"
#include "socialsim/projection.hpp"
#include "socialsim/session.hpp"

namespace socialsim {

namespace {

struct SessionSlot {
    std::mutex mutex;
    std::condition_variable changed;
    std::unique_ptr<Session> session;
};

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, {{"error", message}, {"code", code}});
}

int status_for(const SocialError& e) {
    const std::string& c = e.code();
    if (c == "awaiting-player" || c == "no-pending-prompt" || c == "busy") return 409;
    return 400;
}

bool valid_scenario_id(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    for (char ch : id)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') return false;
    return true;
}

Json diagnostics_json(const std::vector<dsl::Diagnostic>& diags) {
    Json arr = Json::array();
    for (const auto& d : diags)
        arr.push_back({{"severity", d.severity == dsl::Severity::Error ? "error" : "warning"},
                       {"line", d.line},
                       {"column", d.column},
                       {"code", d.code},
                       {"message", d.message}});
    return arr;
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;
    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<SessionSlot>> sessions;
    std::uint64_t next_id = 0;
    std::atomic<bool> stopping{false};
    int bound_port = -1;

    explicit Impl(ServiceOptions o) : options(std::move(o)) { routes(); }

    std::shared_ptr<SessionSlot> find(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    Json events_json(const Session& s, std::uint64_t since, std::size_t limit = 0) const {
        Json arr = Json::array();
        for (const auto& e : s.log().since(since, limit)) arr.push_back(e.public_json());
        return arr;
    }

    static std::optional<Json> body_json(const httplib::Request& req, httplib::Response& res) {
        if (req.body.empty()) return Json::object();
        Json j = Json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            send_error(res, 400, "bad-request", "request body must be a JSON object");
            return std::nullopt;
        }
        return j;
    }

    static std::uint64_t since_of(const Json& body, std::uint64_t fallback) {
        auto it = body.find("since");
        if (it != body.end() && it->is_number_unsigned()) return it->get<std::uint64_t>();
        return fallback;
    }

    // Runs `fn` on the session named in the path with its lock held.
    template <typename Fn>
    void with_session(const httplib::Request& req, httplib::Response& res, Fn fn) {
        auto slot = find(req.matches[1]);
        if (!slot) {
            send_error(res, 404, "unknown-session", "unknown session '" + std::string(req.matches[1]) + "'");
            return;
        }
        std::unique_lock lock(slot->mutex);
        try {
            fn(*slot);
        } catch (const SocialError& e) {
            send_error(res, status_for(e), e.code(), e.what());
        }
        slot->changed.notify_all();
    }

    void create_session(const httplib::Request& req, httplib::Response& res) {
        auto body = body_json(req, res);
        if (!body) return;
        std::string text;
        if (auto t = body->find("scenario_text"); t != body->end() && t->is_string()) {
            text = t->get<std::string>();
        } else if (auto id = body->find("scenario_id"); id != body->end() && id->is_string()) {
            std::string name = id->get<std::string>();
            std::ifstream in(options.scenario_dir + "/" + name + ".social", std::ios::binary);
            if (options.scenario_dir.empty() || !valid_scenario_id(name) || !in) {
                send_error(res, 404, "unknown-scenario", "unknown scenario '" + name + "'");
                return;
            }
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        } else {
            send_error(res, 400, "bad-request", "expected 'scenario_text' or 'scenario_id'");
            return;
        }
        std::uint64_t seed = 0;
        if (auto s = body->find("seed"); s != body->end()) {
            if (!s->is_number_unsigned()) {
                send_error(res, 400, "bad-request", "'seed' must be a non-negative integer");
                return;
            }
            seed = s->get<std::uint64_t>();
        }
        auto parsed = dsl::parse(text);
        if (!parsed.ok()) {
            send_json(res, 422, {{"error", "scenario has errors"}, {"diagnostics", diagnostics_json(parsed.diagnostics)}});
            return;
        }
        auto slot = std::make_shared<SessionSlot>();
        try {
            slot->session = std::make_unique<Session>(std::make_shared<const ScenarioDoc>(std::move(*parsed.doc)), seed);
        } catch (const SocialError& e) {
            send_error(res, 422, e.code(), e.what());
            return;
        }
        std::string id;
        {
            std::lock_guard lock(sessions_mutex);
            id = "s" + std::to_string(++next_id);
            sessions.emplace(id, slot);
        }
        std::lock_guard lock(slot->mutex);
        send_json(res, 201, {{"session_id", id}, {"events", events_json(*slot->session, 0)}});
    }

    void stream_events(const std::shared_ptr<SessionSlot>& slot, std::uint64_t since, httplib::Response& res) {
        auto cursor = std::make_shared<std::uint64_t>(since);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [this, slot, cursor](std::size_t, httplib::DataSink& sink) {
            std::unique_lock lock(slot->mutex);
            slot->changed.wait_for(lock, std::chrono::milliseconds(250), [&] {
                return stopping.load() || slot->session->log().last_seq() > *cursor;
            });
            if (stopping.load()) {
                sink.done();
                return true;
            }
            std::string chunk;
            for (const auto& e : slot->session->log().since(*cursor)) {
                chunk += "event: " + std::string(to_string(e.kind)) + "\n";
                chunk += "id: " + std::to_string(e.seq) + "\n";
                chunk += "data: " + e.public_json().dump() + "\n\n";
                *cursor = e.seq;
            }
            lock.unlock();
            if (chunk.empty()) chunk = ": keep-alive\n\n";
            return sink.write(chunk.data(), chunk.size());
        });
    }

    void routes() {
        server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin}});
        server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });

        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create_session(req, res); });

        server.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](SessionSlot& s) { send_json(res, 200, observable_projection(*s.session)); });
        });

        server.Get(R"(/sessions/([^/]+)/debug/state)", [this](const httplib::Request& req, httplib::Response& res) {
            if (!find(req.matches[1])) {
                send_error(res, 404, "unknown-session", "unknown session '" + std::string(req.matches[1]) + "'");
                return;
            }
            if (!options.debug) {
                send_error(res, 403, "debug-disabled", "server was not started with --debug");
                return;
            }
            with_session(req, res, [&](SessionSlot& s) { send_json(res, 200, debug_projection(*s.session)); });
        });

        server.Post(R"(/sessions/([^/]+)/tick)", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = body_json(req, res);
            if (!body) return;
            long long count = body->value("count", 1LL);
            if (count < 1 || count > 1000) {
                send_error(res, 400, "bad-request", "'count' must be between 1 and 1000");
                return;
            }
            with_session(req, res, [&](SessionSlot& s) {
                Session& session = *s.session;
                std::uint64_t since = since_of(*body, session.log().last_seq());
                if (session.awaiting_player())
                    throw SocialError("awaiting-player", "a player response is pending");
                for (long long i = 0; i < count && !session.awaiting_player(); ++i) session.tick();
                send_json(res, 200, {{"tick", session.tick_count()},
                                     {"awaiting_player", session.awaiting_player()},
                                     {"events", events_json(session, since)}});
            });
        });

        server.Post(R"(/sessions/([^/]+)/player/initiate)", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = body_json(req, res);
            if (!body) return;
            if (!body->contains("exchange") || !(*body)["exchange"].is_string() || !body->contains("target") ||
                !(*body)["target"].is_string()) {
                send_error(res, 400, "bad-request", "expected string fields 'exchange' and 'target'");
                return;
            }
            with_session(req, res, [&](SessionSlot& s) {
                Session& session = *s.session;
                std::uint64_t since = since_of(*body, session.log().last_seq());
                std::optional<std::string> subject;
                if (auto it = body->find("subject"); it != body->end() && it->is_string()) subject = it->get<std::string>();
                std::optional<std::string_view> subject_view;
                if (subject) subject_view = *subject;
                std::size_t position = session.player_initiate((*body)["exchange"].get<std::string>(),
                                                               (*body)["target"].get<std::string>(), subject_view);
                send_json(res, 200, {{"position", position}, {"events", events_json(session, since)}});
            });
        });

        server.Post(R"(/sessions/([^/]+)/player/respond)", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = body_json(req, res);
            if (!body) return;
            auto choice = outcome_from_string(body->value("choice", ""));
            if (!body->contains("quest_id") || !(*body)["quest_id"].is_string() || !choice ||
                *choice == Outcome::Error) {
                send_error(res, 400, "bad-request", "expected 'quest_id' and 'choice' (accept, neutral or reject)");
                return;
            }
            with_session(req, res, [&](SessionSlot& s) {
                Session& session = *s.session;
                std::uint64_t since = since_of(*body, session.log().last_seq());
                session.player_respond((*body)["quest_id"].get<std::string>(), *choice);
                send_json(res, 200, {{"events", events_json(session, since)}});
            });
        });

        server.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
            auto slot = find(req.matches[1]);
            if (!slot) {
                send_error(res, 404, "unknown-session", "unknown session '" + std::string(req.matches[1]) + "'");
                return;
            }
            std::uint64_t since = 0;
            std::size_t limit = 0;
            try {
                if (req.has_param("since")) since = std::stoull(req.get_param_value("since"));
                if (req.has_param("limit")) limit = std::stoull(req.get_param_value("limit"));
            } catch (const std::exception&) {
                send_error(res, 400, "bad-request", "'since' and 'limit' must be non-negative integers");
                return;
            }
            bool stream = req.get_param_value("stream") == "1" ||
                          req.get_header_value("Accept").find("text/event-stream") != std::string::npos;
            if (stream) {
                stream_events(slot, since, res);
                return;
            }
            std::lock_guard lock(slot->mutex);
            const Session& session = *slot->session;
            send_json(res, 200, {{"events", events_json(session, since, limit)}, {"last_seq", session.log().last_seq()}});
        });
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind() {
    if (impl_->options.port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(impl_->options.host);
    } else {
        impl_->bound_port = impl_->server.bind_to_port(impl_->options.host, impl_->options.port)
                                ? impl_->options.port
                                : -1;
    }
    return impl_->bound_port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
    impl_->stopping = true;
    {
        std::lock_guard lock(impl_->sessions_mutex);
        for (auto& [id, slot] : impl_->sessions) slot->changed.notify_all();
    }
    impl_->server.stop();
}

int Service::port() const { return impl_->bound_port; }

}  // namespace socialsim
