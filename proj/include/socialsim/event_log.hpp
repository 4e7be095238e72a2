#pragma once

// Append-only session event log. Each event serializes to one JSON object
// per line with keys `seq`, `tick`, `kind` first and payload keys after in
// insertion order; this text is the replay and golden-file contract.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace socialsim {

using Json = nlohmann::ordered_json;

enum class EventKind {
    SessionCreated,
    GoalsFormed,
    DesireComputed,
    ExchangeQueued,
    ExchangeStarted,
    ResultComputed,
    PlayerPrompt,
    PlayerChoice,
    SceneGoTo,
    SceneLine,
    ExchangeCompleted,
    TriggerFired,
    StateDelta,
    StatusExpired,
    Notified,
    Error,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

/// Events that carry private social state (scores, volitions). Outside
/// debug mode only their envelope is shown.
bool is_private(EventKind k);

struct Event {
    std::uint64_t seq = 0;
    std::int64_t tick = 0;
    EventKind kind = EventKind::Error;
    Json payload = Json::object();

    Json to_json() const;
    /// Envelope only for private kinds.
    Json public_json() const;
    std::string line() const { return to_json().dump(); }
};

class EventLog {
public:
    const Event& append(std::int64_t tick, EventKind kind, Json payload);

    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    const std::vector<Event>& events() const { return events_; }
    const Event& back() const { return events_.back(); }
    std::uint64_t last_seq() const { return events_.empty() ? 0 : events_.back().seq; }

    /// Events with seq > since, at most `limit` of them (0 = unlimited).
    std::vector<Event> since(std::uint64_t since, std::size_t limit = 0) const;

    std::vector<std::string> lines() const;
    /// Newline-terminated lines.
    std::string text() const;

private:
    std::vector<Event> events_;
};

/// Splits newline-terminated text into lines. Throws SocialError
/// ("malformed-log") when the final line is not terminated.
std::vector<std::string> split_log_lines(std::string_view text);

/// Parses one log line back into an event; throws SocialError
/// ("malformed-log") for anything that is not a well-formed envelope.
Event parse_event_line(std::string_view line);

}  // namespace socialsim
