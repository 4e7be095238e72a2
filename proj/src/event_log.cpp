#include "socialsim/event_log.hpp"

#include <algorithm>
#include <array>

#include "socialsim/types.hpp"

namespace socialsim {

namespace {

constexpr std::array<std::string_view, 16> kKindNames = {
    "SessionCreated", "GoalsFormed",  "DesireComputed",    "ExchangeQueued",
    "ExchangeStarted", "ResultComputed", "PlayerPrompt",   "PlayerChoice",
    "SceneGoTo",      "SceneLine",    "ExchangeCompleted", "TriggerFired",
    "StateDelta",     "StatusExpired", "Notified",         "Error",
};

SocialError malformed(const std::string& what) { return SocialError("malformed-log", what); }

}  // namespace

std::string_view to_string(EventKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == s) return static_cast<EventKind>(i);
    return std::nullopt;
}

bool is_private(EventKind k) {
    return k == EventKind::GoalsFormed || k == EventKind::DesireComputed || k == EventKind::ResultComputed ||
           k == EventKind::StateDelta;
}

Json Event::to_json() const {
    Json j;
    j["seq"] = seq;
    j["tick"] = tick;
    j["kind"] = std::string(to_string(kind));
    for (const auto& [key, value] : payload.items()) j[key] = value;
    return j;
}

Json Event::public_json() const {
    if (!is_private(kind)) return to_json();
    Json j;
    j["seq"] = seq;
    j["tick"] = tick;
    j["kind"] = std::string(to_string(kind));
    return j;
}

const Event& EventLog::append(std::int64_t tick, EventKind kind, Json payload) {
    Event e;
    e.seq = events_.size() + 1;
    e.tick = tick;
    e.kind = kind;
    e.payload = std::move(payload);
    events_.push_back(std::move(e));
    return events_.back();
}

std::vector<Event> EventLog::since(std::uint64_t since, std::size_t limit) const {
    std::vector<Event> out;
    for (std::size_t i = static_cast<std::size_t>(std::min<std::uint64_t>(since, events_.size())); i < events_.size();
         ++i) {
        if (limit && out.size() >= limit) break;
        out.push_back(events_[i]);
    }
    return out;
}

std::vector<std::string> EventLog::lines() const {
    std::vector<std::string> out;
    out.reserve(events_.size());
    for (const auto& e : events_) out.push_back(e.line());
    return out;
}

std::string EventLog::text() const {
    std::string out;
    for (const auto& e : events_) {
        out += e.line();
        out += '\n';
    }
    return out;
}

std::vector<std::string> split_log_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) throw malformed("log ends without a newline (truncated?)");
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

Event parse_event_line(std::string_view line) {
    Json j = Json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw malformed("line is not a JSON object");
    auto seq = j.find("seq");
    auto tick = j.find("tick");
    auto kind = j.find("kind");
    if (seq == j.end() || !seq->is_number_unsigned() || tick == j.end() || !tick->is_number_integer() ||
        kind == j.end() || !kind->is_string())
        throw malformed("line lacks seq/tick/kind");
    auto k = event_kind_from_string(kind->get<std::string>());
    if (!k) throw malformed("unknown event kind '" + kind->get<std::string>() + "'");
    Event e;
    e.seq = seq->get<std::uint64_t>();
    e.tick = tick->get<std::int64_t>();
    e.kind = *k;
    for (const auto& [key, value] : j.items())
        if (key != "seq" && key != "tick" && key != "kind") e.payload[key] = value;
    return e;
}

}  // namespace socialsim
