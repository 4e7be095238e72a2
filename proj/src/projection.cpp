#include "socialsim/projection.hpp"

#include <algorithm>

namespace socialsim {

namespace {

Json status_list(const std::vector<StatusInstance>& statuses) {
    Json arr = Json::array();
    for (const auto& s : statuses) {
        Json j;
        j["status"] = s.kind;
        if (s.target) j["target"] = *s.target;
        j["remaining"] = s.remaining ? Json(*s.remaining) : Json("permanent");
        arr.push_back(std::move(j));
    }
    return arr;
}

Json prompt_json(const Session& session) {
    if (!session.awaiting_player()) return nullptr;
    const QuestInstance& q = *session.active_quest();
    const ExchangeDef* ex = session.scenario().find_exchange(q.exchange);
    Json j;
    j["quest"] = q.id;
    j["exchange"] = q.exchange;
    j["name"] = ex && !ex->name.empty() ? ex->name : q.exchange;
    j["initiator"] = q.aliases->initiator;
    j["target"] = q.aliases->target;
    if (q.aliases->subject) j["subject"] = *q.aliases->subject;
    j["choices"] = Json::array({"accept", "neutral", "reject"});
    return j;
}

void collect_private(const Json& j, std::vector<std::string>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (std::find(std::begin(kPrivateKeys), std::end(kPrivateKeys), key) != std::end(kPrivateKeys))
                out.push_back(key);
            collect_private(value, out);
        }
    } else if (j.is_array()) {
        for (const auto& v : j) collect_private(v, out);
    }
}

}  // namespace

Json observable_projection(const Session& session, std::size_t recent_lines) {
    const auto& doc = session.scenario();
    const auto& state = session.state();
    Json out;
    out["tick"] = session.tick_count();
    out["location"] = session.location();
    out["player"] = session.player();
    out["awaiting_player"] = session.awaiting_player();
    out["prompt"] = prompt_json(session);

    Json cast = Json::array();
    for (const auto& c : doc.characters) {
        Json j;
        j["id"] = c.id;
        j["name"] = c.display_name();
        j["gender"] = c.gender;
        j["race"] = c.race;
        j["location"] = c.location;
        j["player"] = c.player;
        j["traits"] = c.traits;
        j["statuses"] = status_list(state.statuses(c.id));
        cast.push_back(std::move(j));
    }
    out["cast"] = std::move(cast);

    Json rels = Json::array();
    for (const auto& r : state.relationships())
        if (r.active) rels.push_back({{"relationship", r.kind}, {"a", r.a}, {"b", r.b}});
    out["relationships"] = std::move(rels);

    Json exchanges = Json::array();
    for (const auto& x : doc.exchanges)
        exchanges.push_back({{"id", x.id}, {"name", x.name.empty() ? x.id : x.name}, {"subject", x.has_subject}});
    out["exchanges"] = std::move(exchanges);

    std::vector<const Event*> lines;
    const auto& events = session.log().events();
    for (auto it = events.rbegin(); it != events.rend() && lines.size() < recent_lines; ++it)
        if (it->kind == EventKind::SceneLine) lines.push_back(&*it);
    Json scene = Json::array();
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) scene.push_back((*it)->to_json());
    out["scene"] = std::move(scene);
    out["queue_length"] = session.queue().size();
    out["last_seq"] = session.log().last_seq();
    return out;
}

Json debug_projection(const Session& session) {
    Json out = observable_projection(session);
    Json chars = Json::array();
    for (const auto& c : session.scenario().characters)
        chars.push_back({{"id", c.id}, {"orientation", c.orientation}, {"likes", c.likes}, {"dislikes", c.dislikes}});
    out["characters"] = std::move(chars);
    out["social"] = session.state().to_json();
    Json memories = Json::object();
    for (const auto& c : session.scenario().characters) {
        if (c.player) continue;
        Json entries = Json::array();
        for (const auto& d : session.memory(c.id)) entries.push_back(desire_to_json(d));
        memories[c.id] = std::move(entries);
    }
    out["memories"] = std::move(memories);
    Json queue = Json::array();
    for (const auto& e : session.queue()) {
        Json j{{"exchange", e.exchange}, {"initiator", e.initiator}, {"target", e.target}};
        if (e.subject) j["subject"] = *e.subject;
        queue.push_back(std::move(j));
    }
    out["queue"] = std::move(queue);
    out["rng_draws"] = session.rng_draws();
    return out;
}

std::vector<std::string> find_private_keys(const Json& j) {
    std::vector<std::string> out;
    collect_private(j, out);
    return out;
}

}  // namespace socialsim
