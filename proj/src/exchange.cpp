#include "socialsim/exchange.hpp"

#include "socialsim/event_log.hpp"

namespace socialsim {

int stage_number(Stage s) { return static_cast<int>(s); }

bool legal_transition(Stage from, Stage to) {
    if (to == Stage::Error) return from != Stage::Error;
    switch (from) {
        case Stage::Waiting: return to == Stage::Bound;
        case Stage::Bound: return to == Stage::Performing;
        case Stage::Performing: return to == Stage::Succeeded || to == Stage::Failed;
        case Stage::Error: return to == Stage::Waiting;
        default: return false;
    }
}

Stage completion_stage(Outcome o) { return o == Outcome::Accept ? Stage::Succeeded : Stage::Failed; }

std::string instantiate_line(std::string_view tmpl, const SocialState& state, const Bindings& roles) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                auto name = tmpl.substr(i + 1, close - i - 1);
                auto role = role_from_string(name);
                if (role && (*role != Role::Subject || roles.subject)) {
                    out += state.character(roles.resolve(*role)).display_name();
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

std::optional<std::string> check_effects(const std::vector<Effect>& effects, const SocialState& state,
                                         const Bindings& roles) {
    const auto& doc = state.scenario();
    auto bound = [&](Role r) { return r != Role::Subject || roles.subject.has_value(); };
    auto present = [&](Role r) { return bound(r) && state.has_character(roles.resolve(r)); };
    for (const auto& e : effects) {
        if (!present(e.from)) return "effect references an absent " + std::string(to_string(e.from));
        if (e.to && !present(*e.to)) return "effect references an absent " + std::string(to_string(*e.to));
        switch (e.kind) {
            case Effect::Kind::ScoreDelta:
                if (!doc.find_network(e.symbol)) return "undeclared network '" + e.symbol + "'";
                if (!e.to || roles.resolve(e.from) == roles.resolve(*e.to)) return "self-directed network effect";
                break;
            case Effect::Kind::StatusAdd: {
                const StatusDecl* s = doc.find_status(e.symbol);
                if (!s) return "undeclared status '" + e.symbol + "'";
                if (s->targeted != e.to.has_value()) return "status '" + e.symbol + "' target mismatch";
                break;
            }
            case Effect::Kind::StatusRemove:
                if (!doc.find_status(e.symbol)) return "undeclared status '" + e.symbol + "'";
                break;
            case Effect::Kind::RelationshipSet:
                if (!doc.has_relationship(e.symbol)) return "undeclared relationship '" + e.symbol + "'";
                if (roles.initiator == roles.target) return "relationship with oneself";
                break;
        }
    }
    return std::nullopt;
}

void apply_effects(const std::vector<Effect>& effects, SocialState& state, const Bindings& roles) {
    for (const auto& e : effects) {
        const CharacterId& from = roles.resolve(e.from);
        switch (e.kind) {
            case Effect::Kind::ScoreDelta:
                state.apply_delta(e.map, e.symbol, from, roles.resolve(*e.to), e.amount);
                break;
            case Effect::Kind::StatusAdd: {
                std::optional<CharacterId> target;
                if (e.to) target = roles.resolve(*e.to);
                state.add_status(from, e.symbol, target, e.duration);
                break;
            }
            case Effect::Kind::StatusRemove: state.remove_status(from, e.symbol); break;
            case Effect::Kind::RelationshipSet:
                state.set_relationship(e.symbol, roles.initiator, roles.target, e.active);
                break;
        }
    }
}

Json changes_to_json(const std::vector<StateChange>& changes) {
    Json arr = Json::array();
    for (const auto& c : changes) {
        Json j;
        switch (c.kind) {
            case StateChange::Kind::Score:
                j["change"] = "score";
                j["map"] = std::string(to_string(c.map));
                j["network"] = c.symbol;
                j["owner"] = c.owner;
                j["other"] = c.other;
                j["delta"] = c.delta;
                j["score"] = c.score;
                break;
            case StateChange::Kind::StatusAdd:
                j["change"] = "status_add";
                j["status"] = c.symbol;
                j["who"] = c.owner;
                if (!c.other.empty()) j["target"] = c.other;
                j["remaining"] = c.remaining ? Json(*c.remaining) : Json("permanent");
                break;
            case StateChange::Kind::StatusRemove:
                j["change"] = "status_remove";
                j["status"] = c.symbol;
                j["who"] = c.owner;
                break;
            case StateChange::Kind::Relationship:
                j["change"] = "relationship";
                j["relationship"] = c.symbol;
                j["a"] = c.owner;
                j["b"] = c.other;
                j["active"] = c.active;
                break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace socialsim
