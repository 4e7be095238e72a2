#include "socialsim/social_state.hpp"

#include <algorithm>

namespace socialsim {

namespace {

const std::vector<StatusInstance> kNoStatuses;

std::pair<CharacterId, CharacterId> ordered_pair(std::string_view a, std::string_view b) {
    if (b < a) std::swap(a, b);
    return {CharacterId(a), CharacterId(b)};
}

bool contains_sorted(const std::vector<std::string>& v, std::string_view s) {
    return std::binary_search(v.begin(), v.end(), s, std::less<>{});
}

}  // namespace

std::map<CharacterId, Score>& NetworkTriple::scores(ScoreMap m) {
    return m == ScoreMap::Value ? value : (m == ScoreMap::Goal ? goal : belief);
}

const std::map<CharacterId, Score>& NetworkTriple::scores(ScoreMap m) const {
    return m == ScoreMap::Value ? value : (m == ScoreMap::Goal ? goal : belief);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

SocialState::SocialState(std::shared_ptr<const ScenarioDoc> scenario) : scenario_(std::move(scenario)) {
    const auto& doc = *scenario_;
    for (const auto& owner : doc.characters) {
        for (const auto& net : doc.networks) {
            NetworkTriple t;
            t.owner = owner.id;
            t.network = net.id;
            for (const auto& other : doc.characters) {
                if (other.id == owner.id) continue;
                t.value[other.id] = net.initial;
                t.goal[other.id] = net.initial;
                t.belief[other.id] = net.initial;
            }
            triples_.emplace(std::make_pair(owner.id, net.id), std::move(t));
        }
    }
    for (const auto& c : doc.characters) {
        for (const auto& s : c.scores) {
            const NetworkDecl* net = doc.find_network(s.network);
            if (!net || s.other == c.id || !doc.find_character(s.other))
                throw SocialError("invalid-scenario", "invalid initial score on '" + c.id + "'");
            triple_mut(c.id, s.network).scores(s.map)[s.other] = net->clamp(s.value);
        }
        for (const auto& s : c.statuses) add_status(c.id, s.kind, s.target, s.duration);
        for (const auto& r : c.relationships) set_relationship(r.kind, c.id, r.other, true);
    }
    changes_.clear();
}

const CharacterDecl& SocialState::character(std::string_view id) const {
    if (const auto* c = scenario_->find_character(id)) return *c;
    throw SocialError("unknown-character", "unknown character '" + std::string(id) + "'");
}

void SocialState::require_character(std::string_view id) const { (void)character(id); }

const NetworkDecl& SocialState::network(std::string_view id) const {
    if (const auto* n = scenario_->find_network(id)) return *n;
    throw SocialError("unknown-network", "unknown network '" + std::string(id) + "'");
}

bool SocialState::has_trait(std::string_view who, std::string_view trait) const {
    return contains_sorted(character(who).traits, trait);
}

bool SocialState::likes(std::string_view who, std::string_view trait) const {
    return contains_sorted(character(who).likes, trait);
}

bool SocialState::dislikes(std::string_view who, std::string_view trait) const {
    return contains_sorted(character(who).dislikes, trait);
}

NetworkTriple& SocialState::triple_mut(std::string_view owner, std::string_view net) {
    auto it = triples_.find(std::make_pair(CharacterId(owner), std::string(net)));
    if (it == triples_.end()) {
        require_character(owner);
        network(net);
        throw SocialError("unknown-triple", "no network triple for '" + std::string(owner) + "'");
    }
    return it->second;
}

const NetworkTriple& SocialState::triple(std::string_view owner, std::string_view net) const {
    return const_cast<SocialState*>(this)->triple_mut(owner, net);
}

Score SocialState::get(ScoreMap map, std::string_view net, std::string_view from, std::string_view to) const {
    if (from == to) throw SocialError("self-directed", "self-directed network value");
    const auto& decl = network(net);
    require_character(to);
    const auto& scores = triple(from, net).scores(map);
    auto it = scores.find(CharacterId(to));
    return it == scores.end() ? decl.initial : it->second;
}

int SocialState::apply_delta(ScoreMap map, std::string_view net, std::string_view from, std::string_view to,
                             int delta) {
    if (from == to) throw SocialError("self-directed", "self-directed network value");
    const auto& decl = network(net);
    require_character(to);
    auto& scores = triple_mut(from, net).scores(map);
    auto [it, inserted] = scores.try_emplace(CharacterId(to), decl.initial);
    Score before = it->second;
    Score after = decl.clamp(static_cast<long long>(before) + delta);
    int applied = after - before;
    if (applied == 0) return 0;
    it->second = after;
    StateChange ch;
    ch.kind = StateChange::Kind::Score;
    ch.map = map;
    ch.symbol = std::string(net);
    ch.owner = CharacterId(from);
    ch.other = CharacterId(to);
    ch.delta = applied;
    ch.score = after;
    changes_.push_back(std::move(ch));
    return applied;
}

void SocialState::set_score(ScoreMap map, std::string_view net, std::string_view from, std::string_view to,
                            long long v) {
    if (from == to) throw SocialError("self-directed", "self-directed network value");
    const auto& decl = network(net);
    require_character(to);
    triple_mut(from, net).scores(map)[CharacterId(to)] = decl.clamp(v);
}

void SocialState::set_relationship(std::string_view kind, std::string_view a, std::string_view b, bool active) {
    if (a == b) throw SocialError("self-directed", "relationship with oneself");
    if (!scenario_->has_relationship(kind))
        throw SocialError("unknown-relationship", "undeclared relationship '" + std::string(kind) + "'");
    require_character(a);
    require_character(b);
    auto [x, y] = ordered_pair(a, b);
    auto key = std::make_tuple(std::string(kind), x, y);
    auto it = relationships_.find(key);
    if (it != relationships_.end() && it->second == active) return;
    relationships_[key] = active;
    StateChange ch;
    ch.kind = StateChange::Kind::Relationship;
    ch.symbol = std::string(kind);
    ch.owner = x;
    ch.other = y;
    ch.active = active;
    changes_.push_back(std::move(ch));
}

bool SocialState::relationship(std::string_view kind, std::string_view a, std::string_view b) const {
    auto [x, y] = ordered_pair(a, b);
    auto it = relationships_.find(std::make_tuple(std::string(kind), x, y));
    return it != relationships_.end() && it->second;
}

std::vector<RelationshipRecord> SocialState::relationships() const {
    std::vector<RelationshipRecord> out;
    out.reserve(relationships_.size());
    for (const auto& [key, active] : relationships_)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), active});
    return out;
}

void SocialState::add_status(std::string_view who, std::string_view kind, std::optional<CharacterId> target,
                             std::optional<int> duration) {
    require_character(who);
    const StatusDecl* decl = scenario_->find_status(kind);
    if (!decl) throw SocialError("unknown-status", "undeclared status '" + std::string(kind) + "'");
    if (decl->targeted && !target)
        throw SocialError("status-target", "status '" + std::string(kind) + "' requires a target");
    if (!decl->targeted && target)
        throw SocialError("status-target", "status '" + std::string(kind) + "' does not take a target");
    if (target) require_character(*target);
    int ticks = duration.value_or(decl->duration);
    std::optional<int> remaining = ticks > 0 ? std::optional<int>(ticks) : std::nullopt;
    auto& list = statuses_[CharacterId(who)];
    auto it = std::find_if(list.begin(), list.end(),
                           [&](const StatusInstance& s) { return s.kind == kind && s.target == target; });
    if (it != list.end()) {
        if (it->remaining == remaining) return;
        it->remaining = remaining;
    } else {
        list.push_back({std::string(kind), target, remaining});
    }
    StateChange ch;
    ch.kind = StateChange::Kind::StatusAdd;
    ch.symbol = std::string(kind);
    ch.owner = CharacterId(who);
    ch.other = target.value_or("");
    ch.remaining = remaining;
    changes_.push_back(std::move(ch));
}

bool SocialState::remove_status(std::string_view who, std::string_view kind) {
    auto it = statuses_.find(who);
    if (it == statuses_.end()) return false;
    auto& list = it->second;
    auto removed = std::remove_if(list.begin(), list.end(), [&](const StatusInstance& s) { return s.kind == kind; });
    if (removed == list.end()) return false;
    list.erase(removed, list.end());
    StateChange ch;
    ch.kind = StateChange::Kind::StatusRemove;
    ch.symbol = std::string(kind);
    ch.owner = CharacterId(who);
    changes_.push_back(std::move(ch));
    return true;
}

bool SocialState::has_status(std::string_view who, std::string_view kind,
                             std::optional<std::string_view> target) const {
    for (const auto& s : statuses(who)) {
        if (s.kind != kind) continue;
        if (!target || (s.target && *s.target == *target)) return true;
    }
    return false;
}

const std::vector<StatusInstance>& SocialState::statuses(std::string_view who) const {
    auto it = statuses_.find(who);
    return it == statuses_.end() ? kNoStatuses : it->second;
}

std::vector<std::pair<CharacterId, StatusInstance>> SocialState::expire_statuses() {
    std::vector<std::pair<CharacterId, StatusInstance>> expired;
    for (auto& [who, list] : statuses_) {
        for (auto& s : list)
            if (s.remaining) --*s.remaining;
        auto keep = std::stable_partition(list.begin(), list.end(),
                                          [](const StatusInstance& s) { return !s.remaining || *s.remaining > 0; });
        for (auto it = keep; it != list.end(); ++it) expired.emplace_back(who, *it);
        list.erase(keep, list.end());
    }
    return expired;
}

const ExchangeHistoryRecord& SocialState::append_history(ExchangeHistoryRecord record) {
    record.seq = history_.size() + 1;
    history_.push_back(std::move(record));
    return history_.back();
}

int SocialState::history_count(std::string_view exchange, std::optional<std::string_view> initiator,
                               std::optional<std::string_view> target, OutcomeSet filter) const {
    int n = 0;
    for (const auto& r : history_) {
        if (r.exchange != exchange || !filter.contains(r.outcome)) continue;
        if (initiator && r.initiator != *initiator) continue;
        if (target && r.target != *target) continue;
        ++n;
    }
    return n;
}

void SocialState::add_known(std::string_view who, std::size_t index) {
    auto& list = known_[CharacterId(who)];
    if (list.empty() || list.back() != index) list.push_back(index);
}

int SocialState::witnessed_count(std::string_view who, std::string_view exchange, std::string_view initiator,
                                 OutcomeSet filter) const {
    auto it = known_.find(who);
    if (it == known_.end()) return 0;
    int n = 0;
    for (std::size_t index : it->second) {
        const auto& r = history_.at(index);
        if (r.exchange == exchange && r.initiator == initiator && filter.contains(r.outcome)) ++n;
    }
    return n;
}

std::vector<StateChange> SocialState::take_changes() {
    std::vector<StateChange> out;
    out.swap(changes_);
    return out;
}

nlohmann::ordered_json SocialState::to_json() const {
    using nlohmann::ordered_json;
    ordered_json networks = ordered_json::array();
    for (const auto& [key, t] : triples_) {
        ordered_json entry;
        entry["owner"] = t.owner;
        entry["network"] = t.network;
        for (ScoreMap m : {ScoreMap::Value, ScoreMap::Goal, ScoreMap::Belief}) {
            ordered_json scores = ordered_json::object();
            for (const auto& [other, s] : t.scores(m)) scores[other] = s;
            entry[std::string(to_string(m))] = std::move(scores);
        }
        networks.push_back(std::move(entry));
    }
    ordered_json rels = ordered_json::array();
    for (const auto& r : relationships())
        rels.push_back({{"kind", r.kind}, {"a", r.a}, {"b", r.b}, {"active", r.active}});
    ordered_json statuses = ordered_json::object();
    for (const auto& [who, list] : statuses_) {
        ordered_json arr = ordered_json::array();
        for (const auto& s : list) {
            ordered_json e;
            e["kind"] = s.kind;
            if (s.target) e["target"] = *s.target;
            e["remaining"] = s.remaining ? ordered_json(*s.remaining) : ordered_json("permanent");
            arr.push_back(std::move(e));
        }
        statuses[who] = std::move(arr);
    }
    ordered_json history = ordered_json::array();
    for (const auto& r : history_) {
        ordered_json e;
        e["tick"] = r.tick;
        e["seq"] = r.seq;
        e["exchange"] = r.exchange;
        e["initiator"] = r.initiator;
        e["target"] = r.target;
        if (r.subject) e["subject"] = *r.subject;
        e["outcome"] = std::string(to_string(r.outcome));
        history.push_back(std::move(e));
    }
    ordered_json known = ordered_json::object();
    for (const auto& [who, list] : known_) known[who] = list;
    ordered_json out;
    out["networks"] = std::move(networks);
    out["relationships"] = std::move(rels);
    out["statuses"] = std::move(statuses);
    out["history"] = std::move(history);
    out["known"] = std::move(known);
    return out;
}

std::uint64_t SocialState::digest() const { return fnv1a64(to_json().dump()); }

}  // namespace socialsim
