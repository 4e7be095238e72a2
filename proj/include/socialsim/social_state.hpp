#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "socialsim/scenario.hpp"
#include "socialsim/types.hpp"

namespace socialsim {

struct StatusInstance {
    std::string kind;
    std::optional<CharacterId> target;
    std::optional<int> remaining;  // nullopt: permanent until removed

    friend bool operator==(const StatusInstance&, const StatusInstance&) = default;
};

/// Value/goal/belief maps one character holds for one network. `belief[y]`
/// is the owner's estimate of y's value toward the owner.
struct NetworkTriple {
    CharacterId owner;
    std::string network;
    std::map<CharacterId, Score> value;
    std::map<CharacterId, Score> goal;
    std::map<CharacterId, Score> belief;

    std::map<CharacterId, Score>& scores(ScoreMap m);
    const std::map<CharacterId, Score>& scores(ScoreMap m) const;

    friend bool operator==(const NetworkTriple&, const NetworkTriple&) = default;
};

/// Relationships are public and symmetric; `a < b` always.
struct RelationshipRecord {
    std::string kind;
    CharacterId a;
    CharacterId b;
    bool active = false;
};

struct ExchangeHistoryRecord {
    std::int64_t tick = 0;
    std::uint64_t seq = 0;
    std::string exchange;
    CharacterId initiator;
    CharacterId target;
    std::optional<CharacterId> subject;
    Outcome outcome = Outcome::Neutral;
};

/// One mutation, journaled so the session can log it.
struct StateChange {
    enum class Kind { Score, StatusAdd, StatusRemove, Relationship };

    Kind kind = Kind::Score;
    ScoreMap map = ScoreMap::Value;
    std::string symbol;
    CharacterId owner;
    CharacterId other;
    int delta = 0;
    Score score = 0;
    bool active = false;
    std::optional<int> remaining;
};

/// The mutable social state of one session. Score maps are private to their
/// owner; relationships, traits and statuses are public. All score writes
/// saturate at the network's declared range.
class SocialState {
public:
    /// Initializes every (owner, network, other) entry from the scenario's
    /// explicit declarations, else the network default.
    explicit SocialState(std::shared_ptr<const ScenarioDoc> scenario);

    const ScenarioDoc& scenario() const { return *scenario_; }
    const std::shared_ptr<const ScenarioDoc>& scenario_ptr() const { return scenario_; }

    const CharacterDecl& character(std::string_view id) const;
    bool has_character(std::string_view id) const { return scenario_->find_character(id) != nullptr; }
    bool has_trait(std::string_view who, std::string_view trait) const;
    bool likes(std::string_view who, std::string_view trait) const;
    bool dislikes(std::string_view who, std::string_view trait) const;

    Score get(ScoreMap map, std::string_view network, std::string_view from, std::string_view to) const;
    Score get_value(std::string_view network, std::string_view from, std::string_view to) const {
        return get(ScoreMap::Value, network, from, to);
    }

    /// Saturating add; returns the effective delta. A zero effective delta
    /// journals nothing.
    int apply_delta(ScoreMap map, std::string_view network, std::string_view from, std::string_view to, int delta);
    int apply_delta(std::string_view network, std::string_view from, std::string_view to, int delta) {
        return apply_delta(ScoreMap::Value, network, from, to, delta);
    }
    int update_belief(std::string_view owner, std::string_view network, std::string_view other, int delta) {
        return apply_delta(ScoreMap::Belief, network, owner, other, delta);
    }

    /// Clamped assignment without journaling (goal formation).
    void set_score(ScoreMap map, std::string_view network, std::string_view from, std::string_view to, long long v);

    const NetworkTriple& triple(std::string_view owner, std::string_view network) const;
    std::size_t triple_count() const { return triples_.size(); }

    void set_relationship(std::string_view kind, std::string_view a, std::string_view b, bool active);
    bool relationship(std::string_view kind, std::string_view a, std::string_view b) const;
    std::vector<RelationshipRecord> relationships() const;

    void add_status(std::string_view who, std::string_view kind, std::optional<CharacterId> target = std::nullopt,
                    std::optional<int> duration = std::nullopt);
    bool remove_status(std::string_view who, std::string_view kind);
    bool has_status(std::string_view who, std::string_view kind,
                    std::optional<std::string_view> target = std::nullopt) const;
    const std::vector<StatusInstance>& statuses(std::string_view who) const;

    /// Decrements every finite countdown and removes the ones reaching zero.
    std::vector<std::pair<CharacterId, StatusInstance>> expire_statuses();

    const ExchangeHistoryRecord& append_history(ExchangeHistoryRecord record);
    const std::vector<ExchangeHistoryRecord>& history() const { return history_; }
    int history_count(std::string_view exchange, std::optional<std::string_view> initiator,
                      std::optional<std::string_view> target, OutcomeSet filter) const;

    /// Records that `who` knows about history entry `index`.
    void add_known(std::string_view who, std::size_t index);
    /// Known records of `exchange` performed by `initiator`, as seen by `who`.
    int witnessed_count(std::string_view who, std::string_view exchange, std::string_view initiator,
                        OutcomeSet filter) const;

    std::vector<StateChange> take_changes();
    const std::vector<StateChange>& pending_changes() const { return changes_; }

    /// Full dump, including private maps. Debug surfaces only.
    nlohmann::ordered_json to_json() const;
    std::uint64_t digest() const;

private:
    const NetworkDecl& network(std::string_view id) const;
    void require_character(std::string_view id) const;
    NetworkTriple& triple_mut(std::string_view owner, std::string_view network);

    std::shared_ptr<const ScenarioDoc> scenario_;
    std::map<std::pair<CharacterId, std::string>, NetworkTriple, std::less<>> triples_;
    std::map<std::tuple<std::string, CharacterId, CharacterId>, bool> relationships_;
    std::map<CharacterId, std::vector<StatusInstance>, std::less<>> statuses_;
    std::vector<ExchangeHistoryRecord> history_;
    std::map<CharacterId, std::vector<std::size_t>, std::less<>> known_;
    std::vector<StateChange> changes_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace socialsim
