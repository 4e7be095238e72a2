#pragma once

// Scenario document model: the parsed form of a `.social` file.
//
// Declarations other than rules are kept sorted by symbol (the parser
// normalizes them), so the cast order used by the engine is the byte-wise
// order of character ids. Rule lists and trigger rules keep author order
// because evaluation order is semantic.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "socialsim/types.hpp"

namespace socialsim {

/// 1-based source position. Positions never participate in structural
/// equality, so a document compares equal to its re-parsed serialization.
struct SourcePos {
    int line = 0;
    int column = 0;

    friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

/// A trait argument inside a condition: either a concrete trait symbol or the
/// trait currently bound by a `per trait` rule (written `@trait`).
struct TraitArg {
    std::string symbol;
    bool bound = false;

    friend bool operator==(const TraitArg&, const TraitArg&) = default;
};

struct Condition {
    enum class Kind {
        True,
        Not,
        And,
        HasTrait,               // role, trait
        Likes,                  // role, trait
        Dislikes,               // role, trait
        HasStatus,              // role, symbol, optional role2 (status target)
        ScoreCmp,               // map, symbol (network), role, role2, op, threshold
        Relationship,           // symbol (kind) between initiator and target
        SameAttr,               // attr
        DiffAttr,               // attr
        OrientationCompatible,  // initiator's orientation admits target's gender
        HistoryCmp,             // symbol (exchange), outcomes, op, threshold
        WitnessedCmp,           // role, symbol (exchange), outcomes, op, threshold
        PartialVolition,        // op, threshold against the running total
    };

    Kind kind = Kind::True;
    Role role = Role::Initiator;
    std::optional<Role> role2;
    std::string symbol;
    TraitArg trait;
    ScoreMap map = ScoreMap::Value;
    CmpOp op = CmpOp::Eq;
    int threshold = 0;
    Attr attr = Attr::Race;
    OutcomeSet outcomes;
    std::vector<Condition> children;
    SourcePos pos;

    friend bool operator==(const Condition&, const Condition&) = default;
};

struct WeightTerm {
    enum class Kind { Constant, Score, Random };

    Kind kind = Kind::Constant;
    int constant = 0;
    ScoreMap map = ScoreMap::Value;
    std::string network;
    Role from = Role::Initiator;
    Role to = Role::Target;
    int low = 0;   // Random bounds, inclusive
    int high = 0;

    friend bool operator==(const WeightTerm&, const WeightTerm&) = default;
};

struct InfluenceRule {
    std::string id;
    WeightTerm weight;
    bool per_trait = false;  // fire once per trait held by the target
    Condition when;
    SourcePos pos;

    friend bool operator==(const InfluenceRule&, const InfluenceRule&) = default;
};

struct Effect {
    enum class Kind { ScoreDelta, StatusAdd, StatusRemove, RelationshipSet };

    Kind kind = Kind::ScoreDelta;
    ScoreMap map = ScoreMap::Value;
    std::string symbol;  // network, status kind or relationship kind
    Role from = Role::Initiator;
    std::optional<Role> to;  // score delta: other; status add: status target
    int amount = 0;
    std::optional<int> duration;
    bool active = true;
    SourcePos pos;

    friend bool operator==(const Effect&, const Effect&) = default;
};

struct SceneTemplate {
    std::string performance;
    std::string response;

    friend bool operator==(const SceneTemplate&, const SceneTemplate&) = default;
};

inline constexpr int kDefaultAcceptThreshold = 5;
inline constexpr std::array<Outcome, 3> kResolvedOutcomes = {Outcome::Accept, Outcome::Neutral,
                                                            Outcome::Reject};

struct ExchangeDef {
    std::string id;
    std::string name;
    std::string intent;
    bool has_subject = false;
    int accept_threshold = kDefaultAcceptThreshold;
    std::vector<Condition> preconditions;
    std::vector<InfluenceRule> initiator_rules;
    std::vector<InfluenceRule> responder_rules;
    std::array<std::optional<std::vector<Effect>>, 3> effects;  // indexed by Outcome
    std::array<std::optional<SceneTemplate>, 3> scenes;
    SourcePos pos;

    const std::vector<Effect>* effects_for(Outcome o) const;
    const SceneTemplate* scene_for(Outcome o) const;

    friend bool operator==(const ExchangeDef&, const ExchangeDef&) = default;
};

struct TriggerRule {
    std::string id;
    Condition when;
    std::vector<Effect> effects;
    SourcePos pos;

    friend bool operator==(const TriggerRule&, const TriggerRule&) = default;
};

/// Rules that set goal[owner][network][other] when a location is loaded.
struct GoalBlock {
    std::string network;
    std::optional<Condition> gate;
    std::vector<InfluenceRule> rules;
    SourcePos pos;

    friend bool operator==(const GoalBlock&, const GoalBlock&) = default;
};

struct NetworkDecl {
    std::string id;
    Score min = 0;
    Score max = 100;
    Score initial = 0;
    SourcePos pos;

    Score clamp(long long v) const { return static_cast<Score>(v < min ? min : (v > max ? max : v)); }

    friend bool operator==(const NetworkDecl&, const NetworkDecl&) = default;
};

struct SymbolDecl {
    std::string id;
    SourcePos pos;

    friend bool operator==(const SymbolDecl&, const SymbolDecl&) = default;
};

struct StatusDecl {
    std::string id;
    bool targeted = false;
    int duration = 0;  // ticks; 0 = permanent until removed
    SourcePos pos;

    friend bool operator==(const StatusDecl&, const StatusDecl&) = default;
};

struct InitialScore {
    ScoreMap map = ScoreMap::Value;
    std::string network;
    CharacterId other;
    Score value = 0;
    SourcePos pos;

    friend bool operator==(const InitialScore&, const InitialScore&) = default;
};

struct InitialStatus {
    std::string kind;
    std::optional<CharacterId> target;
    std::optional<int> duration;
    SourcePos pos;

    friend bool operator==(const InitialStatus&, const InitialStatus&) = default;
};

struct InitialRelationship {
    std::string kind;
    CharacterId other;
    SourcePos pos;

    friend bool operator==(const InitialRelationship&, const InitialRelationship&) = default;
};

struct CharacterDecl {
    CharacterId id;
    std::string name;
    std::string gender;
    std::string race;
    std::string orientation = "straight";
    std::string location;
    bool player = false;
    std::vector<std::string> traits;  // sorted, unique
    std::vector<std::string> likes;
    std::vector<std::string> dislikes;
    std::vector<InitialScore> scores;
    std::vector<InitialStatus> statuses;
    std::vector<InitialRelationship> relationships;
    SourcePos pos;

    const std::string& display_name() const { return name.empty() ? id : name; }

    friend bool operator==(const CharacterDecl&, const CharacterDecl&) = default;
};

struct ScenarioDoc {
    std::string name;
    std::vector<NetworkDecl> networks;
    std::vector<SymbolDecl> traits;
    std::vector<StatusDecl> statuses;
    std::vector<SymbolDecl> relationships;
    std::vector<SymbolDecl> locations;
    std::vector<CharacterDecl> characters;
    std::vector<GoalBlock> goal_blocks;
    std::vector<ExchangeDef> exchanges;
    std::vector<TriggerRule> triggers;

    const NetworkDecl* find_network(std::string_view id) const;
    const StatusDecl* find_status(std::string_view id) const;
    const CharacterDecl* find_character(std::string_view id) const;
    const ExchangeDef* find_exchange(std::string_view id) const;
    bool has_trait(std::string_view id) const;
    bool has_relationship(std::string_view id) const;
    bool has_location(std::string_view id) const;
    const CharacterDecl* player() const;

    friend bool operator==(const ScenarioDoc&, const ScenarioDoc&) = default;
};

/// Orientation vocabulary understood by `orientation_compatible`.
bool is_known_orientation(std::string_view orientation);
bool orientation_admits(std::string_view orientation, std::string_view own_gender,
                        std::string_view other_gender);

}  // namespace socialsim
