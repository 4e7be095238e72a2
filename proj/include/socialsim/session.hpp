#pragma once

// The game manager: one session owns the social state, the exchange queue,
// the active quest, a seeded generator and the event log. Everything that
// happens is logged; (scenario, seed, player inputs) determine the log
// byte for byte.

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socialsim/event_log.hpp"
#include "socialsim/exchange.hpp"
#include "socialsim/scenario.hpp"
#include "socialsim/social_state.hpp"
#include "socialsim/volition.hpp"

namespace socialsim {

inline constexpr int kMaxTriggerPasses = 8;

struct QueueEntry {
    std::string exchange;
    CharacterId initiator;
    CharacterId target;
    std::optional<CharacterId> subject;

    friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

/// A player command as recorded for replay. `seq` is the seq of the
/// PlayerChoice event the command produced.
struct PlayerInput {
    enum class Kind { Initiate, Respond };

    Kind kind = Kind::Initiate;
    std::uint64_t seq = 0;
    std::int64_t tick = 0;
    std::string exchange;
    CharacterId target;
    std::optional<CharacterId> subject;
    std::string quest;
    Outcome choice = Outcome::Neutral;

    friend bool operator==(const PlayerInput&, const PlayerInput&) = default;
};

class Session {
public:
    /// Throws SocialError("invalid-scenario") when the scenario has no player.
    Session(std::shared_ptr<const ScenarioDoc> scenario, std::uint64_t seed);

    /// One step of the loop: expire statuses, let idle NPCs enqueue their
    /// top desire, run one queued exchange. Throws
    /// SocialError("awaiting-player") while a prompt is pending.
    std::vector<Event> tick();

    /// Appends to the queue; returns the entry's position. Duplicates are
    /// coalesced. Throws SocialError("not-co-located") and friends.
    std::size_t enqueue(const QueueEntry& entry);

    /// Front-inserts a player-initiated exchange. Throws
    /// SocialError("precondition-failed") naming the failing condition.
    std::size_t player_initiate(std::string_view exchange, std::string_view target,
                                std::optional<std::string_view> subject = std::nullopt);

    /// Resolves the pending prompt and finishes the quest.
    std::vector<Event> player_respond(std::string_view quest_id, Outcome choice);

    /// Re-applies a recorded input.
    void apply(const PlayerInput& input);

    /// Starts `entry` as the active quest and runs it until completion or a
    /// player prompt. Throws SocialError("busy") when a quest is active.
    void start_quest(const QueueEntry& entry);

    /// Aborts the active quest, if any.
    void abort_active(std::string_view reason);

    const ScenarioDoc& scenario() const { return state_.scenario(); }
    const SocialState& state() const { return state_; }
    const EventLog& log() const { return log_; }
    std::int64_t tick_count() const { return tick_; }
    std::uint64_t seed() const { return seed_; }
    const CharacterId& player() const { return player_; }
    const std::string& location() const { return location_; }
    const std::deque<QueueEntry>& queue() const { return queue_; }
    const std::optional<QuestInstance>& active_quest() const { return active_; }
    bool awaiting_player() const { return active_ && active_->awaiting_player; }
    const std::vector<StageTransition>& transitions() const { return transitions_; }
    const std::vector<PlayerInput>& inputs() const { return inputs_; }
    std::uint64_t rng_draws() const { return rng_.draws(); }

    /// Characters in the player's location, cast order.
    std::vector<CharacterId> present() const;
    bool is_present(std::string_view id) const;

    /// Last computed prospective memory; empty if never computed.
    std::vector<DesireEntry> memory(std::string_view npc) const;

private:
    const Event& emit(EventKind kind, Json payload);
    void emit_changes(Json context);
    void transition(QuestInstance& q, Stage to);
    std::string next_quest_id();
    void check_entry(const QueueEntry& entry) const;
    void advance();
    void finish(Outcome outcome);
    void abort_quest(const std::string& reason);
    void run_trigger_rules();
    void notify(const std::string& quest_id, std::size_t history_index);
    void invalidate_all();
    Json quest_header(const QuestInstance& q) const;

    SocialState state_;
    std::uint64_t seed_;
    Rng rng_;
    EventLog log_;
    std::int64_t tick_ = 0;
    CharacterId player_;
    std::string location_;
    std::deque<QueueEntry> queue_;
    std::optional<QuestInstance> active_;
    std::optional<std::string> reusable_id_;
    std::uint64_t quest_counter_ = 0;
    std::map<CharacterId, std::vector<DesireEntry>, std::less<>> memories_;
    std::map<CharacterId, bool, std::less<>> memory_valid_;
    std::vector<StageTransition> transitions_;
    std::vector<PlayerInput> inputs_;
};

struct ReplayResult {
    std::vector<std::string> lines;
    /// First seq at which `lines` and the original differ.
    std::optional<std::uint64_t> divergence;
};

/// Re-creates a session from its inputs: inputs are applied when the log
/// reaches their seq and tick, otherwise the session ticks until `last_tick`.
std::unique_ptr<Session> rerun(std::shared_ptr<const ScenarioDoc> scenario, std::uint64_t seed,
                               const std::vector<PlayerInput>& inputs, std::int64_t last_tick);

/// Re-runs a session from its inputs, ticking up to the last tick seen in
/// `original`, and compares line by line.
ReplayResult replay(std::shared_ptr<const ScenarioDoc> scenario, std::uint64_t seed,
                    const std::vector<PlayerInput>& inputs, const std::vector<std::string>& original);

/// Player inputs recovered from PlayerChoice events.
std::vector<PlayerInput> inputs_from_events(const std::vector<Event>& events);

Json desire_to_json(const DesireEntry& d);
Json breakdown_to_json(const VolitionBreakdown& b);

}  // namespace socialsim
