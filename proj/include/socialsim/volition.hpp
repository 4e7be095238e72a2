#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "socialsim/scenario.hpp"
#include "socialsim/social_state.hpp"

namespace socialsim {

/// Concrete characters bound to the roles of a rule evaluation.
struct Bindings {
    CharacterId initiator;
    CharacterId target;
    std::optional<CharacterId> subject;

    const CharacterId& resolve(Role r) const;

    friend bool operator==(const Bindings&, const Bindings&) = default;
};

/// Seeded generator whose draws are counted so callers can log them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    int uniform(int low, int high);
    std::uint64_t draws() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

struct Contribution {
    std::string rule;
    bool fired = false;
    int amount = 0;
    int times = 0;  // >1 only for per-trait rules
};

struct VolitionBreakdown {
    int total = 0;
    std::vector<Contribution> contributions;  // declaration order
};

struct EvalScope {
    int running_total = 0;
    const std::string* bound_trait = nullptr;
};

/// Pure; throws SocialError for symbols the state does not know.
bool eval_condition(const Condition& cond, const SocialState& state, const Bindings& roles,
                    const EvalScope& scope = {});

/// Evaluates rules strictly in order. `volition` conditions see the running
/// total at their position; per-trait rules fire once per matching trait of
/// the target. `rng` is only consulted by random weights.
VolitionBreakdown eval_rule_set(std::span<const InfluenceRule> rules, const SocialState& state,
                                const Bindings& roles, Rng* rng = nullptr);

/// Returns the first failing precondition, or nullptr when all hold.
const Condition* failing_precondition(const SocialState& state, const ExchangeDef& exchange, const Bindings& roles);

/// nullopt when the exchange is unavailable (a precondition fails).
std::optional<VolitionBreakdown> initiator_volition(const SocialState& state, const ExchangeDef& exchange,
                                                    const Bindings& roles);

Outcome classify_response(int total, int accept_threshold);

struct Response {
    Outcome outcome = Outcome::Neutral;
    VolitionBreakdown breakdown;
};

Response responder_response(const SocialState& state, const ExchangeDef& exchange, const Bindings& roles,
                            Rng* rng = nullptr);

struct GoalUpdate {
    std::string network;
    CharacterId owner;
    CharacterId other;
    Score goal = 0;
};

/// Characters whose location is `location`, in cast order.
std::vector<CharacterId> characters_at(const SocialState& state, std::string_view location);

/// Sets goal maps for every (NPC owner, co-located other) pair from the
/// scenario's goal blocks.
std::vector<GoalUpdate> form_goals(SocialState& state, std::string_view location);

struct DesireEntry {
    std::string exchange;
    CharacterId target;
    std::optional<CharacterId> subject;
    int volition = 0;

    friend bool operator==(const DesireEntry&, const DesireEntry&) = default;
};

/// Descending volition, ties by (exchange, target, subject) ascending.
bool desire_before(const DesireEntry& a, const DesireEntry& b);

std::vector<DesireEntry> build_prospective_memory(const SocialState& state, std::string_view npc,
                                                  std::string_view location);

std::optional<DesireEntry> choose_action(std::span<const DesireEntry> memory);

}  // namespace socialsim
