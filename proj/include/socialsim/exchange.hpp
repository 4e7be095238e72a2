#pragma once

// Social-move quest lifecycle: stages, aliases, scene lines and effect
// application. The session drives quests; these are the pieces that do not
// need the session itself.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialsim/event_log.hpp"
#include "socialsim/scenario.hpp"
#include "socialsim/social_state.hpp"
#include "socialsim/volition.hpp"

namespace socialsim {

/// 0 waiting, 1 aliases bound, 2 result known / performing, 3 succeeded,
/// 4 failed (neutral or reject), -1 error.
enum class Stage : int { Waiting = 0, Bound = 1, Performing = 2, Succeeded = 3, Failed = 4, Error = -1 };

int stage_number(Stage s);

/// 0->1, 1->2, 2->3, 2->4, any->-1, -1->0.
bool legal_transition(Stage from, Stage to);

Stage completion_stage(Outcome o);

struct QuestInstance {
    std::string id;
    std::string exchange;
    std::optional<Bindings> aliases;  // bound iff stage >= 1
    Stage stage = Stage::Waiting;
    std::optional<Outcome> result;  // set iff stage >= 2 and not awaiting
    bool awaiting_player = false;
};

struct StageTransition {
    std::string quest;
    Stage from;
    Stage to;
};

/// Replaces `{initiator}`, `{target}` and `{subject}` with display names.
std::string instantiate_line(std::string_view tmpl, const SocialState& state, const Bindings& roles);

/// Empty when every effect can be applied for these bindings; otherwise the
/// reason the first one cannot.
std::optional<std::string> check_effects(const std::vector<Effect>& effects, const SocialState& state,
                                         const Bindings& roles);

/// Applies effects in order. Call `check_effects` first; this assumes they
/// are applicable.
void apply_effects(const std::vector<Effect>& effects, SocialState& state, const Bindings& roles);

/// Canonical JSON for journaled changes (StateDelta payloads).
Json changes_to_json(const std::vector<StateChange>& changes);

}  // namespace socialsim
