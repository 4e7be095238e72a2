#pragma once

// Shared test helpers: shipped-file paths, a random scenario generator, a
// reference evaluator written independently of the engine, a fuzz driver and
// log property checkers.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "socialsim/dsl.hpp"
#include "socialsim/event_log.hpp"
#include "socialsim/scenario.hpp"
#include "socialsim/session.hpp"
#include "socialsim/social_state.hpp"
#include "socialsim/volition.hpp"

namespace socialsim::testing {

std::string source_path(const std::string& relative);
std::string read_file(const std::string& path);

/// Parses `text`; throws std::runtime_error listing diagnostics on failure.
std::shared_ptr<const ScenarioDoc> load_text(const std::string& text);
std::shared_ptr<const ScenarioDoc> load_scenario(const std::string& name);  // scenarios/<name>.social

inline constexpr const char* kGolden = "sabjorn_ysolda";
inline constexpr std::uint64_t kGoldenSeed = 42;
inline constexpr int kGoldenTicks = 12;

struct GenOptions {
    int min_npcs = 1;
    int max_npcs = 6;
    int max_exchanges = 12;
    int max_rules = 8;
    int max_traits = 6;
    bool random_weights = true;
    bool subjects = true;
    bool triggers = true;
    bool partial_volition = true;
};

/// A valid scenario in the surface language. Every character starts in
/// location `here` except, sometimes, one in `there`.
std::string random_scenario_text(std::uint64_t seed, const GenOptions& options = {});

/// Random bytes, biased toward scenario-language tokens.
std::string random_bytes(std::mt19937_64& rng, std::size_t max_len);

// Reference evaluator. Reads facts from the state but shares no evaluation
// code with the engine.
namespace oracle {

struct Roles {
    std::string x;  // initiator
    std::string y;  // target
    std::optional<std::string> z;
};

bool holds(const Condition& c, const SocialState& s, const Roles& r, int partial, const std::string* trait);
int total(const std::vector<InfluenceRule>& rules, const SocialState& s, const Roles& r, Rng* rng = nullptr);
std::optional<int> volition(const SocialState& s, const ExchangeDef& ex, const Roles& r);

/// Exhaustive scan for the best positive (exchange, target, subject).
std::optional<DesireEntry> best_action(const SocialState& s, const std::string& npc, const std::string& location);

/// The paper's Flirt pseudocode, transcribed.
int flirt_listing(int attracted_to, const std::vector<std::string>& all_traits,
                  const std::vector<std::string>& x_likes, const std::vector<std::string>& x_dislikes,
                  const std::vector<std::string>& y_traits, bool x_extrovert);

}  // namespace oracle

/// Ticks a session for `ticks` steps; before each tick the driver may answer
/// a pending prompt or initiate a random player move.
std::unique_ptr<Session> fuzz_session(std::shared_ptr<const ScenarioDoc> doc, std::uint64_t seed, int ticks,
                                      std::uint64_t driver_seed, int initiate_percent = 25);

// Property checkers over an event list; each returns human-readable
// violations, empty when the property holds.
std::vector<std::string> stage_violations(const Session& session);
std::vector<std::string> result_before_scene_violations(const std::vector<Event>& events);
std::vector<std::string> trigger_timing_violations(const std::vector<Event>& events);
std::vector<std::string> location_violations(const Session& session);

/// Runs the shipped golden scenario with its script answers.
std::unique_ptr<Session> run_golden();
std::vector<Outcome> golden_script();

}  // namespace socialsim::testing
