#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace socialsim {

using CharacterId = std::string;
using Score = int;

/// Thrown for contract violations on the engine API (bad ids, self-directed
/// queries, illegal commands). `code()` is a stable machine-readable symbol.
class SocialError : public std::runtime_error {
public:
    SocialError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

enum class Role : std::uint8_t { Initiator, Target, Subject };

enum class Outcome : std::uint8_t { Accept, Neutral, Reject, Error };

/// Which of the three per-network maps a score lives in.
enum class ScoreMap : std::uint8_t { Value, Goal, Belief };

enum class CmpOp : std::uint8_t { Lt, Le, Eq, Ge, Gt };

enum class Attr : std::uint8_t { Race, Gender };

std::string_view to_string(Role r);
std::string_view to_string(Outcome o);
std::string_view to_string(ScoreMap m);
std::string_view to_string(CmpOp op);
std::string_view to_string(Attr a);

std::optional<Role> role_from_string(std::string_view s);
std::optional<Outcome> outcome_from_string(std::string_view s);
std::optional<ScoreMap> score_map_from_string(std::string_view s);
std::optional<Attr> attr_from_string(std::string_view s);

bool compare(long long lhs, CmpOp op, long long rhs);

/// Bit set over the four outcomes; used by history filters.
struct OutcomeSet {
    std::uint8_t bits = 0;

    static OutcomeSet all_resolved() { return OutcomeSet{0b0111}; }
    bool contains(Outcome o) const { return (bits >> static_cast<int>(o)) & 1u; }
    void insert(Outcome o) { bits |= static_cast<std::uint8_t>(1u << static_cast<int>(o)); }
    bool empty() const { return bits == 0; }

    friend bool operator==(const OutcomeSet&, const OutcomeSet&) = default;
};

}  // namespace socialsim
