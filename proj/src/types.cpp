#include "socialsim/types.hpp"

namespace socialsim {

std::string_view to_string(Role r) {
    switch (r) {
        case Role::Initiator: return "initiator";
        case Role::Target: return "target";
        case Role::Subject: return "subject";
    }
    return "?";
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Accept: return "accept";
        case Outcome::Neutral: return "neutral";
        case Outcome::Reject: return "reject";
        case Outcome::Error: return "error";
    }
    return "?";
}

std::string_view to_string(ScoreMap m) {
    switch (m) {
        case ScoreMap::Value: return "value";
        case ScoreMap::Goal: return "goal";
        case ScoreMap::Belief: return "belief";
    }
    return "?";
}

std::string_view to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Eq: return "==";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
    }
    return "?";
}

std::string_view to_string(Attr a) {
    return a == Attr::Race ? "race" : "gender";
}

std::optional<Role> role_from_string(std::string_view s) {
    if (s == "initiator") return Role::Initiator;
    if (s == "target") return Role::Target;
    if (s == "subject") return Role::Subject;
    return std::nullopt;
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
    if (s == "accept") return Outcome::Accept;
    if (s == "neutral") return Outcome::Neutral;
    if (s == "reject") return Outcome::Reject;
    if (s == "error") return Outcome::Error;
    return std::nullopt;
}

std::optional<ScoreMap> score_map_from_string(std::string_view s) {
    if (s == "value") return ScoreMap::Value;
    if (s == "goal") return ScoreMap::Goal;
    if (s == "belief") return ScoreMap::Belief;
    return std::nullopt;
}

std::optional<Attr> attr_from_string(std::string_view s) {
    if (s == "race") return Attr::Race;
    if (s == "gender") return Attr::Gender;
    return std::nullopt;
}

bool compare(long long lhs, CmpOp op, long long rhs) {
    switch (op) {
        case CmpOp::Lt: return lhs < rhs;
        case CmpOp::Le: return lhs <= rhs;
        case CmpOp::Eq: return lhs == rhs;
        case CmpOp::Ge: return lhs >= rhs;
        case CmpOp::Gt: return lhs > rhs;
    }
    return false;
}

}  // namespace socialsim
