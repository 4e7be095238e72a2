#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "socialsim/dsl.hpp"

namespace socialsim::dsl {

namespace {

struct RuleContext {
    bool allow_volition = false;
    bool allow_bound_trait = false;
    bool allow_subject = false;
    bool allow_random = false;
};

class Validator {
public:
    explicit Validator(const ScenarioDoc& doc) : doc_(doc) {}

    std::vector<Diagnostic> run() {
        check_duplicates();
        check_vocabulary();
        check_characters();
        check_goals();
        check_exchanges();
        check_triggers();
        return std::move(out_);
    }

private:
    void error(SourcePos at, std::string code, std::string message) {
        out_.push_back({Severity::Error, std::max(at.line, 1), std::max(at.column, 1), std::move(code),
                        std::move(message)});
    }

    void warning(SourcePos at, std::string code, std::string message) {
        out_.push_back({Severity::Warning, std::max(at.line, 1), std::max(at.column, 1), std::move(code),
                        std::move(message)});
    }

    template <typename T>
    void unique_ids(const std::vector<T>& items, std::string_view what, std::string_view code = "duplicate-symbol") {
        std::set<std::string> seen;
        for (const auto& item : items)
            if (!seen.insert(item.id).second)
                error(item.pos, std::string(code), std::string(what) + " '" + item.id + "' is declared more than once");
    }

    void check_duplicates() {
        unique_ids(doc_.networks, "network");
        unique_ids(doc_.traits, "trait");
        unique_ids(doc_.statuses, "status");
        unique_ids(doc_.relationships, "relationship");
        unique_ids(doc_.locations, "location");
        unique_ids(doc_.characters, "character");
        unique_ids(doc_.exchanges, "exchange");
        unique_ids(doc_.triggers, "trigger", "duplicate-rule");
        std::set<std::string> goal_networks;
        for (const auto& g : doc_.goal_blocks)
            if (!goal_networks.insert(g.network).second)
                error(g.pos, "duplicate-goal-block", "network '" + g.network + "' has more than one goals block");
    }

    void check_vocabulary() {
        for (const auto& n : doc_.networks) {
            if (n.min > n.max)
                error(n.pos, "invalid-range", "network '" + n.id + "' has range minimum above maximum");
            else if (n.initial < n.min || n.initial > n.max)
                error(n.pos, "invalid-range", "default of network '" + n.id + "' lies outside its range");
        }
        for (const auto& s : doc_.statuses)
            if (s.duration < 0) error(s.pos, "invalid-range", "status '" + s.id + "' has a negative duration");
    }

    void need_trait(SourcePos at, const std::string& t) {
        if (!doc_.has_trait(t)) error(at, "undeclared-trait", "undeclared trait '" + t + "'");
    }

    bool need_network(SourcePos at, const std::string& n) {
        if (doc_.find_network(n)) return true;
        error(at, "undeclared-network", "undeclared network '" + n + "'");
        return false;
    }

    const StatusDecl* need_status(SourcePos at, const std::string& s) {
        if (const auto* decl = doc_.find_status(s)) return decl;
        error(at, "undeclared-status", "undeclared status '" + s + "'");
        return nullptr;
    }

    void need_relationship(SourcePos at, const std::string& r) {
        if (!doc_.has_relationship(r)) error(at, "undeclared-relationship", "undeclared relationship '" + r + "'");
    }

    bool need_character(SourcePos at, const std::string& c) {
        if (doc_.find_character(c)) return true;
        error(at, "undeclared-character", "undeclared character '" + c + "'");
        return false;
    }

    void check_characters() {
        int players = 0;
        for (const auto& c : doc_.characters) {
            if (c.player && ++players == 2)
                error(c.pos, "player-count", "more than one character is flagged 'player'");
            if (c.location.empty())
                error(c.pos, "missing-attribute", "character '" + c.id + "' has no location");
            else if (!doc_.has_location(c.location))
                error(c.pos, "undeclared-location", "undeclared location '" + c.location + "'");
            if (!is_known_orientation(c.orientation))
                error(c.pos, "unknown-orientation",
                      "unknown orientation '" + c.orientation + "' (expected straight, gay, bi or ace)");
            for (const auto& t : c.traits) need_trait(c.pos, t);
            for (const auto& t : c.likes) need_trait(c.pos, t);
            for (const auto& t : c.dislikes) need_trait(c.pos, t);
            for (const auto& t : c.likes)
                if (std::binary_search(c.dislikes.begin(), c.dislikes.end(), t))
                    error(c.pos, "likes-dislikes-overlap",
                          "character '" + c.id + "' both likes and dislikes '" + t + "'");
            for (const auto& s : c.scores) {
                bool net_ok = need_network(s.pos, s.network);
                if (!need_character(s.pos, s.other)) continue;
                if (s.other == c.id) {
                    error(s.pos, "self-reference", "character '" + c.id + "' cannot hold a score toward itself");
                    continue;
                }
                if (net_ok) {
                    const auto* n = doc_.find_network(s.network);
                    if (s.value < n->min || s.value > n->max)
                        error(s.pos, "score-out-of-range",
                              std::to_string(s.value) + " is outside the range of network '" + s.network + "'");
                }
            }
            for (const auto& s : c.statuses) {
                const auto* kind = need_status(s.pos, s.kind);
                if (s.duration && *s.duration < 0) error(s.pos, "invalid-range", "negative status duration");
                if (s.target) {
                    if (need_character(s.pos, *s.target) && *s.target == c.id)
                        error(s.pos, "self-reference", "status '" + s.kind + "' cannot target its holder");
                }
                if (kind && kind->targeted != s.target.has_value())
                    error(s.pos, "status-target",
                          kind->targeted ? "status '" + s.kind + "' requires a target"
                                         : "status '" + s.kind + "' does not take a target");
            }
            for (const auto& r : c.relationships) {
                need_relationship(r.pos, r.kind);
                if (need_character(r.pos, r.other) && r.other == c.id)
                    error(r.pos, "self-reference", "relationship with oneself");
            }
        }
        if (players == 0) error({1, 1}, "player-count", "no character is flagged 'player'");
    }

    void check_role(SourcePos at, Role r, const RuleContext& ctx) {
        if (r == Role::Subject && !ctx.allow_subject)
            error(at, "invalid-role", "role 'subject' is only bound in exchanges that declare 'subject'");
    }

    void check_condition(const Condition& c, const RuleContext& ctx) {
        using K = Condition::Kind;
        switch (c.kind) {
            case K::True:
            case K::OrientationCompatible:
            case K::SameAttr:
            case K::DiffAttr: break;
            case K::Not:
            case K::And:
                for (const auto& child : c.children) check_condition(child, ctx);
                break;
            case K::HasTrait:
            case K::Likes:
            case K::Dislikes:
                check_role(c.pos, c.role, ctx);
                if (c.trait.bound) {
                    if (!ctx.allow_bound_trait)
                        error(c.pos, "unbound-trait", "'@trait' is only bound inside 'per trait' rules");
                } else {
                    need_trait(c.pos, c.trait.symbol);
                }
                break;
            case K::HasStatus: {
                check_role(c.pos, c.role, ctx);
                if (c.role2) check_role(c.pos, *c.role2, ctx);
                const auto* kind = need_status(c.pos, c.symbol);
                if (kind && c.role2 && !kind->targeted)
                    error(c.pos, "status-target", "status '" + c.symbol + "' does not take a target");
                break;
            }
            case K::ScoreCmp:
                check_role(c.pos, c.role, ctx);
                check_role(c.pos, c.role2.value_or(Role::Target), ctx);
                need_network(c.pos, c.symbol);
                if (c.role == c.role2.value_or(Role::Target))
                    error(c.pos, "self-reference", "score comparison between a role and itself");
                break;
            case K::Relationship: need_relationship(c.pos, c.symbol); break;
            case K::HistoryCmp:
            case K::WitnessedCmp:
                if (c.kind == K::WitnessedCmp) check_role(c.pos, c.role, ctx);
                if (!doc_.find_exchange(c.symbol))
                    error(c.pos, "undeclared-exchange", "undeclared exchange '" + c.symbol + "'");
                break;
            case K::PartialVolition:
                if (!ctx.allow_volition)
                    error(c.pos, "misplaced-volition", "'volition' comparisons are only allowed in rules");
                break;
        }
        check_satisfiable(c);
    }

    void check_weight(SourcePos at, const WeightTerm& w, const RuleContext& ctx) {
        if (w.kind == WeightTerm::Kind::Score) {
            check_role(at, w.from, ctx);
            check_role(at, w.to, ctx);
            need_network(at, w.network);
            if (w.from == w.to) error(at, "self-reference", "weight reads a score between a role and itself");
        } else if (w.kind == WeightTerm::Kind::Random) {
            if (!ctx.allow_random)
                error(at, "misplaced-random", "'random' weights are only allowed in responder rules");
            if (w.low > w.high) error(at, "invalid-range", "random weight has low bound above high bound");
        }
    }

    void check_rules(const std::vector<InfluenceRule>& rules, RuleContext ctx) {
        std::set<std::string> ids;
        for (const auto& r : rules) {
            if (!ids.insert(r.id).second)
                error(r.pos, "duplicate-rule", "rule '" + r.id + "' is declared more than once");
            check_weight(r.pos, r.weight, ctx);
            RuleContext inner = ctx;
            inner.allow_volition = true;
            inner.allow_bound_trait = r.per_trait;
            check_condition(r.when, inner);
        }
    }

    void check_effects(const std::vector<Effect>& effects, const RuleContext& ctx) {
        for (const auto& e : effects) {
            switch (e.kind) {
                case Effect::Kind::ScoreDelta:
                    check_role(e.pos, e.from, ctx);
                    check_role(e.pos, e.to.value_or(Role::Target), ctx);
                    need_network(e.pos, e.symbol);
                    if (e.from == e.to.value_or(Role::Target))
                        error(e.pos, "self-reference", "score effect between a role and itself");
                    break;
                case Effect::Kind::StatusAdd: {
                    check_role(e.pos, e.from, ctx);
                    if (e.to) check_role(e.pos, *e.to, ctx);
                    const auto* kind = need_status(e.pos, e.symbol);
                    if (kind && kind->targeted != e.to.has_value())
                        error(e.pos, "status-target",
                              kind->targeted ? "status '" + e.symbol + "' requires a target"
                                             : "status '" + e.symbol + "' does not take a target");
                    if (e.to && *e.to == e.from) error(e.pos, "self-reference", "status cannot target its holder");
                    if (e.duration && *e.duration < 0) error(e.pos, "invalid-range", "negative status duration");
                    break;
                }
                case Effect::Kind::StatusRemove:
                    check_role(e.pos, e.from, ctx);
                    need_status(e.pos, e.symbol);
                    break;
                case Effect::Kind::RelationshipSet: need_relationship(e.pos, e.symbol); break;
            }
        }
    }

    void check_goals() {
        for (const auto& g : doc_.goal_blocks) {
            need_network(g.pos, g.network);
            RuleContext ctx;
            if (g.gate) check_condition(*g.gate, ctx);
            check_rules(g.rules, ctx);
        }
    }

    void check_exchanges() {
        for (const auto& x : doc_.exchanges) {
            if (x.intent.empty())
                error(x.pos, "missing-attribute", "exchange '" + x.id + "' has no intent network");
            else
                need_network(x.pos, x.intent);
            RuleContext ctx;
            ctx.allow_subject = x.has_subject;
            for (const auto& p : x.preconditions) check_condition(p, ctx);
            check_rules(x.initiator_rules, ctx);
            RuleContext responder = ctx;
            responder.allow_random = true;
            check_rules(x.responder_rules, responder);
            for (Outcome o : kResolvedOutcomes) {
                if (const auto* effects = x.effects_for(o))
                    check_effects(*effects, ctx);
                else
                    error(x.pos, "missing-effects",
                          "exchange '" + x.id + "' has no effects for outcome '" + std::string(to_string(o)) + "'");
                if (!x.scene_for(o))
                    error(x.pos, "missing-scene",
                          "exchange '" + x.id + "' has no scene for outcome '" + std::string(to_string(o)) + "'");
            }
        }
    }

    void check_triggers() {
        RuleContext ctx;
        for (const auto& t : doc_.triggers) {
            check_condition(t.when, ctx);
            check_effects(t.effects, ctx);
        }
    }

    // ---- static satisfiability ------------------------------------------

    static void flatten(const Condition& c, std::vector<const Condition*>& out) {
        if (c.kind == Condition::Kind::And) {
            for (const auto& child : c.children) flatten(child, out);
        } else {
            out.push_back(&c);
        }
    }

    /// Interval of integers admitted by `x op k`.
    static std::pair<long long, long long> interval(CmpOp op, long long k) {
        constexpr long long lo = -(1LL << 40), hi = 1LL << 40;
        switch (op) {
            case CmpOp::Lt: return {lo, k - 1};
            case CmpOp::Le: return {lo, k};
            case CmpOp::Eq: return {k, k};
            case CmpOp::Ge: return {k, hi};
            case CmpOp::Gt: return {k + 1, hi};
        }
        return {lo, hi};
    }

    void check_satisfiable(const Condition& c) {
        using K = Condition::Kind;
        if (c.kind == K::Not && !c.children.empty() && c.children.front().kind == K::True) {
            warning(c.pos, "unsatisfiable-condition", "condition 'not true' can never hold");
            return;
        }
        if (c.kind != K::And) return;
        std::vector<const Condition*> parts;
        flatten(c, parts);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            for (std::size_t j = 0; j < parts.size(); ++j) {
                if (i == j) continue;
                const Condition& a = *parts[i];
                const Condition& b = *parts[j];
                if (b.kind == K::Not && !b.children.empty() && b.children.front() == a) {
                    warning(c.pos, "unsatisfiable-condition",
                            "'" + format_condition(c) + "' requires a condition and its negation");
                    return;
                }
                if (i < j && a.kind == b.kind &&
                    (a.kind == K::ScoreCmp || a.kind == K::HistoryCmp || a.kind == K::WitnessedCmp ||
                     a.kind == K::PartialVolition)) {
                    Condition la = a, lb = b;
                    la.op = lb.op = CmpOp::Eq;
                    la.threshold = lb.threshold = 0;
                    if (!(la == lb)) continue;
                    auto [alo, ahi] = interval(a.op, a.threshold);
                    auto [blo, bhi] = interval(b.op, b.threshold);
                    if (std::max(alo, blo) > std::min(ahi, bhi)) {
                        warning(c.pos, "unsatisfiable-condition",
                                "'" + format_condition(c) + "' has contradictory bounds");
                        return;
                    }
                }
            }
        }
    }

    const ScenarioDoc& doc_;
    std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const ScenarioDoc& doc) {
    auto out = Validator(doc).run();
    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    return out;
}

}  // namespace socialsim::dsl
