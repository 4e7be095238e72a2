#include "socialsim/volition.hpp"

#include <algorithm>
#include <tuple>

namespace socialsim {

const CharacterId& Bindings::resolve(Role r) const {
    switch (r) {
        case Role::Initiator: return initiator;
        case Role::Target: return target;
        case Role::Subject:
            if (subject) return *subject;
            throw SocialError("unbound-role", "role 'subject' is not bound");
    }
    return initiator;
}

int Rng::uniform(int low, int high) {
    ++draws_;
    auto span = static_cast<std::uint64_t>(static_cast<long long>(high) - low + 1);
    return low + static_cast<int>(engine_() % span);
}

namespace {

const std::string& trait_of(const Condition& c, const EvalScope& scope) {
    if (!c.trait.bound) return c.trait.symbol;
    if (!scope.bound_trait) throw SocialError("unbound-trait", "'@trait' used outside a per-trait rule");
    return *scope.bound_trait;
}

const std::string& attribute(const CharacterDecl& c, Attr a) { return a == Attr::Race ? c.race : c.gender; }

int weight_value(const WeightTerm& w, const SocialState& state, const Bindings& roles, Rng* rng) {
    switch (w.kind) {
        case WeightTerm::Kind::Constant: return w.constant;
        case WeightTerm::Kind::Score:
            return state.get(w.map, w.network, roles.resolve(w.from), roles.resolve(w.to));
        case WeightTerm::Kind::Random:
            if (!rng) throw SocialError("rng-required", "random weight evaluated without a generator");
            return rng->uniform(w.low, w.high);
    }
    return 0;
}

}  // namespace

bool eval_condition(const Condition& c, const SocialState& state, const Bindings& roles, const EvalScope& scope) {
    using K = Condition::Kind;
    switch (c.kind) {
        case K::True: return true;
        case K::Not: return c.children.empty() || !eval_condition(c.children.front(), state, roles, scope);
        case K::And:
            for (const auto& child : c.children)
                if (!eval_condition(child, state, roles, scope)) return false;
            return true;
        case K::HasTrait: return state.has_trait(roles.resolve(c.role), trait_of(c, scope));
        case K::Likes: return state.likes(roles.resolve(c.role), trait_of(c, scope));
        case K::Dislikes: return state.dislikes(roles.resolve(c.role), trait_of(c, scope));
        case K::HasStatus: {
            if (!state.scenario().find_status(c.symbol))
                throw SocialError("unknown-status", "undeclared status '" + c.symbol + "'");
            std::optional<std::string_view> target;
            if (c.role2) target = roles.resolve(*c.role2);
            return state.has_status(roles.resolve(c.role), c.symbol, target);
        }
        case K::ScoreCmp:
            return compare(state.get(c.map, c.symbol, roles.resolve(c.role), roles.resolve(c.role2.value_or(Role::Target))),
                           c.op, c.threshold);
        case K::Relationship:
            if (!state.scenario().has_relationship(c.symbol))
                throw SocialError("unknown-relationship", "undeclared relationship '" + c.symbol + "'");
            return state.relationship(c.symbol, roles.initiator, roles.target);
        case K::SameAttr:
        case K::DiffAttr: {
            bool same = attribute(state.character(roles.initiator), c.attr) ==
                        attribute(state.character(roles.target), c.attr);
            return c.kind == K::SameAttr ? same : !same;
        }
        case K::OrientationCompatible: {
            const auto& x = state.character(roles.initiator);
            const auto& y = state.character(roles.target);
            return orientation_admits(x.orientation, x.gender, y.gender);
        }
        case K::HistoryCmp:
            if (!state.scenario().find_exchange(c.symbol))
                throw SocialError("unknown-exchange", "undeclared exchange '" + c.symbol + "'");
            return compare(state.history_count(c.symbol, roles.initiator, roles.target, c.outcomes), c.op, c.threshold);
        case K::WitnessedCmp: {
            if (!state.scenario().find_exchange(c.symbol))
                throw SocialError("unknown-exchange", "undeclared exchange '" + c.symbol + "'");
            const CharacterId& who = roles.resolve(c.role);
            const CharacterId& actor = c.role == Role::Initiator ? roles.target : roles.initiator;
            return compare(state.witnessed_count(who, c.symbol, actor, c.outcomes), c.op, c.threshold);
        }
        case K::PartialVolition: return compare(scope.running_total, c.op, c.threshold);
    }
    return false;
}

VolitionBreakdown eval_rule_set(std::span<const InfluenceRule> rules, const SocialState& state, const Bindings& roles,
                                Rng* rng) {
    VolitionBreakdown out;
    out.contributions.reserve(rules.size());
    for (const auto& rule : rules) {
        Contribution contrib;
        contrib.rule = rule.id;
        auto fire = [&] {
            int amount = weight_value(rule.weight, state, roles, rng);
            contrib.amount += amount;
            contrib.times += 1;
            out.total += amount;
        };
        if (rule.per_trait) {
            for (const auto& trait : state.character(roles.target).traits) {
                EvalScope scope{out.total, &trait};
                if (eval_condition(rule.when, state, roles, scope)) fire();
            }
        } else if (eval_condition(rule.when, state, roles, EvalScope{out.total, nullptr})) {
            fire();
        }
        contrib.fired = contrib.times > 0;
        out.contributions.push_back(std::move(contrib));
    }
    return out;
}

const Condition* failing_precondition(const SocialState& state, const ExchangeDef& exchange, const Bindings& roles) {
    for (const auto& p : exchange.preconditions)
        if (!eval_condition(p, state, roles)) return &p;
    return nullptr;
}

std::optional<VolitionBreakdown> initiator_volition(const SocialState& state, const ExchangeDef& exchange,
                                                    const Bindings& roles) {
    if (failing_precondition(state, exchange, roles)) return std::nullopt;
    return eval_rule_set(exchange.initiator_rules, state, roles);
}

Outcome classify_response(int total, int accept_threshold) {
    if (total > accept_threshold) return Outcome::Accept;
    if (total >= 0) return Outcome::Neutral;
    return Outcome::Reject;
}

Response responder_response(const SocialState& state, const ExchangeDef& exchange, const Bindings& roles, Rng* rng) {
    Response r;
    r.breakdown = eval_rule_set(exchange.responder_rules, state, roles, rng);
    r.outcome = classify_response(r.breakdown.total, exchange.accept_threshold);
    return r;
}

std::vector<CharacterId> characters_at(const SocialState& state, std::string_view location) {
    std::vector<CharacterId> out;
    for (const auto& c : state.scenario().characters)
        if (c.location == location) out.push_back(c.id);
    return out;
}

std::vector<GoalUpdate> form_goals(SocialState& state, std::string_view location) {
    std::vector<GoalUpdate> updates;
    const auto& doc = state.scenario();
    auto here = characters_at(state, location);
    for (const auto& owner : here) {
        if (state.character(owner).player) continue;
        for (const auto& other : here) {
            if (other == owner) continue;
            Bindings roles{owner, other, std::nullopt};
            for (const auto& block : doc.goal_blocks) {
                const NetworkDecl* net = doc.find_network(block.network);
                if (!net) throw SocialError("unknown-network", "undeclared network '" + block.network + "'");
                long long goal = net->initial;
                if (!block.gate || eval_condition(*block.gate, state, roles))
                    goal = eval_rule_set(block.rules, state, roles).total;
                state.set_score(ScoreMap::Goal, block.network, owner, other, goal);
                updates.push_back({block.network, owner, other, net->clamp(goal)});
            }
        }
    }
    return updates;
}

bool desire_before(const DesireEntry& a, const DesireEntry& b) {
    if (a.volition != b.volition) return a.volition > b.volition;
    return std::tie(a.exchange, a.target, a.subject) < std::tie(b.exchange, b.target, b.subject);
}

std::vector<DesireEntry> build_prospective_memory(const SocialState& state, std::string_view npc,
                                                  std::string_view location) {
    std::vector<DesireEntry> memory;
    auto here = characters_at(state, location);
    for (const auto& exchange : state.scenario().exchanges) {
        for (const auto& target : here) {
            if (target == npc) continue;
            auto consider = [&](std::optional<CharacterId> subject) {
                Bindings roles{CharacterId(npc), target, std::move(subject)};
                auto v = initiator_volition(state, exchange, roles);
                if (v && v->total > 0) memory.push_back({exchange.id, target, roles.subject, v->total});
            };
            if (!exchange.has_subject) {
                consider(std::nullopt);
                continue;
            }
            for (const auto& subject : here)
                if (subject != npc && subject != target) consider(subject);
        }
    }
    std::sort(memory.begin(), memory.end(), desire_before);
    return memory;
}

std::optional<DesireEntry> choose_action(std::span<const DesireEntry> memory) {
    if (memory.empty()) return std::nullopt;
    return memory.front();
}

}  // namespace socialsim
