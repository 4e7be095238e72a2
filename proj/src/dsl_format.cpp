#include <sstream>

#include "socialsim/dsl.hpp"

namespace socialsim::dsl {

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string trait_arg(const TraitArg& t) { return t.bound ? "@trait" : t.symbol; }

std::string outcome_list(OutcomeSet set) {
    std::string out;
    for (Outcome o : {Outcome::Accept, Outcome::Neutral, Outcome::Reject, Outcome::Error}) {
        if (!set.contains(o)) continue;
        if (!out.empty()) out += '|';
        out += to_string(o);
    }
    return out;
}

std::string cmp_tail(const Condition& c) {
    return " " + std::string(to_string(c.op)) + " " + std::to_string(c.threshold);
}

std::string operand(const Condition& c) {
    std::string s = format_condition(c);
    return c.kind == Condition::Kind::And ? "(" + s + ")" : s;
}

void write_rule(std::ostringstream& out, std::string_view prefix, const InfluenceRule& r) {
    out << "  " << prefix << "rule " << r.id << " weight " << format_weight(r.weight);
    if (r.per_trait) out << " per trait";
    out << " when " << format_condition(r.when) << '\n';
}

void write_effects(std::ostringstream& out, std::string_view indent, const std::vector<Effect>& effects) {
    if (effects.empty()) {
        out << "{ }\n";
        return;
    }
    out << "{\n";
    for (const auto& e : effects) out << indent << "  " << format_effect(e) << '\n';
    out << indent << "}\n";
}

}  // namespace

std::string format_condition(const Condition& c) {
    using K = Condition::Kind;
    switch (c.kind) {
        case K::True: return "true";
        case K::Not: return "not " + (c.children.empty() ? std::string("true") : operand(c.children.front()));
        case K::And: {
            std::string out;
            for (std::size_t i = 0; i < c.children.size(); ++i) {
                if (i) out += " and ";
                out += operand(c.children[i]);
            }
            return out;
        }
        case K::HasTrait: return "has_trait(" + std::string(to_string(c.role)) + ", " + trait_arg(c.trait) + ")";
        case K::Likes: return "likes(" + std::string(to_string(c.role)) + ", " + trait_arg(c.trait) + ")";
        case K::Dislikes: return "dislikes(" + std::string(to_string(c.role)) + ", " + trait_arg(c.trait) + ")";
        case K::HasStatus: {
            std::string out = "has_status(" + std::string(to_string(c.role)) + ", " + c.symbol;
            if (c.role2) out += ", " + std::string(to_string(*c.role2));
            return out + ")";
        }
        case K::ScoreCmp:
            return std::string(to_string(c.map)) + "(" + c.symbol + ", " + std::string(to_string(c.role)) + ", " +
                   std::string(to_string(c.role2.value_or(Role::Target))) + ")" + cmp_tail(c);
        case K::Relationship: return "relationship(" + c.symbol + ")";
        case K::SameAttr: return "same(" + std::string(to_string(c.attr)) + ")";
        case K::DiffAttr: return "different(" + std::string(to_string(c.attr)) + ")";
        case K::OrientationCompatible: return "orientation_compatible";
        case K::HistoryCmp:
        case K::WitnessedCmp: {
            std::string out = c.kind == K::HistoryCmp ? "history(" : "witnessed(" + std::string(to_string(c.role)) + ", ";
            out += c.symbol;
            if (!(c.outcomes == OutcomeSet::all_resolved())) out += ", " + outcome_list(c.outcomes);
            return out + ")" + cmp_tail(c);
        }
        case K::PartialVolition: return "volition" + cmp_tail(c);
    }
    return "true";
}

std::string format_weight(const WeightTerm& w) {
    switch (w.kind) {
        case WeightTerm::Kind::Constant: return std::to_string(w.constant);
        case WeightTerm::Kind::Score:
            return std::string(to_string(w.map)) + "(" + w.network + ", " + std::string(to_string(w.from)) + ", " +
                   std::string(to_string(w.to)) + ")";
        case WeightTerm::Kind::Random: return "random(" + std::to_string(w.low) + ", " + std::to_string(w.high) + ")";
    }
    return "0";
}

std::string format_effect(const Effect& e) {
    switch (e.kind) {
        case Effect::Kind::ScoreDelta: {
            std::string out = std::string(to_string(e.map)) + " " + e.symbol + " " + std::string(to_string(e.from)) +
                              " -> " + std::string(to_string(e.to.value_or(Role::Target)));
            out += e.amount < 0 ? " -= " + std::to_string(-static_cast<long long>(e.amount))
                                : " += " + std::to_string(e.amount);
            return out;
        }
        case Effect::Kind::StatusAdd: {
            std::string out = "add_status " + std::string(to_string(e.from)) + " " + e.symbol;
            if (e.to) out += " -> " + std::string(to_string(*e.to));
            if (e.duration) out += " for " + std::to_string(*e.duration);
            return out;
        }
        case Effect::Kind::StatusRemove:
            return "remove_status " + std::string(to_string(e.from)) + " " + e.symbol;
        case Effect::Kind::RelationshipSet:
            return "relationship " + e.symbol + (e.active ? " on" : " off");
    }
    return "";
}

std::string serialize(const ScenarioDoc& doc) {
    std::ostringstream out;
    bool section = false;
    auto gap = [&] {
        if (section) out << '\n';
        section = true;
    };
    if (!doc.name.empty()) {
        gap();
        out << "scenario " << doc.name << '\n';
    }
    if (!doc.networks.empty()) {
        gap();
        for (const auto& n : doc.networks)
            out << "network " << n.id << " range " << n.min << ' ' << n.max << " default " << n.initial << '\n';
    }
    if (!doc.traits.empty()) {
        gap();
        for (const auto& t : doc.traits) out << "trait " << t.id << '\n';
    }
    if (!doc.statuses.empty()) {
        gap();
        for (const auto& s : doc.statuses)
            out << "status " << s.id << (s.targeted ? " targeted" : "") << " duration " << s.duration << '\n';
    }
    if (!doc.relationships.empty()) {
        gap();
        for (const auto& r : doc.relationships) out << "relationship " << r.id << '\n';
    }
    if (!doc.locations.empty()) {
        gap();
        for (const auto& l : doc.locations) out << "location " << l.id << '\n';
    }
    for (const auto& c : doc.characters) {
        gap();
        out << "character " << c.id << " {\n";
        if (!c.name.empty()) out << "  name " << quote(c.name) << '\n';
        if (!c.gender.empty()) out << "  gender " << c.gender << '\n';
        if (!c.race.empty()) out << "  race " << c.race << '\n';
        out << "  orientation " << c.orientation << '\n';
        if (!c.location.empty()) out << "  location " << c.location << '\n';
        if (c.player) out << "  player\n";
        auto list = [&](std::string_view kw, const std::vector<std::string>& v) {
            if (v.empty()) return;
            out << "  " << kw << ' ';
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
            out << '\n';
        };
        list("traits", c.traits);
        list("likes", c.likes);
        list("dislikes", c.dislikes);
        for (const auto& s : c.scores)
            out << "  " << to_string(s.map) << ' ' << s.network << " -> " << s.other << " = " << s.value << '\n';
        for (const auto& s : c.statuses) {
            out << "  status " << s.kind;
            if (s.target) out << " -> " << *s.target;
            if (s.duration) out << " for " << *s.duration;
            out << '\n';
        }
        for (const auto& r : c.relationships) out << "  relationship " << r.kind << ' ' << r.other << '\n';
        out << "}\n";
    }
    for (const auto& g : doc.goal_blocks) {
        gap();
        out << "goals " << g.network;
        if (g.gate) out << " when " << format_condition(*g.gate);
        out << " {\n";
        for (const auto& r : g.rules) write_rule(out, "", r);
        out << "}\n";
    }
    for (const auto& x : doc.exchanges) {
        gap();
        out << "exchange " << x.id << " {\n";
        if (!x.name.empty()) out << "  name " << quote(x.name) << '\n';
        if (!x.intent.empty()) out << "  intent " << x.intent << '\n';
        if (x.has_subject) out << "  subject\n";
        out << "  accept_above " << x.accept_threshold << '\n';
        for (const auto& p : x.preconditions) out << "  pre " << format_condition(p) << '\n';
        for (const auto& r : x.initiator_rules) write_rule(out, "initiator ", r);
        for (const auto& r : x.responder_rules) write_rule(out, "responder ", r);
        for (Outcome o : kResolvedOutcomes) {
            if (const auto* effects = x.effects_for(o)) {
                out << "  on " << to_string(o) << ' ';
                write_effects(out, "  ", *effects);
            }
        }
        for (Outcome o : kResolvedOutcomes) {
            if (const auto* scene = x.scene_for(o)) {
                out << "  scene " << to_string(o) << " {\n";
                out << "    perform " << quote(scene->performance) << '\n';
                out << "    respond " << quote(scene->response) << '\n';
                out << "  }\n";
            }
        }
        out << "}\n";
    }
    for (const auto& t : doc.triggers) {
        gap();
        out << "trigger " << t.id << " when " << format_condition(t.when) << " then ";
        write_effects(out, "", t.effects);
    }
    return out.str();
}

}  // namespace socialsim::dsl
