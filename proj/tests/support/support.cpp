#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef SOCIALSIM_SOURCE_DIR
#define SOCIALSIM_SOURCE_DIR "."
#endif

namespace socialsim::testing {

std::string source_path(const std::string& relative) { return std::string(SOCIALSIM_SOURCE_DIR) + "/" + relative; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::shared_ptr<const ScenarioDoc> load_text(const std::string& text) {
    auto result = dsl::parse(text);
    if (!result.ok()) {
        std::string msg = "scenario rejected:";
        for (const auto& d : result.diagnostics) msg += "\n  " + dsl::format_diagnostic("<text>", d);
        throw std::runtime_error(msg);
    }
    return std::make_shared<const ScenarioDoc>(std::move(*result.doc));
}

std::shared_ptr<const ScenarioDoc> load_scenario(const std::string& name) {
    return load_text(read_file(source_path("scenarios/" + name + ".social")));
}

// ---------------------------------------------------------------------------
// Random scenarios

namespace {

class Gen {
public:
    Gen(std::uint64_t seed, const GenOptions& o) : rng_(seed), o_(o) {}

    std::string run() {
        int ntraits = pick(2, o_.max_traits);
        for (int i = 0; i < ntraits; ++i) traits_.push_back("t" + std::to_string(i));
        int nnets = pick(1, 2);
        for (int i = 0; i < nnets; ++i) nets_.push_back("n" + std::to_string(i));
        int nex = pick(1, o_.max_exchanges);
        for (int i = 0; i < nex; ++i) exchanges_.push_back("E" + std::to_string(i));

        out_ << "scenario fuzz\n\n";
        for (const auto& n : nets_) out_ << "network " << n << " range 0 20 default " << pick(0, 6) << '\n';
        for (const auto& t : traits_) out_ << "trait " << t << '\n';
        out_ << "status mark targeted duration 3\nstatus tired duration 2\nstatus cursed duration 0\n";
        out_ << "relationship bond\nlocation here\nlocation there\n\n";

        int npcs = pick(o_.min_npcs, o_.max_npcs);
        std::vector<std::string> ids{"P"};
        for (int i = 0; i < npcs; ++i) ids.push_back("c" + std::to_string(i));
        bool someone_away = npcs > 1 && chance(30);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto& id = ids[i];
            out_ << "character " << id << " {\n";
            if (i == 0) out_ << "  player\n";
            out_ << "  gender " << (chance(50) ? "f" : "m") << '\n';
            out_ << "  race " << (chance(50) ? "a" : "b") << '\n';
            static const char* orient[] = {"straight", "gay", "bi", "ace"};
            out_ << "  orientation " << orient[pick(0, 3)] << '\n';
            out_ << "  location " << (someone_away && i + 1 == ids.size() ? "there" : "here") << '\n';
            auto held = subset(traits_, 40);
            if (!held.empty()) out_ << "  traits " << join(held) << '\n';
            std::vector<std::string> likes, dislikes;
            for (const auto& t : traits_) {
                int r = pick(0, 9);
                if (r < 2) likes.push_back(t);
                else if (r < 4) dislikes.push_back(t);
            }
            if (!likes.empty()) out_ << "  likes " << join(likes) << '\n';
            if (!dislikes.empty()) out_ << "  dislikes " << join(dislikes) << '\n';
            for (const auto& other : ids) {
                if (other == id) continue;
                for (const auto& n : nets_)
                    if (chance(40)) out_ << "  value " << n << " -> " << other << " = " << pick(0, 20) << '\n';
            }
            out_ << "}\n\n";
        }

        if (chance(70)) {
            out_ << "goals " << nets_[0];
            if (chance(40)) out_ << " when orientation_compatible";
            out_ << " {\n";
            int n = pick(1, 3);
            for (int i = 0; i < n; ++i) write_rule("", "g" + std::to_string(i), Place::Goal);
            out_ << "}\n\n";
        }

        for (const auto& e : exchanges_) write_exchange(e);

        if (o_.triggers) {
            int n = pick(0, 3);
            for (int i = 0; i < n; ++i) {
                out_ << "trigger k" << i << " when " << condition(Place::Trigger, false, 2) << " then {\n";
                int m = pick(1, 2);
                for (int j = 0; j < m; ++j) out_ << "  " << effect(false) << '\n';
                out_ << "}\n\n";
            }
        }
        return out_.str();
    }

private:
    enum class Place { Pre, Initiator, Responder, Goal, Trigger };

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(int percent) { return pick(0, 99) < percent; }
    template <class T>
    const T& any(const std::vector<T>& v) { return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))]; }

    std::vector<std::string> subset(const std::vector<std::string>& v, int percent) {
        std::vector<std::string> out;
        for (const auto& x : v)
            if (chance(percent)) out.push_back(x);
        return out;
    }

    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    }

    std::string role(bool subject) {
        if (subject && chance(25)) return "subject";
        return chance(50) ? "initiator" : "target";
    }

    std::pair<std::string, std::string> role_pair(bool subject) {
        std::vector<std::string> roles{"initiator", "target"};
        if (subject) roles.push_back("subject");
        std::string a = any(roles);
        std::string b;
        do b = any(roles);
        while (b == a);
        return {a, b};
    }

    std::string op() {
        static const std::vector<std::string> ops{"<", "<=", "==", ">=", ">"};
        return any(ops);
    }

    std::string outcomes() {
        static const std::vector<std::string> names{"accept", "neutral", "reject"};
        std::string s = any(names);
        if (chance(30)) {
            std::string more = any(names);
            if (more != s) s += " | " + more;
        }
        return s;
    }

    std::string atom(Place place, bool per_trait, bool subject) {
        for (;;) {
            switch (pick(0, 14)) {
                case 0: return "true";
                case 1: return "has_trait(" + role(subject) + ", " + any(traits_) + ")";
                case 2: return "likes(" + role(subject) + ", " + (per_trait && chance(70) ? "@trait" : any(traits_)) + ")";
                case 3:
                    return "dislikes(" + role(subject) + ", " + (per_trait && chance(70) ? "@trait" : any(traits_)) + ")";
                case 4: return "has_status(" + role(subject) + ", tired)";
                case 5: {
                    auto [a, b] = role_pair(subject);
                    return chance(50) ? "has_status(" + a + ", mark, " + b + ")" : "has_status(" + a + ", mark)";
                }
                case 6: {
                    auto [a, b] = role_pair(subject);
                    static const std::vector<std::string> maps{"value", "goal", "belief"};
                    return any(maps) + "(" + any(nets_) + ", " + a + ", " + b + ") " + op() + " " + std::to_string(pick(0, 20));
                }
                case 7: return "relationship(bond)";
                case 8: return std::string(chance(50) ? "same" : "different") + "(" + (chance(50) ? "race" : "gender") + ")";
                case 9: return "orientation_compatible";
                case 10: {
                    std::string s = "history(" + any(exchanges_);
                    if (chance(50)) s += ", " + outcomes();
                    return s + ") " + op() + " " + std::to_string(pick(0, 3));
                }
                case 11: {
                    std::string s = "witnessed(" + std::string(chance(50) ? "initiator" : "target") + ", " + any(exchanges_);
                    if (chance(50)) s += ", " + outcomes();
                    return s + ") " + op() + " " + std::to_string(pick(0, 2));
                }
                case 12:
                    if (place != Place::Initiator && place != Place::Responder && place != Place::Goal) continue;
                    if (!o_.partial_volition) continue;
                    return "volition " + op() + " " + std::to_string(pick(-3, 5));
                case 13: return "other_has(" + (per_trait && chance(50) ? std::string("@trait") : any(traits_)) + ")";
                case 14: return "has_status(" + role(subject) + ", cursed)";
            }
        }
    }

    std::string condition(Place place, bool per_trait, int budget, bool subject = false) {
        std::string c = atom(place, per_trait, subject);
        if (chance(20)) c = "not " + c;
        if (budget > 1 && chance(35)) c += " and " + condition(place, per_trait, budget - 1, subject);
        return c;
    }

    std::string weight(Place place, bool subject) {
        int r = pick(0, 9);
        if (r < 2) {
            auto [a, b] = role_pair(subject);
            return "value(" + any(nets_) + ", " + a + ", " + b + ")";
        }
        if (r < 3 && place == Place::Responder && o_.random_weights) {
            int lo = pick(-5, 2);
            return "random(" + std::to_string(lo) + ", " + std::to_string(lo + pick(0, 6)) + ")";
        }
        return std::to_string(pick(-6, 8));
    }

    void write_rule(const std::string& prefix, const std::string& id, Place place, bool subject = false) {
        bool per = chance(20);
        out_ << "  " << prefix << "rule " << id << " weight " << weight(place, subject);
        if (per) out_ << " per trait";
        out_ << " when " << condition(place, per, 2, subject) << '\n';
    }

    std::string effect(bool subject) {
        auto [a, b] = role_pair(subject);
        switch (pick(0, 5)) {
            case 0:
            case 1: {
                static const std::vector<std::string> maps{"value", "value", "belief", "goal"};
                int amount = pick(1, 8);
                return any(maps) + " " + any(nets_) + " " + a + " -> " + b + (chance(60) ? " += " : " -= ") +
                       std::to_string(amount);
            }
            case 2: return "add_status " + a + " mark -> " + b + (chance(30) ? " for 2" : "");
            case 3: return "add_status " + a + " tired";
            case 4: return "remove_status " + a + (chance(50) ? " mark" : " tired");
            default: return std::string("relationship bond ") + (chance(70) ? "on" : "off");
        }
    }

    void write_exchange(const std::string& id) {
        bool subject = o_.subjects && chance(15);
        out_ << "exchange " << id << " {\n  intent " << any(nets_) << '\n';
        if (subject) out_ << "  subject\n";
        if (chance(30)) out_ << "  accept_above " << pick(0, 6) << '\n';
        int pres = pick(0, 2);
        for (int i = 0; i < pres; ++i) out_ << "  pre " << condition(Place::Pre, false, 2, subject) << '\n';
        int irules = pick(1, o_.max_rules);
        for (int i = 0; i < irules; ++i) write_rule("initiator ", "i" + std::to_string(i), Place::Initiator, subject);
        int rrules = pick(0, 4);
        for (int i = 0; i < rrules; ++i) write_rule("responder ", "r" + std::to_string(i), Place::Responder, subject);
        for (const char* o : {"accept", "neutral", "reject"}) {
            out_ << "  on " << o << " {";
            int n = pick(0, 3);
            for (int i = 0; i < n; ++i) out_ << "\n    " << effect(subject);
            out_ << (n ? "\n  }\n" : " }\n");
        }
        for (const char* o : {"accept", "neutral", "reject"})
            out_ << "  scene " << o << " { perform \"" << id << " at {target}\" respond \"" << o
                 << " from {target}\" }\n";
        out_ << "}\n\n";
    }

    std::mt19937_64 rng_;
    GenOptions o_;
    std::ostringstream out_;
    std::vector<std::string> traits_, nets_, exchanges_;
};

}  // namespace

std::string random_scenario_text(std::uint64_t seed, const GenOptions& options) { return Gen(seed, options).run(); }

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
    static const std::vector<std::string> tokens{
        "scenario ", "network ", "trait ", "status ", "character ", "exchange ", "trigger ", "goals ", "{", "}",
        "(", ")", "rule ", "weight ", "when ", "per trait ", "@trait", "->", "+=", "-=", ">=", "\"", "#",
        "\n", " ", "and ", "not ", "value", "history", "player", "location ", "on accept ", "scene ", "123",
        "-99999999999999999999", "random(", ",", "|", "\t", "\xff", "\0"};
    std::string out;
    std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
    while (out.size() < len) {
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0)
            out.push_back(static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng)));
        else
            out += tokens[std::uniform_int_distribution<std::size_t>(0, tokens.size() - 1)(rng)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference evaluator

namespace oracle {

namespace {

const std::string& pick_role(Role role, const Roles& r) {
    if (role == Role::Initiator) return r.x;
    if (role == Role::Target) return r.y;
    if (!r.z) throw std::runtime_error("subject unbound");
    return *r.z;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

bool cmp(long long a, CmpOp op, long long b) {
    switch (op) {
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Eq: return a == b;
        case CmpOp::Ge: return a >= b;
        case CmpOp::Gt: return a > b;
    }
    return false;
}

const CharacterDecl& who(const SocialState& s, const std::string& id) {
    for (const auto& c : s.scenario().characters)
        if (c.id == id) return c;
    throw std::runtime_error("no character " + id);
}

}  // namespace

bool holds(const Condition& c, const SocialState& s, const Roles& r, int partial, const std::string* trait) {
    auto trait_name = [&]() -> std::string {
        if (!c.trait.bound) return c.trait.symbol;
        if (!trait) throw std::runtime_error("@trait unbound");
        return *trait;
    };
    switch (c.kind) {
        case Condition::Kind::True: return true;
        case Condition::Kind::Not: return !holds(c.children.at(0), s, r, partial, trait);
        case Condition::Kind::And: {
            bool all = true;
            for (const auto& child : c.children) all = all && holds(child, s, r, partial, trait);
            return all;
        }
        case Condition::Kind::HasTrait: return contains(who(s, pick_role(c.role, r)).traits, trait_name());
        case Condition::Kind::Likes: return contains(who(s, pick_role(c.role, r)).likes, trait_name());
        case Condition::Kind::Dislikes: return contains(who(s, pick_role(c.role, r)).dislikes, trait_name());
        case Condition::Kind::HasStatus:
            for (const auto& st : s.statuses(pick_role(c.role, r))) {
                if (st.kind != c.symbol) continue;
                if (!c.role2) return true;
                if (st.target && *st.target == pick_role(*c.role2, r)) return true;
            }
            return false;
        case Condition::Kind::ScoreCmp: {
            const auto& owner = pick_role(c.role, r);
            const auto& other = pick_role(c.role2.value_or(Role::Target), r);
            const auto& map = s.triple(owner, c.symbol).scores(c.map);
            auto it = map.find(other);
            long long v = it == map.end() ? s.scenario().find_network(c.symbol)->initial : it->second;
            return cmp(v, c.op, c.threshold);
        }
        case Condition::Kind::Relationship:
            for (const auto& rec : s.relationships())
                if (rec.kind == c.symbol && rec.active &&
                    ((rec.a == r.x && rec.b == r.y) || (rec.a == r.y && rec.b == r.x)))
                    return true;
            return false;
        case Condition::Kind::SameAttr:
        case Condition::Kind::DiffAttr: {
            const auto& a = who(s, r.x);
            const auto& b = who(s, r.y);
            bool same = c.attr == Attr::Race ? a.race == b.race : a.gender == b.gender;
            return (c.kind == Condition::Kind::SameAttr) == same;
        }
        case Condition::Kind::OrientationCompatible: {
            const auto& a = who(s, r.x);
            const auto& b = who(s, r.y);
            if (a.orientation == "bi") return true;
            if (a.orientation == "straight") return a.gender != b.gender;
            if (a.orientation == "gay") return a.gender == b.gender;
            return false;
        }
        case Condition::Kind::HistoryCmp: {
            int n = 0;
            for (const auto& h : s.history())
                if (h.exchange == c.symbol && h.initiator == r.x && h.target == r.y && c.outcomes.contains(h.outcome))
                    ++n;
            return cmp(n, c.op, c.threshold);
        }
        case Condition::Kind::WitnessedCmp: {
            const auto& observer = pick_role(c.role, r);
            const auto& actor = c.role == Role::Initiator ? r.y : r.x;
            return cmp(s.witnessed_count(observer, c.symbol, actor, c.outcomes), c.op, c.threshold);
        }
        case Condition::Kind::PartialVolition: return cmp(partial, c.op, c.threshold);
    }
    return false;
}

int total(const std::vector<InfluenceRule>& rules, const SocialState& s, const Roles& r, Rng* rng) {
    int sum = 0;
    for (const auto& rule : rules) {
        std::vector<const std::string*> passes;
        if (rule.per_trait)
            for (const auto& t : who(s, r.y).traits) passes.push_back(&t);
        else
            passes.push_back(nullptr);
        for (const std::string* t : passes) {
            if (!holds(rule.when, s, r, sum, t)) continue;
            const auto& w = rule.weight;
            if (w.kind == WeightTerm::Kind::Constant) {
                sum += w.constant;
            } else if (w.kind == WeightTerm::Kind::Score) {
                sum += s.get(w.map, w.network, pick_role(w.from, r), pick_role(w.to, r));
            } else {
                if (!rng) throw std::runtime_error("random weight without generator");
                sum += rng->uniform(w.low, w.high);
            }
        }
    }
    return sum;
}

std::optional<int> volition(const SocialState& s, const ExchangeDef& ex, const Roles& r) {
    for (const auto& p : ex.preconditions)
        if (!holds(p, s, r, 0, nullptr)) return std::nullopt;
    return total(ex.initiator_rules, s, r);
}

std::optional<DesireEntry> best_action(const SocialState& s, const std::string& npc, const std::string& location) {
    std::vector<std::string> here;
    for (const auto& c : s.scenario().characters)
        if (c.location == location) here.push_back(c.id);
    std::optional<DesireEntry> best;
    auto better = [](const DesireEntry& a, const DesireEntry& b) {
        if (a.volition != b.volition) return a.volition > b.volition;
        if (a.exchange != b.exchange) return a.exchange < b.exchange;
        if (a.target != b.target) return a.target < b.target;
        return a.subject < b.subject;
    };
    for (const auto& ex : s.scenario().exchanges) {
        for (const auto& y : here) {
            if (y == npc) continue;
            std::vector<std::optional<std::string>> subjects;
            if (ex.has_subject) {
                for (const auto& z : here)
                    if (z != npc && z != y) subjects.emplace_back(z);
            } else {
                subjects.emplace_back(std::nullopt);
            }
            for (const auto& z : subjects) {
                auto v = volition(s, ex, {npc, y, z});
                if (!v || *v <= 0) continue;
                DesireEntry cand{ex.id, y, z, *v};
                if (!best || better(cand, *best)) best = cand;
            }
        }
    }
    return best;
}

int flirt_listing(int attracted_to, const std::vector<std::string>& all_traits,
                  const std::vector<std::string>& x_likes, const std::vector<std::string>& x_dislikes,
                  const std::vector<std::string>& y_traits, bool x_extrovert) {
    int v = attracted_to;
    for (const auto& trait : all_traits) {
        bool y_has = contains(y_traits, trait);
        if (contains(x_likes, trait) && y_has)
            v += 1;
        else if (contains(x_dislikes, trait) && y_has)
            v -= 2;
    }
    if (v > 0 && x_extrovert) v += 2;
    return v;
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Fuzz driver and checkers

std::unique_ptr<Session> fuzz_session(std::shared_ptr<const ScenarioDoc> doc, std::uint64_t seed, int ticks,
                                      std::uint64_t driver_seed, int initiate_percent) {
    auto session = std::make_unique<Session>(doc, seed);
    std::mt19937_64 driver(driver_seed);
    auto roll = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(driver); };
    for (int t = 0; t < ticks; ++t) {
        while (session->awaiting_player()) {
            Outcome choice = kResolvedOutcomes[static_cast<std::size_t>(roll(0, 2))];
            session->player_respond(session->active_quest()->id, choice);
        }
        if (roll(0, 99) < initiate_percent && !doc->exchanges.empty()) {
            const auto& ex = doc->exchanges[static_cast<std::size_t>(roll(0, static_cast<int>(doc->exchanges.size()) - 1))];
            auto here = session->present();
            const auto& target = here[static_cast<std::size_t>(roll(0, static_cast<int>(here.size()) - 1))];
            std::optional<std::string> subject;
            if (ex.has_subject) subject = here[static_cast<std::size_t>(roll(0, static_cast<int>(here.size()) - 1))];
            try {
                session->player_initiate(ex.id, target, subject);
            } catch (const SocialError&) {
            }
        }
        session->tick();
    }
    while (session->awaiting_player())
        session->player_respond(session->active_quest()->id, kResolvedOutcomes[static_cast<std::size_t>(roll(0, 2))]);
    return session;
}

std::vector<std::string> stage_violations(const Session& session) {
    std::vector<std::string> out;
    std::map<std::string, Stage> current;
    for (const auto& t : session.transitions()) {
        bool legal = (t.from == Stage::Waiting && t.to == Stage::Bound) ||
                     (t.from == Stage::Bound && t.to == Stage::Performing) ||
                     (t.from == Stage::Performing && (t.to == Stage::Succeeded || t.to == Stage::Failed)) ||
                     (t.to == Stage::Error) || (t.from == Stage::Error && t.to == Stage::Waiting);
        auto it = current.find(t.quest);
        Stage before = it == current.end() ? Stage::Waiting : it->second;
        if (it != current.end() && (before == Stage::Succeeded || before == Stage::Failed)) before = Stage::Waiting;
        if (!legal || before != t.from)
            out.push_back(t.quest + ": " + std::to_string(stage_number(t.from)) + "->" +
                          std::to_string(stage_number(t.to)) + " (was " + std::to_string(stage_number(before)) + ")");
        current[t.quest] = t.to;
    }
    return out;
}

std::vector<std::string> result_before_scene_violations(const std::vector<Event>& events) {
    std::vector<std::string> out;
    std::string player;
    std::map<std::string, bool> player_target, resolved, scene_seen;
    for (const auto& e : events) {
        const auto& p = e.payload;
        switch (e.kind) {
            case EventKind::SessionCreated: player = p.at("player").get<std::string>(); break;
            case EventKind::ExchangeStarted: {
                auto q = p.at("quest").get<std::string>();
                player_target[q] = p.at("target").get<std::string>() == player;
                resolved[q] = false;
                scene_seen[q] = false;
                break;
            }
            case EventKind::ResultComputed:
                if (player_target[p.at("quest").get<std::string>()])
                    out.push_back("seq " + std::to_string(e.seq) + ": result computed for a player target");
                resolved[p.at("quest").get<std::string>()] = true;
                break;
            case EventKind::PlayerPrompt:
                if (!player_target[p.at("quest").get<std::string>()])
                    out.push_back("seq " + std::to_string(e.seq) + ": prompt for an NPC target");
                resolved[p.at("quest").get<std::string>()] = true;
                break;
            case EventKind::SceneGoTo:
            case EventKind::SceneLine: {
                auto q = p.at("quest").get<std::string>();
                if (!scene_seen[q] && !resolved[q])
                    out.push_back("seq " + std::to_string(e.seq) + ": scene of " + q + " before its result");
                scene_seen[q] = true;
                break;
            }
            default: break;
        }
    }
    return out;
}

std::vector<std::string> trigger_timing_violations(const std::vector<Event>& events) {
    std::vector<std::string> out;
    std::optional<std::string> open;
    for (const auto& e : events) {
        if (e.kind == EventKind::ExchangeStarted) open = e.payload.at("quest").get<std::string>();
        if ((e.kind == EventKind::ExchangeCompleted || e.kind == EventKind::Error) && open &&
            e.payload.contains("quest") && e.payload.at("quest") == *open)
            open.reset();
        if (e.kind == EventKind::TriggerFired && open)
            out.push_back("seq " + std::to_string(e.seq) + ": trigger fired inside quest " + *open);
    }
    return out;
}

std::vector<std::string> location_violations(const Session& session) {
    std::vector<std::string> out;
    std::set<std::string> here;
    for (const auto& c : session.scenario().characters)
        if (c.location == session.location()) here.insert(c.id);
    static const char* fields[] = {"initiator", "target", "subject", "who", "observer", "npc", "speaker"};
    for (const auto& e : session.log().events()) {
        for (const char* f : fields) {
            if (!e.payload.contains(f) || !e.payload.at(f).is_string()) continue;
            auto id = e.payload.at(f).get<std::string>();
            if (!here.count(id)) out.push_back("seq " + std::to_string(e.seq) + ": " + f + " " + id + " is elsewhere");
        }
    }
    return out;
}

std::vector<Outcome> golden_script() {
    std::vector<Outcome> out;
    std::istringstream in(read_file(source_path(std::string("scenarios/") + kGolden + ".script")));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(*outcome_from_string(line));
    }
    return out;
}

std::unique_ptr<Session> run_golden() {
    auto session = std::make_unique<Session>(load_scenario(kGolden), kGoldenSeed);
    auto script = golden_script();
    std::size_t next = 0;
    for (int t = 0; t < kGoldenTicks; ++t) {
        session->tick();
        while (session->awaiting_player()) session->player_respond(session->active_quest()->id, script.at(next++));
    }
    return session;
}

}  // namespace socialsim::testing
