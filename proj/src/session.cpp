#include "socialsim/session.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "socialsim/dsl.hpp"

namespace socialsim {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void put_subject(Json& j, const std::optional<CharacterId>& subject) {
    if (subject) j["subject"] = *subject;
}

Json entry_json(const QueueEntry& e) {
    Json j;
    j["exchange"] = e.exchange;
    j["initiator"] = e.initiator;
    j["target"] = e.target;
    put_subject(j, e.subject);
    return j;
}

}  // namespace

Json desire_to_json(const DesireEntry& d) {
    Json j;
    j["exchange"] = d.exchange;
    j["target"] = d.target;
    put_subject(j, d.subject);
    j["volition"] = d.volition;
    return j;
}

Json breakdown_to_json(const VolitionBreakdown& b) {
    Json rules = Json::array();
    for (const auto& c : b.contributions) {
        Json r;
        r["rule"] = c.rule;
        r["fired"] = c.fired;
        r["amount"] = c.amount;
        if (c.times > 1) r["times"] = c.times;
        rules.push_back(std::move(r));
    }
    Json j;
    j["total"] = b.total;
    j["contributions"] = std::move(rules);
    return j;
}

Session::Session(std::shared_ptr<const ScenarioDoc> scenario, std::uint64_t seed)
    : state_(std::move(scenario)), seed_(seed), rng_(seed) {
    const CharacterDecl* p = state_.scenario().player();
    if (!p) throw SocialError("invalid-scenario", "scenario has no player character");
    player_ = p->id;
    location_ = p->location;

    Json created;
    created["scenario"] = state_.scenario().name;
    created["digest"] = hex64(fnv1a64(dsl::serialize(state_.scenario())));
    created["seed"] = seed_;
    created["player"] = player_;
    created["location"] = location_;
    Json cast = Json::array();
    for (const auto& id : present()) cast.push_back(id);
    created["present"] = std::move(cast);
    emit(EventKind::SessionCreated, std::move(created));

    auto updates = form_goals(state_, location_);
    if (!updates.empty()) {
        Json list = Json::array();
        for (const auto& u : updates)
            list.push_back({{"owner", u.owner}, {"other", u.other}, {"network", u.network}, {"goal", u.goal}});
        Json payload;
        payload["location"] = location_;
        payload["updates"] = std::move(list);
        emit(EventKind::GoalsFormed, std::move(payload));
    }
    state_.take_changes();
}

std::vector<CharacterId> Session::present() const { return characters_at(state_, location_); }

bool Session::is_present(std::string_view id) const {
    const CharacterDecl* c = state_.scenario().find_character(id);
    return c && c->location == location_;
}

std::vector<DesireEntry> Session::memory(std::string_view npc) const {
    auto it = memories_.find(npc);
    return it == memories_.end() ? std::vector<DesireEntry>{} : it->second;
}

const Event& Session::emit(EventKind kind, Json payload) { return log_.append(tick_, kind, std::move(payload)); }

void Session::emit_changes(Json context) {
    auto changes = state_.take_changes();
    if (changes.empty()) return;
    context["changes"] = changes_to_json(changes);
    emit(EventKind::StateDelta, std::move(context));
}

void Session::transition(QuestInstance& q, Stage to) {
    if (!legal_transition(q.stage, to))
        throw std::logic_error("illegal quest transition " + std::to_string(stage_number(q.stage)) + " -> " +
                               std::to_string(stage_number(to)));
    transitions_.push_back({q.id, q.stage, to});
    q.stage = to;
}

std::string Session::next_quest_id() {
    if (reusable_id_) {
        std::string id = std::move(*reusable_id_);
        reusable_id_.reset();
        return id;
    }
    return "q" + std::to_string(++quest_counter_);
}

void Session::invalidate_all() {
    for (auto& [npc, valid] : memory_valid_) valid = false;
}

void Session::check_entry(const QueueEntry& e) const {
    const ExchangeDef* ex = scenario().find_exchange(e.exchange);
    if (!ex) throw SocialError("unknown-exchange", "unknown exchange '" + e.exchange + "'");
    for (const auto* id : {&e.initiator, &e.target}) {
        if (!state_.has_character(*id)) throw SocialError("unknown-character", "unknown character '" + *id + "'");
        if (!is_present(*id))
            throw SocialError("not-co-located", "'" + *id + "' is not in the same area as the player (" + location_ + ")");
    }
    if (e.initiator == e.target) throw SocialError("self-target", "initiator and target are the same character");
    if (ex->has_subject != e.subject.has_value())
        throw SocialError("subject-mismatch", ex->has_subject ? "exchange '" + ex->id + "' needs a subject"
                                                              : "exchange '" + ex->id + "' takes no subject");
    if (e.subject) {
        if (!state_.has_character(*e.subject))
            throw SocialError("unknown-character", "unknown character '" + *e.subject + "'");
        if (!is_present(*e.subject))
            throw SocialError("not-co-located",
                              "'" + *e.subject + "' is not in the same area as the player (" + location_ + ")");
        if (*e.subject == e.initiator || *e.subject == e.target)
            throw SocialError("self-target", "subject must differ from initiator and target");
    }
}

Json Session::quest_header(const QuestInstance& q) const {
    Json j;
    j["quest"] = q.id;
    j["exchange"] = q.exchange;
    if (q.aliases) {
        j["initiator"] = q.aliases->initiator;
        j["target"] = q.aliases->target;
        put_subject(j, q.aliases->subject);
    }
    return j;
}

std::size_t Session::enqueue(const QueueEntry& entry) {
    check_entry(entry);
    auto it = std::find(queue_.begin(), queue_.end(), entry);
    if (it != queue_.end()) return static_cast<std::size_t>(it - queue_.begin());
    queue_.push_back(entry);
    Json payload;
    payload["position"] = queue_.size() - 1;
    Json fields = entry_json(entry);
    for (auto& [k, v] : fields.items()) payload[k] = v;
    payload["by"] = "npc";
    emit(EventKind::ExchangeQueued, std::move(payload));
    return queue_.size() - 1;
}

std::vector<Event> Session::tick() {
    if (awaiting_player()) throw SocialError("awaiting-player", "a player response is pending");
    std::size_t start = log_.size();
    ++tick_;

    auto expired = state_.expire_statuses();
    for (const auto& [who, s] : expired) {
        if (!is_present(who) || (s.target && !is_present(*s.target))) continue;
        Json payload;
        payload["who"] = who;
        payload["status"] = s.kind;
        if (s.target) payload["target"] = *s.target;
        emit(EventKind::StatusExpired, std::move(payload));
    }
    if (!expired.empty()) invalidate_all();

    if (!active_) {
        for (const auto& npc : present()) {
            if (npc == player_) continue;
            bool queued = std::any_of(queue_.begin(), queue_.end(),
                                      [&](const QueueEntry& e) { return e.initiator == npc; });
            if (queued) continue;
            auto& valid = memory_valid_[npc];
            if (!valid) {
                memories_[npc] = build_prospective_memory(state_, npc, location_);
                valid = true;
                Json entries = Json::array();
                for (const auto& d : memories_[npc]) entries.push_back(desire_to_json(d));
                emit(EventKind::DesireComputed, {{"npc", npc}, {"entries", std::move(entries)}});
            }
            if (auto choice = choose_action(memories_[npc]))
                enqueue({choice->exchange, npc, choice->target, choice->subject});
        }
        if (!queue_.empty()) {
            QueueEntry next = queue_.front();
            queue_.pop_front();
            start_quest(next);
        }
    }
    return log_.since(start);
}

void Session::start_quest(const QueueEntry& entry) {
    if (active_) throw SocialError("busy", "another quest is active");
    QuestInstance q;
    q.id = next_quest_id();
    q.exchange = entry.exchange;
    active_ = std::move(q);

    std::string problem;
    const ExchangeDef* ex = scenario().find_exchange(entry.exchange);
    try {
        check_entry(entry);
        Bindings roles{entry.initiator, entry.target, entry.subject};
        if (const Condition* fail = failing_precondition(state_, *ex, roles))
            problem = "precondition failed: " + dsl::format_condition(*fail);
    } catch (const SocialError& e) {
        problem = e.what();
    }
    if (!problem.empty()) {
        active_->aliases = Bindings{entry.initiator, entry.target, entry.subject};
        abort_quest(problem);
        return;
    }
    active_->aliases = Bindings{entry.initiator, entry.target, entry.subject};
    transition(*active_, Stage::Bound);
    Json started = quest_header(*active_);
    started["name"] = ex->name.empty() ? ex->id : ex->name;
    emit(EventKind::ExchangeStarted, std::move(started));
    advance();
}

void Session::advance() {
    QuestInstance& q = *active_;
    const ExchangeDef& ex = *scenario().find_exchange(q.exchange);
    transition(q, Stage::Performing);
    if (q.aliases->target == player_) {
        q.awaiting_player = true;
        Json prompt = quest_header(q);
        prompt["name"] = ex.name.empty() ? ex.id : ex.name;
        prompt["choices"] = Json::array({"accept", "neutral", "reject"});
        emit(EventKind::PlayerPrompt, std::move(prompt));
        return;
    }
    try {
        std::uint64_t before = rng_.draws();
        Response r = responder_response(state_, ex, *q.aliases, &rng_);
        q.result = r.outcome;
        Json result;
        result["quest"] = q.id;
        result["outcome"] = std::string(to_string(r.outcome));
        Json breakdown = breakdown_to_json(r.breakdown);
        for (auto& [k, v] : breakdown.items()) result[k] = v;
        result["draws"] = rng_.draws() - before;
        emit(EventKind::ResultComputed, std::move(result));
    } catch (const SocialError& e) {
        abort_quest(e.what());
        return;
    }
    finish(*q.result);
}

void Session::finish(Outcome outcome) {
    QuestInstance& q = *active_;
    const ExchangeDef& ex = *scenario().find_exchange(q.exchange);
    const Bindings roles = *q.aliases;
    const SceneTemplate* scene = ex.scene_for(outcome);
    if (!scene) {
        abort_quest("missing scene for outcome '" + std::string(to_string(outcome)) + "'");
        return;
    }
    emit(EventKind::SceneGoTo, {{"quest", q.id}, {"initiator", roles.initiator}, {"target", roles.target}});
    emit(EventKind::SceneLine, {{"quest", q.id},
                                {"phase", "performance"},
                                {"speaker", roles.initiator},
                                {"line", instantiate_line(scene->performance, state_, roles)}});
    emit(EventKind::SceneLine, {{"quest", q.id},
                                {"phase", "response"},
                                {"speaker", roles.target},
                                {"line", instantiate_line(scene->response, state_, roles)}});

    const std::vector<Effect>* effects = ex.effects_for(outcome);
    if (!effects) {
        abort_quest("missing effects for outcome '" + std::string(to_string(outcome)) + "'");
        return;
    }
    if (auto why = check_effects(*effects, state_, roles)) {
        abort_quest(*why);
        return;
    }
    apply_effects(*effects, state_, roles);
    emit_changes({{"quest", q.id}, {"cause", "effects"}});

    transition(q, completion_stage(outcome));
    state_.append_history({tick_, 0, q.exchange, roles.initiator, roles.target, roles.subject, outcome});
    std::size_t index = state_.history().size() - 1;
    Json done = quest_header(q);
    done["outcome"] = std::string(to_string(outcome));
    done["stage"] = stage_number(q.stage);
    emit(EventKind::ExchangeCompleted, std::move(done));

    std::string quest_id = q.id;
    active_.reset();
    run_trigger_rules();
    notify(quest_id, index);
}

void Session::abort_quest(const std::string& reason) {
    QuestInstance& q = *active_;
    Stage from = q.stage;
    transition(q, Stage::Error);
    state_.take_changes();
    Json err = quest_header(q);
    err["stage"] = stage_number(from);
    err["reason"] = reason;
    emit(EventKind::Error, std::move(err));
    if (q.aliases)
        state_.append_history(
            {tick_, 0, q.exchange, q.aliases->initiator, q.aliases->target, q.aliases->subject, Outcome::Error});
    transition(q, Stage::Waiting);
    reusable_id_ = q.id;
    active_.reset();
    invalidate_all();
    run_trigger_rules();
}

void Session::abort_active(std::string_view reason) {
    if (active_) abort_quest(std::string(reason));
}

void Session::run_trigger_rules() {
    const auto& rules = scenario().triggers;
    if (rules.empty()) return;
    auto here = present();
    std::vector<Bindings> bindings;
    for (const auto& a : here)
        for (const auto& b : here)
            if (a != b) bindings.push_back({a, b, std::nullopt});
    std::set<std::pair<std::size_t, std::size_t>> fired;
    for (int pass = 1;; ++pass) {
        bool any = false;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            for (std::size_t b = 0; b < bindings.size(); ++b) {
                if (fired.count({r, b})) continue;
                const auto& rule = rules[r];
                bool holds = false;
                try {
                    holds = eval_condition(rule.when, state_, bindings[b]);
                } catch (const SocialError& e) {
                    fired.insert({r, b});
                    emit(EventKind::Error, {{"rule", rule.id}, {"reason", e.what()}});
                    continue;
                }
                if (!holds) continue;
                if (pass > kMaxTriggerPasses) {
                    emit(EventKind::Error, {{"rule", rule.id}, {"reason", "trigger_cascade_limit"}, {"passes", pass - 1}});
                    return;
                }
                fired.insert({r, b});
                any = true;
                if (auto why = check_effects(rule.effects, state_, bindings[b])) {
                    emit(EventKind::Error, {{"rule", rule.id}, {"reason", *why}});
                    continue;
                }
                apply_effects(rule.effects, state_, bindings[b]);
                emit(EventKind::TriggerFired,
                     {{"rule", rule.id}, {"initiator", bindings[b].initiator}, {"target", bindings[b].target}});
                emit_changes({{"rule", rule.id}, {"cause", "trigger"}});
            }
        }
        if (!any) break;
    }
    invalidate_all();
}

void Session::notify(const std::string& quest_id, std::size_t history_index) {
    const auto& record = state_.history().at(history_index);
    for (const auto& npc : present()) {
        if (npc == player_) continue;
        state_.add_known(npc, history_index);
        memory_valid_[npc] = false;
        emit(EventKind::Notified, {{"observer", npc},
                                   {"quest", quest_id},
                                   {"exchange", record.exchange},
                                   {"initiator", record.initiator},
                                   {"target", record.target},
                                   {"outcome", std::string(to_string(record.outcome))}});
    }
}

std::size_t Session::player_initiate(std::string_view exchange, std::string_view target,
                                     std::optional<std::string_view> subject) {
    if (awaiting_player()) throw SocialError("awaiting-player", "a player response is pending");
    QueueEntry entry{std::string(exchange), player_, std::string(target), std::nullopt};
    if (subject) entry.subject = std::string(*subject);
    check_entry(entry);
    const ExchangeDef& ex = *scenario().find_exchange(exchange);
    if (const Condition* fail = failing_precondition(state_, ex, {entry.initiator, entry.target, entry.subject}))
        throw SocialError("precondition-failed", "precondition failed: " + dsl::format_condition(*fail));

    Json choice;
    choice["action"] = "initiate";
    choice["exchange"] = entry.exchange;
    choice["target"] = entry.target;
    put_subject(choice, entry.subject);
    const Event& ev = emit(EventKind::PlayerChoice, std::move(choice));
    PlayerInput input;
    input.kind = PlayerInput::Kind::Initiate;
    input.seq = ev.seq;
    input.tick = ev.tick;
    input.exchange = entry.exchange;
    input.target = entry.target;
    input.subject = entry.subject;
    inputs_.push_back(std::move(input));

    queue_.erase(std::remove(queue_.begin(), queue_.end(), entry), queue_.end());
    queue_.push_front(entry);
    Json payload;
    payload["position"] = 0;
    Json fields = entry_json(entry);
    for (auto& [k, v] : fields.items()) payload[k] = v;
    payload["by"] = "player";
    emit(EventKind::ExchangeQueued, std::move(payload));
    return 0;
}

std::vector<Event> Session::player_respond(std::string_view quest_id, Outcome choice) {
    if (!awaiting_player()) throw SocialError("no-pending-prompt", "no player prompt is pending");
    if (quest_id != active_->id)
        throw SocialError("wrong-quest", "pending prompt belongs to quest '" + active_->id + "'");
    if (choice == Outcome::Error) throw SocialError("invalid-choice", "choice must be accept, neutral or reject");
    std::size_t start = log_.size();
    const Event& ev = emit(EventKind::PlayerChoice,
                           {{"action", "respond"}, {"quest", active_->id}, {"choice", std::string(to_string(choice))}});
    PlayerInput input;
    input.kind = PlayerInput::Kind::Respond;
    input.seq = ev.seq;
    input.tick = ev.tick;
    input.quest = active_->id;
    input.choice = choice;
    inputs_.push_back(std::move(input));

    active_->awaiting_player = false;
    active_->result = choice;
    finish(choice);
    return log_.since(start);
}

void Session::apply(const PlayerInput& input) {
    if (input.kind == PlayerInput::Kind::Initiate) {
        std::optional<std::string_view> subject;
        if (input.subject) subject = *input.subject;
        player_initiate(input.exchange, input.target, subject);
    } else {
        player_respond(input.quest, input.choice);
    }
}

std::unique_ptr<Session> rerun(std::shared_ptr<const ScenarioDoc> scenario, std::uint64_t seed,
                               const std::vector<PlayerInput>& inputs, std::int64_t last_tick) {
    auto s = std::make_unique<Session>(std::move(scenario), seed);
    std::size_t next = 0;
    while (true) {
        if (next < inputs.size() && inputs[next].seq == s->log().size() + 1 && inputs[next].tick == s->tick_count()) {
            try {
                s->apply(inputs[next]);
            } catch (const SocialError&) {
                break;
            }
            ++next;
            continue;
        }
        if (!s->awaiting_player() && s->tick_count() < last_tick) {
            s->tick();
            continue;
        }
        break;
    }
    return s;
}

ReplayResult replay(std::shared_ptr<const ScenarioDoc> scenario, std::uint64_t seed,
                    const std::vector<PlayerInput>& inputs, const std::vector<std::string>& original) {
    std::int64_t last_tick = 0;
    for (const auto& line : original) {
        try {
            last_tick = std::max(last_tick, parse_event_line(line).tick);
        } catch (const SocialError&) {
        }
    }
    auto s = rerun(std::move(scenario), seed, inputs, last_tick);
    ReplayResult result;
    result.lines = s->log().lines();
    std::size_t n = std::min(result.lines.size(), original.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (result.lines[i] != original[i]) {
            result.divergence = i + 1;
            return result;
        }
    }
    if (result.lines.size() != original.size()) result.divergence = n + 1;
    return result;
}

std::vector<PlayerInput> inputs_from_events(const std::vector<Event>& events) {
    std::vector<PlayerInput> out;
    for (const auto& e : events) {
        if (e.kind != EventKind::PlayerChoice) continue;
        const Json& p = e.payload;
        PlayerInput in;
        in.seq = e.seq;
        in.tick = e.tick;
        std::string action = p.value("action", "");
        if (action == "initiate") {
            in.kind = PlayerInput::Kind::Initiate;
            in.exchange = p.value("exchange", "");
            in.target = p.value("target", "");
            if (p.contains("subject")) in.subject = p.value("subject", "");
        } else if (action == "respond") {
            in.kind = PlayerInput::Kind::Respond;
            in.quest = p.value("quest", "");
            auto choice = outcome_from_string(p.value("choice", ""));
            if (!choice) throw SocialError("malformed-log", "PlayerChoice with unknown choice at seq " + std::to_string(e.seq));
            in.choice = *choice;
        } else {
            throw SocialError("malformed-log", "PlayerChoice with unknown action at seq " + std::to_string(e.seq));
        }
        out.push_back(std::move(in));
    }
    return out;
}

}  // namespace socialsim
