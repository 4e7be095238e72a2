#include "socialsim/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "socialsim/dsl.hpp"
#include "socialsim/service.hpp"
#include "socialsim/session.hpp"

namespace socialsim {

namespace {

struct Palette {
    bool on = false;
    std::string wrap(std::string_view code, std::string_view text) const {
        if (!on) return std::string(text);
        return "\x1b[" + std::string(code) + "m" + std::string(text) + "\x1b[0m";
    }
};

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Loads and validates a scenario; prints diagnostics. Returns the exit code
// to use on failure through `code`.
std::shared_ptr<const ScenarioDoc> load_scenario(const std::string& path, std::ostream& out, std::ostream& err,
                                                 int& code) {
    auto text = read_file(path);
    if (!text) {
        err << path << ": cannot read file\n";
        code = kExitUsage;
        return nullptr;
    }
    auto result = dsl::parse(*text);
    for (const auto& d : result.diagnostics) out << dsl::format_diagnostic(path, d) << '\n';
    if (!result.ok()) {
        code = kExitFailure;
        return nullptr;
    }
    return std::make_shared<const ScenarioDoc>(std::move(*result.doc));
}

std::optional<Outcome> parse_choice(std::string_view s) {
    auto o = outcome_from_string(s);
    if (!o || *o == Outcome::Error) return std::nullopt;
    return o;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

// One choice per line; blank lines and `#` comments are ignored.
bool read_script(const std::string& path, std::vector<Outcome>& choices, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << path << ": cannot read file\n";
        return false;
    }
    std::istringstream in(*text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto choice = parse_choice(line);
        if (!choice) {
            err << path << ":" << number << ": expected accept, neutral or reject, found '" << line << "'\n";
            return false;
        }
        choices.push_back(*choice);
    }
    return true;
}

std::string name_of(const Session& s, const Json& id) {
    if (!id.is_string()) return "?";
    const CharacterDecl* c = s.scenario().find_character(id.get<std::string>());
    return c ? c->display_name() : id.get<std::string>();
}

void narrate(const Session& s, const Event& e, bool debug, const Palette& color, std::ostream& out) {
    const Json& p = e.payload;
    switch (e.kind) {
        case EventKind::ExchangeStarted:
            out << color.wrap("1", "[tick " + std::to_string(e.tick) + "] " + name_of(s, p["initiator"]) + " -> " +
                                       name_of(s, p["target"]) + ": " + p.value("name", ""))
                << '\n';
            break;
        case EventKind::ResultComputed:
            if (debug) {
                out << "  volition " << p.value("total", 0) << " (";
                bool first = true;
                for (const auto& c : p["contributions"]) {
                    if (!first) out << ", ";
                    first = false;
                    out << c.value("rule", "") << ' ' << std::showpos << c.value("amount", 0) << std::noshowpos;
                }
                out << ")\n";
            }
            break;
        case EventKind::PlayerPrompt:
            out << color.wrap("33", "  " + name_of(s, p["initiator"]) + " turns to you (" + p.value("quest", "") + ")")
                << '\n';
            break;
        case EventKind::SceneLine:
            out << "  " << color.wrap("36", name_of(s, p["speaker"])) << ": " << p.value("line", "") << '\n';
            break;
        case EventKind::ExchangeCompleted:
            out << "  => " << color.wrap("32", p.value("outcome", "")) << '\n';
            break;
        case EventKind::TriggerFired:
            out << "  * " << p.value("rule", "") << " (" << name_of(s, p["initiator"]) << ", "
                << name_of(s, p["target"]) << ")\n";
            break;
        case EventKind::StatusExpired:
            out << "[tick " << e.tick << "] " << name_of(s, p["who"]) << " is no longer " << p.value("status", "")
                << '\n';
            break;
        case EventKind::Error:
            out << color.wrap("31", "  error: " + p.value("reason", "")) << '\n';
            break;
        default: break;
    }
}

struct RunOptions {
    std::string scenario;
    std::uint64_t seed = 0;
    std::int64_t ticks = 10;
    std::string script;
    bool interactive = false;
    std::string out;
    bool debug = false;
};

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    int code = kExitOk;
    auto doc = load_scenario(path, out, err, code);
    return doc ? kExitOk : code;
}

int write_log(const Session& s, const RunOptions& o, std::ostream& out, std::ostream& err) {
    if (o.out.empty()) {
        out << s.log().text();
        return kExitOk;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        err << o.out << ": cannot write file\n";
        return kExitUsage;
    }
    file << s.log().text();
    return kExitOk;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err, std::istream& in, const Palette& color) {
    int code = kExitOk;
    auto doc = load_scenario(o.scenario, err, err, code);
    if (!doc) return code;
    std::vector<Outcome> script;
    if (!o.script.empty() && !read_script(o.script, script, err)) return kExitUsage;

    // The narrative shares stdout with the log unless the log goes to a file.
    bool narrate_on = !o.out.empty() || o.interactive;
    std::ostream& story = o.out.empty() ? err : out;
    Session s(doc, o.seed);
    std::size_t shown = 0;
    auto flush = [&] {
        const auto& events = s.log().events();
        for (; shown < events.size(); ++shown)
            if (narrate_on) narrate(s, events[shown], o.debug, color, story);
    };
    flush();
    std::size_t next_choice = 0;
    for (std::int64_t t = 0; t < o.ticks; ++t) {
        s.tick();
        flush();
        while (s.awaiting_player()) {
            std::optional<Outcome> choice;
            if (o.interactive) {
                std::string line;
                while (!choice) {
                    story << "  respond [accept/neutral/reject]: " << std::flush;
                    if (!std::getline(in, line)) break;
                    choice = parse_choice(trim(line));
                }
            } else if (next_choice < script.size()) {
                choice = script[next_choice++];
            }
            if (!choice) {
                std::uint64_t seq = 0;
                for (const auto& e : s.log().events())
                    if (e.kind == EventKind::PlayerPrompt) seq = e.seq;
                if (int w = write_log(s, o, out, err); w != kExitOk) return w;
                err << "player script exhausted at prompt seq " << seq << '\n';
                return kExitScriptEnd;
            }
            s.player_respond(s.active_quest()->id, *choice);
            flush();
        }
    }
    return write_log(s, o, out, err);
}

struct LoadedLog {
    std::vector<std::string> lines;
    std::vector<Event> events;
    std::uint64_t seed = 0;
    std::int64_t last_tick = 0;
};

std::optional<LoadedLog> load_log(const std::string& path, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << path << ": cannot read file\n";
        return std::nullopt;
    }
    LoadedLog log;
    try {
        log.lines = split_log_lines(*text);
        for (const auto& line : log.lines) {
            Event e = parse_event_line(line);
            if (e.seq != log.events.size() + 1)
                throw SocialError("malformed-log", "expected seq " + std::to_string(log.events.size() + 1) + ", found " +
                                                       std::to_string(e.seq));
            log.last_tick = std::max(log.last_tick, e.tick);
            log.events.push_back(std::move(e));
        }
        if (log.events.empty() || log.events.front().kind != EventKind::SessionCreated)
            throw SocialError("malformed-log", "log does not start with SessionCreated");
        const Json& created = log.events.front().payload;
        if (!created.contains("seed") || !created["seed"].is_number_unsigned())
            throw SocialError("malformed-log", "SessionCreated has no seed");
        log.seed = created["seed"].get<std::uint64_t>();
    } catch (const SocialError& e) {
        err << path << ": malformed log: " << e.what() << '\n';
        return std::nullopt;
    }
    return log;
}

int cmd_replay(const std::string& scenario, const std::string& log_path, std::ostream& out, std::ostream& err) {
    int code = kExitOk;
    auto doc = load_scenario(scenario, err, err, code);
    if (!doc) return kExitUsage;
    auto log = load_log(log_path, err);
    if (!log) return kExitUsage;
    std::vector<PlayerInput> inputs;
    try {
        inputs = inputs_from_events(log->events);
    } catch (const SocialError& e) {
        err << log_path << ": malformed log: " << e.what() << '\n';
        return kExitUsage;
    }
    auto result = replay(doc, log->seed, inputs, log->lines);
    if (!result.divergence) {
        out << "replay ok: " << log->lines.size() << " events identical\n";
        return kExitOk;
    }
    std::uint64_t seq = *result.divergence;
    out << "diverged at seq " << seq << '\n';
    auto show = [&](const char* label, const std::vector<std::string>& lines) {
        out << "  " << label << ": " << (seq <= lines.size() ? lines[seq - 1] : std::string("<end of log>")) << '\n';
    };
    show("recorded", log->lines);
    show("replayed", result.lines);
    return kExitFailure;
}

void inspect_usage(std::ostream& err) {
    err << "usage: socialsim inspect <scenario> <log> <query>\n"
           "queries:\n"
           "  network <network> <from> <to>\n"
           "  history <exchange>\n"
           "  volition <exchange> <initiator> <target> [subject]\n";
}

int cmd_inspect(const std::string& scenario, const std::string& log_path, const std::vector<std::string>& query,
                std::ostream& out, std::ostream& err) {
    const std::string verb = query.empty() ? "" : query[0];
    bool known = (verb == "network" && query.size() == 4) || (verb == "history" && query.size() == 2) ||
                 (verb == "volition" && (query.size() == 4 || query.size() == 5));
    if (!known) {
        inspect_usage(err);
        return kExitUsage;
    }
    int code = kExitOk;
    auto doc = load_scenario(scenario, err, err, code);
    if (!doc) return kExitUsage;
    auto log = load_log(log_path, err);
    if (!log) return kExitUsage;
    std::unique_ptr<Session> s;
    try {
        s = rerun(doc, log->seed, inputs_from_events(log->events), log->last_tick);
    } catch (const SocialError& e) {
        err << log_path << ": malformed log: " << e.what() << '\n';
        return kExitUsage;
    }
    if (s->log().lines() != log->lines) {
        err << log_path << ": log does not replay against " << scenario << '\n';
        return kExitFailure;
    }
    const SocialState& state = s->state();
    try {
        if (verb == "network") {
            const auto& net = query[1];
            const auto& from = query[2];
            const auto& to = query[3];
            out << net << ' ' << from << " -> " << to << ": value " << state.get(ScoreMap::Value, net, from, to)
                << " goal " << state.get(ScoreMap::Goal, net, from, to) << " belief "
                << state.get(ScoreMap::Belief, net, from, to) << '\n';
        } else if (verb == "history") {
            if (!doc->find_exchange(query[1])) throw SocialError("unknown-exchange", "unknown exchange '" + query[1] + "'");
            int n = 0;
            for (const auto& r : state.history()) {
                if (r.exchange != query[1]) continue;
                ++n;
                out << "tick " << r.tick << "  " << r.initiator << " -> " << r.target;
                if (r.subject) out << " about " << *r.subject;
                out << "  " << to_string(r.outcome) << '\n';
            }
            if (n == 0) out << "(no records)\n";
        } else {
            const ExchangeDef* ex = doc->find_exchange(query[1]);
            if (!ex) throw SocialError("unknown-exchange", "unknown exchange '" + query[1] + "'");
            Bindings roles{query[2], query[3], std::nullopt};
            if (query.size() == 5) roles.subject = query[4];
            for (const auto* id : {&roles.initiator, &roles.target})
                if (!state.has_character(*id)) throw SocialError("unknown-character", "unknown character '" + *id + "'");
            out << ex->id << ' ' << roles.initiator << " -> " << roles.target << '\n';
            if (const Condition* fail = failing_precondition(state, *ex, roles)) {
                out << "  unavailable: precondition failed: " << dsl::format_condition(*fail) << '\n';
                return kExitOk;
            }
            VolitionBreakdown b = eval_rule_set(ex->initiator_rules, state, roles);
            std::size_t width = 4;
            for (const auto& c : b.contributions) width = std::max(width, c.rule.size());
            for (const auto& c : b.contributions) {
                out << "  " << std::left << std::setw(static_cast<int>(width)) << c.rule << "  "
                    << (c.fired ? "fired" : "-    ") << "  " << std::showpos << c.amount << std::noshowpos;
                if (c.times > 1) out << " (x" << c.times << ')';
                out << '\n';
            }
            out << "  total " << b.total << '\n';
        }
    } catch (const SocialError& e) {
        err << "inspect: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_serve(const ServiceOptions& options, std::ostream& out, std::ostream& err) {
    Service service(options);
    int port = service.bind();
    if (port < 0) {
        err << "cannot listen on " << options.host << ':' << options.port << '\n';
        return kExitFailure;
    }
    out << "listening on http://" << options.host << ':' << port << (options.debug ? " (debug)" : "") << std::endl;
    service.run();
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    CLI::App app{"Social NPC simulation: validate scenarios, run and replay sessions, serve the sandbox."};
    app.name("socialsim");
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("file", validate_path, "Scenario file")->required();

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run a headless session and write its event log");
    run_cmd->add_option("file", run.scenario, "Scenario file")->required();
    run_cmd->add_option("--seed", run.seed, "Random seed");
    run_cmd->add_option("--ticks", run.ticks, "Number of ticks")->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--player-script", run.script, "File with one response per line");
    run_cmd->add_flag("--interactive", run.interactive, "Answer prompts from the terminal");
    run_cmd->add_option("--out", run.out, "Write the event log here instead of stdout");
    run_cmd->add_flag("--debug", run.debug, "Show volition breakdowns in the narrative");

    std::string replay_scenario, replay_log;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a log and compare it byte for byte");
    replay_cmd->add_option("file", replay_scenario, "Scenario file")->required();
    replay_cmd->add_option("log", replay_log, "Event log")->required();

    std::string inspect_scenario, inspect_log;
    std::vector<std::string> query;
    auto* inspect = app.add_subcommand("inspect", "Query the final state of a logged session");
    inspect->add_option("file", inspect_scenario, "Scenario file")->required();
    inspect->add_option("log", inspect_log, "Event log")->required();
    inspect->add_option("query", query, "network <net> <from> <to> | history <exchange> | volition <ex> <init> <target>")
        ->expected(-1);
    inspect->footer("queries: network <net> <from> <to>, history <exchange>, volition <exchange> <initiator> <target>");

    ServiceOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve sessions over HTTP");
    serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)");
    serve_cmd->add_option("--host", serve.host, "Interface to bind");
    serve_cmd->add_flag("--debug", serve.debug, "Enable the debug state endpoint");
    serve_cmd->add_option("--scenario-dir", serve.scenario_dir, "Directory of .social files for scenario_id");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("socialsim");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Palette color;
    color.on = &out == &std::cout && std::getenv("SOCIALSIM_NO_COLOR") == nullptr && isatty(STDOUT_FILENO);

    try {
        if (validate->parsed()) return cmd_validate(validate_path, out, err);
        if (run_cmd->parsed()) return cmd_run(run, out, err, in, color);
        if (replay_cmd->parsed()) return cmd_replay(replay_scenario, replay_log, out, err);
        if (inspect->parsed()) return cmd_inspect(inspect_scenario, inspect_log, query, out, err);
        if (serve_cmd->parsed()) return cmd_serve(serve, out, err);
    } catch (const SocialError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace socialsim
