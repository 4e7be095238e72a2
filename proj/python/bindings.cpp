#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "socialsim/dsl.hpp"
#include "socialsim/projection.hpp"
#include "socialsim/session.hpp"

namespace py = pybind11;
using namespace socialsim;

namespace {

std::shared_ptr<const ScenarioDoc> load(const std::string& text) {
    auto parsed = dsl::parse(text);
    if (!parsed.ok()) {
        std::string msg;
        for (const auto& d : parsed.diagnostics) msg += dsl::format_diagnostic("<scenario>", d) + "\n";
        throw SocialError("invalid-scenario", msg);
    }
    return std::make_shared<const ScenarioDoc>(std::move(*parsed.doc));
}

std::string events_json(const std::vector<Event>& events) {
    Json out = Json::array();
    for (const auto& e : events) out.push_back(e.to_json());
    return out.dump();
}

Outcome choice(const std::string& s) {
    auto o = outcome_from_string(s);
    if (!o || *o == Outcome::Error) throw SocialError("invalid-choice", "unknown choice '" + s + "'");
    return *o;
}

}  // namespace

PYBIND11_MODULE(_socialsim, m) {
    static py::exception<SocialError> error(m, "SocialError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const SocialError& e) {
            py::object err = error;
            py::object inst = err(e.what());
            inst.attr("code") = e.code();
            PyErr_SetObject(error.ptr(), inst.ptr());
        }
    });

    m.def("parse", [](const std::string& text) {
        auto r = dsl::parse(text);
        Json diags = Json::array();
        for (const auto& d : r.diagnostics)
            diags.push_back({{"severity", d.severity == dsl::Severity::Error ? "error" : "warning"},
                             {"line", d.line},
                             {"column", d.column},
                             {"code", d.code},
                             {"message", d.message}});
        return Json{{"ok", r.ok()}, {"diagnostics", diags}}.dump();
    });

    m.def("format_scenario", [](const std::string& text) { return dsl::serialize(*load(text)); });

    m.def("diagnostic_codes", [] {
        std::vector<std::string> out;
        for (auto c : dsl::kDiagnosticCodes) out.emplace_back(c);
        return out;
    });

    m.def(
        "replay",
        [](const std::string& text, std::uint64_t seed, const std::string& log) -> std::optional<std::uint64_t> {
            auto lines = split_log_lines(log);
            std::vector<Event> events;
            for (const auto& l : lines) events.push_back(parse_event_line(l));
            return replay(load(text), seed, inputs_from_events(events), lines).divergence;
        },
        py::arg("scenario_text"), py::arg("seed"), py::arg("log"));

    py::class_<Session>(m, "Session")
        .def(py::init([](const std::string& text, std::uint64_t seed) { return std::make_unique<Session>(load(text), seed); }),
             py::arg("scenario_text"), py::arg("seed"))
        .def("tick", [](Session& s) { return events_json(s.tick()); })
        .def("player_initiate",
             [](Session& s, const std::string& exchange, const std::string& target, std::optional<std::string> subject) {
                 std::optional<std::string_view> sv;
                 if (subject) sv = *subject;
                 return s.player_initiate(exchange, target, sv);
             },
             py::arg("exchange"), py::arg("target"), py::arg("subject") = py::none())
        .def("player_respond",
             [](Session& s, const std::string& quest, const std::string& c) {
                 return events_json(s.player_respond(quest, choice(c)));
             },
             py::arg("quest"), py::arg("choice"))
        .def("log_text", [](const Session& s) { return s.log().text(); })
        .def("state", [](const Session& s) { return observable_projection(s).dump(); })
        .def("debug_state", [](const Session& s) { return debug_projection(s).dump(); })
        .def_property_readonly("awaiting_player", &Session::awaiting_player)
        .def_property_readonly("tick_count", &Session::tick_count)
        .def_property_readonly("seed", &Session::seed);
}
