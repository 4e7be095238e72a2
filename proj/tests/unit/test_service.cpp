#include <doctest.h>

#include <thread>

#include "service_harness.hpp"
#include "socialsim/projection.hpp"
#include "support.hpp"

using namespace socialsim;
namespace t = socialsim::testing;

namespace {

std::string golden_text() { return t::read_file(t::source_path("scenarios/sabjorn_ysolda.social")); }

std::string create(const t::ServiceHarness& h, std::uint64_t seed = 42) {
    auto r = h.post("/sessions", {{"scenario_text", golden_text()}, {"seed", seed}});
    REQUIRE(r.status == 201);
    return r.body["session_id"];
}

// Ticks until Sabjorn's compliment reaches the player.
void tick_to_prompt(const t::ServiceHarness& h, const std::string& id) {
    for (int i = 0; i < 10; ++i) {
        auto r = h.post("/sessions/" + id + "/tick", {{"count", 1}});
        REQUIRE(r.status == 200);
        if (r.body["awaiting_player"] == true) return;
    }
    FAIL("no prompt reached");
}

}  // namespace

TEST_SUITE("service") {
    TEST_CASE("create sessions") {
        t::ServiceHarness h;
        auto r = h.post("/sessions", {{"scenario_text", golden_text()}, {"seed", 42}});
        CHECK(r.status == 201);
        CHECK(r.body["session_id"] == "s1");
        CHECK(r.body["events"][0]["kind"] == "SessionCreated");
        CHECK(create(h) == "s2");

        auto bad = h.post("/sessions", {{"scenario_text", "scenario x\ntrait\n"}});
        CHECK(bad.status == 422);
        CHECK(bad.body["diagnostics"].size() >= 1);
        CHECK(bad.body["diagnostics"][0].contains("code"));

        CHECK(h.post("/sessions", {{"seed", 1}}).status == 400);
        auto c = h.client();
        CHECK(c.Post("/sessions", "not json", "application/json")->status == 400);
    }

    TEST_CASE("scenarios by id") {
        ServiceOptions o;
        o.scenario_dir = t::source_path("scenarios");
        t::ServiceHarness h(o);
        CHECK(h.post("/sessions", {{"scenario_id", "sabjorn_ysolda"}, {"seed", 1}}).status == 201);
        CHECK(h.post("/sessions", {{"scenario_id", "nope"}}).status == 404);
        CHECK(h.post("/sessions", {{"scenario_id", "../scenarios/minimal"}}).status == 404);
    }

    TEST_CASE("same seed, same first tick") {
        t::ServiceHarness h;
        auto a = create(h, 7), b = create(h, 7);
        auto ta = h.post("/sessions/" + a + "/tick", Json::object());
        auto tb = h.post("/sessions/" + b + "/tick", Json::object());
        CHECK(ta.status == 200);
        CHECK(ta.body["events"] == tb.body["events"]);
    }

    TEST_CASE("observable state with a pending prompt") {
        t::ServiceHarness h;
        auto id = create(h);
        tick_to_prompt(h, id);
        auto s = h.get("/sessions/" + id + "/state");
        CHECK(s.status == 200);
        CHECK(s.body["awaiting_player"] == true);
        CHECK(s.body["prompt"]["target"] == "Player");
        CHECK(find_private_keys(s.body).empty());
        CHECK(s.raw.find("\"value\"") == std::string::npos);
        CHECK(h.get("/sessions/s99/state").status == 404);
    }

    TEST_CASE("debug state is gated") {
        t::ServiceHarness plain;
        auto id = create(plain);
        CHECK(plain.get("/sessions/" + id + "/debug/state").status == 403);
        CHECK(plain.get("/sessions/s99/debug/state").status == 404);

        ServiceOptions o;
        o.debug = true;
        t::ServiceHarness debug(o);
        auto did = create(debug);
        auto r = debug.get("/sessions/" + did + "/debug/state");
        CHECK(r.status == 200);
        CHECK(r.raw.find("attraction") != std::string::npos);
        CHECK_FALSE(find_private_keys(r.body).empty());
    }

    TEST_CASE("commands delegate to the session") {
        t::ServiceHarness h;
        auto id = create(h);
        tick_to_prompt(h, id);
        CHECK(h.post("/sessions/" + id + "/tick", Json::object()).status == 409);
        auto state = h.get("/sessions/" + id + "/state");
        std::string quest = state.body["prompt"]["quest"];
        CHECK(h.post("/sessions/" + id + "/player/respond", {{"quest_id", "q77"}, {"choice", "reject"}}).status == 400);
        CHECK(h.post("/sessions/" + id + "/player/respond", {{"quest_id", quest}, {"choice", "maybe"}}).status == 400);
        auto r = h.post("/sessions/" + id + "/player/respond", {{"quest_id", quest}, {"choice", "reject"}});
        REQUIRE(r.status == 200);
        bool completed = false;
        for (const auto& e : r.body["events"])
            if (e["kind"] == "ExchangeCompleted") completed = e["outcome"] == "reject";
        CHECK(completed);
        CHECK(h.post("/sessions/" + id + "/player/respond", {{"quest_id", quest}, {"choice", "reject"}}).status == 409);

        auto far = h.post("/sessions/" + id + "/player/initiate", {{"exchange", "Flirt"}, {"target", "Hulda"}});
        CHECK(far.status == 400);
        CHECK(far.body["error"].get<std::string>().find("same area") != std::string::npos);
        auto pre = h.post("/sessions/" + id + "/player/initiate", {{"exchange", "Flirt"}, {"target", "Ysolda"}});
        CHECK(pre.status == 400);
        CHECK(pre.body["error"].get<std::string>().find("orientation_compatible") != std::string::npos);
        auto ok = h.post("/sessions/" + id + "/player/initiate", {{"exchange", "Compliment"}, {"target", "Ysolda"}});
        CHECK(ok.status == 200);
        CHECK(ok.body["position"] == 0);
    }

    TEST_CASE("event paging") {
        t::ServiceHarness h;
        auto id = create(h);
        h.post("/sessions/" + id + "/tick", {{"count", 3}});
        auto all = h.get("/sessions/" + id + "/events?since=0");
        REQUIRE(all.status == 200);
        CHECK(all.body["events"][0]["kind"] == "SessionCreated");
        auto last = all.body["last_seq"].get<std::uint64_t>();
        CHECK(h.get("/sessions/" + id + "/events?since=" + std::to_string(last)).body["events"].empty());
        Json joined = Json::array();
        for (std::uint64_t at = 0;;) {
            auto page = h.get("/sessions/" + id + "/events?since=" + std::to_string(at) + "&limit=7");
            if (page.body["events"].empty()) break;
            for (const auto& e : page.body["events"]) joined.push_back(e);
            at = page.body["events"].back()["seq"];
        }
        CHECK(joined == all.body["events"]);
        CHECK(h.get("/sessions/s42/events").status == 404);
        CHECK(h.get("/sessions/" + id + "/events?since=abc").status == 400);
    }

    TEST_CASE("event stream") {
        t::ServiceHarness h;
        auto id = create(h);
        h.post("/sessions/" + id + "/tick", {{"count", 1}});
        auto c = h.client();
        std::string received;
        auto r = c.Get("/sessions/" + id + "/events?since=0&stream=1", [&](const char* data, std::size_t n) {
            received.append(data, n);
            return received.find("id: 5\n") == std::string::npos;
        });
        CHECK(received.rfind("event: SessionCreated\nid: 1\ndata: {", 0) == 0);
        CHECK(received.find("id: 5\n") != std::string::npos);
    }

    TEST_CASE("CORS") {
        t::ServiceHarness h;
        auto c = h.client();
        auto r = c.Options("/sessions");
        REQUIRE(r);
        CHECK(r->status == 204);
        CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
        auto g = c.Get("/sessions/s1/state");
        CHECK(g->get_header_value("Access-Control-Allow-Origin") == "*");
    }

    TEST_CASE("sessions are independent under concurrent use") {
        t::ServiceHarness h;
        std::vector<std::string> ids;
        for (int i = 0; i < 4; ++i) ids.push_back(create(h, 42));
        std::vector<std::thread> workers;
        for (const auto& id : ids)
            workers.emplace_back([&h, id] {
                for (int i = 0; i < 3; ++i) h.post("/sessions/" + id + "/tick", {{"count", 1}});
            });
        for (auto& w : workers) w.join();
        auto first = h.get("/sessions/" + ids[0] + "/events").body["events"];
        for (const auto& id : ids) CHECK(h.get("/sessions/" + id + "/events").body["events"] == first);
    }
}
