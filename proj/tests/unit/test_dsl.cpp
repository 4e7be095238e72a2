#include <doctest.h>

#include <algorithm>
#include <random>

#include "socialsim/dsl.hpp"
#include "support.hpp"

using namespace socialsim;
namespace t = socialsim::testing;

namespace {

std::string shipped(const char* name) { return t::read_file(t::source_path(std::string("scenarios/") + name + ".social")); }

bool has_code(const dsl::ParseResult& r, std::string_view code) {
    return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const dsl::Diagnostic& d) { return d.code == code; });
}

std::string with(std::string text, const std::string& from, const std::string& to) {
    auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("dsl") {
    TEST_CASE("minimal document") {
        auto r = dsl::parse(shipped("minimal"));
        REQUIRE(r.ok());
        CHECK(r.doc->networks.size() == 1);
        CHECK(r.doc->characters.size() == 2);
        CHECK(r.doc->exchanges.size() == 1);
        CHECK(r.doc->player()->id == "Player");
    }

    TEST_CASE("shipped scenarios parse cleanly") {
        for (const char* name : {"sabjorn_ysolda", "open_sandbox", "minimal"}) {
            auto r = dsl::parse(shipped(name));
            CHECK_MESSAGE(r.ok(), name);
            CHECK_MESSAGE(r.diagnostics.empty(), name);
        }
        auto golden = dsl::parse(shipped("sabjorn_ysolda"));
        CHECK(golden.doc->exchanges.size() == 12);
        const auto& flirt = *golden.doc->find_exchange("Flirt");
        REQUIRE(flirt.initiator_rules.size() == 4);
        CHECK(flirt.initiator_rules[1].per_trait);
        CHECK(flirt.initiator_rules[3].when.children.at(0).kind == Condition::Kind::PartialVolition);
    }

    TEST_CASE("misspelled trait is reported at its line") {
        auto text = with(shipped("minimal"), "has_trait(initiator, friendly)", "has_trait(initiator, frendly)");
        auto r = dsl::parse(text);
        CHECK_FALSE(r.ok());
        REQUIRE(has_code(r, "undeclared-trait"));
        auto it = std::find_if(r.diagnostics.begin(), r.diagnostics.end(),
                               [](const auto& d) { return d.code == "undeclared-trait"; });
        int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(text.find("frendly")), '\n'));
        CHECK(it->line == line);
        CHECK(it->column >= 1);
    }

    TEST_CASE("validation rules") {
        auto overlap = dsl::parse(with(shipped("minimal"), "  traits friendly\n", "  traits friendly\n  likes friendly\n  dislikes friendly\n"));
        CHECK(has_code(overlap, "likes-dislikes-overlap"));
        auto scene = dsl::parse(with(shipped("minimal"), "  scene reject { perform \"Well met, {target}.\" respond \"Go away.\" }\n", ""));
        CHECK(has_code(scene, "missing-scene"));
        auto dead = dsl::parse(with(shipped("minimal"), "when has_trait(initiator, friendly)",
                                    "when has_trait(initiator, friendly) and not has_trait(initiator, friendly)"));
        CHECK(dead.ok());
        REQUIRE(has_code(dead, "unsatisfiable-condition"));
        CHECK(dead.diagnostics.front().severity == dsl::Severity::Warning);
    }

    TEST_CASE("every documented code has a fixture that triggers it") {
        for (auto code : dsl::kDiagnosticCodes) {
            auto text = t::read_file(t::source_path("tests/fixtures/diagnostics/" + std::string(code) + ".social"));
            auto r = dsl::parse(text);
            CHECK_MESSAGE(has_code(r, code), code);
            for (const auto& d : r.diagnostics) {
                CHECK(d.line >= 1);
                CHECK(d.column >= 1);
            }
            CHECK(dsl::parse(text).diagnostics == r.diagnostics);
        }
    }

    TEST_CASE("round trip on shipped scenarios") {
        for (const char* name : {"sabjorn_ysolda", "open_sandbox", "minimal"}) {
            auto first = dsl::parse(shipped(name));
            REQUIRE(first.ok());
            auto text = dsl::serialize(*first.doc);
            auto second = dsl::parse(text);
            REQUIRE_MESSAGE(second.ok(), text);
            CHECK(*second.doc == *first.doc);
            CHECK(dsl::serialize(*second.doc) == text);
            CHECK(dsl::serialize(*dsl::parse(shipped(name)).doc) == text);
        }
    }

    TEST_CASE("round trip on random scenarios") {
        for (std::uint64_t seed = 1; seed <= 300; ++seed) {
            auto first = dsl::parse(t::random_scenario_text(seed));
            REQUIRE(first.ok());
            auto second = dsl::parse(dsl::serialize(*first.doc));
            REQUIRE(second.ok());
            CHECK(*second.doc == *first.doc);
        }
    }

    TEST_CASE("rule order survives formatting") {
        auto text = shipped("sabjorn_ysolda");
        auto a = "  initiator rule liked weight 1 per trait when likes(initiator, @trait)\n";
        auto b = "  initiator rule disliked weight -2 per trait when dislikes(initiator, @trait)\n";
        auto swapped = with(text, std::string(a) + b, std::string(b) + a);
        auto doc = dsl::parse(swapped);
        REQUIRE(doc.ok());
        auto again = dsl::parse(dsl::serialize(*doc.doc));
        const auto& rules = again.doc->find_exchange("Flirt")->initiator_rules;
        CHECK(rules[1].id == "disliked");
        CHECK(rules[2].id == "liked");
        CHECK_FALSE(*again.doc == *dsl::parse(text).doc);
    }

    TEST_CASE("declarations are emitted sorted") {
        auto doc = dsl::parse("scenario s\ntrait b\ntrait a\nnetwork n range 0 1 default 0\nlocation l\n"
                              "character Z { player location l }\ncharacter A { location l }\n");
        REQUIRE(doc.ok());
        auto text = dsl::serialize(*doc.doc);
        CHECK(text.find("trait a") < text.find("trait b"));
        CHECK(text.find("character A") < text.find("character Z"));
    }

    TEST_CASE("parser is total on random bytes") {
        std::mt19937_64 rng(2024);
        for (int i = 0; i < 2000; ++i) {
            auto bytes = t::random_bytes(rng, 300);
            dsl::ParseResult r;
            CHECK_NOTHROW(r = dsl::parse(bytes));
            if (!r.ok()) CHECK_FALSE(r.diagnostics.empty());
        }
    }

    TEST_CASE("diagnostic formatting") {
        dsl::Diagnostic d{dsl::Severity::Error, 3, 7, "undeclared-trait", "undeclared trait 'x'"};
        CHECK(dsl::format_diagnostic("a.social", d) == "a.social:3:7 undeclared-trait undeclared trait 'x'");
    }
}
