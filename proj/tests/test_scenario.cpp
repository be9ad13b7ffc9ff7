#include <fstream>
#include <string>

#include "doctest.h"
#include "fttsim/errors.hpp"
#include "fttsim/scenario.hpp"
#include "support.hpp"

using namespace fttsim;

TEST_CASE("reconfiguration scenario") {
    const ScenarioSpec s = builtin_scenario("reconfig");
    CHECK(s.duration == 18.0);
    REQUIRE(s.loops.size() == 4);
    CHECK(s.interferers.empty());
    for (int k = 0; k < 2; ++k) CHECK(s.loops[k].activation_windows == std::vector<Window>{{0.0, 18.0}});
    for (int k = 2; k < 4; ++k) CHECK(s.loops[k].activation_windows == std::vector<Window>{{6.0, 12.0}});
    for (int k = 0; k < 4; ++k) {
        CHECK(s.loops[k].loop_id == k + 1);
        CHECK(s.loops[k].initial_h == 0.010);
        CHECK(s.loops[k].plant == TransferFunction{});
    }
    CHECK(s.channel == ChannelParams{});
}

TEST_CASE("interference scenarios") {
    const ScenarioSpec slight = builtin_scenario("interference-slight");
    const ScenarioSpec severe = builtin_scenario("interference-severe");
    for (const ScenarioSpec* s : {&slight, &severe}) {
        CHECK(s->loops.size() == 2);
        REQUIRE(s->interferers.size() == 2);
        for (const auto& i : s->interferers) CHECK(i.window == Window{6.0, 12.0});
    }
    CHECK(slight.interferers[0].period == 0.010);
    CHECK(severe.interferers[0].period == 0.008);
}

TEST_CASE("unknown built-in lists valid names") {
    try {
        builtin_scenario("nope");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const auto& n : builtin_names()) CHECK(msg.find(n) != std::string::npos);
    }
}

TEST_CASE("serialisation round-trips every built-in") {
    for (const auto& n : builtin_names()) {
        const ScenarioSpec s = builtin_scenario(n);
        CHECK(parse_scenario(serialize_scenario(s)) == s);
    }
}

TEST_CASE("round-trip preserves non-default values") {
    ScenarioSpec s = builtin_scenario("interference-severe");
    s.seed = 0xFFFFFFFFFFFFull;
    s.scheme = Scheme::TT;
    s.channel.queue_limit = 4;
    s.channel.loss_prob = 0.125;
    s.channel.mac_retries = 2;
    s.loops[0].plant = TransferFunction{{2.0, 1.0}, {1.0, 3.0, 2.5}};
    s.loops[0].controller.kd = 0.5;
    s.loops[0].sampler.lambda = 0.9;
    s.loops[1].activation_windows = {{0.5, 2.0}, {3.0, 4.0}};
    s.loops[1].compute_delay = 0.001;
    s.loops[1].report_over_medium = true;
    s.loops[1].reference.phase = 0.25;
    CHECK(parse_scenario(serialize_scenario(s)) == s);
}

TEST_CASE("minimal document fills defaults") {
    const ScenarioSpec s = parse_scenario(R"({"duration": 5, "loops": [{}, {"loop_id": 9}]})");
    CHECK(s.name == "custom");
    CHECK(s.scheme == Scheme::FTT);
    REQUIRE(s.loops.size() == 2);
    CHECK(s.loops[0].loop_id == 1);
    CHECK(s.loops[1].loop_id == 9);
    CHECK(s.loops[0].activation_windows == std::vector<Window>{{0.0, 5.0}});
    CHECK(s.loops[0].sampler == SamplerParams{});
    CHECK(s.loops[0].controller == PidGains{});
    CHECK_FALSE(s.channel.queue_limit.has_value());
}

TEST_CASE("validation errors name the field") {
    auto error_of = [](const char* text) {
        try {
            parse_scenario(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of(R"({"loops": [{"initial_h": 0.5}]})").find("loops[0].initial_h") != std::string::npos);
    CHECK(error_of(R"({"loops": [{"sampler": {"lambda": 2}}]})").find("lambda") != std::string::npos);
    CHECK(error_of(R"({"loops": [{"frobnicate": 1}]})").find("loops[0].frobnicate") != std::string::npos);
    CHECK(error_of(R"({"channel": {"loss_prob": -1}, "loops": [{}]})").find("loss_prob") != std::string::npos);
    CHECK(error_of(R"({"loops": []})").find("loops") != std::string::npos);
    CHECK(error_of(R"({"loops": [{}], "scheme": "rr"})").find("scheme") != std::string::npos);
    CHECK(error_of(R"({"loops": [{"loop_id": 1}, {"loop_id": 1}]})").find("duplicate") != std::string::npos);
    CHECK(error_of(R"({"loops": [{"activation_windows": [[2, 1]]}]})").find("activation_windows[0]") !=
          std::string::npos);
    CHECK(error_of(R"({"loops": [{"dt": 0.5}]})").find("loops[0].dt") != std::string::npos);
    CHECK(error_of(R"({"duration": "long", "loops": [{}]})").find("duration") != std::string::npos);
    CHECK(error_of(R"({"loops": [{}], "interferers": [{"period": 0.01}]})").find("window") != std::string::npos);
    CHECK(error_of("{not json").find("parse") != std::string::npos);
}

TEST_CASE("scheme names") {
    CHECK(parse_scheme("TT") == Scheme::TT);
    CHECK(parse_scheme("ftt") == Scheme::FTT);
    CHECK(std::string(to_string(Scheme::FTT)) == "ftt");
    CHECK_THROWS_AS(parse_scheme("edf"), ConfigError);
}

TEST_CASE("loading from disk") {
    testing_support::TempDir dir("scenario");
    const auto path = dir.path() / "s.json";
    {
        std::ofstream out(path);
        out << serialize_scenario(builtin_scenario("reconfig"));
    }
    CHECK(load_scenario(path) == builtin_scenario("reconfig"));
    CHECK_THROWS_WITH_AS(load_scenario(dir.path() / "missing.json"), doctest::Contains("missing.json"), ConfigError);
}
