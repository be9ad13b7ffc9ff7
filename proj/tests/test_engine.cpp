#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fttsim/event_queue.hpp"

using namespace fttsim;

namespace {

SimTime ms(std::int64_t v) { return SimTime::from_us(v * 1000); }

}  // namespace

TEST_CASE("SimTime converts seconds to whole microseconds") {
    CHECK(SimTime::from_seconds(0.010).us() == 10000);
    CHECK(SimTime::from_seconds(1.024e-3).us() == 1024);
    CHECK(SimTime::from_seconds(2.0).seconds() == 2.0);
    CHECK(SimTime::from_seconds(0.0000004).us() == 0);
    CHECK_THROWS_AS(SimTime::from_seconds(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK((ms(3) - ms(1)) == ms(2));
    CHECK(ms(2) * 3 == ms(6));
}

TEST_CASE("events dispatch in time order, ties in scheduling order") {
    Scheduler s;
    s.schedule(ms(30), 1, EventKind::SamplePeriodStart, 30);
    s.schedule(ms(10), 2, EventKind::SamplePeriodStart, 10);
    s.schedule(ms(20), 3, EventKind::SamplePeriodStart, 200);
    s.schedule(ms(20), 4, EventKind::SamplePeriodStart, 201);
    s.schedule(ms(20), 5, EventKind::SamplePeriodStart, 202);

    std::vector<std::uint64_t> tags;
    std::vector<SimTime> clock;
    s.run_until(ms(100), [&](const Event& e) {
        tags.push_back(e.tag);
        clock.push_back(s.now());
    });
    CHECK(tags == std::vector<std::uint64_t>{10, 200, 201, 202, 30});
    CHECK(clock == std::vector<SimTime>{ms(10), ms(20), ms(20), ms(20), ms(30)});
    CHECK(s.now() == ms(100));
    CHECK(s.dispatched() == 5);
}

TEST_CASE("handlers may schedule at the current instant") {
    Scheduler s;
    s.schedule(ms(1), 0, EventKind::TxAttempt, 1);
    std::vector<std::uint64_t> tags;
    s.run_until(ms(5), [&](const Event& e) {
        tags.push_back(e.tag);
        if (e.tag < 3) s.schedule(s.now(), 0, EventKind::TxAttempt, e.tag + 1);
    });
    CHECK(tags == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("scheduling in the past is rejected") {
    Scheduler s;
    s.run_until(ms(5), [](const Event&) {});
    CHECK_THROWS_AS(s.schedule(ms(4), 0, EventKind::TxEnd), std::logic_error);
    CHECK_NOTHROW(s.schedule(ms(5), 0, EventKind::TxEnd));
    CHECK_THROWS_AS(s.run_until(ms(1), [](const Event&) {}), std::logic_error);
}

TEST_CASE("run_until on an empty queue just advances the clock") {
    Scheduler s;
    s.run_until(SimTime::from_seconds(10.0), [](const Event&) { FAIL("no events expected"); });
    CHECK(s.now() == SimTime::from_seconds(10.0));
    CHECK(s.dispatched() == 0);
}

TEST_CASE("run_until stops at the horizon and keeps later events") {
    Scheduler s;
    s.schedule(SimTime::from_seconds(1.0), 0, EventKind::AdaptationTick);
    s.schedule(SimTime::from_seconds(1.0), 0, EventKind::AdaptationTick);
    s.schedule(SimTime::from_seconds(2.0), 0, EventKind::AdaptationTick);
    int n = 0;
    s.run_until(SimTime::from_seconds(1.5), [&](const Event&) { ++n; });
    CHECK(n == 2);
    CHECK(s.now() == SimTime::from_seconds(1.5));
    CHECK(s.pending() == 1);
    s.run_until(SimTime::from_seconds(2.0), [&](const Event&) { ++n; });
    CHECK(n == 3);
}

TEST_CASE("dispatch digest tracks the event log") {
    auto run = [](std::uint64_t extra_tag) {
        Scheduler s;
        s.schedule(ms(1), 7, EventKind::PacketDelivery, 1);
        s.schedule(ms(2), 8, EventKind::PacketDelivery, extra_tag);
        s.run_until(ms(3), [](const Event&) {});
        return s.digest();
    };
    CHECK(run(5) == run(5));
    CHECK(run(5) != run(6));
}
