#include <cmath>
#include <vector>

#include "doctest.h"
#include "fttsim/errors.hpp"
#include "fttsim/medium.hpp"

using namespace fttsim;

namespace {

struct Delivery {
    SimTime at;
    Packet packet;
};

/// Scheduler + medium with every node attached and deliveries collected.
struct Rig {
    explicit Rig(ChannelParams params, int nodes = 2, std::uint64_t seed = 1) : medium(params, scheduler) {
        for (int n = 0; n < nodes; ++n) {
            medium.attach(static_cast<NodeId>(n), RandomStream(seed, StreamRole::Sensor, static_cast<std::uint64_t>(n)));
        }
    }

    void run(SimTime until) {
        scheduler.run_until(until, [this](const Event& e) {
            if (e.kind == EventKind::PacketDelivery) {
                delivered.push_back({e.fire_at, *e.packet});
            } else if (e.kind == EventKind::SamplePeriodStart) {
                medium.submit(*e.packet);
            } else {
                medium.handle(e);
            }
        });
    }

    /// Submission at a future instant, routed through the event loop.
    void submit_at(SimTime t, const Packet& p) { scheduler.schedule(t, p.src, EventKind::SamplePeriodStart, 0, p); }

    Scheduler scheduler;
    Medium medium;
    std::vector<Delivery> delivered;
};

Packet frame(NodeId src, NodeId dst, int bytes = 32, std::optional<int> loop = std::nullopt) {
    Packet p;
    p.src = src;
    p.dst = dst;
    p.size_bytes = bytes;
    p.loop_id = loop;
    return p;
}

ChannelParams no_backoff() {
    ChannelParams c;
    c.min_be = 0;
    c.max_be = 0;
    return c;
}

}  // namespace

TEST_CASE("frame airtime follows size and bitrate") {
    ChannelParams c;
    CHECK(tx_duration(frame(0, 1, 32), c) == doctest::Approx(1.024e-3).epsilon(1e-15));
    CHECK(tx_duration(frame(0, 1, 64), c) == doctest::Approx(2.048e-3).epsilon(1e-15));
    const double base = tx_duration(frame(0, 1, 50), c);
    c.bitrate *= 2.0;
    CHECK(tx_duration(frame(0, 1, 50), c) == doctest::Approx(base / 2.0).epsilon(1e-15));
    c.mac_overhead_bytes = 6;
    CHECK(tx_duration(frame(0, 1, 32), c) == doctest::Approx(38 * 8.0 / 500000.0).epsilon(1e-15));
}

TEST_CASE("lone sender delivers after backoff plus airtime") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rig rig(ChannelParams{}, 2, seed);
        rig.medium.submit(frame(0, 1));
        rig.run(SimTime::from_seconds(0.1));
        REQUIRE(rig.delivered.size() == 1);
        const std::int64_t delay = rig.delivered[0].at.us();
        CHECK(delay >= 1024);
        CHECK(delay <= 1024 + 7 * 320);
        CHECK((delay - 1024) % 320 == 0);
        CHECK(rig.medium.totals().delivered == 1);
        CHECK(rig.medium.totals().conserved());
    }
}

TEST_CASE("frames that start in the same microsecond collide") {
    Rig rig(no_backoff(), 4);
    rig.medium.submit(frame(0, 2, 32, 1));
    rig.medium.submit(frame(1, 3, 32, 2));
    rig.run(SimTime::from_seconds(0.01));
    CHECK(rig.delivered.empty());
    CHECK(rig.medium.totals().losses.collision == 2);
    CHECK(rig.medium.loop_stats(1).losses.collision == 1);
    CHECK(rig.medium.loop_stats(2).losses.collision == 1);
    CHECK(rig.medium.totals().conserved());
}

TEST_CASE("carrier sense defers a frame until the channel clears") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rig rig(ChannelParams{}, 3, seed);
        rig.medium.submit(frame(0, 2, 100));  // 3.2 ms on air
        SimTime t = SimTime::zero();
        while (!rig.medium.busy_at(t)) {
            t = t + SimTime::from_us(100);
            rig.run(t);
        }
        rig.medium.submit(frame(1, 2, 32));
        rig.run(SimTime::from_seconds(0.1));
        CHECK(rig.medium.totals().losses.collision == 0);
        CHECK(rig.medium.totals().conserved());
        if (rig.delivered.size() == 2) {
            CHECK(rig.delivered[0].packet.src == 0);
            CHECK(rig.delivered[1].at - rig.delivered[0].at >= SimTime::from_us(1024));
        }
    }
}

TEST_CASE("busy channel past the backoff budget is an access failure") {
    Rig rig(no_backoff(), 3);
    rig.medium.submit(frame(0, 2, 1000));  // 32 ms on air
    rig.submit_at(SimTime::from_seconds(0.001), frame(1, 2, 32, 7));
    rig.run(SimTime::from_seconds(0.1));
    CHECK(rig.delivered.size() == 1);
    CHECK(rig.delivered[0].packet.src == 0);
    CHECK(rig.medium.totals().losses.access_failure == 1);
    CHECK(rig.medium.loop_stats(7).losses.access_failure == 1);
    CHECK(rig.medium.totals().conserved());
}

TEST_CASE("certain loss delivers nothing and counts every frame") {
    ChannelParams c;
    c.loss_prob = 1.0;
    Rig rig(c, 2);
    for (int k = 0; k < 20; ++k) rig.submit_at(SimTime::from_seconds(0.01 * k), frame(0, 1));
    rig.run(SimTime::from_seconds(1.0));
    CHECK(rig.delivered.empty());
    CHECK(rig.medium.totals().offered == 20);
    CHECK(rig.medium.totals().losses.random_loss == 20);
}

TEST_CASE("retries resend a lost frame") {
    ChannelParams c;
    c.loss_prob = 1.0;
    c.mac_retries = 2;
    Rig rig(c, 2);
    rig.medium.submit(frame(0, 1));
    rig.run(SimTime::from_seconds(0.1));
    CHECK(rig.medium.totals().losses.random_loss == 1);
    CHECK(rig.medium.busy_time(SimTime::from_seconds(0.1)).us() == 3 * 1024);
}

TEST_CASE("queue limit drops arrivals beyond the bound") {
    ChannelParams c;
    c.queue_limit = 2;
    Rig rig(c, 2);
    for (int k = 0; k < 5; ++k) rig.medium.submit(frame(0, 1));
    CHECK(rig.medium.queue_length(0) == 2);
    rig.run(SimTime::from_seconds(0.1));
    CHECK(rig.delivered.size() == 2);
    CHECK(rig.medium.totals().losses.queue_overflow == 3);
    CHECK(rig.medium.totals().conserved());
}

TEST_CASE("FIFO order per node") {
    Rig rig(ChannelParams{}, 2);
    for (int k = 0; k < 5; ++k) {
        Packet p = frame(0, 1);
        p.sample_value = k;
        rig.medium.submit(p);
    }
    rig.run(SimTime::from_seconds(0.1));
    REQUIRE(rig.delivered.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(rig.delivered[k].packet.sample_value == k);
}

TEST_CASE("property: conservation and busy fraction under random traffic") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 40; ++trial) {
        ChannelParams c;
        c.loss_prob = std::uniform_real_distribution<double>(0.0, 0.3)(gen);
        c.mac_retries = static_cast<int>(gen() % 3);
        if (gen() % 2) c.queue_limit = 1 + gen() % 4;
        const int nodes = 2 + static_cast<int>(gen() % 6);
        Rig rig(c, nodes, gen());
        const int packets = 50 + static_cast<int>(gen() % 200);
        for (int k = 0; k < packets; ++k) {
            const auto src = static_cast<NodeId>(gen() % nodes);
            const auto t = SimTime::from_us(static_cast<std::int64_t>(gen() % 200000));
            rig.submit_at(t, frame(src, (src + 1) % nodes, 16 + static_cast<int>(gen() % 64), static_cast<int>(src % 3)));
        }
        for (int slice = 1; slice <= 10; ++slice) {
            const SimTime t = SimTime::from_us(30000 * slice);
            rig.run(t);
            const LinkStats& s = rig.medium.totals();
            REQUIRE(s.conserved());
            for (int loop = 0; loop < 3; ++loop) REQUIRE(rig.medium.loop_stats(loop).conserved());
            const SimTime busy = rig.medium.busy_time(t);
            REQUIRE(busy.us() >= 0);
            REQUIRE(busy <= t);
        }
        rig.run(SimTime::from_seconds(5.0));  // drain
        const LinkStats& s = rig.medium.totals();
        CHECK(s.offered == static_cast<std::uint64_t>(packets));
        CHECK(s.pending == 0);
        CHECK(s.delivered == rig.delivered.size());
    }
}

TEST_CASE("channel parameter validation names the field") {
    ChannelParams c;
    c.loss_prob = 1.5;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("loss_prob"), ConfigError);
    c = {};
    c.max_be = 2;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("max_be"), ConfigError);
    c = {};
    c.bitrate = 0.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("bitrate"), ConfigError);
}
