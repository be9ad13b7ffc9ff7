#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "fttsim/packet.hpp"
#include "fttsim/sim_time.hpp"

namespace fttsim {

enum class EventKind {
    SamplePeriodStart,
    AdaptationTick,
    TxAttempt,
    BackoffExpired,
    TxEnd,
    PacketDelivery,
    IntegrationStep,
    ScenarioChange,
};

const char* to_string(EventKind kind);

struct Event {
    SimTime fire_at;
    std::uint64_t seq = 0;
    NodeId target = 0;
    EventKind kind = EventKind::SamplePeriodStart;
    // Handler-defined discriminator (activation epoch, transmission id, ...).
    std::uint64_t tag = 0;
    std::optional<Packet> packet;
};

/// Min-priority queue over (fire_at, seq).
class EventQueue {
public:
    void push(Event e) { heap_.push(std::move(e)); }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    const Event& top() const { return heap_.top(); }
    Event pop();

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

/// Simulated clock plus pending events. Single-threaded; a run owns one.
class Scheduler {
public:
    using Dispatcher = std::function<void(const Event&)>;

    SimTime now() const { return now_; }

    /// Enqueues an event and returns its sequence number. Scheduling before
    /// now() is a programming error and throws std::logic_error.
    std::uint64_t schedule(SimTime fire_at, NodeId target, EventKind kind, std::uint64_t tag = 0,
                           std::optional<Packet> packet = std::nullopt);

    /// Dispatches every event with fire_at <= t_end in (fire_at, seq) order,
    /// then leaves the clock at t_end.
    void run_until(SimTime t_end, const Dispatcher& dispatch);

    std::size_t pending() const { return queue_.size(); }
    std::uint64_t dispatched() const { return dispatched_; }

    /// FNV-1a digest of the dispatched (fire_at, seq, target, kind, tag)
    /// sequence; equal digests mean identical dispatch logs.
    std::uint64_t digest() const { return digest_; }

private:
    SimTime now_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
    std::uint64_t digest_ = 1469598103934665603ull;
    EventQueue queue_;
};

}  // namespace fttsim
