#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "fttsim/event_queue.hpp"
#include "fttsim/packet.hpp"
#include "fttsim/rng.hpp"
#include "fttsim/sim_time.hpp"

namespace fttsim {

/// Unslotted CSMA/CA channel parameters. Defaults follow common 802.15.4
/// values at 250 kbit/s.
struct ChannelParams {
    double bitrate = 250000.0;       // bits/s
    double backoff_unit = 0.00032;   // s
    int min_be = 3;
    int max_be = 5;
    int max_csma_backoffs = 4;
    double loss_prob = 0.0;
    int mac_overhead_bytes = 0;
    int mac_retries = 0;             // full CSMA re-attempts after a failed frame
    std::optional<std::size_t> queue_limit;  // per-node FIFO bound; unbounded if empty

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const ChannelParams&) const = default;
};

/// Airtime of one frame, in seconds: (size + overhead) * 8 / bitrate.
double tx_duration(const Packet& p, const ChannelParams& c);

enum class LossCause { Collision, AccessFailure, RandomLoss, QueueOverflow };

struct LossCounters {
    std::uint64_t collision = 0;
    std::uint64_t access_failure = 0;
    std::uint64_t random_loss = 0;
    std::uint64_t queue_overflow = 0;

    std::uint64_t total() const { return collision + access_failure + random_loss + queue_overflow; }
    void add(LossCause cause);
    bool operator==(const LossCounters&) const = default;
};

/// Packet accounting for one traffic class. At any time
/// offered == delivered + losses.total() + pending.
struct LinkStats {
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t pending = 0;  // queued or on the air
    LossCounters losses;

    bool conserved() const { return offered == delivered + losses.total() + pending; }
};

/// Single collision domain shared by every attached node.
///
/// Each node owns a FIFO transmit queue. The head packet runs unslotted
/// CSMA/CA: random backoff of 0..2^BE-1 units, instantaneous CCA at expiry,
/// BE growth on a busy channel and a channel-access failure once NB exceeds
/// max_csma_backoffs. A channel is busy at t when some frame started strictly
/// before t and ends strictly after t, so two frames starting in the same
/// microsecond both go on the air and collide. Any overlap corrupts every
/// frame involved. Surviving frames are dropped with probability loss_prob,
/// otherwise a PacketDelivery event reaches the destination at frame end.
///
/// The medium does not own an event loop. BackoffExpired, TxAttempt and
/// TxEnd events target the sending node and must be routed to handle().
class Medium {
public:
    Medium(ChannelParams params, Scheduler& scheduler);

    void attach(NodeId node, RandomStream stream);
    bool attached(NodeId node) const { return macs_.contains(node); }

    /// Queues p at its source node at scheduler.now(). The packet's src must
    /// be attached.
    void submit(const Packet& p);

    void handle(const Event& e);

    bool busy_at(SimTime t) const;

    const ChannelParams& params() const { return params_; }
    const LinkStats& totals() const { return totals_; }
    /// Statistics for packets tagged with loop_id; empty stats if none seen.
    LinkStats loop_stats(int loop_id) const;

    /// Union of on-air intervals, clipped to [0, until). Exact when until is
    /// not earlier than the most recent frame start.
    SimTime busy_time(SimTime until) const;

    std::size_t queue_length(NodeId node) const;

private:
    enum class Phase { Idle, AttemptScheduled, Backoff, Transmitting };

    struct Mac {
        explicit Mac(RandomStream s) : rng(std::move(s)) {}
        RandomStream rng;
        std::deque<Packet> queue;
        Phase phase = Phase::Idle;
        int nb = 0;
        int be = 0;
        int retries_used = 0;
    };

    struct Transmission {
        std::uint64_t id = 0;
        NodeId sender = 0;
        SimTime start;
        SimTime end;
        bool corrupted = false;
    };

    Mac& mac(NodeId node);
    void start_csma(NodeId node, Mac& m);
    void draw_backoff(NodeId node, Mac& m);
    void on_backoff_expired(NodeId node);
    void on_tx_end(NodeId node, std::uint64_t tx_id);
    void finish_head(NodeId node, Mac& m);
    void count(const Packet& p, void (*fn)(LinkStats&));
    void count_loss(const Packet& p, LossCause cause);

    ChannelParams params_;
    Scheduler& scheduler_;
    std::map<NodeId, Mac> macs_;
    std::vector<Transmission> active_;
    std::uint64_t next_tx_id_ = 0;

    SimTime busy_until_;
    SimTime stretch_start_;
    SimTime busy_accum_;

    LinkStats totals_;
    std::map<int, LinkStats> per_loop_;
};

}  // namespace fttsim
