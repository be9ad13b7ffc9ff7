#include "fttsim/medium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fttsim/errors.hpp"

namespace fttsim {

void ChannelParams::validate() const {
    if (!(bitrate > 0.0) || !std::isfinite(bitrate)) throw ConfigError("channel.bitrate must be > 0");
    if (!(backoff_unit > 0.0) || !std::isfinite(backoff_unit)) {
        throw ConfigError("channel.backoff_unit must be > 0");
    }
    if (min_be < 0) throw ConfigError("channel.min_be must be >= 0");
    if (max_be < min_be) throw ConfigError("channel.max_be must be >= min_be");
    if (max_be > 20) throw ConfigError("channel.max_be must be <= 20");
    if (max_csma_backoffs < 0) throw ConfigError("channel.max_csma_backoffs must be >= 0");
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) throw ConfigError("channel.loss_prob must lie in [0, 1]");
    if (mac_overhead_bytes < 0) throw ConfigError("channel.mac_overhead_bytes must be >= 0");
    if (mac_retries < 0) throw ConfigError("channel.mac_retries must be >= 0");
    if (queue_limit && *queue_limit == 0) throw ConfigError("channel.queue_limit must be >= 1");
}

double tx_duration(const Packet& p, const ChannelParams& c) {
    return static_cast<double>(p.size_bytes + c.mac_overhead_bytes) * 8.0 / c.bitrate;
}

void LossCounters::add(LossCause cause) {
    switch (cause) {
        case LossCause::Collision: ++collision; break;
        case LossCause::AccessFailure: ++access_failure; break;
        case LossCause::RandomLoss: ++random_loss; break;
        case LossCause::QueueOverflow: ++queue_overflow; break;
    }
}

Medium::Medium(ChannelParams params, Scheduler& scheduler) : params_(params), scheduler_(scheduler) {
    params_.validate();
}

void Medium::attach(NodeId node, RandomStream stream) {
    if (macs_.contains(node)) throw std::logic_error("Medium: node " + std::to_string(node) + " attached twice");
    macs_.emplace(node, Mac(std::move(stream)));
}

Medium::Mac& Medium::mac(NodeId node) {
    auto it = macs_.find(node);
    if (it == macs_.end()) throw std::logic_error("Medium: node " + std::to_string(node) + " is not attached");
    return it->second;
}

void Medium::count(const Packet& p, void (*fn)(LinkStats&)) {
    fn(totals_);
    if (p.loop_id) fn(per_loop_[*p.loop_id]);
}

void Medium::count_loss(const Packet& p, LossCause cause) {
    totals_.losses.add(cause);
    if (p.loop_id) per_loop_[*p.loop_id].losses.add(cause);
}

LinkStats Medium::loop_stats(int loop_id) const {
    auto it = per_loop_.find(loop_id);
    return it == per_loop_.end() ? LinkStats{} : it->second;
}

std::size_t Medium::queue_length(NodeId node) const {
    auto it = macs_.find(node);
    return it == macs_.end() ? 0 : it->second.queue.size();
}

void Medium::submit(const Packet& p) {
    Mac& m = mac(p.src);
    count(p, [](LinkStats& s) { ++s.offered; });
    if (params_.queue_limit && m.queue.size() >= *params_.queue_limit) {
        count_loss(p, LossCause::QueueOverflow);
        return;
    }
    count(p, [](LinkStats& s) { ++s.pending; });
    m.queue.push_back(p);
    if (m.phase == Phase::Idle) {
        m.phase = Phase::AttemptScheduled;
        scheduler_.schedule(scheduler_.now(), p.src, EventKind::TxAttempt);
    }
}

void Medium::handle(const Event& e) {
    switch (e.kind) {
        case EventKind::TxAttempt: {
            Mac& m = mac(e.target);
            if (m.phase != Phase::AttemptScheduled || m.queue.empty()) {
                throw std::logic_error("Medium: stray TxAttempt");
            }
            m.retries_used = 0;
            start_csma(e.target, m);
            break;
        }
        case EventKind::BackoffExpired: on_backoff_expired(e.target); break;
        case EventKind::TxEnd: on_tx_end(e.target, e.tag); break;
        default: throw std::logic_error(std::string("Medium: unexpected event ") + to_string(e.kind));
    }
}

void Medium::start_csma(NodeId node, Mac& m) {
    m.nb = 0;
    m.be = params_.min_be;
    draw_backoff(node, m);
}

void Medium::draw_backoff(NodeId node, Mac& m) {
    m.phase = Phase::Backoff;
    const std::uint64_t slots = m.rng.uniform_int((std::uint64_t{1} << m.be) - 1);
    const SimTime unit = SimTime::from_seconds(params_.backoff_unit);
    scheduler_.schedule(scheduler_.now() + unit * static_cast<std::int64_t>(slots), node, EventKind::BackoffExpired);
}

bool Medium::busy_at(SimTime t) const {
    return std::any_of(active_.begin(), active_.end(),
                       [t](const Transmission& tx) { return tx.start < t && tx.end > t; });
}

void Medium::on_backoff_expired(NodeId node) {
    Mac& m = mac(node);
    const SimTime now = scheduler_.now();
    if (busy_at(now)) {
        ++m.nb;
        m.be = std::min(m.be + 1, params_.max_be);
        if (m.nb > params_.max_csma_backoffs) {
            count_loss(m.queue.front(), LossCause::AccessFailure);
            finish_head(node, m);
        } else {
            draw_backoff(node, m);
        }
        return;
    }

    const Packet& p = m.queue.front();
    Transmission tx;
    tx.id = next_tx_id_++;
    tx.sender = node;
    tx.start = now;
    tx.end = now + SimTime::from_seconds(tx_duration(p, params_));
    for (auto& other : active_) {
        if (other.end > now) {
            other.corrupted = true;
            tx.corrupted = true;
        }
    }
    if (tx.start >= busy_until_) {
        stretch_start_ = tx.start;
        busy_accum_ += tx.end - tx.start;
        busy_until_ = tx.end;
    } else if (tx.end > busy_until_) {
        busy_accum_ += tx.end - busy_until_;
        busy_until_ = tx.end;
    }
    active_.push_back(tx);
    m.phase = Phase::Transmitting;
    scheduler_.schedule(tx.end, node, EventKind::TxEnd, tx.id);
}

void Medium::on_tx_end(NodeId node, std::uint64_t tx_id) {
    auto it = std::find_if(active_.begin(), active_.end(), [tx_id](const Transmission& t) { return t.id == tx_id; });
    if (it == active_.end()) throw std::logic_error("Medium: TxEnd for unknown transmission");
    const bool corrupted = it->corrupted;
    active_.erase(it);

    Mac& m = mac(node);
    const Packet& p = m.queue.front();
    std::optional<LossCause> failure;
    if (corrupted) {
        failure = LossCause::Collision;
    } else if (m.rng.bernoulli(params_.loss_prob)) {
        failure = LossCause::RandomLoss;
    }

    if (failure) {
        if (m.retries_used < params_.mac_retries) {
            ++m.retries_used;
            start_csma(node, m);
            return;
        }
        count_loss(p, *failure);
    } else {
        count(p, [](LinkStats& s) { ++s.delivered; });
        scheduler_.schedule(scheduler_.now(), p.dst, EventKind::PacketDelivery, 0, p);
    }
    finish_head(node, m);
}

void Medium::finish_head(NodeId node, Mac& m) {
    count(m.queue.front(), [](LinkStats& s) { --s.pending; });
    m.queue.pop_front();
    if (m.queue.empty()) {
        m.phase = Phase::Idle;
    } else {
        m.phase = Phase::AttemptScheduled;
        scheduler_.schedule(scheduler_.now(), node, EventKind::TxAttempt);
    }
}

SimTime Medium::busy_time(SimTime until) const {
    SimTime busy = busy_accum_;
    if (busy_until_ > until) busy -= busy_until_ - std::max(until, stretch_start_);
    return busy;
}

}  // namespace fttsim
