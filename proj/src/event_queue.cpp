#include "fttsim/event_queue.hpp"

#include <stdexcept>
#include <string>

namespace fttsim {

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::SamplePeriodStart: return "SamplePeriodStart";
        case EventKind::AdaptationTick: return "AdaptationTick";
        case EventKind::TxAttempt: return "TxAttempt";
        case EventKind::BackoffExpired: return "BackoffExpired";
        case EventKind::TxEnd: return "TxEnd";
        case EventKind::PacketDelivery: return "PacketDelivery";
        case EventKind::IntegrationStep: return "IntegrationStep";
        case EventKind::ScenarioChange: return "ScenarioChange";
    }
    return "?";
}

const char* to_string(PacketKind kind) {
    switch (kind) {
        case PacketKind::Sample: return "Sample";
        case PacketKind::Command: return "Command";
        case PacketKind::SuccessReport: return "SuccessReport";
        case PacketKind::Interference: return "Interference";
    }
    return "?";
}

Event EventQueue::pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
}

std::uint64_t Scheduler::schedule(SimTime fire_at, NodeId target, EventKind kind, std::uint64_t tag,
                                  std::optional<Packet> packet) {
    if (fire_at < now_) {
        throw std::logic_error("Scheduler: event " + std::string(to_string(kind)) + " scheduled at " +
                               fire_at.to_string() + " before current time " + now_.to_string());
    }
    Event e;
    e.fire_at = fire_at;
    e.seq = next_seq_++;
    e.target = target;
    e.kind = kind;
    e.tag = tag;
    e.packet = std::move(packet);
    queue_.push(std::move(e));
    return next_seq_ - 1;
}

namespace {

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
}

}  // namespace

void Scheduler::run_until(SimTime t_end, const Dispatcher& dispatch) {
    if (t_end < now_) {
        throw std::logic_error("Scheduler: run_until target " + t_end.to_string() + " is before now " +
                               now_.to_string());
    }
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event e = queue_.pop();
        now_ = e.fire_at;
        ++dispatched_;
        fnv_mix(digest_, static_cast<std::uint64_t>(e.fire_at.us()));
        fnv_mix(digest_, e.seq);
        fnv_mix(digest_, e.target);
        fnv_mix(digest_, static_cast<std::uint64_t>(e.kind));
        fnv_mix(digest_, e.tag);
        dispatch(e);
    }
    now_ = t_end;
}

}  // namespace fttsim
