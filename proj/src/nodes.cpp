#include "fttsim/nodes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fttsim/errors.hpp"
#include "fttsim/reference.hpp"

namespace fttsim {

namespace {

constexpr int kPacketBytes = 32;
constexpr std::uint64_t kActivate = 1;
constexpr std::uint64_t kDeactivate = 0;

}  // namespace

ControlLoop::ControlLoop(const LoopSpec& spec, Scheme scheme, LoopNodeIds ids, Scheduler& scheduler, Medium& medium,
                         double blowup_bound)
    : spec_(spec),
      ids_(ids),
      scheduler_(scheduler),
      medium_(medium),
      blowup_bound_(blowup_bound),
      plant_(spec.plant, spec.dt),
      trace_(spec.loop_id) {
    sensor_.scheme = scheme;
    sensor_.h = spec.initial_h;
    sensor_.sampler = SamplerState::initial(spec.initial_h);
}

void ControlLoop::handle(const Event& e) {
    if (e.target == ids_.sensor) {
        switch (e.kind) {
            case EventKind::ScenarioChange:
                if (e.tag == kActivate) {
                    activate(e.fire_at);
                } else {
                    deactivate(e.fire_at);
                }
                return;
            case EventKind::SamplePeriodStart: sensor_on_period(e.fire_at, e.tag); return;
            case EventKind::AdaptationTick: adaptation_tick(e.fire_at, e.tag); return;
            case EventKind::PacketDelivery:
                if (e.packet && e.packet->kind == PacketKind::SuccessReport) sensor_on_report(*e.packet, e.fire_at);
                return;
            default: break;
        }
    } else if (e.target == ids_.controller && e.kind == EventKind::PacketDelivery && e.packet) {
        if (e.packet->kind == PacketKind::Sample) {
            controller_on_sample(*e.packet, e.fire_at);
        } else if (e.packet->kind == PacketKind::Command && e.packet->src == ids_.controller) {
            // Self-addressed: computation delay elapsed.
            if (sensor_.active && e.packet->epoch == epoch_) release_command(*e.packet);
        }
        return;
    } else if (e.target == ids_.actuator && e.kind == EventKind::PacketDelivery && e.packet) {
        if (e.packet->kind == PacketKind::Command) actuator_on_command(*e.packet, e.fire_at);
        return;
    }
    throw std::logic_error(std::string("ControlLoop: unexpected ") + to_string(e.kind) + " for node " +
                           std::to_string(e.target));
}

void ControlLoop::activate(SimTime t) {
    if (sensor_.active) return;
    advance_plant(t);
    ++epoch_;
    sensor_.active = true;
    sensor_.periods_count = 0;
    sensor_.success_count = 0;
    sensor_.h = spec_.initial_h;
    sensor_.sampler = SamplerState::initial(spec_.initial_h);
    controller_.reset();

    segment_starts_.push_back(trace_.samples().size());
    if (!diverged()) {
        const double ts = t.seconds();
        trace_.record_output(ts, reference(ts, spec_.reference), plant_.output(), plant_.input());
    }
    scheduler_.schedule(t, ids_.sensor, EventKind::SamplePeriodStart, epoch_);
    scheduler_.schedule(t + SimTime::from_seconds(spec_.sampler.t_spa), ids_.sensor, EventKind::AdaptationTick,
                        epoch_);
}

void ControlLoop::deactivate(SimTime t) {
    if (!sensor_.active) return;
    advance_plant(t);
    sensor_.active = false;
}

void ControlLoop::sensor_on_period(SimTime t, std::uint64_t epoch) {
    if (!sensor_.active || epoch != epoch_) return;
    advance_plant(t);
    const SimTime period = SimTime::from_seconds(sensor_.h);

    Packet p;
    p.src = ids_.sensor;
    p.dst = ids_.controller;
    p.size_bytes = kPacketBytes;
    p.kind = PacketKind::Sample;
    p.sample_value = plant_.output();
    p.period = sensor_.h;
    p.release_time = t;
    p.deadline = t + period;
    p.loop_id = spec_.loop_id;
    p.epoch = epoch_;
    medium_.submit(p);

    ++sensor_.periods_count;
    trace_.record_period(t.seconds(), sensor_.h);
    scheduler_.schedule(t + period, ids_.sensor, EventKind::SamplePeriodStart, epoch_);
}

void ControlLoop::adaptation_tick(SimTime t, std::uint64_t epoch) {
    if (!sensor_.active || epoch != epoch_) return;
    const bool adaptive = sensor_.scheme == Scheme::FTT;
    const AdaptationOutcome out =
        run_invocation(sensor_.periods_count, sensor_.success_count, sensor_.sampler, spec_.sampler, adaptive);
    sensor_.h = sensor_.sampler.h;
    sensor_.periods_count = 0;
    sensor_.success_count = 0;
    trace_.record_dmr(t.seconds(), out.rho, out.rho_filtered);
    scheduler_.schedule(t + SimTime::from_seconds(spec_.sampler.t_spa), ids_.sensor, EventKind::AdaptationTick,
                        epoch_);
}

void ControlLoop::controller_on_sample(const Packet& p, SimTime t) {
    if (!sensor_.active || p.epoch != epoch_) return;
    const double r = reference(t.seconds(), spec_.reference);
    const double u = pid_step(r, p.sample_value, p.period, controller_, spec_.controller);

    Packet cmd;
    cmd.src = ids_.controller;
    cmd.dst = ids_.actuator;
    cmd.size_bytes = kPacketBytes;
    cmd.kind = PacketKind::Command;
    cmd.command_value = u;
    cmd.period = p.period;
    cmd.deadline = p.deadline;
    cmd.release_time = p.release_time;
    cmd.loop_id = spec_.loop_id;
    cmd.epoch = epoch_;
    if (spec_.compute_delay > 0.0) {
        scheduler_.schedule(t + SimTime::from_seconds(spec_.compute_delay), ids_.controller,
                            EventKind::PacketDelivery, 0, cmd);
    } else {
        release_command(cmd);
    }
}

void ControlLoop::release_command(const Packet& cmd) { medium_.submit(cmd); }

void ControlLoop::actuator_on_command(const Packet& p, SimTime t) {
    if (!sensor_.active || p.epoch != epoch_) return;
    advance_plant(t);
    plant_.set_input(p.command_value);
    actuator_.last_applied_u = p.command_value;
    ++actuator_.commands_applied;
    const double latency = (t - p.release_time).seconds();
    actuator_.max_latency = std::max(actuator_.max_latency, latency);
    actuator_.sum_latency += latency;
    if (!diverged()) {
        const double ts = t.seconds();
        trace_.record_output(ts, reference(ts, spec_.reference), plant_.output(), p.command_value);
    }

    if (t > p.deadline) {
        ++actuator_.late;
        return;
    }
    ++actuator_.on_time;
    Packet report;
    report.src = ids_.actuator;
    report.dst = ids_.sensor;
    report.size_bytes = kPacketBytes;
    report.kind = PacketKind::SuccessReport;
    report.period = p.period;
    report.deadline = p.deadline;
    report.release_time = p.release_time;
    report.loop_id = spec_.loop_id;
    report.epoch = epoch_;
    if (spec_.report_over_medium) {
        medium_.submit(report);
    } else {
        scheduler_.schedule(t, ids_.sensor, EventKind::PacketDelivery, 0, report);
    }
}

void ControlLoop::sensor_on_report(const Packet& p, SimTime) {
    if (!sensor_.active || p.epoch != epoch_) return;
    ++sensor_.success_count;
}

void ControlLoop::finish(SimTime t_end) { advance_plant(t_end); }

void ControlLoop::advance_plant(SimTime t) {
    if (t <= plant_time_) return;
    if (diverged()) {
        plant_time_ = t;
        return;
    }
    const double base = plant_time_.seconds();
    const double end = t.seconds();
    const double duration = (t - plant_time_).seconds();
    const bool recording = sensor_.active;
    auto observe = [&](double elapsed, double y) {
        if (diverged()) return;
        const double ts = elapsed >= duration ? end : base + elapsed;
        if (recording) {
            max_abs_y_ = std::max(max_abs_y_, std::abs(y));
            trace_.record_output(ts, reference(ts, spec_.reference), y, plant_.input());
        }
        if (!std::isfinite(y) || std::abs(y) > blowup_bound_) diverged_at_ = ts;
    };
    try {
        plant_.step(duration, observe);
    } catch (const DivergenceError&) {
        if (!diverged()) diverged_at_ = end;
    }
    plant_time_ = t;
}

double ControlLoop::iae(double t0, double t1) const {
    const auto& rows = trace_.samples();
    double total = 0.0;
    for (std::size_t k = 0; k < segment_starts_.size(); ++k) {
        const std::size_t first = segment_starts_[k];
        const std::size_t last = k + 1 < segment_starts_.size() ? segment_starts_[k + 1] : rows.size();
        if (last > first) total += fttsim::iae(std::span(rows).subspan(first, last - first), t0, t1);
    }
    return total;
}

double ControlLoop::iae() const {
    return iae(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

Interferer::Interferer(const InterfererSpec& spec, NodeId source, NodeId sink, Scheduler& scheduler, Medium& medium)
    : spec_(spec), source_(source), sink_(sink), scheduler_(scheduler), medium_(medium) {}

void Interferer::handle(const Event& e) {
    if (e.target == sink_) {
        if (e.kind == EventKind::PacketDelivery) ++received_;
        return;
    }
    switch (e.kind) {
        case EventKind::ScenarioChange:
            if (e.tag == kActivate) {
                start(e.fire_at);
            } else {
                stop(e.fire_at);
            }
            return;
        case EventKind::SamplePeriodStart: interferer_on_tick(e.fire_at, e.tag); return;
        default:
            throw std::logic_error(std::string("Interferer: unexpected ") + to_string(e.kind) + " for node " +
                                   std::to_string(e.target));
    }
}

void Interferer::start(SimTime t) {
    if (active_) return;
    active_ = true;
    ++epoch_;
    scheduler_.schedule(t, source_, EventKind::SamplePeriodStart, epoch_);
}

void Interferer::stop(SimTime) { active_ = false; }

void Interferer::interferer_on_tick(SimTime t, std::uint64_t epoch) {
    if (!active_ || epoch != epoch_ || !spec_.window.contains(t.seconds())) return;
    Packet p;
    p.src = source_;
    p.dst = sink_;
    p.size_bytes = spec_.packet_bytes;
    p.kind = PacketKind::Interference;
    p.release_time = t;
    medium_.submit(p);
    ++offered_;
    scheduler_.schedule(t + SimTime::from_seconds(spec_.period), source_, EventKind::SamplePeriodStart, epoch_);
}

}  // namespace fttsim
