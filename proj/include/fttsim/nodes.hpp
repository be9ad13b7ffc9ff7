#pragma once

#include <cstdint>
#include <optional>

#include "fttsim/event_queue.hpp"
#include "fttsim/medium.hpp"
#include "fttsim/metrics.hpp"
#include "fttsim/pid.hpp"
#include "fttsim/plant.hpp"
#include "fttsim/sampler.hpp"
#include "fttsim/scenario.hpp"

namespace fttsim {

struct LoopNodeIds {
    NodeId sensor = 0;
    NodeId controller = 0;
    NodeId actuator = 0;
};

struct SensorState {
    double h = 0.010;
    std::uint64_t periods_count = 0;
    std::uint64_t success_count = 0;
    bool active = false;
    SamplerState sampler;
    Scheme scheme = Scheme::FTT;
};

struct ActuatorState {
    double last_applied_u = 0.0;
    std::uint64_t commands_applied = 0;
    std::uint64_t on_time = 0;
    std::uint64_t late = 0;
    double max_latency = 0.0;  // arrival - sample release, seconds
    double sum_latency = 0.0;
};

/// Sensor, controller and actuator of one control loop together with the
/// plant they close the loop around.
///
/// The sensor is time triggered: it samples every h and, under FTT, adapts h
/// every t_spa from the success reports it received. Controller and actuator
/// are event triggered. The actuator applies every command it receives and
/// reports the on-time ones (arrival <= deadline) back to the sensor.
///
/// Each activation bumps an epoch. Events and packets carry the epoch they
/// were created under and are ignored once it is stale, so a deactivated
/// loop falls silent without cancelling queued events.
class ControlLoop {
public:
    ControlLoop(const LoopSpec& spec, Scheme scheme, LoopNodeIds ids, Scheduler& scheduler, Medium& medium,
                double blowup_bound);

    bool owns(NodeId node) const { return node == ids_.sensor || node == ids_.controller || node == ids_.actuator; }

    /// Routes a node event (not MAC events) addressed to one of this loop's nodes.
    void handle(const Event& e);

    void activate(SimTime t);
    void deactivate(SimTime t);

    void sensor_on_period(SimTime t, std::uint64_t epoch);
    void adaptation_tick(SimTime t, std::uint64_t epoch);
    void controller_on_sample(const Packet& p, SimTime t);
    void actuator_on_command(const Packet& p, SimTime t);
    void sensor_on_report(const Packet& p, SimTime t);

    /// Brings the plant (and the trace) up to t_end.
    void finish(SimTime t_end);

    int loop_id() const { return spec_.loop_id; }
    const LoopSpec& spec() const { return spec_; }
    const LoopNodeIds& ids() const { return ids_; }
    const SensorState& sensor() const { return sensor_; }
    const ControllerState& controller() const { return controller_; }
    const ActuatorState& actuator() const { return actuator_; }
    const LtiPlant& plant() const { return plant_; }
    const LoopTrace& trace() const { return trace_; }
    bool active() const { return sensor_.active; }
    bool diverged() const { return diverged_at_.has_value(); }
    std::optional<double> diverged_at() const { return diverged_at_; }
    double max_abs_y() const { return max_abs_y_; }

    /// IAE over [t0, t1) summed over activation segments only.
    double iae(double t0, double t1) const;
    double iae() const;

private:
    void advance_plant(SimTime t);
    void release_command(const Packet& cmd);

    LoopSpec spec_;
    LoopNodeIds ids_;
    Scheduler& scheduler_;
    Medium& medium_;
    double blowup_bound_;

    SensorState sensor_;
    ControllerState controller_;
    ActuatorState actuator_;
    LtiPlant plant_;
    SimTime plant_time_;
    std::uint64_t epoch_ = 0;

    LoopTrace trace_;
    std::vector<std::size_t> segment_starts_;
    std::optional<double> diverged_at_;
    double max_abs_y_ = 0.0;
};

/// Non-control node that offers one fixed-size packet per period to its sink
/// while its window is open.
class Interferer {
public:
    Interferer(const InterfererSpec& spec, NodeId source, NodeId sink, Scheduler& scheduler, Medium& medium);

    bool owns(NodeId node) const { return node == source_ || node == sink_; }
    void handle(const Event& e);

    void start(SimTime t);
    void stop(SimTime t);
    void interferer_on_tick(SimTime t, std::uint64_t epoch);

    std::uint64_t offered() const { return offered_; }
    std::uint64_t received() const { return received_; }
    NodeId source() const { return source_; }
    NodeId sink() const { return sink_; }

private:
    InterfererSpec spec_;
    NodeId source_;
    NodeId sink_;
    Scheduler& scheduler_;
    Medium& medium_;
    bool active_ = false;
    std::uint64_t epoch_ = 0;
    std::uint64_t offered_ = 0;
    std::uint64_t received_ = 0;
};

}  // namespace fttsim
