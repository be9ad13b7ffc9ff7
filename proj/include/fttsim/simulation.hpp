#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fttsim/event_queue.hpp"
#include "fttsim/medium.hpp"
#include "fttsim/metrics.hpp"
#include "fttsim/nodes.hpp"
#include "fttsim/scenario.hpp"

namespace fttsim {

struct RunResult {
    Scheme scheme = Scheme::FTT;
    std::vector<LoopTrace> traces;
    Summary summary;
    std::uint64_t event_digest = 0;
    std::uint64_t events_dispatched = 0;
};

/// One run of a scenario under one sampling scheme. Owns every piece of
/// state; independent instances may run on different threads.
///
/// Node ids: loop i (spec order) uses 3i, 3i+1, 3i+2 for sensor, controller
/// and actuator; interferer j uses 3N+2j (source) and 3N+2j+1 (sink).
/// Random streams are keyed by (role, loop_id) or (role, j), not by node id.
class Simulation {
public:
    Simulation(const ScenarioSpec& spec, Scheme scheme);
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    void run_until(SimTime t);
    /// Runs to spec.duration and closes every trace.
    void run();

    RunResult result() const;

    const ScenarioSpec& spec() const { return spec_; }
    Scheme scheme() const { return scheme_; }
    Scheduler& scheduler() { return scheduler_; }
    const Medium& medium() const { return medium_; }
    const ControlLoop& loop(std::size_t index) const { return *loops_.at(index); }
    std::size_t loop_count() const { return loops_.size(); }
    const Interferer& interferer(std::size_t index) const { return *interferers_.at(index); }

private:
    void dispatch(const Event& e);

    ScenarioSpec spec_;
    Scheme scheme_;
    Scheduler scheduler_;
    Medium medium_;
    std::vector<std::unique_ptr<ControlLoop>> loops_;
    std::vector<std::unique_ptr<Interferer>> interferers_;
    bool finished_ = false;
};

/// Convenience: construct, run to completion, collect.
RunResult simulate(const ScenarioSpec& spec, Scheme scheme);

}  // namespace fttsim
