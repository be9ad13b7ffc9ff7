#include "fttsim/simulation.hpp"

#include <algorithm>
#include <limits>

namespace fttsim {

namespace {

constexpr std::uint64_t kActivate = 1;
constexpr std::uint64_t kDeactivate = 0;

bool is_mac_event(EventKind k) {
    return k == EventKind::TxAttempt || k == EventKind::BackoffExpired || k == EventKind::TxEnd;
}

}  // namespace

Simulation::Simulation(const ScenarioSpec& spec, Scheme scheme)
    : spec_(spec), scheme_(scheme), medium_((spec.validate(), spec.channel), scheduler_) {
    const SimTime end = SimTime::from_seconds(spec_.duration);
    const auto n = static_cast<NodeId>(spec_.loops.size());

    for (NodeId i = 0; i < n; ++i) {
        const LoopSpec& ls = spec_.loops[i];
        const LoopNodeIds ids{3 * i, 3 * i + 1, 3 * i + 2};
        const auto key = static_cast<std::uint64_t>(static_cast<std::int64_t>(ls.loop_id));
        medium_.attach(ids.sensor, RandomStream(spec_.seed, StreamRole::Sensor, key));
        medium_.attach(ids.controller, RandomStream(spec_.seed, StreamRole::Controller, key));
        medium_.attach(ids.actuator, RandomStream(spec_.seed, StreamRole::Actuator, key));
        loops_.push_back(std::make_unique<ControlLoop>(ls, scheme_, ids, scheduler_, medium_, spec_.blowup_bound));
        for (const Window& w : ls.activation_windows) {
            const SimTime on = SimTime::from_seconds(w.start);
            if (on >= end) continue;
            scheduler_.schedule(on, ids.sensor, EventKind::ScenarioChange, kActivate);
            const SimTime off = SimTime::from_seconds(w.end);
            if (off < end) scheduler_.schedule(off, ids.sensor, EventKind::ScenarioChange, kDeactivate);
        }
    }

    for (NodeId j = 0; j < static_cast<NodeId>(spec_.interferers.size()); ++j) {
        const InterfererSpec& is = spec_.interferers[j];
        const NodeId source = 3 * n + 2 * j;
        const NodeId sink = source + 1;
        medium_.attach(source, RandomStream(spec_.seed, StreamRole::Interferer, j));
        interferers_.push_back(std::make_unique<Interferer>(is, source, sink, scheduler_, medium_));
        const SimTime on = SimTime::from_seconds(is.window.start);
        if (on >= end) continue;
        scheduler_.schedule(on, source, EventKind::ScenarioChange, kActivate);
        const SimTime off = SimTime::from_seconds(is.window.end);
        if (off < end) scheduler_.schedule(off, source, EventKind::ScenarioChange, kDeactivate);
    }
}

void Simulation::dispatch(const Event& e) {
    if (is_mac_event(e.kind)) {
        medium_.handle(e);
        return;
    }
    const auto n = static_cast<NodeId>(loops_.size());
    if (e.target < 3 * n) {
        loops_[e.target / 3]->handle(e);
        return;
    }
    const NodeId j = (e.target - 3 * n) / 2;
    if (j < interferers_.size()) {
        interferers_[j]->handle(e);
        return;
    }
    throw std::logic_error("Simulation: event for unknown node " + std::to_string(e.target));
}

void Simulation::run_until(SimTime t) {
    scheduler_.run_until(t, [this](const Event& e) { dispatch(e); });
}

void Simulation::run() {
    if (finished_) return;
    const SimTime end = SimTime::from_seconds(spec_.duration);
    run_until(end);
    for (auto& loop : loops_) loop->finish(end);
    finished_ = true;
}

RunResult Simulation::result() const {
    RunResult out;
    out.scheme = scheme_;
    out.event_digest = scheduler_.digest();
    out.events_dispatched = scheduler_.dispatched();

    Summary& s = out.summary;
    s.scenario = spec_.name;
    s.scheme = to_string(scheme_);
    s.seed = spec_.seed;
    s.duration = spec_.duration;
    for (const auto& loop : loops_) {
        out.traces.push_back(loop->trace());
        LoopSummary ls;
        ls.loop_id = loop->loop_id();
        ls.iae = loop->iae();
        const auto& dmr = loop->trace().dmr();
        if (!dmr.empty()) {
            double sum = 0.0;
            for (const DmrRow& r : dmr) sum += r.rho;
            ls.mean_dmr = sum / static_cast<double>(dmr.size());
        }
        ls.max_abs_y = loop->max_abs_y();
        ls.diverged = loop->diverged();
        ls.diverged_at = loop->diverged_at().value_or(-1.0);
        const auto& periods = loop->trace().periods();
        if (!periods.empty()) {
            auto [lo, hi] = std::minmax_element(periods.begin(), periods.end(),
                                                [](const PeriodRow& a, const PeriodRow& b) { return a.h < b.h; });
            ls.h_min_seen = lo->h;
            ls.h_max_seen = hi->h;
        }
        ls.link = medium_.loop_stats(loop->loop_id());
        s.loops.push_back(ls);
    }
    const SimTime now = scheduler_.now();
    s.channel.link = medium_.totals();
    s.channel.busy_fraction =
        now.us() > 0 ? static_cast<double>(medium_.busy_time(now).us()) / static_cast<double>(now.us()) : 0.0;
    return out;
}

RunResult simulate(const ScenarioSpec& spec, Scheme scheme) {
    Simulation sim(spec, scheme);
    sim.run();
    return sim.result();
}

}  // namespace fttsim
