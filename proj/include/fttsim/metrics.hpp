#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fttsim/medium.hpp"

namespace fttsim {

struct OutputRow {
    double t = 0.0;
    double r = 0.0;
    double y = 0.0;
    double u = 0.0;
};

struct PeriodRow {
    double t = 0.0;
    double h = 0.0;
};

struct DmrRow {
    double t = 0.0;
    double rho = 0.0;
    double rho_filtered = 0.0;
};

/// Time series captured for one loop.
class LoopTrace {
public:
    explicit LoopTrace(int loop_id = 0) : loop_id_(loop_id) {}

    /// Appends a row. A row at the same t as the previous one replaces it, so
    /// an actuation at a substep boundary leaves a single row carrying the new
    /// input. Throws std::logic_error if t goes backwards.
    void record_output(double t, double r, double y, double u);
    void record_period(double t, double h);
    void record_dmr(double t, double rho, double rho_filtered);

    int loop_id() const { return loop_id_; }
    const std::vector<OutputRow>& samples() const { return samples_; }
    const std::vector<PeriodRow>& periods() const { return periods_; }
    const std::vector<DmrRow>& dmr() const { return dmr_; }

private:
    int loop_id_;
    std::vector<OutputRow> samples_;
    std::vector<PeriodRow> periods_;
    std::vector<DmrRow> dmr_;
};

/// Trapezoidal integral of |r - y| over the recorded support; 0 with fewer
/// than two rows.
double iae(std::span<const OutputRow> rows);

/// Same, restricted to [t0, t1). Segments straddling a bound are split with
/// linear interpolation of |r - y|.
double iae(std::span<const OutputRow> rows, double t0, double t1);

/// Mean of rho over DMR rows with t0 < t <= t1 (intervals that close inside
/// the window). NaN if no row qualifies.
double mean_dmr(std::span<const DmrRow> rows, double t0, double t1);

struct LoopSummary {
    int loop_id = 0;
    double iae = 0.0;
    double mean_dmr = 0.0;
    double max_abs_y = 0.0;
    bool diverged = false;
    double diverged_at = -1.0;  // seconds; negative when not diverged
    double h_min_seen = 0.0;
    double h_max_seen = 0.0;
    LinkStats link;
};

struct ChannelSummary {
    double busy_fraction = 0.0;
    LinkStats link;
};

struct Summary {
    std::string scenario;
    std::string scheme;
    std::uint64_t seed = 0;
    double duration = 0.0;
    std::vector<LoopSummary> loops;
    ChannelSummary channel;
};

std::string summary_json(const Summary& s);

/// Writes <prefix>-loop<k>-output.csv, -period.csv, -dmr.csv per loop and
/// <prefix>-summary.json. Parent directories are created. Throws
/// std::runtime_error naming the path on I/O failure.
void export_run(std::span<const LoopTrace> traces, const Summary& summary, const std::string& prefix);

}  // namespace fttsim
