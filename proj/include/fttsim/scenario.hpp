#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fttsim/medium.hpp"
#include "fttsim/pid.hpp"
#include "fttsim/plant.hpp"
#include "fttsim/reference.hpp"
#include "fttsim/sampler.hpp"

namespace fttsim {

enum class Scheme { TT, FTT };

const char* to_string(Scheme s);
/// Accepts "tt"/"ftt" in any case. Throws ConfigError otherwise.
Scheme parse_scheme(std::string_view text);

/// Half-open interval [start, end) in seconds.
struct Window {
    double start = 0.0;
    double end = 0.0;

    bool contains(double t) const { return t >= start && t < end; }
    bool operator==(const Window&) const = default;
};

struct LoopSpec {
    int loop_id = 1;
    TransferFunction plant;
    double dt = 1e-4;
    double initial_h = 0.010;
    SamplerParams sampler;
    ReferenceSpec reference;
    PidGains controller;
    std::vector<Window> activation_windows;
    double compute_delay = 0.0;
    bool report_over_medium = false;

    bool operator==(const LoopSpec&) const = default;
};

struct InterfererSpec {
    double period = 0.010;
    int packet_bytes = 32;
    Window window;

    bool operator==(const InterfererSpec&) const = default;
};

/// Complete, self-contained description of one experiment.
struct ScenarioSpec {
    std::string name = "custom";
    double duration = 18.0;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::FTT;
    std::string output_prefix;
    double blowup_bound = 1e3;
    ChannelParams channel;
    std::vector<LoopSpec> loops;
    std::vector<InterfererSpec> interferers;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const ScenarioSpec&) const = default;
};

/// Parses a JSON scenario document, fills defaults and validates.
/// Loops without activation_windows are active over [0, duration).
ScenarioSpec parse_scenario(std::string_view json_text);

/// Reads and parses a scenario file. Throws ConfigError on I/O, parse or
/// validation failure.
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Serialises with every field explicit; parse_scenario inverts it.
std::string serialize_scenario(const ScenarioSpec& spec);

/// Canonical experiments: "reconfig", "interference-slight",
/// "interference-severe". Throws ConfigError listing valid names otherwise.
ScenarioSpec builtin_scenario(std::string_view name);
const std::vector<std::string>& builtin_names();

}  // namespace fttsim
