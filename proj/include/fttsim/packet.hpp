#pragma once

#include <cstdint>
#include <optional>

#include "fttsim/sim_time.hpp"

namespace fttsim {

using NodeId = std::uint32_t;

enum class PacketKind { Sample, Command, SuccessReport, Interference };

const char* to_string(PacketKind kind);

struct Packet {
    NodeId src = 0;
    NodeId dst = 0;
    int size_bytes = 32;
    PacketKind kind = PacketKind::Sample;
    double sample_value = 0.0;   // Sample only
    double command_value = 0.0;  // Command only
    double period = 0.0;         // sampling period in force at release, seconds
    SimTime deadline;            // release_time + period for Sample/Command
    SimTime release_time;
    std::optional<int> loop_id;
    // Generation of the owning loop's activation; packets from an earlier
    // activation are ignored by the receiving node.
    std::uint64_t epoch = 0;
};

}  // namespace fttsim
