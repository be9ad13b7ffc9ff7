// fttsim: run wireless control-loop scenarios under fixed (TT) or adaptive
// (FTT) sampling and export traces.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fttsim/errors.hpp"
#include "fttsim/metrics.hpp"
#include "fttsim/scenario.hpp"
#include "fttsim/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct RunOptions {
    std::string scenario = "reconfig";
    std::string scheme = "both";
    std::uint64_t seed = 1;
    std::optional<unsigned> sweep;
    std::optional<double> duration;
    std::string out = "out";
    bool quiet = false;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fttsim::ScenarioSpec resolve_scenario(const std::string& name_or_path) {
    const auto& names = fttsim::builtin_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
        return fttsim::builtin_scenario(name_or_path);
    }
    if (std::filesystem::exists(name_or_path)) return fttsim::load_scenario(name_or_path);
    // Neither a built-in nor a file: report the built-in names.
    return fttsim::builtin_scenario(name_or_path);
}

struct Job {
    fttsim::Scheme scheme;
    std::uint64_t seed;
    std::string prefix;
};

struct Outcome {
    Job job;
    fttsim::Summary summary;
};

void print_run(const Outcome& o) {
    std::printf("\n%s  scheme=%s  seed=%llu  busy=%.3f  -> %s-*\n", o.summary.scenario.c_str(),
                o.summary.scheme.c_str(), static_cast<unsigned long long>(o.summary.seed),
                o.summary.channel.busy_fraction, o.job.prefix.c_str());
    std::printf("  %-6s %12s %10s %10s %9s %9s\n", "loop", "IAE", "mean_DMR", "max|y|", "h_max_ms", "diverged");
    for (const auto& l : o.summary.loops) {
        std::printf("  %-6d %12.5f %10.4f %10.4g %9.3f %9s\n", l.loop_id, l.iae, l.mean_dmr, l.max_abs_y,
                    l.h_max_seen * 1e3, l.diverged ? "yes" : "no");
    }
}

void print_comparison(const std::vector<Outcome>& outcomes) {
    std::map<std::uint64_t, std::map<std::string, const fttsim::Summary*>> by_seed;
    for (const auto& o : outcomes) by_seed[o.job.seed][o.summary.scheme] = &o.summary;
    std::printf("\nTT vs FTT (total IAE over all loops)\n");
    std::printf("  %-6s %12s %12s %10s\n", "seed", "IAE_tt", "IAE_ftt", "ratio");
    for (const auto& [seed, runs] : by_seed) {
        if (!runs.contains("tt") || !runs.contains("ftt")) continue;
        auto total = [](const fttsim::Summary* s) {
            double t = 0.0;
            for (const auto& l : s->loops) t += l.iae;
            return t;
        };
        const double tt = total(runs.at("tt"));
        const double ftt = total(runs.at("ftt"));
        std::printf("  %-6llu %12.5f %12.5f %10.4f\n", static_cast<unsigned long long>(seed), tt, ftt,
                    tt > 0.0 ? ftt / tt : 0.0);
    }
}

void print_aggregate(const std::vector<Outcome>& outcomes) {
    struct Acc {
        double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
        double dmr = 0.0;
        int n = 0, diverged = 0;
    };
    std::map<std::pair<std::string, int>, Acc> acc;
    for (const auto& o : outcomes) {
        for (const auto& l : o.summary.loops) {
            Acc& a = acc[{o.summary.scheme, l.loop_id}];
            a.sum += l.iae;
            a.lo = std::min(a.lo, l.iae);
            a.hi = std::max(a.hi, l.iae);
            a.dmr += l.mean_dmr;
            a.n += 1;
            a.diverged += l.diverged ? 1 : 0;
        }
    }
    std::printf("\nSweep aggregate\n");
    std::printf("  %-6s %-6s %12s %12s %12s %10s %9s\n", "scheme", "loop", "IAE_mean", "IAE_min", "IAE_max",
                "DMR_mean", "diverged");
    for (const auto& [key, a] : acc) {
        std::printf("  %-6s %-6d %12.5f %12.5f %12.5f %10.4f %6d/%-2d\n", key.first.c_str(), key.second,
                    a.sum / a.n, a.lo, a.hi, a.dmr / a.n, a.diverged, a.n);
    }
}

int run_command(const RunOptions& opts) {
    fttsim::ScenarioSpec spec = resolve_scenario(opts.scenario);
    if (opts.duration) {
        spec.duration = *opts.duration;
        spec.validate();
    }

    std::vector<fttsim::Scheme> schemes;
    if (opts.scheme == "both") {
        schemes = {fttsim::Scheme::TT, fttsim::Scheme::FTT};
    } else {
        schemes = {fttsim::parse_scheme(opts.scheme)};
    }

    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    if (ec || !std::filesystem::is_directory(opts.out)) {
        throw IoError("cannot create output directory '" + opts.out + "'");
    }

    const unsigned count = opts.sweep.value_or(1);
    std::vector<Job> jobs;
    for (unsigned k = 0; k < count; ++k) {
        for (fttsim::Scheme s : schemes) {
            const std::uint64_t seed = opts.seed + k;
            const std::string prefix = (std::filesystem::path(opts.out) /
                                        (std::string(fttsim::to_string(s)) + "-" + spec.name + "-seed" +
                                         std::to_string(seed)))
                                           .string();
            jobs.push_back(Job{s, seed, prefix});
        }
    }

    auto execute = [&spec](const Job& job) {
        fttsim::ScenarioSpec local = spec;
        local.seed = job.seed;
        local.output_prefix = job.prefix;
        fttsim::RunResult r = fttsim::simulate(local, job.scheme);
        try {
            fttsim::export_run(r.traces, r.summary, job.prefix);
        } catch (const std::runtime_error& e) {
            throw IoError(e.what());
        }
        return Outcome{job, r.summary};
    };

    std::vector<Outcome> outcomes;
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t first = 0; first < jobs.size(); first += width) {
        std::vector<std::future<Outcome>> batch;
        for (std::size_t i = first; i < std::min(jobs.size(), first + width); ++i) {
            batch.push_back(std::async(std::launch::async, execute, jobs[i]));
        }
        for (auto& f : batch) outcomes.push_back(f.get());
    }

    if (!opts.quiet) {
        for (const auto& o : outcomes) print_run(o);
    }
    if (schemes.size() == 2) print_comparison(outcomes);
    if (count > 1) print_aggregate(outcomes);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wireless control-loop simulator with flexible time-triggered sampling"};
    app.require_subcommand(1);

    RunOptions opts;
    auto* run = app.add_subcommand("run", "Run a scenario and export traces");
    run->add_option("--scenario", opts.scenario, "Built-in name or path to a JSON scenario")
        ->capture_default_str();
    run->add_option("--scheme", opts.scheme, "tt, ftt or both")
        ->check(CLI::IsMember({"tt", "ftt", "both", "TT", "FTT"}))
        ->capture_default_str();
    run->add_option("--seed", opts.seed, "Master seed (first seed of a sweep)")->capture_default_str();
    run->add_option("--sweep", opts.sweep, "Number of consecutive seeds to run")->check(CLI::PositiveNumber);
    run->add_option("--duration", opts.duration, "Override the scenario duration, seconds")
        ->check(CLI::PositiveNumber);
    run->add_option("--out", opts.out, "Output directory")->capture_default_str();
    run->add_flag("--quiet", opts.quiet, "Only print the comparison and sweep tables");

    std::string dump_name = "reconfig";
    auto* dump = app.add_subcommand("dump", "Print a scenario as JSON with every default filled in");
    dump->add_option("--scenario", dump_name, "Built-in name or path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*dump) {
            std::cout << fttsim::serialize_scenario(resolve_scenario(dump_name));
            return kExitOk;
        }
        return run_command(opts);
    } catch (const fttsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
}
