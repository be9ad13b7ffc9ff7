#include "fttsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace fttsim {

void LoopTrace::record_output(double t, double r, double y, double u) {
    if (!samples_.empty()) {
        OutputRow& last = samples_.back();
        if (t < last.t) throw std::logic_error("LoopTrace: output time went backwards");
        if (t == last.t) {
            last = OutputRow{t, r, y, u};
            return;
        }
    }
    samples_.push_back(OutputRow{t, r, y, u});
}

void LoopTrace::record_period(double t, double h) {
    if (!periods_.empty() && t <= periods_.back().t) throw std::logic_error("LoopTrace: period time not increasing");
    periods_.push_back(PeriodRow{t, h});
}

void LoopTrace::record_dmr(double t, double rho, double rho_filtered) {
    if (!dmr_.empty() && t <= dmr_.back().t) throw std::logic_error("LoopTrace: DMR time not increasing");
    dmr_.push_back(DmrRow{t, rho, rho_filtered});
}

double iae(std::span<const OutputRow> rows) {
    double total = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double a = std::abs(rows[i - 1].r - rows[i - 1].y);
        const double b = std::abs(rows[i].r - rows[i].y);
        total += 0.5 * (a + b) * (rows[i].t - rows[i - 1].t);
    }
    return total;
}

double iae(std::span<const OutputRow> rows, double t0, double t1) {
    double total = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double ta = rows[i - 1].t;
        const double tb = rows[i].t;
        const double lo = std::max(ta, t0);
        const double hi = std::min(tb, t1);
        if (!(hi > lo)) continue;
        const double ea = std::abs(rows[i - 1].r - rows[i - 1].y);
        const double eb = std::abs(rows[i].r - rows[i].y);
        auto at = [&](double t) { return ea + (eb - ea) * (t - ta) / (tb - ta); };
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    return total;
}

double mean_dmr(std::span<const DmrRow> rows, double t0, double t1) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const DmrRow& row : rows) {
        if (row.t > t0 && row.t <= t1) {
            sum += row.rho;
            ++n;
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

namespace {

nlohmann::json link_json(const LinkStats& s) {
    return {
        {"offered", s.offered},
        {"delivered", s.delivered},
        {"pending", s.pending},
        {"losses",
         {{"collision", s.losses.collision},
          {"access_failure", s.losses.access_failure},
          {"random_loss", s.losses.random_loss},
          {"queue_overflow", s.losses.queue_overflow}}},
    };
}

// %.9g keeps files compact while resolving microsecond timestamps over any
// practical run length; output is locale-independent.
void put(std::string& line, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    line += buf;
}

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const char* header) : path_(path), out_(path) {
        if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        out_ << header << '\n';
    }
    void row(std::initializer_list<double> values) {
        line_.clear();
        bool first = true;
        for (double v : values) {
            if (!first) line_ += ',';
            first = false;
            put(line_, v);
        }
        line_ += '\n';
        out_ << line_;
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::string line_;
};

}  // namespace

std::string summary_json(const Summary& s) {
    nlohmann::json loops = nlohmann::json::array();
    for (const LoopSummary& l : s.loops) {
        loops.push_back({
            {"loop_id", l.loop_id},
            {"iae", l.iae},
            {"mean_dmr", l.mean_dmr},
            {"max_abs_y", l.max_abs_y},
            {"diverged", l.diverged},
            {"diverged_at", l.diverged ? nlohmann::json(l.diverged_at) : nlohmann::json(nullptr)},
            {"h_min_seen", l.h_min_seen},
            {"h_max_seen", l.h_max_seen},
            {"link", link_json(l.link)},
        });
    }
    nlohmann::json doc = {
        {"scenario", s.scenario},
        {"scheme", s.scheme},
        {"seed", s.seed},
        {"duration", s.duration},
        {"loops", loops},
        {"channel", {{"busy_fraction", s.channel.busy_fraction}, {"link", link_json(s.channel.link)}}},
    };
    return doc.dump(2) + "\n";
}

void export_run(std::span<const LoopTrace> traces, const Summary& summary, const std::string& prefix) {
    const std::filesystem::path base(prefix);
    if (base.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(base.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory '" + base.parent_path().string() + "': " + ec.message());
    }
    for (const LoopTrace& trace : traces) {
        const std::string stem = prefix + "-loop" + std::to_string(trace.loop_id());
        CsvFile out(stem + "-output.csv", "t,r,y,u");
        for (const OutputRow& r : trace.samples()) out.row({r.t, r.r, r.y, r.u});
        out.close();
        CsvFile per(stem + "-period.csv", "t,h");
        for (const PeriodRow& r : trace.periods()) per.row({r.t, r.h});
        per.close();
        CsvFile dmr(stem + "-dmr.csv", "t,rho,rho_filtered");
        for (const DmrRow& r : trace.dmr()) dmr.row({r.t, r.rho, r.rho_filtered});
        dmr.close();
    }
    const std::string path = prefix + "-summary.json";
    std::ofstream js(path);
    if (!js) throw std::runtime_error("cannot open '" + path + "' for writing");
    js << summary_json(summary);
    js.close();
    if (!js) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace fttsim
