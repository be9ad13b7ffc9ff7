#include "fttsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fttsim/errors.hpp"
#include "json.hpp"

namespace fttsim {

using nlohmann::json;

const char* to_string(Scheme s) { return s == Scheme::TT ? "tt" : "ftt"; }

Scheme parse_scheme(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "tt") return Scheme::TT;
    if (lower == "ftt") return Scheme::FTT;
    throw ConfigError("scheme: expected 'tt' or 'ftt', got '" + std::string(text) + "'");
}

namespace {

void validate_window(const Window& w, const std::string& field) {
    if (!std::isfinite(w.start) || !std::isfinite(w.end)) throw ConfigError(field + ": bounds must be finite");
    if (w.start < 0.0) throw ConfigError(field + ": start must be >= 0");
    if (!(w.end > w.start)) throw ConfigError(field + ": end must exceed start");
}

// Wraps one JSON object, tracks consumed keys and reports the full field
// path in every error.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return fallback;
        try {
            return it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(field(key) + ": wrong type");
        }
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Window read_window(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(field + ": expected [start, end]");
    }
    return Window{j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> read_coeffs(const json* j, std::vector<double> fallback, const std::string& field) {
    if (!j) return fallback;
    if (!j->is_array()) throw ConfigError(field + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : *j) {
        if (!v.is_number()) throw ConfigError(field + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

ChannelParams read_channel(const json* j) {
    ChannelParams c;
    if (!j) return c;
    ObjectReader r(*j, "channel");
    c.bitrate = r.get("bitrate", c.bitrate);
    c.backoff_unit = r.get("backoff_unit", c.backoff_unit);
    c.min_be = r.get("min_be", c.min_be);
    c.max_be = r.get("max_be", c.max_be);
    c.max_csma_backoffs = r.get("max_csma_backoffs", c.max_csma_backoffs);
    c.loss_prob = r.get("loss_prob", c.loss_prob);
    c.mac_overhead_bytes = r.get("mac_overhead_bytes", c.mac_overhead_bytes);
    c.mac_retries = r.get("mac_retries", c.mac_retries);
    if (const json* q = r.child("queue_limit")) {
        if (!q->is_number_unsigned() && !(q->is_number_integer() && q->get<long long>() >= 0)) {
            throw ConfigError("channel.queue_limit: expected a non-negative integer or null");
        }
        c.queue_limit = q->get<std::size_t>();
    }
    r.finish();
    return c;
}

SamplerParams read_sampler(const json* j, const std::string& path) {
    SamplerParams p;
    if (!j) return p;
    ObjectReader r(*j, path);
    p.kp = r.get("kp", p.kp);
    p.ki = r.get("ki", p.ki);
    p.kd = r.get("kd", p.kd);
    p.rho_ref = r.get("rho_ref", p.rho_ref);
    p.lambda = r.get("lambda", p.lambda);
    p.t_spa = r.get("t_spa", p.t_spa);
    p.h_max = r.get("h_max", p.h_max);
    p.h_min = r.get("h_min", p.h_min);
    r.finish();
    return p;
}

ReferenceSpec read_reference(const json* j, const std::string& path) {
    ReferenceSpec s;
    if (!j) return s;
    ObjectReader r(*j, path);
    s.wave_period = r.get("wave_period", s.wave_period);
    s.amplitude_high = r.get("amplitude_high", s.amplitude_high);
    s.amplitude_low = r.get("amplitude_low", s.amplitude_low);
    s.phase = r.get("phase", s.phase);
    r.finish();
    return s;
}

PidGains read_gains(const json* j, const std::string& path) {
    PidGains g;
    if (!j) return g;
    ObjectReader r(*j, path);
    g.kp = r.get("kp", g.kp);
    g.ki = r.get("ki", g.ki);
    g.kd = r.get("kd", g.kd);
    r.finish();
    return g;
}

LoopSpec read_loop(const json& j, const std::string& path, double duration, int default_id) {
    LoopSpec l;
    ObjectReader r(j, path);
    l.loop_id = r.get("loop_id", default_id);
    if (const json* p = r.child("plant")) {
        ObjectReader pr(*p, path + ".plant");
        l.plant.num = read_coeffs(pr.child("num"), l.plant.num, path + ".plant.num");
        l.plant.den = read_coeffs(pr.child("den"), l.plant.den, path + ".plant.den");
        pr.finish();
    }
    l.dt = r.get("dt", l.dt);
    l.initial_h = r.get("initial_h", l.initial_h);
    l.sampler = read_sampler(r.child("sampler"), path + ".sampler");
    l.reference = read_reference(r.child("reference"), path + ".reference");
    l.controller = read_gains(r.child("controller"), path + ".controller");
    if (const json* w = r.child("activation_windows")) {
        if (!w->is_array()) throw ConfigError(path + ".activation_windows: expected an array");
        for (std::size_t i = 0; i < w->size(); ++i) {
            l.activation_windows.push_back(
                read_window((*w)[i], path + ".activation_windows[" + std::to_string(i) + "]"));
        }
    } else {
        l.activation_windows.push_back(Window{0.0, duration});
    }
    l.compute_delay = r.get("compute_delay", l.compute_delay);
    l.report_over_medium = r.get("report_over_medium", l.report_over_medium);
    r.finish();
    return l;
}

InterfererSpec read_interferer(const json& j, const std::string& path) {
    InterfererSpec s;
    ObjectReader r(j, path);
    s.period = r.get("period", s.period);
    s.packet_bytes = r.get("packet_bytes", s.packet_bytes);
    const json* w = r.child("window");
    if (!w) throw ConfigError(path + ".window: required");
    s.window = read_window(*w, path + ".window");
    r.finish();
    return s;
}

json window_json(const Window& w) { return json::array({w.start, w.end}); }

}  // namespace

void ScenarioSpec::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be > 0");
    if (!(blowup_bound > 0.0)) throw ConfigError("blowup_bound must be > 0");
    channel.validate();
    if (loops.empty()) throw ConfigError("loops: at least one loop is required");
    std::set<int> ids;
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const LoopSpec& l = loops[i];
        const std::string path = "loops[" + std::to_string(i) + "]";
        if (!ids.insert(l.loop_id).second) {
            throw ConfigError(path + ".loop_id: duplicate id " + std::to_string(l.loop_id));
        }
        try {
            l.plant.validate();
            l.sampler.validate();
            l.reference.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(path + "." + e.what());
        }
        if (!(l.dt > 0.0)) throw ConfigError(path + ".dt must be > 0");
        const double tau = LtiPlant::fastest_time_constant(l.plant);
        if (l.dt > tau / 10.0 * (1.0 + 1e-12)) {
            throw ConfigError(path + ".dt must not exceed a tenth of the fastest plant time constant");
        }
        if (!(l.initial_h >= l.sampler.h_min && l.initial_h <= l.sampler.h_max)) {
            throw ConfigError(path + ".initial_h must lie in [sampler.h_min, sampler.h_max]");
        }
        if (!(l.compute_delay >= 0.0) || !std::isfinite(l.compute_delay)) {
            throw ConfigError(path + ".compute_delay must be >= 0");
        }
        for (std::size_t k = 0; k < l.activation_windows.size(); ++k) {
            const std::string wpath = path + ".activation_windows[" + std::to_string(k) + "]";
            validate_window(l.activation_windows[k], wpath);
            if (k > 0 && l.activation_windows[k].start < l.activation_windows[k - 1].end) {
                throw ConfigError(wpath + ": windows must be sorted and non-overlapping");
            }
        }
    }
    for (std::size_t i = 0; i < interferers.size(); ++i) {
        const InterfererSpec& s = interferers[i];
        const std::string path = "interferers[" + std::to_string(i) + "]";
        if (!(s.period > 0.0) || !std::isfinite(s.period)) throw ConfigError(path + ".period must be > 0");
        if (s.packet_bytes <= 0) throw ConfigError(path + ".packet_bytes must be > 0");
        validate_window(s.window, path + ".window");
    }
}

ScenarioSpec parse_scenario(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }
    ScenarioSpec s;
    ObjectReader r(doc, "");
    s.name = r.get("name", s.name);
    s.duration = r.get("duration", s.duration);
    s.seed = r.get("seed", s.seed);
    s.scheme = parse_scheme(r.get<std::string>("scheme", to_string(s.scheme)));
    s.output_prefix = r.get("output_prefix", s.output_prefix);
    s.blowup_bound = r.get("blowup_bound", s.blowup_bound);
    s.channel = read_channel(r.child("channel"));
    if (const json* loops = r.child("loops")) {
        if (!loops->is_array()) throw ConfigError("loops: expected an array");
        for (std::size_t i = 0; i < loops->size(); ++i) {
            s.loops.push_back(read_loop((*loops)[i], "loops[" + std::to_string(i) + "]", s.duration,
                                        static_cast<int>(i) + 1));
        }
    }
    if (const json* ints = r.child("interferers")) {
        if (!ints->is_array()) throw ConfigError("interferers: expected an array");
        for (std::size_t i = 0; i < ints->size(); ++i) {
            s.interferers.push_back(read_interferer((*ints)[i], "interferers[" + std::to_string(i) + "]"));
        }
    }
    r.finish();
    s.validate();
    return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_scenario(const ScenarioSpec& s) {
    json doc;
    doc["name"] = s.name;
    doc["duration"] = s.duration;
    doc["seed"] = s.seed;
    doc["scheme"] = to_string(s.scheme);
    doc["output_prefix"] = s.output_prefix;
    doc["blowup_bound"] = s.blowup_bound;
    const ChannelParams& c = s.channel;
    doc["channel"] = {
        {"bitrate", c.bitrate},
        {"backoff_unit", c.backoff_unit},
        {"min_be", c.min_be},
        {"max_be", c.max_be},
        {"max_csma_backoffs", c.max_csma_backoffs},
        {"loss_prob", c.loss_prob},
        {"mac_overhead_bytes", c.mac_overhead_bytes},
        {"mac_retries", c.mac_retries},
        {"queue_limit", c.queue_limit ? json(*c.queue_limit) : json(nullptr)},
    };
    json loops = json::array();
    for (const LoopSpec& l : s.loops) {
        json windows = json::array();
        for (const Window& w : l.activation_windows) windows.push_back(window_json(w));
        loops.push_back({
            {"loop_id", l.loop_id},
            {"plant", {{"num", l.plant.num}, {"den", l.plant.den}}},
            {"dt", l.dt},
            {"initial_h", l.initial_h},
            {"sampler",
             {{"kp", l.sampler.kp},
              {"ki", l.sampler.ki},
              {"kd", l.sampler.kd},
              {"rho_ref", l.sampler.rho_ref},
              {"lambda", l.sampler.lambda},
              {"t_spa", l.sampler.t_spa},
              {"h_max", l.sampler.h_max},
              {"h_min", l.sampler.h_min}}},
            {"reference",
             {{"wave_period", l.reference.wave_period},
              {"amplitude_high", l.reference.amplitude_high},
              {"amplitude_low", l.reference.amplitude_low},
              {"phase", l.reference.phase}}},
            {"controller", {{"kp", l.controller.kp}, {"ki", l.controller.ki}, {"kd", l.controller.kd}}},
            {"activation_windows", windows},
            {"compute_delay", l.compute_delay},
            {"report_over_medium", l.report_over_medium},
        });
    }
    doc["loops"] = loops;
    json ints = json::array();
    for (const InterfererSpec& i : s.interferers) {
        ints.push_back({{"period", i.period}, {"packet_bytes", i.packet_bytes}, {"window", window_json(i.window)}});
    }
    doc["interferers"] = ints;
    return doc.dump(2) + "\n";
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"reconfig", "interference-slight", "interference-severe"};
    return names;
}

namespace {

ScenarioSpec interference(std::string name, double interferer_period) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.duration = 18.0;
    for (int id = 1; id <= 2; ++id) {
        LoopSpec l;
        l.loop_id = id;
        l.activation_windows = {Window{0.0, 18.0}};
        s.loops.push_back(l);
    }
    for (int k = 0; k < 2; ++k) {
        InterfererSpec i;
        i.period = interferer_period;
        i.window = Window{6.0, 12.0};
        s.interferers.push_back(i);
    }
    return s;
}

}  // namespace

ScenarioSpec builtin_scenario(std::string_view name) {
    ScenarioSpec s;
    if (name == "reconfig") {
        s.name = "reconfig";
        s.duration = 18.0;
        for (int id = 1; id <= 4; ++id) {
            LoopSpec l;
            l.loop_id = id;
            l.activation_windows = {id <= 2 ? Window{0.0, 18.0} : Window{6.0, 12.0}};
            s.loops.push_back(l);
        }
    } else if (name == "interference-slight") {
        s = interference("interference-slight", 0.010);
    } else if (name == "interference-severe") {
        s = interference("interference-severe", 0.008);
    } else {
        std::string valid;
        for (const auto& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
        throw ConfigError("unknown scenario '" + std::string(name) + "'; valid names: " + valid);
    }
    s.validate();
    return s;
}

}  // namespace fttsim
