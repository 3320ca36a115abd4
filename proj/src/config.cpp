#include "rtba/app.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

namespace rtba {

namespace {

using json = nlohmann::json;

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key + ": value must be finite");
    return d;
}

long long as_integer(const json& v, const std::string& key) {
    const double d = as_number(v, key);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(key + ": expected an integer");
    return static_cast<long long>(d);
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + ": expected a string");
    return v.get<std::string>();
}

Planet as_planet(const json& v, const std::string& key) {
    const auto s = as_string(v, key);
    auto p = planet_from_name(s);
    if (!p) throw ConfigError(key + ": unknown body '" + s + "'");
    return *p;
}

Mode as_mode(const json& v, const std::string& key) {
    const auto s = as_string(v, key);
    if (s == "ltto") return Mode::Ltto;
    if (s == "grid") return Mode::Grid;
    if (s == "rtba") return Mode::Rtba;
    throw ConfigError(key + ": expected one of ltto, grid, rtba");
}

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"mode", [](RunConfig& c, const json& v, const std::string& k) { c.mode = as_mode(v, k); }},
        {"sequence", [](RunConfig& c, const json& v, const std::string& k) { c.sequence = as_string(v, k); }},
        {"seed",
         [](RunConfig& c, const json& v, const std::string& k) {
             const auto s = as_integer(v, k);
             if (s < 0) throw ConfigError(k + ": must be non-negative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"workers",
         [](RunConfig& c, const json& v, const std::string& k) {
             const auto w = as_integer(v, k);
             if (w < 1 || w > 4096) throw ConfigError(k + ": must lie in [1, 4096]");
             c.workers = static_cast<int>(w);
         }},
        {"output_dir", [](RunConfig& c, const json& v, const std::string& k) { c.output_dir = as_string(v, k); }},
        {"elements_file",
         [](RunConfig& c, const json& v, const std::string& k) { c.elements_file = as_string(v, k); }},
        {"sun_mu", [](RunConfig& c, const json& v, const std::string& k) { c.sun_mu = as_number(v, k); }},
        {"departure_body",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.departure_body = as_planet(v, k); }},
        {"arrival_body",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.arrival_body = as_planet(v, k); }},
        {"max_gas", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.max_gas = static_cast<int>(as_integer(v, k)); }},
        {"q", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.q = as_number(v, k); }},
        {"p", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.p = static_cast<int>(as_integer(v, k)); }},
        {"cpu_count",
         [](RunConfig& c, const json& v, const std::string& k) {
             c.rtba.cpu_count = static_cast<int>(as_integer(v, k));
             c.cpu_count_explicit = true;
         }},
        {"max_recursions",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.max_recursions = static_cast<int>(as_integer(v, k)); }},
        {"xi", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.xi = as_number(v, k); }},
        {"chi", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.chi = as_number(v, k); }},
        {"window_start", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.window_start = as_number(v, k); }},
        {"window_end", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.window_end = as_number(v, k); }},
        {"topology_probability",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.topology_probability = as_number(v, k); }},
        {"population_size",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.population_size = static_cast<int>(as_integer(v, k)); }},
        {"generations",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.generations = static_cast<int>(as_integer(v, k)); }},
        {"crossover_rate", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.crossover_rate = as_number(v, k); }},
        {"mutation_rate", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.mutation_rate = as_number(v, k); }},
        {"mutation_sigma", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.mutation_sigma = as_number(v, k); }},
        {"tournament_size",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.tournament_size = static_cast<int>(as_integer(v, k)); }},
        {"elitism_count",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.sga.elitism_count = static_cast<int>(as_integer(v, k)); }},
        {"window_days", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.window_days = as_number(v, k); }},
        {"tof_min_days", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.tof_min_days = as_number(v, k); }},
        {"tof_max_days", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.tof_max_days = as_number(v, k); }},
        {"max_revolutions",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.max_revolutions = static_cast<int>(as_integer(v, k)); }},
        {"coeff_bound", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.coeff_bound = as_number(v, k); }},
        {"v_inf_max", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.v_inf_max = as_number(v, k); }},
        {"hp_min", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.hp_min = as_number(v, k); }},
        {"hp_max", [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.hp_max = as_number(v, k); }},
        {"free_parameter_count",
         [](RunConfig& c, const json& v, const std::string& k) {
             c.rtba.ltto.free_parameter_count = static_cast<int>(as_integer(v, k));
         }},
        {"thrust_accel_cap",
         [](RunConfig& c, const json& v, const std::string& k) { c.rtba.ltto.thrust_accel_cap = as_number(v, k); }},
        {"islands_per_window",
         [](RunConfig& c, const json& v, const std::string& k) { c.islands_per_window = static_cast<int>(as_integer(v, k)); }},
        {"nm_tol", [](RunConfig& c, const json& v, const std::string& k) { c.nm_tol = as_number(v, k); }},
        {"nm_max_iter",
         [](RunConfig& c, const json& v, const std::string& k) { c.nm_max_iter = static_cast<int>(as_integer(v, k)); }},
        {"initial_mass", [](RunConfig& c, const json& v, const std::string& k) { c.initial_mass = as_number(v, k); }},
        {"isp", [](RunConfig& c, const json& v, const std::string& k) { c.isp = as_number(v, k); }},
    };
    return table;
}

const std::set<std::string> kStringKeys = {"mode", "sequence", "output_dir", "elements_file",
                                           "departure_body", "arrival_body"};

json override_value(const std::string& key, const std::string& text) {
    if (kStringKeys.count(key)) return json(text);
    try {
        json v = json::parse(text);
        if (v.is_number() || v.is_string()) return v;
    } catch (const json::parse_error&) {
    }
    return json(text);
}

void validate(RunConfig& c) {
    auto& l = c.rtba.ltto;
    auto soft = [&](bool cond, const std::string& msg) {
        if (cond) c.warnings.push_back(msg);
    };
    auto hard = [](bool cond, const std::string& msg) {
        if (cond) throw ConfigError(msg);
    };

    Sequence::parse(c.sequence);
    hard(!(c.sun_mu > 0.0), "sun_mu: must be positive");
    hard(c.rtba.max_gas > 8, "max_gas: at most 8 flybys are supported");
    hard(!(l.window_days > 0.0), "window_days: must be positive");
    hard(!(l.tof_min_days > 0.0), "tof_min_days: must be positive");
    hard(!(l.tof_max_days > l.tof_min_days), "tof_max_days: must exceed tof_min_days");
    hard(l.max_revolutions < 0, "max_revolutions: must be non-negative");
    hard(!(l.coeff_bound > 0.0), "coeff_bound: must be positive");
    hard(!(l.v_inf_max > 0.0), "v_inf_max: must be positive");
    hard(!(l.hp_min >= 0.0), "hp_min: must be non-negative");
    hard(!(l.hp_max > l.hp_min), "hp_max: must exceed hp_min");
    hard(l.free_parameter_count < 0 || l.free_parameter_count > 2,
         "free_parameter_count: must be 0, 1 or 2");
    hard(!(l.thrust_accel_cap >= 0.0), "thrust_accel_cap: must be non-negative");
    hard(c.islands_per_window < 1, "islands_per_window: must be at least 1");
    hard(!(c.nm_tol > 0.0), "nm_tol: must be positive");
    hard(c.nm_max_iter < 1, "nm_max_iter: must be at least 1");
    hard(c.initial_mass < 0.0 || c.isp < 0.0, "initial_mass and isp must be non-negative");

    soft(l.window_days != 60.0, "window_days differs from the tuned 60-day window");
    soft(l.tof_min_days < 100.0, "tof_min_days below the tuned lower bound of 100 days");
    soft(l.tof_max_days > 4500.0, "tof_max_days above the tuned upper bound of 4500 days");
    soft(l.max_revolutions > 2, "max_revolutions above the tuned upper bound of 2");
    soft(l.coeff_bound > 3e4, "coeff_bound above the tuned bound of 3e4");
    soft(l.v_inf_max > 5000.0, "v_inf_max above the tuned bound of 5000 m/s");
    soft(l.hp_min < 2e5, "hp_min below the tuned bound of 2e5 m");
    soft(l.hp_max > 5e10, "hp_max above the tuned bound of 5e10 m");

    c.rtba.validate();
}

}  // namespace

std::string_view mode_name(Mode m) {
    switch (m) {
        case Mode::Ltto: return "ltto";
        case Mode::Grid: return "grid";
        case Mode::Rtba: return "rtba";
    }
    return "rtba";
}

RunConfig parse_config(const std::string& document,
                       const std::map<std::string, std::string>& overrides) {
    json doc;
    if (document.find_first_not_of(" \t\r\n") == std::string::npos) {
        doc = json::object();
    } else {
        try {
            doc = json::parse(document);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");

    RunConfig cfg;
    const auto& table = setters();
    auto apply = [&](const std::string& key, const json& value) {
        auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
        if (value.is_object() || value.is_array())
            throw ConfigError(key + ": nested values are not allowed");
        it->second(cfg, value, key);
    };
    for (const auto& [key, value] : doc.items()) apply(key, value);
    for (const auto& [key, text] : overrides) apply(key, override_value(key, text));

    cfg.rtba.seed = cfg.seed;
    cfg.rtba.sga.seed = cfg.seed;
    if (cfg.workers) cfg.rtba.workers = *cfg.workers;
    validate(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path,
                            const std::map<std::string, std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

nlohmann::json RunConfig::to_json() const {
    const auto& r = rtba;
    json j;
    j["mode"] = std::string(mode_name(mode));
    j["sequence"] = sequence;
    j["seed"] = seed;
    if (workers) j["workers"] = *workers;
    j["output_dir"] = output_dir;
    j["elements_file"] = elements_file;
    j["sun_mu"] = sun_mu;
    j["departure_body"] = std::string(planet_name(r.departure_body));
    j["arrival_body"] = std::string(planet_name(r.arrival_body));
    j["max_gas"] = r.max_gas;
    j["q"] = r.q;
    j["p"] = r.p;
    if (cpu_count_explicit) j["cpu_count"] = r.cpu_count;
    j["max_recursions"] = r.max_recursions;
    j["xi"] = r.xi;
    j["chi"] = r.chi;
    j["window_start"] = r.window_start;
    j["window_end"] = r.window_end;
    j["topology_probability"] = r.topology_probability;
    j["population_size"] = r.sga.population_size;
    j["generations"] = r.sga.generations;
    j["crossover_rate"] = r.sga.crossover_rate;
    j["mutation_rate"] = r.sga.mutation_rate;
    j["mutation_sigma"] = r.sga.mutation_sigma;
    j["tournament_size"] = r.sga.tournament_size;
    j["elitism_count"] = r.sga.elitism_count;
    j["window_days"] = r.ltto.window_days;
    j["tof_min_days"] = r.ltto.tof_min_days;
    j["tof_max_days"] = r.ltto.tof_max_days;
    j["max_revolutions"] = r.ltto.max_revolutions;
    j["coeff_bound"] = r.ltto.coeff_bound;
    j["v_inf_max"] = r.ltto.v_inf_max;
    j["hp_min"] = r.ltto.hp_min;
    j["hp_max"] = r.ltto.hp_max;
    j["free_parameter_count"] = r.ltto.free_parameter_count;
    j["thrust_accel_cap"] = r.ltto.thrust_accel_cap;
    j["islands_per_window"] = islands_per_window;
    j["nm_tol"] = nm_tol;
    j["nm_max_iter"] = nm_max_iter;
    j["initial_mass"] = initial_mass;
    j["isp"] = isp;
    return j;
}

int resolve_workers(const RunConfig& cfg, const char* env_value) {
    if (cfg.workers) return *cfg.workers;
    if (env_value && *env_value) {
        char* end = nullptr;
        const long v = std::strtol(env_value, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096)
            throw ConfigError(std::string(kWorkersEnv) + ": expected a positive integer");
        return static_cast<int>(v);
    }
    if (cfg.cpu_count_explicit) return cfg.rtba.cpu_count;
    return std::max(1u, std::thread::hardware_concurrency());
}

PlanetSystem load_system(const RunConfig& cfg) {
    if (!cfg.elements_file.empty()) return PlanetSystem::from_csv(cfg.elements_file, cfg.sun_mu);
    if (cfg.sun_mu == kSunMu) return PlanetSystem();
    std::vector<Body> bodies;
    for (Planet p : kAllPlanets) {
        Body b = builtin_body(p);
        b.sun_mu = cfg.sun_mu;
        bodies.push_back(b);
    }
    return PlanetSystem(std::move(bodies));
}

}  // namespace rtba
