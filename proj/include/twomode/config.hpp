#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "twomode/constants.hpp"
#include "twomode/errors.hpp"
#include "twomode/evolve.hpp"

namespace twomode {

using Json = nlohmann::json;

// Physical anchors in SI; everything downstream runs in oscillator units.
struct PhysicalParams {
    double mass_kg = si::rb87_mass;
    double omega_axial_rad_per_s = 0.0;
    double omega_transverse_rad_per_s = 0.0;
    double scattering_length_m = 0.0;

    double a0_m() const { return std::sqrt(si::hbar / (mass_kg * omega_axial_rad_per_s)); }
    double scattering_length_a0() const { return scattering_length_m / a0_m(); }
};

struct RunConfig {
    int schema_version = 1;
    std::string label = "run";
    PhysicalParams physical;
    SimConfig sim;
    std::string output_directory = "out";
    long snapshot_every = 0;     // 0 disables mode snapshots
    long checkpoint_every = 0;   // 0 writes only the final checkpoint
    bool emit_g1 = false;
    double temperature_kelvin = 0.0;  // 0 means unspecified
};

namespace detail_config {

struct Validator {
    std::vector<std::string> errors;

    void fail(const std::string& msg) { errors.push_back(msg); }

    void check_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
        if (!obj.is_object()) {
            fail(where + ": expected an object");
            return;
        }
        for (const auto& [key, _] : obj.items())
            if (!allowed.count(key)) fail(where + ": unknown key '" + key + "'");
    }

    bool has(const Json& obj, const std::string& key) {
        return obj.is_object() && obj.contains(key);
    }

    double number(const Json& obj, const std::string& where, const std::string& key,
                  std::optional<double> fallback = {}) {
        if (!has(obj, key)) {
            if (fallback) return *fallback;
            fail(where + ": missing required key '" + key + "'");
            return 0.0;
        }
        if (!obj[key].is_number()) {
            fail(where + "." + key + ": expected a number");
            return fallback.value_or(0.0);
        }
        return obj[key].get<double>();
    }

    long integer(const Json& obj, const std::string& where, const std::string& key,
                 std::optional<long> fallback = {}) {
        if (!has(obj, key)) {
            if (fallback) return *fallback;
            fail(where + ": missing required key '" + key + "'");
            return 0;
        }
        if (!obj[key].is_number_integer()) {
            fail(where + "." + key + ": expected an integer");
            return fallback.value_or(0);
        }
        return obj[key].get<long>();
    }

    std::string text(const Json& obj, const std::string& where, const std::string& key,
                     std::optional<std::string> fallback = {}) {
        if (!has(obj, key)) {
            if (fallback) return *fallback;
            fail(where + ": missing required key '" + key + "'");
            return {};
        }
        if (!obj[key].is_string()) {
            fail(where + "." + key + ": expected a string");
            return fallback.value_or("");
        }
        return obj[key].get<std::string>();
    }

    bool boolean(const Json& obj, const std::string& where, const std::string& key, bool fallback) {
        if (!has(obj, key)) return fallback;
        if (!obj[key].is_boolean()) {
            fail(where + "." + key + ": expected a boolean");
            return fallback;
        }
        return obj[key].get<bool>();
    }

    Schedule schedule(const Json& obj, const std::string& where, const std::string& peak_key) {
        Schedule s;
        check_keys(obj, where, {"profile", peak_key, "ramp_fraction"});
        const std::string profile = text(obj, where, "profile", std::string("constant"));
        if (profile == "constant") s.kind = Schedule::Kind::constant;
        else if (profile == "sinsq_bump") s.kind = Schedule::Kind::sinsq_bump;
        else if (profile == "trapezoid") s.kind = Schedule::Kind::trapezoid;
        else fail(where + ".profile: must be constant, sinsq_bump or trapezoid");
        s.peak = number(obj, where, peak_key, 0.0);
        s.ramp_fraction = number(obj, where, "ramp_fraction", 0.25);
        if (s.kind == Schedule::Kind::trapezoid && (s.ramp_fraction <= 0.0 || s.ramp_fraction > 0.5))
            fail(where + ".ramp_fraction: must lie in (0, 0.5]");
        return s;
    }
};

}  // namespace detail_config

// Parse and validate a configuration document. Every violation is collected
// and reported together; unknown keys are rejected.
inline RunConfig parse_config(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }

    detail_config::Validator v;
    RunConfig cfg;

    v.check_keys(root, "config",
                 {"schema_version", "label", "particles", "trap", "grid", "time", "interaction",
                  "integrator", "derivative_scheme", "inner_loop", "gpe_solver", "output",
                  "temperature_K", "freeze_modes"});

    const long version = v.integer(root, "config", "schema_version");
    if (version != 1 && v.errors.empty()) v.fail("config.schema_version: only version 1 is supported");
    cfg.label = v.text(root, "config", "label", std::string("run"));

    // particles
    if (v.has(root, "particles")) {
        const Json& p = root["particles"];
        v.check_keys(p, "particles", {"count", "mass_kg", "scattering_length_m"});
        const long count = v.integer(p, "particles", "count");
        if (count < 2 || count % 2 != 0)
            v.fail("particles.count: boson count must be even and at least 2");
        cfg.sim.boson_count = int(count);
        cfg.physical.mass_kg = v.number(p, "particles", "mass_kg");
        if (cfg.physical.mass_kg <= 0.0) v.fail("particles.mass_kg: must be positive");
        cfg.physical.scattering_length_m =
            v.number(p, "particles", "scattering_length_m", 0.0);
        if (cfg.physical.scattering_length_m < 0.0)
            v.fail("particles.scattering_length_m: must be non-negative");
    } else {
        v.fail("config: missing required key 'particles'");
    }

    // trap
    if (v.has(root, "trap")) {
        const Json& t = root["trap"];
        v.check_keys(t, "trap",
                     {"omega_axial_rad_per_s", "omega_transverse_rad_per_s", "barrier",
                      "barrier_width_a0", "tilt", "half_separation"});
        cfg.physical.omega_axial_rad_per_s = v.number(t, "trap", "omega_axial_rad_per_s");
        if (cfg.physical.omega_axial_rad_per_s <= 0.0)
            v.fail("trap.omega_axial_rad_per_s: must be positive");
        cfg.physical.omega_transverse_rad_per_s =
            v.number(t, "trap", "omega_transverse_rad_per_s", 0.0);
        if (cfg.physical.omega_transverse_rad_per_s < 0.0)
            v.fail("trap.omega_transverse_rad_per_s: must be non-negative");
        if (cfg.physical.omega_axial_rad_per_s > 0.0)
            cfg.sim.trap.omega_perp =
                cfg.physical.omega_transverse_rad_per_s / cfg.physical.omega_axial_rad_per_s;
        cfg.sim.trap.barrier_width = v.number(t, "trap", "barrier_width_a0", 1.0);
        if (cfg.sim.trap.barrier_width <= 0.0) v.fail("trap.barrier_width_a0: must be positive");
        if (v.has(t, "barrier"))
            cfg.sim.trap.barrier_height = v.schedule(t["barrier"], "trap.barrier", "peak_hbar_omega0");
        if (v.has(t, "tilt"))
            cfg.sim.trap.tilt = v.schedule(t["tilt"], "trap.tilt", "peak_hbar_omega0_per_a0");
        if (v.has(t, "half_separation"))
            cfg.sim.trap.half_separation =
                v.schedule(t["half_separation"], "trap.half_separation", "peak_a0");
    } else {
        v.fail("config: missing required key 'trap'");
    }

    // grid
    if (v.has(root, "grid")) {
        const Json& g = root["grid"];
        v.check_keys(g, "grid",
                     {"points_x", "points_y", "points_z", "extent_x_a0", "extent_y_a0",
                      "extent_z_a0"});
        const long px = v.integer(g, "grid", "points_x", 1L);
        const long py = v.integer(g, "grid", "points_y", 1L);
        const long pz = v.integer(g, "grid", "points_z");
        const double ez = v.number(g, "grid", "extent_z_a0");
        const double ex = v.number(g, "grid", "extent_x_a0", 0.0);
        const double ey = v.number(g, "grid", "extent_y_a0", 0.0);
        if (pz < 8) v.fail("grid.points_z: need at least 8 points");
        if (ez <= 0.0) v.fail("grid.extent_z_a0: must be positive");
        if (px < 1 || py < 1) v.fail("grid.points_x/points_y: must be at least 1");
        if (px > 1 && ex <= 0.0) v.fail("grid.extent_x_a0: required when points_x > 1");
        if (py > 1 && ey <= 0.0) v.fail("grid.extent_y_a0: required when points_y > 1");
        if (v.errors.empty())
            cfg.sim.grid = Grid::box(int(px), int(py), int(pz), ex, ey, ez);
    } else {
        v.fail("config: missing required key 'grid'");
    }

    // time
    if (v.has(root, "time")) {
        const Json& t = root["time"];
        v.check_keys(t, "time", {"total_1_per_omega0", "dt_1_per_omega0"});
        cfg.sim.total_time = v.number(t, "time", "total_1_per_omega0");
        cfg.sim.dt = v.number(t, "time", "dt_1_per_omega0");
        cfg.sim.trap.total_time = cfg.sim.total_time;
        if (cfg.sim.dt <= 0.0) v.fail("time.dt_1_per_omega0: must be positive");
        if (cfg.sim.total_time <= 0.0) v.fail("time.total_1_per_omega0: must be positive");
        if (cfg.sim.dt > 0.0 && cfg.sim.total_time > 0.0) {
            const double steps = cfg.sim.total_time / cfg.sim.dt;
            if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
                v.fail("time: total_1_per_omega0 must be an integral number of dt steps");
        }
    } else {
        v.fail("config: missing required key 'time'");
    }

    // interaction
    if (v.has(root, "interaction")) {
        const Json& i = root["interaction"];
        v.check_keys(i, "interaction", {"mode", "g_dimensionless"});
        const std::string mode = v.text(i, "interaction", "mode", std::string("dimensionless"));
        if (mode == "dimensionless") {
            cfg.sim.g = v.number(i, "interaction", "g_dimensionless");
        } else if (mode == "scattering_length") {
            if (v.has(i, "g_dimensionless"))
                v.fail("interaction.g_dimensionless: not allowed in scattering_length mode");
            if (cfg.physical.omega_transverse_rad_per_s <= 0.0)
                v.fail("interaction: scattering_length mode needs trap.omega_transverse_rad_per_s > 0");
            else if (v.errors.empty())
                // g_1D = g_3D / (2 pi a_perp^2) reduced to oscillator units
                cfg.sim.g = 2.0 * cfg.physical.scattering_length_a0() *
                            cfg.physical.omega_transverse_rad_per_s /
                            cfg.physical.omega_axial_rad_per_s;
        } else {
            v.fail("interaction.mode: must be dimensionless or scattering_length");
        }
    } else {
        cfg.sim.g = 0.0;
    }

    const std::string integ = v.text(root, "config", "integrator", std::string("euler"));
    if (integ == "euler") cfg.sim.integrator = SimConfig::Integrator::euler;
    else if (integ == "rk4") cfg.sim.integrator = SimConfig::Integrator::rk4;
    else v.fail("config.integrator: must be euler or rk4");

    const std::string scheme = v.text(root, "config", "derivative_scheme", std::string("centered"));
    if (scheme == "centered") cfg.sim.scheme = DerivScheme::centered;
    else if (scheme == "forward") cfg.sim.scheme = DerivScheme::forward;
    else v.fail("config.derivative_scheme: must be centered or forward");

    if (v.has(root, "inner_loop")) {
        const Json& il = root["inner_loop"];
        v.check_keys(il, "inner_loop", {"tolerance", "max_iterations"});
        cfg.sim.inner_tolerance = v.number(il, "inner_loop", "tolerance", 1e-8);
        cfg.sim.inner_cap = int(v.integer(il, "inner_loop", "max_iterations", 20L));
        if (cfg.sim.inner_tolerance <= 0.0) v.fail("inner_loop.tolerance: must be positive");
        if (cfg.sim.inner_cap < 1) v.fail("inner_loop.max_iterations: must be at least 1");
    }

    if (v.has(root, "gpe_solver")) {
        const Json& gs = root["gpe_solver"];
        v.check_keys(gs, "gpe_solver", {"tolerance", "max_iterations"});
        cfg.sim.gpe.tolerance = v.number(gs, "gpe_solver", "tolerance", 1e-8);
        cfg.sim.gpe.max_iterations = int(v.integer(gs, "gpe_solver", "max_iterations", 50000L));
        if (cfg.sim.gpe.tolerance <= 0.0) v.fail("gpe_solver.tolerance: must be positive");
        if (cfg.sim.gpe.max_iterations < 1) v.fail("gpe_solver.max_iterations: must be at least 1");
    }

    if (v.has(root, "output")) {
        const Json& o = root["output"];
        v.check_keys(o, "output",
                     {"directory", "cadence_steps", "emit_g1", "snapshot_every_steps",
                      "checkpoint_every_steps"});
        cfg.output_directory = v.text(o, "output", "directory", std::string("out"));
        cfg.sim.output_every = v.integer(o, "output", "cadence_steps", 1L);
        if (cfg.sim.output_every < 1) v.fail("output.cadence_steps: must be at least 1");
        cfg.emit_g1 = v.boolean(o, "output", "emit_g1", false);
        cfg.snapshot_every = v.integer(o, "output", "snapshot_every_steps", 0L);
        cfg.checkpoint_every = v.integer(o, "output", "checkpoint_every_steps", 0L);
        if (cfg.snapshot_every < 0) v.fail("output.snapshot_every_steps: must be non-negative");
        if (cfg.checkpoint_every < 0) v.fail("output.checkpoint_every_steps: must be non-negative");
    }

    cfg.temperature_kelvin = v.number(root, "config", "temperature_K", 0.0);
    if (cfg.temperature_kelvin < 0.0) v.fail("config.temperature_K: must be non-negative");
    cfg.sim.freeze_modes = v.boolean(root, "config", "freeze_modes", false);

    if (!v.errors.empty()) throw ConfigError(v.errors);
    return cfg;
}

// Echo of the effective configuration after defaults and unit conversion.
inline Json effective_json(const RunConfig& cfg) {
    Json j;
    j["schema_version"] = cfg.schema_version;
    j["label"] = cfg.label;
    j["particles"] = {{"count", cfg.sim.boson_count},
                      {"mass_kg", cfg.physical.mass_kg},
                      {"scattering_length_m", cfg.physical.scattering_length_m}};
    auto schedule_json = [](const Schedule& s, const char* peak_key) {
        Json o;
        o["profile"] = s.kind == Schedule::Kind::constant     ? "constant"
                       : s.kind == Schedule::Kind::sinsq_bump ? "sinsq_bump"
                                                              : "trapezoid";
        o[peak_key] = s.peak;
        if (s.kind == Schedule::Kind::trapezoid) o["ramp_fraction"] = s.ramp_fraction;
        return o;
    };
    j["trap"] = {{"omega_axial_rad_per_s", cfg.physical.omega_axial_rad_per_s},
                 {"omega_transverse_rad_per_s", cfg.physical.omega_transverse_rad_per_s},
                 {"barrier", schedule_json(cfg.sim.trap.barrier_height, "peak_hbar_omega0")},
                 {"barrier_width_a0", cfg.sim.trap.barrier_width},
                 {"tilt", schedule_json(cfg.sim.trap.tilt, "peak_hbar_omega0_per_a0")},
                 {"half_separation", schedule_json(cfg.sim.trap.half_separation, "peak_a0")}};
    j["grid"] = {{"points_x", cfg.sim.grid.nx}, {"points_y", cfg.sim.grid.ny},
                 {"points_z", cfg.sim.grid.nz},
                 {"extent_z_a0", cfg.sim.grid.nz > 1 ? cfg.sim.grid.dz * cfg.sim.grid.nz : 0.0},
                 {"extent_x_a0", cfg.sim.grid.nx > 1 ? cfg.sim.grid.dx * cfg.sim.grid.nx : 0.0},
                 {"extent_y_a0", cfg.sim.grid.ny > 1 ? cfg.sim.grid.dy * cfg.sim.grid.ny : 0.0}};
    j["time"] = {{"total_1_per_omega0", cfg.sim.total_time}, {"dt_1_per_omega0", cfg.sim.dt}};
    j["interaction"] = {{"mode", "dimensionless"}, {"g_dimensionless", cfg.sim.g}};
    j["integrator"] = cfg.sim.integrator == SimConfig::Integrator::euler ? "euler" : "rk4";
    j["derivative_scheme"] = cfg.sim.scheme == DerivScheme::centered ? "centered" : "forward";
    j["inner_loop"] = {{"tolerance", cfg.sim.inner_tolerance},
                       {"max_iterations", cfg.sim.inner_cap}};
    j["gpe_solver"] = {{"tolerance", cfg.sim.gpe.tolerance},
                       {"max_iterations", cfg.sim.gpe.max_iterations}};
    j["output"] = {{"directory", cfg.output_directory},
                   {"cadence_steps", cfg.sim.output_every},
                   {"emit_g1", cfg.emit_g1},
                   {"snapshot_every_steps", cfg.snapshot_every},
                   {"checkpoint_every_steps", cfg.checkpoint_every}};
    if (cfg.temperature_kelvin > 0.0) j["temperature_K"] = cfg.temperature_kelvin;
    if (cfg.sim.freeze_modes) j["freeze_modes"] = true;
    return j;
}

// Apply one "dotted.path=value" override onto the raw JSON document.
inline void apply_override(Json& root, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError({"override '" + spec + "' is not KEY=VALUE"});
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    Json* node = &root;
    size_t pos = 0;
    while (true) {
        const size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (key.empty()) throw ConfigError({"override '" + spec + "' has an empty path segment"});
        if (dot == std::string::npos) {
            Json parsed = Json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? Json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace twomode
