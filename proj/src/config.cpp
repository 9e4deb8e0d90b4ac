#include "geofield/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geofield/errors.hpp"

namespace geofield {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* const kCommandNames[] = {"simulate-fd", "simulate-analytic", "compare", "optimize", "validate-single"};

const char* fd_mode_name(FdCoupling c) {
    switch (c) {
        case FdCoupling::SharedProfile: return "shared-profile";
        case FdCoupling::FixedPoint: return "fixed-point";
        case FdCoupling::Lagged: return "lagged";
    }
    return "fixed-point";
}

/// Reads one JSON object and remembers which keys were consumed.
class Section {
public:
    Section(const json* node, std::string path, bool strict, std::vector<std::string>* warnings)
        : node_(node), path_(std::move(path)), strict_(strict), warnings_(warnings) {
        if (node_ && !node_->is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return node_ && node_->contains(key); }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* raw(const std::string& key) {
        if (!has(key)) return nullptr;
        used_.insert(key);
        return &node_->at(key);
    }

    void number(const std::string& key, double& out) {
        if (const json* v = raw(key)) {
            if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
            out = v->get<double>();
        }
    }

    void integer(const std::string& key, int& out) {
        if (const json* v = raw(key)) {
            if (!v->is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
            out = v->get<int>();
        }
    }

    void flag(const std::string& key, bool& out) {
        if (const json* v = raw(key)) {
            if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void text(const std::string& key, std::string& out) {
        if (const json* v = raw(key)) {
            if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = raw(key)) {
            if (!v->is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) throw ConfigError(key_path(key), "expected an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }

    Section child(const std::string& key) {
        const json* v = raw(key);
        return Section(v, key_path(key), strict_, warnings_);
    }

    void finish() const {
        if (!node_) return;
        for (const auto& item : node_->items()) {
            if (used_.count(item.key())) continue;
            const std::string k = key_path(item.key());
            if (strict_) throw ConfigError(k, "unknown key");
            if (warnings_) warnings_->push_back("unknown key " + k);
        }
    }

private:
    const json* node_;
    std::string path_;
    bool strict_;
    std::vector<std::string>* warnings_;
    std::set<std::string> used_;
};

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column), e.what());
    }
}

std::string read_file(const std::filesystem::path& path, const std::string& key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(key, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> read_centers(const json& list, const std::string& key) {
    if (!list.is_array()) throw ConfigError(key, "expected an array of [x, y] pairs");
    std::vector<double> flat;
    for (const auto& pair : list) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ConfigError(key, "expected an array of [x, y] pairs");
        }
        flat.push_back(pair[0].get<double>());
        flat.push_back(pair[1].get<double>());
    }
    return flat;
}

Placement read_placement(Section& s, const std::filesystem::path& base_dir) {
    const bool inline_list = s.has("centers_m");
    const bool from_file = s.has("file");
    if (inline_list == from_file) throw ConfigError(s.key_path("centers_m"), "give exactly one of centers_m or file");
    if (inline_list) return Placement(read_centers(*s.raw("centers_m"), s.key_path("centers_m")));

    std::string name;
    s.text("file", name);
    std::filesystem::path path(name);
    if (path.is_relative()) path = base_dir / path;
    const json doc = parse_json(read_file(path, s.key_path("file")), path.string());
    if (!doc.is_object() || !doc.contains("centers_m")) {
        throw ConfigError(s.key_path("file"), path.string() + " holds no centers_m list");
    }
    return Placement(read_centers(doc.at("centers_m"), path.string() + ":centers_m"));
}

ordered_json centers_json(const Placement& p) {
    ordered_json list = ordered_json::array();
    for (std::size_t l = 0; l < p.count(); ++l) list.push_back({p.center(l).x, p.center(l).y});
    return list;
}

}  // namespace

std::string to_string(Command c) { return kCommandNames[static_cast<int>(c)]; }

std::optional<Command> parse_command(const std::string& name) {
    for (int i = 0; i < 5; ++i) {
        if (name == kCommandNames[i]) return static_cast<Command>(i);
    }
    return std::nullopt;
}

RunConfig parse_config(const std::string& text, bool strict, const std::filesystem::path& base_dir) {
    const json doc = parse_json(text, "config");
    RunConfig cfg;
    Section root(&doc, "", strict, &cfg.warnings);
    FieldModel& m = cfg.model;

    {
        Section s = root.child("geometry");
        s.number("half_width_A_m", m.geometry.half_width_A);
        s.number("half_width_B_m", m.geometry.half_width_B);
        s.number("depth_H_m", m.geometry.depth_H);
        s.finish();
    }
    {
        Section s = root.child("exchanger");
        s.number("side_L_E_m", m.exchanger.side_L_E);
        s.number("depth_H_E_m", m.exchanger.depth_H_E);
        s.number("pipe_radius_b_m", m.exchanger.pipe_radius_b);
        s.finish();
    }
    {
        if (!root.has("soil")) throw ConfigError("soil", "missing; give alpha_m2_per_day or zones");
        Section s = root.child("soil");
        const bool uniform = s.has("alpha_m2_per_day");
        const bool zoned = s.has("zones");
        if (uniform == zoned) throw ConfigError("soil", "give exactly one of alpha_m2_per_day or zones");
        if (uniform) {
            double alpha = 0.0;
            s.number("alpha_m2_per_day", alpha);
            m.zones = uniform_soil(m.geometry, alpha);
        } else {
            const json* zones = s.raw("zones");
            if (!zones->is_array()) throw ConfigError("soil.zones", "expected an array of zones");
            for (std::size_t i = 0; i < zones->size(); ++i) {
                Section z(&(*zones)[i], "soil.zones[" + std::to_string(i) + "]", strict, &cfg.warnings);
                SoilZone zone;
                for (const char* key : {"x_min_m", "x_max_m", "alpha_m2_per_day"}) {
                    if (!z.has(key)) throw ConfigError(z.key_path(key), "missing");
                }
                z.number("x_min_m", zone.x_min);
                z.number("x_max_m", zone.x_max);
                z.number("alpha_m2_per_day", zone.alpha);
                z.finish();
                m.zones.push_back(zone);
            }
        }
        s.finish();
    }
    {
        Section s = root.child("thermal");
        s.number("T0_surface_K", m.thermal.T0_surface);
        s.number("TH_bottom_K", m.thermal.TH_bottom);
        s.number("seasonal_depth_Hbar_m", m.thermal.seasonal_depth_Hbar);
        s.finish();
    }
    {
        Section s = root.child("fluid");
        s.number("conductivity_k_J_per_day_m_K", m.fluid.conductivity_k);
        s.number("density_rho_kg_per_m3", m.fluid.density_rho);
        s.number("specific_heat_cp_J_per_kg_K", m.fluid.specific_heat_cp);
        s.number("mean_velocity_U_m_per_day", m.fluid.mean_velocity_U);
        s.number("inlet_temperature_Tin_K", m.fluid.inlet_temperature_Tin);
        s.number("kinematic_viscosity_nu_m2_per_day", m.fluid.kinematic_viscosity_nu);
        s.finish();
    }
    {
        if (!root.has("placement")) throw ConfigError("placement", "missing; give centers_m or file");
        Section s = root.child("placement");
        m.placement = read_placement(s, base_dir);
        s.finish();
    }
    {
        Section s = root.child("discretization");
        Discretization& d = cfg.discretization;
        s.integer("target_Nx", d.cells.Nx);
        s.integer("target_Ny", d.cells.Ny);
        s.integer("target_Nz", d.cells.Nz);
        s.number("horizon_days", d.horizon_days);
        s.number("time_step_days", d.dt_days);
        s.flag("allow_substeps", d.allow_substeps);
        s.integer("modes_R", cfg.analytic.R);
        s.finish();
    }
    {
        Section s = root.child("coupling");
        s.number("tolerance_K", cfg.analytic.coupling.tolerance);
        s.integer("max_iterations", cfg.analytic.coupling.max_iterations);
        s.number("growth_bound", cfg.analytic.growth_bound);
        std::string mode = fd_mode_name(cfg.fd_coupling);
        s.text("fd_mode", mode);
        if (mode == "shared-profile") {
            cfg.fd_coupling = FdCoupling::SharedProfile;
        } else if (mode == "fixed-point") {
            cfg.fd_coupling = FdCoupling::FixedPoint;
        } else if (mode == "lagged") {
            cfg.fd_coupling = FdCoupling::Lagged;
        } else {
            throw ConfigError("coupling.fd_mode", "expected shared-profile, fixed-point or lagged, got " + mode);
        }
        if (cfg.analytic.coupling.max_iterations < 0) {
            throw ConfigError("coupling.max_iterations", "must be non-negative");
        }
        s.finish();
    }
    {
        Section s = root.child("cylinder");
        s.number("beta_min", cfg.cylinder.beta_min);
        s.integer("beta_nodes", cfg.cylinder.beta_nodes);
        s.integer("max_doublings", cfg.cylinder.max_doublings);
        s.number("convergence_tol_K", cfg.cylinder.convergence_tol);
        if (cfg.cylinder.beta_nodes < 1) throw ConfigError("cylinder.beta_nodes", "must be positive");
        s.finish();
    }
    {
        Section s = root.child("optimizer");
        ObjectiveConfig& o = cfg.optimizer;
        s.number("evaluation_time_days", o.evaluation_time);
        s.number("tol1_m", o.tol1);
        s.number("tol2_decades", o.tol2);
        s.integer("max_steps", o.max_steps);
        s.integer("eval_point_count", o.ring_points);
        s.number("eval_point_offset_radius_m", o.offset_radius);
        s.numbers("depth_fractions", o.depth_fractions);
        s.integer("max_halvings", o.max_halvings);
        s.number("first_move_m", o.first_move);
        s.number("min_separation_factor", o.min_separation_factor);
        s.flag("confine_to_zones", o.confine_to_zones);
        if (o.max_steps < 0) throw ConfigError("optimizer.max_steps", "must be non-negative");
        s.finish();
    }
    {
        Section s = root.child("run");
        std::string name = to_string(cfg.plan.command);
        s.text("command", name);
        const auto c = parse_command(name);
        if (!c) throw ConfigError("run.command", "unknown command " + name);
        cfg.plan.command = *c;
        if (const json* seed = s.raw("seed")) {
            if (!seed->is_number_unsigned()) throw ConfigError("run.seed", "expected a non-negative integer");
            cfg.plan.seed = seed->get<std::uint64_t>();
        }
        s.finish();
    }
    {
        Section s = root.child("output");
        s.numbers("slices_z_m", cfg.plan.slices_z);
        s.integer("csv_time_stride", cfg.plan.csv_time_stride);
        if (cfg.plan.csv_time_stride < 1) throw ConfigError("output.csv_time_stride", "must be at least 1");
        s.finish();
    }
    root.finish();

    cfg.model = validate_config(std::move(cfg.model));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), strict, path.parent_path());
}

std::string config_to_json(const RunConfig& cfg) {
    const FieldModel& m = cfg.model;
    ordered_json doc;
    doc["geometry"] = {{"half_width_A_m", m.geometry.half_width_A},
                       {"half_width_B_m", m.geometry.half_width_B},
                       {"depth_H_m", m.geometry.depth_H}};
    doc["exchanger"] = {{"side_L_E_m", m.exchanger.side_L_E},
                        {"depth_H_E_m", m.exchanger.depth_H_E},
                        {"pipe_radius_b_m", m.exchanger.pipe_radius_b}};
    if (m.homogeneous()) {
        doc["soil"] = {{"alpha_m2_per_day", m.zones.front().alpha}};
    } else {
        ordered_json zones = ordered_json::array();
        for (const auto& z : m.zones) {
            zones.push_back({{"x_min_m", z.x_min}, {"x_max_m", z.x_max}, {"alpha_m2_per_day", z.alpha}});
        }
        doc["soil"] = {{"zones", zones}};
    }
    doc["thermal"] = {{"T0_surface_K", m.thermal.T0_surface},
                      {"TH_bottom_K", m.thermal.TH_bottom},
                      {"seasonal_depth_Hbar_m", m.thermal.seasonal_depth_Hbar}};
    doc["fluid"] = {{"conductivity_k_J_per_day_m_K", m.fluid.conductivity_k},
                    {"density_rho_kg_per_m3", m.fluid.density_rho},
                    {"specific_heat_cp_J_per_kg_K", m.fluid.specific_heat_cp},
                    {"mean_velocity_U_m_per_day", m.fluid.mean_velocity_U},
                    {"inlet_temperature_Tin_K", m.fluid.inlet_temperature_Tin},
                    {"kinematic_viscosity_nu_m2_per_day", m.fluid.kinematic_viscosity_nu}};
    doc["placement"] = {{"centers_m", centers_json(m.placement)}};
    const Discretization& d = cfg.discretization;
    doc["discretization"] = {{"target_Nx", d.cells.Nx},
                             {"target_Ny", d.cells.Ny},
                             {"target_Nz", d.cells.Nz},
                             {"horizon_days", d.horizon_days},
                             {"time_step_days", d.dt_days},
                             {"allow_substeps", d.allow_substeps},
                             {"modes_R", cfg.analytic.R}};
    doc["coupling"] = {{"tolerance_K", cfg.analytic.coupling.tolerance},
                       {"max_iterations", cfg.analytic.coupling.max_iterations},
                       {"growth_bound", cfg.analytic.growth_bound},
                       {"fd_mode", fd_mode_name(cfg.fd_coupling)}};
    doc["cylinder"] = {{"beta_min", cfg.cylinder.beta_min},
                       {"beta_nodes", cfg.cylinder.beta_nodes},
                       {"max_doublings", cfg.cylinder.max_doublings},
                       {"convergence_tol_K", cfg.cylinder.convergence_tol}};
    const ObjectiveConfig& o = cfg.optimizer;
    doc["optimizer"] = {{"evaluation_time_days", o.evaluation_time},
                        {"tol1_m", o.tol1},
                        {"tol2_decades", o.tol2},
                        {"max_steps", o.max_steps},
                        {"eval_point_count", o.ring_points},
                        {"eval_point_offset_radius_m", o.offset_radius},
                        {"depth_fractions", o.depth_fractions},
                        {"max_halvings", o.max_halvings},
                        {"first_move_m", o.first_move},
                        {"min_separation_factor", o.min_separation_factor},
                        {"confine_to_zones", o.confine_to_zones}};
    doc["run"] = {{"command", to_string(cfg.plan.command)}, {"seed", cfg.plan.seed}};
    doc["output"] = {{"slices_z_m", cfg.plan.slices_z}, {"csv_time_stride", cfg.plan.csv_time_stride}};
    return doc.dump(2) + "\n";
}

std::string placement_to_json(const Placement& p) {
    ordered_json doc;
    doc["centers_m"] = centers_json(p);
    return doc.dump(2) + "\n";
}

}  // namespace geofield
