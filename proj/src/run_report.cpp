#include "geofield/run_report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geofield {

using Json = RunReport::Json;

RunReport::RunReport() {
    doc_["status"] = "ok";
    doc_["timings_s"] = Json::object();
    doc_["outputs"] = Json::array();
    doc_["warnings"] = Json::array();
}

void RunReport::add_timing(const std::string& phase, double seconds) { doc_["timings_s"][phase] = seconds; }

void RunReport::add_output(const std::filesystem::path& file) { doc_["outputs"].push_back(file.filename().string()); }

void RunReport::add_warning(const std::string& text) { doc_["warnings"].push_back(text); }

void RunReport::fail(const std::string& kind, const std::string& reason) {
    doc_["status"] = "failed";
    doc_["failure"] = {{"kind", kind}, {"reason", reason}};
}

Json grid_summary(const SpaceTimeGrid& grid) {
    Json snaps = Json::array();
    double worst = 0.0;
    for (const auto& s : grid.snaps) {
        snaps.push_back({{"requested", {s.requested.x, s.requested.y}},
                         {"snapped", {s.snapped.x, s.snapped.y}},
                         {"displacement_m", s.displacement}});
        worst = std::max(worst, s.displacement);
    }
    return {{"cells", {grid.Nx, grid.Ny, grid.Nz}},
            {"steps_m", {grid.hx, grid.hy, grid.hz}},
            {"exchanger_nodes", {grid.ne_x, grid.ne_y}},
            {"exchanger_bottom_index", grid.k_exchanger},
            {"time_step_days", grid.time.dt},
            {"time_steps", grid.time.steps},
            {"max_snap_displacement_m", worst},
            {"snaps", snaps}};
}

Json cfl_summary(const CflResult& cfl, int substeps) {
    return {{"value", cfl.value},
            {"limit", 0.5},
            {"margin", 0.5 - cfl.value},
            {"pass", cfl.pass},
            {"suggested_dt_days", cfl.suggested_dt},
            {"substeps", substeps}};
}

Json convection_summary(const ConvectionParams& params) {
    return {{"reynolds", params.reynolds},
            {"prandtl", params.prandtl},
            {"nusselt", params.nusselt},
            {"decay_per_m", params.decay_c}};
}

Json source_summary(const SourceBundle& bundle) {
    Json zones = Json::array();
    for (const auto& z : bundle.zones) {
        const int steps = static_cast<int>(z.iterations.size());
        const int max_it = steps ? *std::max_element(z.iterations.begin(), z.iterations.end()) : 0;
        const double mean_it =
            steps ? std::accumulate(z.iterations.begin(), z.iterations.end(), 0.0) / steps : 0.0;
        const double max_res = z.residuals.empty() ? 0.0 : *std::max_element(z.residuals.begin(), z.residuals.end());
        zones.push_back({{"alpha_m2_per_day", z.alpha},
                         {"active_modes", z.active_modes},
                         {"coupling_iterations_first_step", steps ? z.iterations.front() : 0},
                         {"coupling_iterations_max", max_it},
                         {"coupling_iterations_mean", mean_it},
                         {"coupling_residual_max_K", max_res},
                         {"source_solve_s", z.seconds},
                         {"source_solve_per_step_s", steps ? z.seconds / steps : 0.0},
                         {"warnings", z.sources.warnings}});
    }
    return {{"modes_R", bundle.R}, {"zones", zones}};
}

Json fd_summary(const FdDiagnostics& diag) {
    Json out = {{"substeps", diag.substeps}, {"march_s", diag.seconds}};
    const auto& it = diag.coupling_iterations;
    if (!it.empty() && *std::max_element(it.begin(), it.end()) > 0) {
        out["coupling_iterations_max"] = *std::max_element(it.begin(), it.end());
        out["coupling_iterations_mean"] = std::accumulate(it.begin(), it.end(), 0.0) / it.size();
    }
    return out;
}

Json cylinder_summary(const CylindricalSolution& sol) {
    return {{"radius_a_m", sol.radius_a},
            {"beta_max", sol.beta_max},
            {"beta_step", sol.beta_step},
            {"beta_nodes", sol.beta_nodes},
            {"last_refinement_change_K", sol.last_refinement_change},
            {"radii", sol.radii.size()}};
}

Json error_summary(double z, const std::vector<double>& errors) {
    if (errors.empty()) return {{"z_m", z}};
    return {{"z_m", z},
            {"err_first", errors.front()},
            {"err_last", errors.back()},
            {"err_max", *std::max_element(errors.begin(), errors.end())}};
}

Json optimizer_summary(const OptimizationTrace& trace) {
    Json centers = Json::array();
    const auto& p = trace.final_placement;
    for (std::size_t l = 0; l < p.count(); ++l) centers.push_back({p.center(l).x, p.center(l).y});
    const double decades = (trace.initial_objective > 0.0 && trace.final_objective > 0.0)
                               ? std::log10(trace.initial_objective / trace.final_objective)
                               : 0.0;
    return {{"iterations", trace.iterations.size()},
            {"stop_reason", to_string(trace.reason)},
            {"diagnostic", trace.diagnostic},
            {"objective_initial", trace.initial_objective},
            {"objective_final", trace.final_objective},
            {"log10_decrease", decades},
            {"final_centers_m", centers},
            {"optimize_s", trace.seconds}};
}

}  // namespace geofield
