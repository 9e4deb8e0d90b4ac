#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geofield/analytic_solver.hpp"
#include "geofield/cylinder.hpp"
#include "geofield/fd_solver.hpp"
#include "geofield/grid.hpp"
#include "geofield/model.hpp"
#include "geofield/optimizer.hpp"

namespace geofield {

enum class Command { SimulateFd, SimulateAnalytic, Compare, Optimize, ValidateSingle };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct Discretization {
    GridTargets cells;
    double horizon_days = 180.0;
    double dt_days = 0.8;
    bool allow_substeps = true;  // FD splits a step that violates the stability bound
};

struct RunPlan {
    Command command = Command::Compare;
    std::vector<double> slices_z{20.0};  // depths of the horizontal slices written out, m
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;
    int csv_time_stride = 1;  // write every k-th time node
};

struct RunConfig {
    FieldModel model;
    RunPlan plan;
    Discretization discretization;
    AnalyticSettings analytic;
    FdCoupling fd_coupling = FdCoupling::FixedPoint;
    CylinderSettings cylinder;
    ObjectiveConfig optimizer;
    std::vector<std::string> warnings;  // unknown keys when not strict
};

/// Parses a JSON document.  Unknown keys throw ConfigError when strict, otherwise they are
/// collected in RunConfig::warnings.  Relative placement files resolve against `base_dir`.
RunConfig parse_config(const std::string& text, bool strict = true,
                       const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path, bool strict = true);

/// The whole configuration as a JSON document that parse_config accepts.
std::string config_to_json(const RunConfig& cfg);

/// {"centers_m": [[x, y], ...]}, the form accepted under the "placement" key.
std::string placement_to_json(const Placement& p);

}  // namespace geofield
