#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "geofield/analytic_solver.hpp"
#include "geofield/cylinder.hpp"
#include "geofield/exchanger.hpp"
#include "geofield/fd_solver.hpp"
#include "geofield/grid.hpp"
#include "geofield/optimizer.hpp"

namespace geofield {

/// Machine-readable record of one run.  Sections keep insertion order.
class RunReport {
public:
    using Json = nlohmann::ordered_json;

    RunReport();

    void set(const std::string& section, Json value) { doc_[section] = std::move(value); }
    const Json& doc() const { return doc_; }

    void add_timing(const std::string& phase, double seconds);
    void add_output(const std::filesystem::path& file);
    void add_warning(const std::string& text);
    void fail(const std::string& kind, const std::string& reason);

    std::string dump() const { return doc_.dump(2) + "\n"; }

private:
    Json doc_;
};

RunReport::Json grid_summary(const SpaceTimeGrid& grid);
RunReport::Json cfl_summary(const CflResult& cfl, int substeps);
RunReport::Json convection_summary(const ConvectionParams& params);
RunReport::Json source_summary(const SourceBundle& bundle);
RunReport::Json fd_summary(const FdDiagnostics& diag);
RunReport::Json cylinder_summary(const CylindricalSolution& sol);
RunReport::Json error_summary(double z, const std::vector<double>& errors);
RunReport::Json optimizer_summary(const OptimizationTrace& trace);

}  // namespace geofield
