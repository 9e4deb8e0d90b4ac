#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "geofield/exchanger.hpp"
#include "geofield/field.hpp"
#include "geofield/grid.hpp"
#include "geofield/model.hpp"

namespace geofield {

/// Stencil weights alpha dt / h^2 per x column, so heterogeneous soil costs nothing extra.
struct FdOperator {
    double dt = 0.0;
    std::vector<double> wx, wy, wz;
    double cfl_value = 0.0;
};

FdOperator make_fd_operator(const SpaceTimeGrid& grid, const FieldModel& model, double dt);

/// One explicit Euler step.  `surface` holds the undisturbed profile at every z node and `wall`
/// is (Nz + 1) x N_E with the wall temperature of each exchanger.  Throws NumericError if the
/// operator violates the stability bound or the new state is not finite.
void step_explicit_euler(std::span<const double> current, std::span<double> next, const SpaceTimeGrid& grid,
                         const FdOperator& op, std::span<const double> surface, const Eigen::MatrixXd& wall,
                         int step_index);

enum class FdCoupling {
    SharedProfile,  // wall history supplied by the caller (one matrix per soil zone)
    FixedPoint,     // iterate on the wall temperature every step
    Lagged          // predictor only
};

struct FdOptions {
    std::vector<double> slice_z;
    FdCoupling coupling = FdCoupling::FixedPoint;
    const std::vector<Eigen::MatrixXd>* zone_walls = nullptr;
    CouplingSettings coupling_settings;
    bool allow_substeps = true;
    std::function<void(int, std::span<const double>)> observer;
};

struct FdDiagnostics {
    int substeps = 1;
    CflResult cfl;
    std::vector<int> coupling_iterations;
    double seconds = 0.0;
};

/// Marches the boundary-value problem from the undisturbed state over the whole time grid,
/// storing the requested horizontal slices at every time node.
TemperatureField simulate_fd(const FieldModel& model, const SpaceTimeGrid& grid, const FdOptions& options,
                             FdDiagnostics* diagnostics = nullptr);

}  // namespace geofield
