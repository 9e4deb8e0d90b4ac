#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

#include "geofield/model.hpp"

namespace geofield {

struct ConvectionParams {
    double nusselt = 0.0;
    double decay_c = 0.0;  // 1/m
    double reynolds = 0.0;
    double prandtl = 0.0;
};

double reynolds_number(const FluidProps& fluid, double pipe_radius_b);
double prandtl_number(const FluidProps& fluid);

/// Turbulent pipe-flow correlation 0.012 (Re^0.87 - 280) Pr^0.4.  Throws outside its validity range.
double nusselt(double reynolds, double prandtl);

ConvectionParams convection_params(const FluidProps& fluid, const ExchangerSpec& exch);

/// Fluid temperature in the descending pipe at each z node (z[0] = 0), given the wall-side soil
/// temperature u at the same nodes.  u is taken piecewise linear and the convolution integrated exactly.
std::vector<double> descending_profile(std::span<const double> z, std::span<const double> u, double c, double T_in);

/// Fluid temperature in the ascending pipe, integrated upward from the bottom value at z.back().
std::vector<double> ascending_profile(std::span<const double> z, std::span<const double> u, double c,
                                      double T_bottom);

/// Wall temperature over all z nodes: branch average down to H_E, then a linear join from the
/// bottom fluid temperature to TH at the domain floor.
std::vector<double> wall_profile(std::span<const double> descending, std::span<const double> ascending,
                                 double T_fE, const ThermalBoundary& tb, std::span<const double> z_all,
                                 int k_exchanger, double H);

/// Maps a wall-side soil temperature column to the wall temperature column.
class WallModel {
public:
    WallModel(const FieldModel& model, std::span<const double> z_nodes, int k_exchanger);

    /// u holds at least k_exchanger + 1 values (z nodes 0..k_exchanger).
    Eigen::VectorXd operator()(std::span<const double> u) const;

    const ConvectionParams& params() const { return params_; }
    int k_exchanger() const { return k_exchanger_; }

private:
    ConvectionParams params_;
    double T_in_;
    ThermalBoundary thermal_;
    double H_;
    int k_exchanger_;
    std::vector<double> z_all_;
    std::vector<double> z_pipe_;
};

struct CouplingSettings {
    double tolerance = 1e-6;  // K, infinity norm
    int max_iterations = 50;  // 0 = lagged coupling
};

struct CouplingOutcome {
    Eigen::VectorXd wall;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residuals;
};

/// Applies a wall column to the soil model for the new time level and returns the wall-side soil
/// temperature there (nodes 0..k_exchanger).
using AdvanceFn = std::function<std::vector<double>(const Eigen::VectorXd& wall)>;

/// Fixed-point coupling for one time step: predictor from the previous soil state, then alternating
/// soil and wall updates until the wall changes by less than the tolerance.  The last call to
/// `advance` always receives the returned wall.
CouplingOutcome coupled_step(std::span<const double> u_previous, const WallModel& wall_model,
                             const AdvanceFn& advance, const CouplingSettings& settings);

}  // namespace geofield
