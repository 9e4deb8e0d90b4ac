#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "geofield/analytic_solver.hpp"
#include "geofield/field.hpp"
#include "geofield/model.hpp"

namespace geofield {

/// J0(beta r / a) Y0(beta) - Y0(beta r / a) J0(beta), for r >= a.
double radial_kernel(double beta, double r, double a);

struct CylinderSettings {
    double beta_min = 1e-6;
    int beta_nodes = 2000;
    int max_doublings = 4;
    double convergence_tol = 1e-4;  // K, largest change allowed when the beta grid is doubled
};

/// Temperature around a single circular exchanger of radius a = L_E / 2.
struct CylindricalSolution {
    double radius_a = 0.0;
    double beta_max = 0.0;
    double beta_step = 0.0;
    int beta_nodes = 0;
    double last_refinement_change = 0.0;  // K
    std::vector<double> radii;
    std::vector<double> z;
    std::vector<Eigen::MatrixXd> values;  // per depth: radii x (Nt + 1)
};

/// Series-integral solution driven by the wall history of `zone` (sine coefficients of wall minus
/// undisturbed profile).  Radii up to a take the wall temperature; depths must be z nodes.
CylindricalSolution solve_cylindrical(const FieldModel& model, const ZoneSources& zone, const TimeGrid& time,
                                      std::span<const double> z_nodes, std::span<const double> radii,
                                      std::span<const double> depths, const CylinderSettings& settings = {});

/// Solves on the distinct radii of the tensor grid xs x ys around `center` and returns slices.
TemperatureField cylindrical_field(const FieldModel& model, const ZoneSources& zone, const TimeGrid& time,
                                   std::span<const double> z_nodes, std::span<const double> xs,
                                   std::span<const double> ys, Point2 center, std::span<const double> depths,
                                   const CylinderSettings& settings = {}, CylindricalSolution* raw = nullptr);

}  // namespace geofield
