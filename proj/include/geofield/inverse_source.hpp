#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "geofield/grid.hpp"
#include "geofield/kernel.hpp"
#include "geofield/model.hpp"

namespace geofield {

/// Per-mode time series: coeffs(r - 1, n) at time node t_n.
struct ModeSeries {
    Eigen::MatrixXd coeffs;
};

/// Exchanger and soil source coefficients: eps(r - 1, p - 1) = eps_r(tau_p).
struct SourceCoefficients {
    int R = 0;
    int Nt = 0;
    Eigen::MatrixXd eps;
    Eigen::MatrixXd sig;
    std::vector<std::string> warnings;
};

/// Sine-series coefficients (2/H) int_0^H f(z) sin(r pi z / H) dz from uniform samples that include
/// both end points.  Equivalent to the trapezoid rule; computed with a type-I discrete sine transform.
/// Modes beyond the sample count are the aliased trapezoid values.
std::vector<double> fourier_sine_coeffs(std::span<const double> z_nodes, std::span<const double> samples, int R);

/// Sine coefficients of the undisturbed profile minus the linear translation.
std::vector<double> soil_coeffs_closed_form(const ThermalBoundary& tb, double H, int R);

struct VolterraOptions {
    double growth_bound = 1e8;
    int mode = 0;  // reported in diagnostics
};

/// Solves dt * sum_{p <= n} kernel[n - p] x_p = target_n for n = 1..N by forward substitution.
/// target[n - 1] holds the right-hand side at t_n.  Growth beyond the bound is appended to `warnings`.
std::vector<double> solve_volterra(std::span<const double> target, std::span<const double> kernel_by_lag, double dt,
                                   const VolterraOptions& options = {}, std::vector<std::string>* warnings = nullptr);

/// Lower-triangular Toeplitz systems for all modes at once, grown one time row at a time.
/// The newest row can be re-solved cheaply while the right-hand side is still being iterated.
class IncrementalVolterra {
public:
    IncrementalVolterra(const Eigen::MatrixXd& kernel, double dt, int active_modes, double growth_bound = 1e8);

    /// Opens row n = rows() + 1 and solves it for `target` (one value per mode).
    void push(std::span<const double> target);
    /// Re-solves the newest row for a new right-hand side.
    void revise_last(std::span<const double> target);

    int rows() const { return rows_; }
    int active_modes() const { return active_; }
    const Eigen::MatrixXd& solution() const { return x_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    void solve_row(std::span<const double> target);

    const Eigen::MatrixXd& kernel_;
    double dt_;
    int active_;
    double growth_bound_;
    int rows_ = 0;
    Eigen::MatrixXd x_;
    Eigen::VectorXd history_;
    std::vector<std::string> warnings_;
};

/// Wall-minus-undisturbed sine coefficients for every time column of a wall profile.
/// wall(k, n) is T_E at z node k and time node n.  Modes above active_modes are zero.
ModeSeries wall_mode_series(const FieldModel& model, std::span<const double> z_nodes, const Eigen::MatrixXd& wall,
                            int R, int active_modes);

/// Solves both source families for a known wall history.
SourceCoefficients estimate_sources(const FieldModel& model, std::span<const double> z_nodes,
                                    const KernelMatrices& km, const Eigen::MatrixXd& wall, int active_modes);

/// Largest mode resolved by a vertical grid with Nz cells.
inline int resolved_modes(int R, int Nz) { return R < Nz - 1 ? R : Nz - 1; }

}  // namespace geofield
