#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "geofield/exchanger.hpp"
#include "geofield/field.hpp"
#include "geofield/grid.hpp"
#include "geofield/inverse_source.hpp"
#include "geofield/kernel.hpp"
#include "geofield/model.hpp"

namespace geofield {

struct AnalyticSettings {
    int R = 64;
    CouplingSettings coupling;
    double growth_bound = 1e8;
};

/// Sources, wall history and kernel tables of one soil zone.
struct ZoneSources {
    double alpha = 0.0;
    int active_modes = 0;
    KernelMatrices km;
    SourceCoefficients sources;
    Eigen::MatrixXd wall;        // (Nz + 1) x (Nt + 1)
    ModeSeries wall_modes;       // wall minus undisturbed profile, R x (Nt + 1)
    Eigen::MatrixXd soil_modes;  // R x (Nt + 1): mode amplitudes of the soil source response
    std::vector<int> iterations;
    std::vector<double> residuals;
    double seconds = 0.0;
};

struct SourceBundle {
    TimeGrid time;
    int R = 0;
    std::vector<double> z_nodes;
    int k_exchanger = 0;
    std::vector<ZoneSources> zones;  // aligned with FieldModel::zones
};

/// Wall-side probe offset from an exchanger centre: the middle of one face.
inline Point2 wall_probe_offset(const ExchangerSpec& exch) { return {0.5 * exch.side_L_E, 0.0}; }

/// Estimates the sources of every zone, coupling the wall temperature to the soil response of an
/// isolated exchanger at each time step.
SourceBundle couple_sources(const FieldModel& model, std::span<const double> z_nodes, int k_exchanger,
                            const TimeGrid& time, const AnalyticSettings& settings);

class AnalyticEvaluator {
public:
    AnalyticEvaluator(const FieldModel& model, const SourceBundle& bundle);

    /// Translation plus soil-source term at depth z, for the zone containing x.
    double background(double x, double z, int n) const;
    /// Lag weights dt * sum_r sin(r pi z / H) T(m, r) eps_r(n - m), m = 0..n-1.
    Eigen::VectorXd lag_weights(std::size_t zone, double z, int n) const;
    double evaluate_u(double x, double y, double z, int n, const Placement& placement) const;
    /// Temperature on the tensor grid xs x ys at depth z and time node n.
    Eigen::MatrixXd slice(std::span<const double> xs, std::span<const double> ys, double z, int n,
                          const Placement& placement) const;

    const FieldModel& model() const { return model_; }
    const SourceBundle& bundle() const { return bundle_; }

private:
    const FieldModel& model_;
    const SourceBundle& bundle_;
};

double evaluate_u(double x, double y, double z, int n, const Placement& placement, const FieldModel& model,
                  const SourceBundle& bundle);

/// Analytic field on the grid's horizontal slices for every time node.  Time node 0 holds the
/// undisturbed profile.
TemperatureField simulate_analytic(const FieldModel& model, const SpaceTimeGrid& grid, const SourceBundle& bundle,
                                   const Placement& placement, std::span<const double> slice_z);

/// err^n = sum |a - b| / sum |a| over the slice, for n = 1..N_t (entry n - 1).
std::vector<double> relative_error(const TemperatureField& a, const TemperatureField& b, double z);
std::vector<double> relative_error(const FieldSlice& a, const FieldSlice& b);

}  // namespace geofield
