#include "geofield/exchanger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

/// Exact integral of c u(s) exp(-c (h - s)) over one cell for u linear between its end values.
/// `near` weights the value at the end being computed, `far` the value at the start.
struct StepWeights {
    double decay;
    double near;
    double far;
};

StepWeights step_weights(double c, double h) {
    const double x = c * h;
    const double decay = std::exp(-x);
    const double one_minus = -std::expm1(-x);
    const double ratio = x > 1e-8 ? one_minus / x : 1.0 - 0.5 * x;
    return {decay, 1.0 - ratio, ratio - decay};
}

}  // namespace

double reynolds_number(const FluidProps& fluid, double pipe_radius_b) {
    return 2.0 * pipe_radius_b * fluid.mean_velocity_U / fluid.kinematic_viscosity_nu;
}

double prandtl_number(const FluidProps& fluid) {
    return fluid.kinematic_viscosity_nu * fluid.density_rho * fluid.specific_heat_cp / fluid.conductivity_k;
}

double nusselt(double reynolds, double prandtl) {
    const double lead = std::pow(reynolds, 0.87);
    if (!(lead > 280.0) || !(prandtl > 0.0)) {
        throw ConfigError("fluid.mean_velocity_U_m_per_day",
                          "Reynolds number " + std::to_string(reynolds) +
                              " is outside the turbulent range of the Nusselt correlation (need Re^0.87 > 280, "
                              "i.e. Re above about 650); raise the flow velocity or lower the viscosity");
    }
    return 0.012 * (lead - 280.0) * std::pow(prandtl, 0.4);
}

ConvectionParams convection_params(const FluidProps& fluid, const ExchangerSpec& exch) {
    ConvectionParams p;
    p.reynolds = reynolds_number(fluid, exch.pipe_radius_b);
    p.prandtl = prandtl_number(fluid);
    p.nusselt = nusselt(p.reynolds, p.prandtl);
    const double b = exch.pipe_radius_b;
    p.decay_c = fluid.conductivity_k * p.nusselt /
                (b * b * fluid.density_rho * fluid.specific_heat_cp * fluid.mean_velocity_U);
    return p;
}

std::vector<double> descending_profile(std::span<const double> z, std::span<const double> u, double c, double T_in) {
    const std::size_t n = z.size();
    if (u.size() < n) throw NumericError("descending_profile: soil column shorter than z nodes");
    std::vector<double> T(n);
    if (n == 0) return T;
    T[0] = T_in;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const StepWeights w = step_weights(c, z[k + 1] - z[k]);
        T[k + 1] = w.decay * T[k] + w.near * u[k + 1] + w.far * u[k];
    }
    return T;
}

std::vector<double> ascending_profile(std::span<const double> z, std::span<const double> u, double c,
                                      double T_bottom) {
    const std::size_t n = z.size();
    if (u.size() < n) throw NumericError("ascending_profile: soil column shorter than z nodes");
    std::vector<double> T(n);
    if (n == 0) return T;
    T[n - 1] = T_bottom;
    for (std::size_t k = n - 1; k > 0; --k) {
        const StepWeights w = step_weights(c, z[k] - z[k - 1]);
        T[k - 1] = w.decay * T[k] + w.near * u[k - 1] + w.far * u[k];
    }
    return T;
}

std::vector<double> wall_profile(std::span<const double> descending, std::span<const double> ascending,
                                 double T_fE, const ThermalBoundary& tb, std::span<const double> z_all,
                                 int k_exchanger, double H) {
    std::vector<double> wall(z_all.size());
    const double HE = z_all[k_exchanger];
    for (std::size_t k = 0; k < z_all.size(); ++k) {
        if (static_cast<int>(k) <= k_exchanger) {
            wall[k] = 0.5 * (descending[k] + ascending[k]);
        } else {
            wall[k] = (z_all[k] - HE) * (tb.TH_bottom - T_fE) / (H - HE) + T_fE;
        }
    }
    return wall;
}

WallModel::WallModel(const FieldModel& model, std::span<const double> z_nodes, int k_exchanger)
    : params_(convection_params(model.fluid, model.exchanger)),
      T_in_(model.fluid.inlet_temperature_Tin),
      thermal_(model.thermal),
      H_(model.geometry.depth_H),
      k_exchanger_(k_exchanger),
      z_all_(z_nodes.begin(), z_nodes.end()),
      z_pipe_(z_nodes.begin(), z_nodes.begin() + k_exchanger + 1) {}

Eigen::VectorXd WallModel::operator()(std::span<const double> u) const {
    const auto down = descending_profile(z_pipe_, u, params_.decay_c, T_in_);
    const double T_fE = down.back();
    const auto up = ascending_profile(z_pipe_, u, params_.decay_c, T_fE);
    const auto wall = wall_profile(down, up, T_fE, thermal_, z_all_, k_exchanger_, H_);
    return Eigen::Map<const Eigen::VectorXd>(wall.data(), static_cast<Eigen::Index>(wall.size()));
}

CouplingOutcome coupled_step(std::span<const double> u_previous, const WallModel& wall_model,
                             const AdvanceFn& advance, const CouplingSettings& settings) {
    CouplingOutcome out;
    out.wall = wall_model(u_previous);
    if (settings.max_iterations <= 0) {
        advance(out.wall);
        return out;
    }
    for (int it = 1;; ++it) {
        const auto u = advance(out.wall);
        Eigen::VectorXd next = wall_model(u);
        out.residual = (next - out.wall).cwiseAbs().maxCoeff();
        out.residuals.push_back(out.residual);
        out.wall = std::move(next);
        out.iterations = it;
        if (out.residual <= settings.tolerance) break;
        if (it >= settings.max_iterations) {
            throw NumericError("wall temperature fixed point did not converge in " + std::to_string(it) +
                               " iterations (residual " + std::to_string(out.residual) + " K)");
        }
    }
    advance(out.wall);
    return out;
}

}  // namespace geofield
