#include "geofield/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

void require_positive(double value, const char* key) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(key, "must be a positive finite number, got " + std::to_string(value));
    }
}

constexpr double kZoneTolerance = 1e-9;

}  // namespace

Placement::Placement(std::vector<double> flat) : coords(std::move(flat)) {
    if (coords.size() % 2 != 0) {
        throw ConfigError("placement.centers_m", "coordinate list must hold (x, y) pairs");
    }
}

Placement Placement::from_points(std::span<const Point2> points) {
    std::vector<double> flat;
    flat.reserve(2 * points.size());
    for (const auto& p : points) {
        flat.push_back(p.x);
        flat.push_back(p.y);
    }
    return Placement(std::move(flat));
}

void Placement::set_center(std::size_t l, Point2 p) {
    coords[2 * l] = p.x;
    coords[2 * l + 1] = p.y;
}

std::size_t FieldModel::zone_index(double x) const {
    for (std::size_t i = 0; i + 1 < zones.size(); ++i) {
        if (x < zones[i].x_max) return i;
    }
    return zones.empty() ? 0 : zones.size() - 1;
}

double FieldModel::alpha_max() const {
    double m = 0.0;
    for (const auto& z : zones) m = std::max(m, z.alpha);
    return m;
}

double undisturbed_profile(double z, const ThermalBoundary& tb, double depth_H) {
    if (!(z >= 0.0 && z <= depth_H)) {
        throw std::out_of_range("depth " + std::to_string(z) + " outside [0, H]");
    }
    if (z <= tb.seasonal_depth_Hbar) {
        return (tb.TH_bottom - tb.T0_surface) * z / tb.seasonal_depth_Hbar + tb.T0_surface;
    }
    return tb.TH_bottom;
}

double linear_translation_w(double z, double T0, double TH, double H) {
    if (!(z >= 0.0 && z <= H)) {
        throw std::out_of_range("depth " + std::to_string(z) + " outside [0, H]");
    }
    return z / H * (TH - T0) + T0;
}

std::vector<SoilZone> uniform_soil(const FieldGeometry& geometry, double alpha) {
    return {SoilZone{-geometry.half_width_A, geometry.half_width_A, alpha}};
}

FieldModel validate_config(FieldModel m) {
    const auto& g = m.geometry;
    require_positive(g.half_width_A, "geometry.half_width_A_m");
    require_positive(g.half_width_B, "geometry.half_width_B_m");
    require_positive(g.depth_H, "geometry.depth_H_m");

    const auto& e = m.exchanger;
    require_positive(e.side_L_E, "exchanger.side_L_E_m");
    require_positive(e.depth_H_E, "exchanger.depth_H_E_m");
    require_positive(e.pipe_radius_b, "exchanger.pipe_radius_b_m");
    if (!(e.depth_H_E < g.depth_H)) {
        throw ConfigError("exchanger.depth_H_E_m", "exchanger depth must be smaller than the domain depth H");
    }
    if (!(e.pipe_radius_b < 0.5 * e.side_L_E)) {
        throw ConfigError("exchanger.pipe_radius_b_m", "pipe radius must be smaller than half the exchanger side");
    }

    const auto& tb = m.thermal;
    require_positive(tb.T0_surface, "thermal.T0_surface_K");
    require_positive(tb.TH_bottom, "thermal.TH_bottom_K");
    require_positive(tb.seasonal_depth_Hbar, "thermal.seasonal_depth_Hbar_m");
    if (tb.seasonal_depth_Hbar > g.depth_H) {
        throw ConfigError("thermal.seasonal_depth_Hbar_m", "must not exceed the domain depth H");
    }

    const auto& f = m.fluid;
    require_positive(f.conductivity_k, "fluid.conductivity_k_J_per_day_m_K");
    require_positive(f.density_rho, "fluid.density_rho_kg_per_m3");
    require_positive(f.specific_heat_cp, "fluid.specific_heat_cp_J_per_kg_K");
    require_positive(f.mean_velocity_U, "fluid.mean_velocity_U_m_per_day");
    require_positive(f.inlet_temperature_Tin, "fluid.inlet_temperature_Tin_K");
    require_positive(f.kinematic_viscosity_nu, "fluid.kinematic_viscosity_nu_m2_per_day");

    if (m.zones.empty()) throw ConfigError("soil.zones", "at least one soil zone is required");
    std::sort(m.zones.begin(), m.zones.end(),
              [](const SoilZone& a, const SoilZone& b) { return a.x_min < b.x_min; });
    for (std::size_t i = 0; i < m.zones.size(); ++i) {
        const auto& z = m.zones[i];
        const std::string key = "soil.zones[" + std::to_string(i) + "]";
        if (!(z.alpha >= 0.0) || !std::isfinite(z.alpha)) {
            throw ConfigError(key + ".alpha_m2_per_day", "diffusivity must be non-negative");
        }
        if (!(z.x_max > z.x_min)) throw ConfigError(key, "empty x interval");
        if (i > 0) {
            const double prev = m.zones[i - 1].x_max;
            if (z.x_min < prev - kZoneTolerance) throw ConfigError(key, "soil zones overlap");
            if (z.x_min > prev + kZoneTolerance) throw ConfigError(key, "gap between soil zones");
            m.zones[i].x_min = prev;
        }
    }
    if (std::abs(m.zones.front().x_min + g.half_width_A) > kZoneTolerance ||
        std::abs(m.zones.back().x_max - g.half_width_A) > kZoneTolerance) {
        throw ConfigError("soil.zones", "zones must cover [-A, A] exactly");
    }
    m.zones.front().x_min = -g.half_width_A;
    m.zones.back().x_max = g.half_width_A;

    if (m.placement.coords.size() % 2 != 0) {
        throw ConfigError("placement.centers_m", "coordinate list must hold (x, y) pairs");
    }
    for (std::size_t l = 0; l < m.placement.count(); ++l) {
        const Point2 c = m.placement.center(l);
        if (!(std::abs(c.x) <= g.half_width_A && std::abs(c.y) <= g.half_width_B)) {
            throw ConfigError("placement.centers_m[" + std::to_string(l) + "]",
                              "exchanger centre outside the field");
        }
    }

    if (std::abs(undisturbed_profile(0.0, tb, g.depth_H) - tb.T0_surface) > 1e-12 ||
        std::abs(undisturbed_profile(g.depth_H, tb, g.depth_H) - tb.TH_bottom) > 1e-12) {
        throw ConfigError("thermal", "initial profile incompatible with surface boundary data");
    }
    return m;
}

}  // namespace geofield
