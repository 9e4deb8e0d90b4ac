#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace geofield {

/// Box (-A, A) x (-B, B) x (0, H), lengths in metres.
struct FieldGeometry {
    double half_width_A = 35.0;
    double half_width_B = 35.0;
    double depth_H = 40.0;

    bool operator==(const FieldGeometry&) const = default;
};

struct ExchangerSpec {
    double side_L_E = 0.25;
    double depth_H_E = 25.0;
    double pipe_radius_b = 0.016;

    double equivalent_radius() const { return 0.5 * side_L_E; }
    bool operator==(const ExchangerSpec&) const = default;
};

/// Slab of constant diffusivity, x in [x_min, x_max).  The last zone is closed on the right.
struct SoilZone {
    double x_min = 0.0;
    double x_max = 0.0;
    double alpha = 0.0;  // m^2/day

    bool operator==(const SoilZone&) const = default;
};

struct ThermalBoundary {
    double T0_surface = 280.0;
    double TH_bottom = 286.0;
    double seasonal_depth_Hbar = 15.0;

    bool operator==(const ThermalBoundary&) const = default;
};

/// Carrier fluid.  Units: J, m, day, kg, K.
struct FluidProps {
    double conductivity_k = 4.1412e4;
    double density_rho = 1.0411e3;
    double specific_heat_cp = 3.6915e3;
    double mean_velocity_U = 3.6288e4;
    double inlet_temperature_Tin = 280.0;
    double kinematic_viscosity_nu = 0.249;  // m^2/day

    bool operator==(const FluidProps&) const = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

/// Exchanger centres stored flat as (x0, y0, x1, y1, ...).
struct Placement {
    std::vector<double> coords;

    Placement() = default;
    explicit Placement(std::vector<double> flat);
    static Placement from_points(std::span<const Point2> points);

    std::size_t count() const { return coords.size() / 2; }
    Point2 center(std::size_t l) const { return {coords[2 * l], coords[2 * l + 1]}; }
    void set_center(std::size_t l, Point2 p);
    bool operator==(const Placement&) const = default;
};

struct FieldModel {
    FieldGeometry geometry;
    ExchangerSpec exchanger;
    std::vector<SoilZone> zones;
    ThermalBoundary thermal;
    FluidProps fluid;
    Placement placement;

    bool homogeneous() const { return zones.size() == 1; }
    std::size_t zone_index(double x) const;
    double alpha_at(double x) const { return zones[zone_index(x)].alpha; }
    double alpha_max() const;

    bool operator==(const FieldModel&) const = default;
};

/// Undisturbed soil temperature: linear from T0 to TH down to Hbar, constant below.
double undisturbed_profile(double z, const ThermalBoundary& tb, double depth_H);

/// Linear translation joining T0 at the surface to TH at the bottom.
double linear_translation_w(double z, double T0, double TH, double H);

/// Checks every invariant and normalises the zone list.  Throws ConfigError naming the key.
FieldModel validate_config(FieldModel draft);

/// Single zone spanning the whole width.
std::vector<SoilZone> uniform_soil(const FieldGeometry& geometry, double alpha);

}  // namespace geofield
