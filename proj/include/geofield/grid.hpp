#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "geofield/model.hpp"

namespace geofield {

enum class NodeClass : std::uint8_t { Interior = 0, Surface = 1, Exchanger = 2 };

/// Nearest integer, ties away from zero.
long round_nearest(double a);

struct TimeGrid {
    double dt = 0.8;
    int steps = 225;  // N_t
    double horizon() const { return dt * steps; }
    double t(int n) const { return n * dt; }
    /// Midpoint source node tau_p = (p - 0.5) dt, p = 1..N_t.
    double tau(int p) const { return (p - 0.5) * dt; }
};

/// Builds a time grid whose step divides the horizon exactly and does not exceed dt_target.
TimeGrid make_time_grid(double horizon, double dt_target);

struct GridTargets {
    int Nx = 140;
    int Ny = 140;
    int Nz = 80;
};

/// Node block [i0, i1] x [j0, j1] x [1, k_bottom] occupied by one exchanger.
struct Footprint {
    int i0 = 0, i1 = 0;
    int j0 = 0, j1 = 0;
    int k_bottom = 0;
};

struct SnapRecord {
    Point2 requested;
    Point2 snapped;
    double displacement = 0.0;
};

class SpaceTimeGrid {
public:
    int Nx = 0, Ny = 0, Nz = 0;
    double hx = 0.0, hy = 0.0, hz = 0.0;
    std::vector<double> x, y, z;
    int ne_x = 1, ne_y = 1;
    int k_exchanger = 0;  // z index of the exchanger bottom
    std::vector<Footprint> footprints;
    std::vector<SnapRecord> snaps;
    Placement snapped_placement;
    TimeGrid time;

    std::size_t nx1() const { return static_cast<std::size_t>(Nx) + 1; }
    std::size_t ny1() const { return static_cast<std::size_t>(Ny) + 1; }
    std::size_t nz1() const { return static_cast<std::size_t>(Nz) + 1; }
    std::size_t node_count() const { return nx1() * ny1() * nz1(); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny1() + static_cast<std::size_t>(j)) * nx1() +
               static_cast<std::size_t>(i);
    }

    NodeClass node_class(int i, int j, int k) const { return classes_[index(i, j, k)]; }
    /// Exchanger owning the node, or -1.
    int owner(int i, int j, int k) const { return owners_[index(i, j, k)]; }

    std::vector<std::array<int, 3>> interior_set() const { return collect(NodeClass::Interior); }
    std::vector<std::array<int, 3>> surface_set() const { return collect(NodeClass::Surface); }
    std::vector<std::array<int, 3>> exchanger_set() const { return collect(NodeClass::Exchanger); }

    /// Nearest z index for a depth lying on a grid plane (within 1e-9 m).
    int z_index(double depth) const;

    friend SpaceTimeGrid build_adapted_grid(const FieldGeometry&, const ExchangerSpec&, const Placement&,
                                            GridTargets, TimeGrid);

private:
    std::vector<NodeClass> classes_;
    std::vector<std::int16_t> owners_;
    std::vector<std::array<int, 3>> collect(NodeClass c) const;
};

/// Spatial grid adapted to the exchanger cross section, with snapped centres and node classes.
SpaceTimeGrid build_adapted_grid(const FieldGeometry& geom, const ExchangerSpec& exch, const Placement& placement,
                                 GridTargets targets, TimeGrid time);

struct CflResult {
    bool pass = false;
    double value = 0.0;         // alpha dt (1/hx^2 + 1/hy^2 + 1/hz^2)
    double suggested_dt = 0.0;  // largest stable step
};

CflResult cfl_check(const SpaceTimeGrid& grid, double alpha_max);
CflResult cfl_check(double hx, double hy, double hz, double dt, double alpha_max);

/// Minimum number of interior nodes required between two exchanger footprints.
inline constexpr int kMinSeparationNodes = 5;

}  // namespace geofield
