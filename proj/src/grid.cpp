#include "geofield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

long round_nearest(double a) { return std::lround(a); }

TimeGrid make_time_grid(double horizon, double dt_target) {
    if (!(horizon > 0.0)) throw ConfigError("discretization.horizon_days", "horizon must be positive");
    if (!(dt_target > 0.0)) throw ConfigError("discretization.time_step_days", "time step must be positive");
    TimeGrid tg;
    tg.steps = static_cast<int>(std::ceil(horizon / dt_target - 1e-9));
    tg.dt = horizon / tg.steps;
    return tg;
}

namespace {

struct AxisLayout {
    int cells = 0;
    double step = 0.0;
    int nodes_per_exchanger = 1;
};

AxisLayout adapt_axis(double half_width, int target, double side, const char* key) {
    if (target < 2) throw ConfigError(key, "partition count must be at least 2");
    AxisLayout a;
    const double h0 = 2.0 * half_width / target;
    a.nodes_per_exchanger = static_cast<int>(round_nearest(side / h0)) + 1;
    a.cells = static_cast<int>(round_nearest(2.0 * half_width / h0));
    a.step = 2.0 * half_width / a.cells;
    return a;
}

// Lower node index of a footprint `width` cells wide centred as close as possible to `center`.
// Ties are broken away from the domain midline so mirrored placements snap to mirrored nodes.
int snap_lower_index(double center, double half_width, double step, int cells, int width, const char* key) {
    const double s = (center - 0.5 * width * step + half_width) / step;
    const double mid = 0.5 * (cells - width);
    const double r = (s >= mid) ? std::floor(s + 0.5) : std::ceil(s - 0.5);
    const int lo = 1;
    const int hi = cells - 1 - width;
    if (hi < lo) throw ConfigError(key, "grid too coarse to hold an exchanger");
    return std::clamp(static_cast<int>(r), lo, hi);
}

}  // namespace

int SpaceTimeGrid::z_index(double depth) const {
    const double s = depth / hz;
    const long k = round_nearest(s);
    if (std::abs(s - static_cast<double>(k)) * hz > 1e-9 || k < 0 || k > Nz) {
        throw ConfigError("output.slices_z_m", "depth " + std::to_string(depth) + " m is not a grid plane");
    }
    return static_cast<int>(k);
}

std::vector<std::array<int, 3>> SpaceTimeGrid::collect(NodeClass c) const {
    std::vector<std::array<int, 3>> out;
    for (int k = 0; k <= Nz; ++k)
        for (int j = 0; j <= Ny; ++j)
            for (int i = 0; i <= Nx; ++i)
                if (classes_[index(i, j, k)] == c) out.push_back({i, j, k});
    return out;
}

SpaceTimeGrid build_adapted_grid(const FieldGeometry& geom, const ExchangerSpec& exch, const Placement& placement,
                                 GridTargets targets, TimeGrid time) {
    if (targets.Nz < 2) throw ConfigError("discretization.target_Nz", "partition count must be at least 2");
    SpaceTimeGrid g;
    const AxisLayout ax = adapt_axis(geom.half_width_A, targets.Nx, exch.side_L_E, "discretization.target_Nx");
    const AxisLayout ay = adapt_axis(geom.half_width_B, targets.Ny, exch.side_L_E, "discretization.target_Ny");
    g.Nx = ax.cells;
    g.Ny = ay.cells;
    g.Nz = targets.Nz;
    g.hx = ax.step;
    g.hy = ay.step;
    g.hz = geom.depth_H / g.Nz;
    g.ne_x = ax.nodes_per_exchanger;
    g.ne_y = ay.nodes_per_exchanger;
    g.time = time;

    g.x.resize(g.nx1());
    g.y.resize(g.ny1());
    g.z.resize(g.nz1());
    for (int i = 0; i <= g.Nx; ++i) g.x[i] = -geom.half_width_A + i * g.hx;
    for (int j = 0; j <= g.Ny; ++j) g.y[j] = -geom.half_width_B + j * g.hy;
    for (int k = 0; k <= g.Nz; ++k) g.z[k] = k * g.hz;
    g.x.back() = geom.half_width_A;
    g.y.back() = geom.half_width_B;
    g.z.back() = geom.depth_H;

    g.k_exchanger = static_cast<int>(round_nearest(exch.depth_H_E / g.hz));
    if (g.k_exchanger < 1 || g.k_exchanger >= g.Nz) {
        throw ConfigError("exchanger.depth_H_E_m", "exchanger depth does not fit the vertical grid");
    }

    const int wx = g.ne_x - 1;
    const int wy = g.ne_y - 1;
    std::vector<double> snapped;
    for (std::size_t l = 0; l < placement.count(); ++l) {
        const Point2 c = placement.center(l);
        Footprint f;
        f.i0 = snap_lower_index(c.x, geom.half_width_A, g.hx, g.Nx, wx, "discretization.target_Nx");
        f.j0 = snap_lower_index(c.y, geom.half_width_B, g.hy, g.Ny, wy, "discretization.target_Ny");
        f.i1 = f.i0 + wx;
        f.j1 = f.j0 + wy;
        f.k_bottom = g.k_exchanger;
        g.footprints.push_back(f);
        const Point2 s{g.x[f.i0] + 0.5 * wx * g.hx, g.y[f.j0] + 0.5 * wy * g.hy};
        g.snaps.push_back({c, s, std::hypot(s.x - c.x, s.y - c.y)});
        snapped.push_back(s.x);
        snapped.push_back(s.y);
    }
    g.snapped_placement = Placement(std::move(snapped));

    for (std::size_t a = 0; a < g.footprints.size(); ++a) {
        for (std::size_t b = a + 1; b < g.footprints.size(); ++b) {
            const auto& fa = g.footprints[a];
            const auto& fb = g.footprints[b];
            const int gap_x = std::max(fb.i0 - fa.i1, fa.i0 - fb.i1) - 1;
            const int gap_y = std::max(fb.j0 - fa.j1, fa.j0 - fb.j1) - 1;
            const std::string which = std::to_string(a) + " and " + std::to_string(b);
            if (gap_x < 0 && gap_y < 0) {
                throw ConfigError("placement.centers_m", "exchangers " + which + " overlap after snapping");
            }
            if (std::max(gap_x, gap_y) < kMinSeparationNodes) {
                throw ConfigError("placement.centers_m", "exchangers " + which + " are separated by fewer than " +
                                                             std::to_string(kMinSeparationNodes) +
                                                             " interior nodes");
            }
        }
    }

    g.classes_.assign(g.node_count(), NodeClass::Interior);
    g.owners_.assign(g.node_count(), -1);
    for (std::size_t l = 0; l < g.footprints.size(); ++l) {
        const auto& f = g.footprints[l];
        for (int k = 1; k <= f.k_bottom; ++k)
            for (int j = f.j0; j <= f.j1; ++j)
                for (int i = f.i0; i <= f.i1; ++i) {
                    g.classes_[g.index(i, j, k)] = NodeClass::Exchanger;
                    g.owners_[g.index(i, j, k)] = static_cast<std::int16_t>(l);
                }
    }
    for (int k = 0; k <= g.Nz; ++k)
        for (int j = 0; j <= g.Ny; ++j)
            for (int i = 0; i <= g.Nx; ++i)
                if (i == 0 || i == g.Nx || j == 0 || j == g.Ny || k == 0 || k == g.Nz) {
                    g.classes_[g.index(i, j, k)] = NodeClass::Surface;
                    g.owners_[g.index(i, j, k)] = -1;
                }
    return g;
}

CflResult cfl_check(double hx, double hy, double hz, double dt, double alpha_max) {
    const double inv = 1.0 / (hx * hx) + 1.0 / (hy * hy) + 1.0 / (hz * hz);
    CflResult r;
    r.value = alpha_max * dt * inv;
    r.pass = r.value <= 0.5;
    r.suggested_dt = alpha_max > 0.0 ? 0.5 / (alpha_max * inv) : dt;
    return r;
}

CflResult cfl_check(const SpaceTimeGrid& grid, double alpha_max) {
    return cfl_check(grid.hx, grid.hy, grid.hz, grid.time.dt, alpha_max);
}

}  // namespace geofield
