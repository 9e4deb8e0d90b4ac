#pragma once

#include <vector>

#include "geofield/analytic_solver.hpp"
#include "geofield/grid.hpp"
#include "geofield/model.hpp"

namespace geofield::testing {

/// Default field with uniform soil and the given centres.
inline FieldModel field_model(std::vector<Point2> centers, double alpha = 0.05) {
    FieldModel m;
    m.zones = uniform_soil(m.geometry, alpha);
    m.placement = Placement::from_points(centers);
    return validate_config(m);
}

/// 4 x 4 lattice with `spacing` between neighbours, centred on the origin.
inline std::vector<Point2> lattice(double spacing, int n = 4) {
    std::vector<Point2> pts;
    const double first = -0.5 * spacing * (n - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) pts.push_back({first + i * spacing, first + j * spacing});
    }
    return pts;
}

/// Uniform vertical nodes with `cells` intervals over the default 40 m depth.
inline std::vector<double> z_nodes(int cells, double H = 40.0) {
    std::vector<double> z(cells + 1);
    for (int k = 0; k <= cells; ++k) z[k] = H * k / cells;
    return z;
}

/// Grid with step h in every direction over the default box.
inline SpaceTimeGrid grid_with_step(const FieldModel& m, double h, double horizon, double dt = 0.8) {
    const GridTargets t{static_cast<int>(round_nearest(2 * m.geometry.half_width_A / h)),
                        static_cast<int>(round_nearest(2 * m.geometry.half_width_B / h)),
                        static_cast<int>(round_nearest(m.geometry.depth_H / h))};
    return build_adapted_grid(m.geometry, m.exchanger, m.placement, t, make_time_grid(horizon, dt));
}

}  // namespace geofield::testing
