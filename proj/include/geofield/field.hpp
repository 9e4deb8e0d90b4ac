#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "geofield/grid.hpp"

namespace geofield {

enum class SolverTag { FiniteDifference, Analytic, Cylindrical };

std::string to_string(SolverTag tag);

/// Horizontal plane z = const; steps[n](i, j) is the temperature at (x_i, y_j) and t_n.
struct FieldSlice {
    double z = 0.0;
    int k = 0;
    std::vector<Eigen::MatrixXd> steps;
};

struct TemperatureField {
    SolverTag solver = SolverTag::FiniteDifference;
    std::vector<double> x;
    std::vector<double> y;
    TimeGrid time;
    std::vector<FieldSlice> slices;

    const FieldSlice& slice_at(double z) const;
};

}  // namespace geofield
