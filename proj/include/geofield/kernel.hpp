#pragma once

#include <Eigen/Core>

#include "geofield/grid.hpp"
#include "geofield/model.hpp"

namespace geofield {

struct KernelConfig {
    int mode_truncation_R = 64;
    double series_tail_tolerance = 1e-12;
    int max_modes = 20000;  // hard cap for the adaptive rod series
};

/// One-dimensional free-space heat kernel; zero for t < tau.
double g_free_1d(double x, double t, double xi, double tau, double alpha);

/// Heat kernel of the rod (0, H) with Dirichlet ends.  The series is summed until the
/// next exponential factor drops below cfg.series_tail_tolerance.
double g_rod(double z, double t, double zeta, double tau, double alpha, double H, const KernelConfig& cfg = {});

/// Slab kernel on R x R x (0, H): product of two free kernels and the rod kernel.
double g_slab(double x, double y, double z, double t, double xi, double eta, double zeta, double tau, double alpha,
              double H, const KernelConfig& cfg = {});

/// Lateral weight of a square exchanger of side L_E seen at offset q after elapsed time s.
double phi(double q, double s, double alpha, double H, double L_E);

/// Derivative of phi(x - p, s) with respect to the exchanger coordinate p, with q = x - p.
double dphi_dcenter(double q, double s, double alpha, double H, double L_E);

/// Lag-indexed kernel tables for one diffusivity.  Lag m stands for elapsed time (m + 0.5) dt.
struct KernelMatrices {
    double alpha = 0.0;
    double dt = 0.0;
    double H = 0.0;
    double L_E = 0.0;
    int R = 0;
    int lags = 0;
    Eigen::MatrixXd T_mat;     // lags x R: exp(-r^2 pi^2 alpha t_m / H^2)
    Eigen::VectorXd S_mat;     // lags: (2/H) erf(A/..) erf(B/..)
    Eigen::MatrixXd E_mat;     // R x lags: exchanger Volterra kernel
    Eigen::MatrixXd Ssrc_mat;  // R x lags: soil Volterra kernel

    double lag_time(int m) const { return (m + 0.5) * dt; }
};

KernelMatrices build_kernel_matrices(const TimeGrid& time, const FieldGeometry& geom, const ExchangerSpec& exch,
                                     double alpha, int R);

}  // namespace geofield
