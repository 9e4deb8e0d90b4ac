#include "geofield/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

constexpr double kPi = std::numbers::pi;

// erf(u1) + erf(u2) without cancellation when one argument is large and negative.
double erf_pair(double u1, double u2) {
    if (u1 >= 0.0 && u2 >= 0.0) return std::erf(u1) + std::erf(u2);
    if (u2 < 0.0) return std::erfc(-u2) - std::erfc(u1);
    return std::erfc(-u1) - std::erfc(u2);
}

}  // namespace

double g_free_1d(double x, double t, double xi, double tau, double alpha) {
    if (t == tau) throw NumericError("g_free_1d: singular at t == tau");
    if (t < tau) return 0.0;
    const double s = alpha * (t - tau);
    const double d = x - xi;
    return std::exp(-d * d / (4.0 * s)) / std::sqrt(4.0 * kPi * s);
}

double g_rod(double z, double t, double zeta, double tau, double alpha, double H, const KernelConfig& cfg) {
    if (t == tau) throw NumericError("g_rod: singular at t == tau");
    if (t < tau) return 0.0;
    const double rate = kPi * kPi * alpha * (t - tau) / (H * H);
    double sum = 0.0;
    int r = 1;
    for (;; ++r) {
        if (r > cfg.max_modes) {
            throw NumericError("g_rod: series tail above tolerance after " + std::to_string(cfg.max_modes) +
                               " modes");
        }
        const double decay = std::exp(-rate * r * r);
        if (decay < cfg.series_tail_tolerance) break;
        sum += std::sin(r * kPi * z / H) * std::sin(r * kPi * zeta / H) * decay;
    }
    return 2.0 / H * sum;
}

double g_slab(double x, double y, double z, double t, double xi, double eta, double zeta, double tau, double alpha,
              double H, const KernelConfig& cfg) {
    if (t < tau) return 0.0;
    return g_free_1d(x, t, xi, tau, alpha) * g_free_1d(y, t, eta, tau, alpha) *
           g_rod(z, t, zeta, tau, alpha, H, cfg);
}

double phi(double q, double s, double alpha, double H, double L_E) {
    if (!(s > 0.0)) throw NumericError("phi: elapsed time must be positive");
    const double d = 2.0 * std::sqrt(alpha * s);
    const double half = 0.5 * L_E;
    return erf_pair((half + q) / d, (half - q) / d) / std::sqrt(2.0 * H);
}

double dphi_dcenter(double q, double s, double alpha, double H, double L_E) {
    if (!(s > 0.0)) throw NumericError("dphi_dcenter: elapsed time must be positive");
    const double four_as = 4.0 * alpha * s;
    const double half = 0.5 * L_E;
    const double near = std::exp(-(half - q) * (half - q) / four_as);
    const double far = std::exp(-(half + q) * (half + q) / four_as);
    return (near - far) / std::sqrt(2.0 * kPi * alpha * H * s);
}

KernelMatrices build_kernel_matrices(const TimeGrid& time, const FieldGeometry& geom, const ExchangerSpec& exch,
                                     double alpha, int R) {
    if (R < 1) throw ConfigError("discretization.modes_R", "at least one mode is required");
    KernelMatrices km;
    km.alpha = alpha;
    km.dt = time.dt;
    km.H = geom.depth_H;
    km.L_E = exch.side_L_E;
    km.R = R;
    km.lags = time.steps;
    const double H = geom.depth_H;
    km.T_mat.resize(km.lags, R);
    km.S_mat.resize(km.lags);
    km.E_mat.resize(R, km.lags);
    km.Ssrc_mat.resize(R, km.lags);
    for (int m = 0; m < km.lags; ++m) {
        const double s = km.lag_time(m);
        const double root = std::sqrt(alpha * s);
        double e_lat = 1.0;
        double s_lat = 1.0;
        if (root > 0.0) {
            const double ef = std::erf(exch.side_L_E / (4.0 * root));
            e_lat = ef * ef;
            s_lat = std::erf(geom.half_width_A / (2.0 * root)) * std::erf(geom.half_width_B / (2.0 * root));
        }
        km.S_mat(m) = 2.0 / H * s_lat;
        for (int r = 1; r <= R; ++r) {
            const double decay = std::exp(-static_cast<double>(r) * r * kPi * kPi * alpha * s / (H * H));
            km.T_mat(m, r - 1) = decay;
            km.E_mat(r - 1, m) = 2.0 / H * decay * e_lat;
            km.Ssrc_mat(r - 1, m) = decay * km.S_mat(m);
        }
    }
    return km;
}

}  // namespace geofield
