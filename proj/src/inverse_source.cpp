#include "geofield/inverse_source.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void check_uniform(std::span<const double> z) {
    if (z.size() < 3) throw NumericError("fourier_sine_coeffs: need at least three samples");
    const double h = (z.back() - z.front()) / static_cast<double>(z.size() - 1);
    for (std::size_t k = 1; k < z.size(); ++k) {
        if (std::abs(z[k] - z[k - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw NumericError("fourier_sine_coeffs: samples are not uniformly spaced");
        }
    }
}

void flag_growth(double value, double bound, int mode, int row, std::vector<std::string>* warnings) {
    if (warnings && std::abs(value) > bound) {
        warnings->push_back("source coefficient growth in mode " + std::to_string(mode) + " at step " +
                            std::to_string(row) + ": |value| = " + std::to_string(std::abs(value)));
    }
}

}  // namespace

std::vector<double> fourier_sine_coeffs(std::span<const double> z_nodes, std::span<const double> samples, int R) {
    if (z_nodes.size() != samples.size()) throw NumericError("fourier_sine_coeffs: size mismatch");
    check_uniform(z_nodes);
    const int N = static_cast<int>(samples.size()) - 1;
    const int n = N - 1;
    std::vector<double> in(samples.begin() + 1, samples.end() - 1);
    std::vector<double> out(n);
    {
        std::lock_guard lock(planner_mutex());
        fftw_plan plan = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    std::vector<double> coeffs(R, 0.0);
    for (int r = 1; r <= R; ++r) {
        const int m = r % (2 * N);
        if (m == 0 || m == N) continue;
        coeffs[r - 1] = (m < N) ? out[m - 1] / N : -out[2 * N - m - 1] / N;
    }
    return coeffs;
}

std::vector<double> soil_coeffs_closed_form(const ThermalBoundary& tb, double H, int R) {
    constexpr double pi = std::numbers::pi;
    std::vector<double> s(R);
    const double hb = tb.seasonal_depth_Hbar;
    for (int r = 1; r <= R; ++r) {
        s[r - 1] = 2.0 * H * (tb.TH_bottom - tb.T0_surface) / (hb * r * r * pi * pi) * std::sin(hb * r * pi / H);
    }
    return s;
}

std::vector<double> solve_volterra(std::span<const double> target, std::span<const double> kernel_by_lag, double dt,
                                   const VolterraOptions& options, std::vector<std::string>* warnings) {
    const std::size_t N = target.size();
    if (kernel_by_lag.size() < N) throw NumericError("solve_volterra: kernel shorter than target");
    std::vector<double> x(N, 0.0);
    if (N == 0) return x;
    const double diag = kernel_by_lag[0];
    if (diag == 0.0 || !std::isfinite(diag)) {
        throw NumericError("solve_volterra: vanishing diagonal in mode " + std::to_string(options.mode) +
                           " at step 1");
    }
    for (std::size_t n = 0; n < N; ++n) {
        double acc = 0.0;
        for (std::size_t p = 0; p < n; ++p) acc += kernel_by_lag[n - p] * x[p];
        x[n] = (target[n] / dt - acc) / diag;
        flag_growth(x[n], options.growth_bound, options.mode, static_cast<int>(n) + 1, warnings);
    }
    return x;
}

IncrementalVolterra::IncrementalVolterra(const Eigen::MatrixXd& kernel, double dt, int active_modes,
                                         double growth_bound)
    : kernel_(kernel), dt_(dt), active_(active_modes), growth_bound_(growth_bound),
      x_(Eigen::MatrixXd::Zero(kernel.rows(), kernel.cols())), history_(Eigen::VectorXd::Zero(kernel.rows())) {
    if (active_ > kernel.rows()) active_ = static_cast<int>(kernel.rows());
    for (int r = 0; r < active_; ++r) {
        if (kernel(r, 0) == 0.0 || !std::isfinite(kernel(r, 0))) {
            throw NumericError("IncrementalVolterra: vanishing diagonal in mode " + std::to_string(r + 1));
        }
    }
}

void IncrementalVolterra::push(std::span<const double> target) {
    if (rows_ >= kernel_.cols()) throw NumericError("IncrementalVolterra: time grid exhausted");
    const int n = rows_;
    history_.setZero();
    for (int p = 0; p < n; ++p) {
        history_.head(active_) += kernel_.col(n - p).head(active_).cwiseProduct(x_.col(p).head(active_));
    }
    ++rows_;
    solve_row(target);
}

void IncrementalVolterra::revise_last(std::span<const double> target) {
    if (rows_ == 0) throw NumericError("IncrementalVolterra: no row to revise");
    solve_row(target);
}

void IncrementalVolterra::solve_row(std::span<const double> target) {
    const int n = rows_ - 1;
    for (int r = 0; r < active_; ++r) {
        const double v = (target[r] / dt_ - history_(r)) / kernel_(r, 0);
        x_(r, n) = v;
        flag_growth(v, growth_bound_, r + 1, rows_, &warnings_);
    }
}

ModeSeries wall_mode_series(const FieldModel& model, std::span<const double> z_nodes, const Eigen::MatrixXd& wall,
                            int R, int active_modes) {
    const double H = model.geometry.depth_H;
    ModeSeries ms;
    ms.coeffs = Eigen::MatrixXd::Zero(R, wall.cols());
    std::vector<double> diff(z_nodes.size());
    for (Eigen::Index n = 0; n < wall.cols(); ++n) {
        for (std::size_t k = 0; k < z_nodes.size(); ++k) {
            diff[k] = wall(static_cast<Eigen::Index>(k), n) - undisturbed_profile(z_nodes[k], model.thermal, H);
        }
        const auto c = fourier_sine_coeffs(z_nodes, diff, R);
        for (int r = 0; r < std::min(R, active_modes); ++r) ms.coeffs(r, n) = c[r];
    }
    return ms;
}

SourceCoefficients estimate_sources(const FieldModel& model, std::span<const double> z_nodes,
                                    const KernelMatrices& km, const Eigen::MatrixXd& wall, int active_modes) {
    const int R = km.R;
    const int Nt = km.lags;
    if (wall.cols() < Nt + 1) throw NumericError("estimate_sources: wall history shorter than the time grid");
    SourceCoefficients sc;
    sc.R = R;
    sc.Nt = Nt;
    sc.eps = Eigen::MatrixXd::Zero(R, Nt);
    sc.sig = Eigen::MatrixXd::Zero(R, Nt);

    const ModeSeries e = wall_mode_series(model, z_nodes, wall, R, active_modes);
    const auto s = soil_coeffs_closed_form(model.thermal, km.H, R);
    std::vector<double> target(Nt);
    std::vector<double> kernel(Nt);
    for (int r = 0; r < R; ++r) {
        VolterraOptions opt;
        opt.mode = r + 1;
        if (r < active_modes) {
            for (int n = 0; n < Nt; ++n) {
                target[n] = e.coeffs(r, n + 1);
                kernel[n] = km.E_mat(r, n);
            }
            const auto x = solve_volterra(target, kernel, km.dt, opt, &sc.warnings);
            for (int n = 0; n < Nt; ++n) sc.eps(r, n) = x[n];
        }
        for (int n = 0; n < Nt; ++n) {
            target[n] = s[r];
            kernel[n] = km.Ssrc_mat(r, n);
        }
        const auto y = solve_volterra(target, kernel, km.dt, opt, &sc.warnings);
        for (int n = 0; n < Nt; ++n) sc.sig(r, n) = y[n];
    }
    return sc;
}

}  // namespace geofield
