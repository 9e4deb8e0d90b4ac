#include "geofield/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kRadiusChunk = 256;

double bessel_j0(double x) {
    const double v = ::j0(x);
    if (!std::isfinite(v)) throw NumericError("Bessel J0 failed at argument " + std::to_string(x));
    return v;
}

double bessel_y0(double x) {
    const double v = ::y0(x);
    if (!std::isfinite(v)) throw NumericError("Bessel Y0 failed at argument " + std::to_string(x));
    return v;
}

int nearest_node(std::span<const double> z_nodes, double depth) {
    for (std::size_t k = 0; k < z_nodes.size(); ++k)
        if (std::abs(z_nodes[k] - depth) < 1e-9) return static_cast<int>(k);
    throw ConfigError("output.slices_z_m", "depth " + std::to_string(depth) + " m is not a grid plane");
}

// Lag kernel K(m, rho) = int beta exp(-beta^2 alpha s_m / a^2) phi(beta, r_rho) / (J0^2 + Y0^2) dbeta
// by the midpoint rule, for radii strictly outside the wall.
Eigen::MatrixXd lag_kernel(std::span<const double> radii, double a, double alpha, const TimeGrid& time,
                           double beta_min, double beta_max, int nodes) {
    const int Nt = time.steps;
    const double step = (beta_max - beta_min) / nodes;
    Eigen::VectorXd beta(nodes);
    Eigen::VectorXd j0b(nodes);
    Eigen::VectorXd y0b(nodes);
    Eigen::MatrixXd weights(Nt, nodes);
    for (int j = 0; j < nodes; ++j) {
        beta(j) = beta_min + (j + 0.5) * step;
        j0b(j) = bessel_j0(beta(j));
        y0b(j) = bessel_y0(beta(j));
        const double q = beta(j) / (j0b(j) * j0b(j) + y0b(j) * y0b(j)) * step;
        for (int m = 0; m < Nt; ++m) {
            const double s = (m + 0.5) * time.dt;
            weights(m, j) = std::exp(-beta(j) * beta(j) * alpha * s / (a * a)) * q;
        }
    }
    Eigen::MatrixXd K(Nt, static_cast<Eigen::Index>(radii.size()));
    Eigen::MatrixXd radial(nodes, static_cast<Eigen::Index>(kRadiusChunk));
    for (std::size_t start = 0; start < radii.size(); start += kRadiusChunk) {
        const std::size_t count = std::min(kRadiusChunk, radii.size() - start);
        for (std::size_t c = 0; c < count; ++c) {
            const double ratio = radii[start + c] / a;
            for (int j = 0; j < nodes; ++j) {
                const double x = beta(j) * ratio;
                radial(j, static_cast<Eigen::Index>(c)) = bessel_j0(x) * y0b(j) - bessel_y0(x) * j0b(j);
            }
        }
        K.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count)).noalias() =
            weights * radial.leftCols(static_cast<Eigen::Index>(count));
    }
    return K;
}

}  // namespace

double radial_kernel(double beta, double r, double a) {
    if (r < a) throw NumericError("radial_kernel: radius inside the exchanger");
    if (!(beta > 0.0)) throw NumericError("radial_kernel: beta must be positive");
    if (r == a) return 0.0;
    const double x = beta * r / a;
    return bessel_j0(x) * bessel_y0(beta) - bessel_y0(x) * bessel_j0(beta);
}

CylindricalSolution solve_cylindrical(const FieldModel& model, const ZoneSources& zone, const TimeGrid& time,
                                      std::span<const double> z_nodes, std::span<const double> radii,
                                      std::span<const double> depths, const CylinderSettings& settings) {
    const int Nt = time.steps;
    const int R = static_cast<int>(zone.wall_modes.coeffs.rows());
    const double H = model.geometry.depth_H;
    const double alpha = zone.alpha;
    const double a = model.exchanger.equivalent_radius();
    if (zone.wall_modes.coeffs.cols() < Nt + 1) throw NumericError("solve_cylindrical: wall history too short");

    CylindricalSolution sol;
    sol.radius_a = a;
    sol.beta_max = 5.0 * a / std::sqrt(alpha * time.dt);
    sol.radii.assign(radii.begin(), radii.end());
    sol.z.assign(depths.begin(), depths.end());

    std::vector<double> outside;
    std::vector<Eigen::Index> outside_index(radii.size(), -1);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] > a) {
            outside_index[i] = static_cast<Eigen::Index>(outside.size());
            outside.push_back(radii[i]);
        }
    }

    Eigen::MatrixXd T_mat(Nt, R);
    for (int m = 0; m < Nt; ++m)
        for (int l = 1; l <= R; ++l)
            T_mat(m, l - 1) = std::exp(-static_cast<double>(l) * l * kPi * kPi * alpha * (m + 0.5) * time.dt / (H * H));

    // Per depth: D(n - 1, m) = sum_l sin(l pi z / H) e_l(t_{n-m}) T(m, l).
    std::vector<Eigen::MatrixXd> drive;
    for (double z : depths) {
        Eigen::VectorXd sines(R);
        for (int l = 1; l <= R; ++l) sines(l - 1) = std::sin(l * kPi * z / H);
        const Eigen::MatrixXd C = zone.wall_modes.coeffs.transpose() * sines.asDiagonal() * T_mat.transpose();
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Nt, Nt);
        for (int n = 1; n <= Nt; ++n)
            for (int m = 0; m < n; ++m) D(n - 1, m) = C(n - m, m);
        drive.push_back(std::move(D));
    }

    const double prefactor = 2.0 * alpha / (kPi * a * a) * time.dt;
    auto evaluate = [&](int nodes) {
        const Eigen::MatrixXd K = lag_kernel(outside, a, alpha, time, settings.beta_min, sol.beta_max, nodes);
        std::vector<Eigen::MatrixXd> out;
        for (std::size_t d = 0; d < depths.size(); ++d) {
            const int k = nearest_node(z_nodes, depths[d]);
            const double Ts = undisturbed_profile(depths[d], model.thermal, H);
            const Eigen::MatrixXd V = drive[d] * K;
            Eigen::MatrixXd values(static_cast<Eigen::Index>(radii.size()), Nt + 1);
            for (std::size_t i = 0; i < radii.size(); ++i) {
                values(static_cast<Eigen::Index>(i), 0) = Ts;
                for (int n = 1; n <= Nt; ++n) {
                    values(static_cast<Eigen::Index>(i), n) =
                        outside_index[i] < 0 ? zone.wall(k, n) : Ts - prefactor * V(n - 1, outside_index[i]);
                }
            }
            out.push_back(std::move(values));
        }
        return out;
    };

    int nodes = settings.beta_nodes;
    auto current = evaluate(nodes);
    for (int d = 0; d < settings.max_doublings; ++d) {
        auto refined = evaluate(2 * nodes);
        double change = 0.0;
        for (std::size_t i = 0; i < current.size(); ++i)
            change = std::max(change, (refined[i] - current[i]).cwiseAbs().maxCoeff());
        nodes *= 2;
        current = std::move(refined);
        sol.last_refinement_change = change;
        if (change <= settings.convergence_tol) break;
    }
    sol.beta_nodes = nodes;
    sol.beta_step = (sol.beta_max - settings.beta_min) / nodes;
    sol.values = std::move(current);
    return sol;
}

TemperatureField cylindrical_field(const FieldModel& model, const ZoneSources& zone, const TimeGrid& time,
                                   std::span<const double> z_nodes, std::span<const double> xs,
                                   std::span<const double> ys, Point2 center, std::span<const double> depths,
                                   const CylinderSettings& settings, CylindricalSolution* raw) {
    std::map<long long, std::size_t> lookup;
    std::vector<double> radii;
    std::vector<std::size_t> which(xs.size() * ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double dx = xs[i] - center.x;
            const double dy = ys[j] - center.y;
            const double r2 = dx * dx + dy * dy;
            const long long key = std::llround(r2 * 1e9);
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                it = lookup.emplace(key, radii.size()).first;
                radii.push_back(std::sqrt(r2));
            }
            which[j * xs.size() + i] = it->second;
        }
    }
    CylindricalSolution sol = solve_cylindrical(model, zone, time, z_nodes, radii, depths, settings);

    TemperatureField field;
    field.solver = SolverTag::Cylindrical;
    field.x.assign(xs.begin(), xs.end());
    field.y.assign(ys.begin(), ys.end());
    field.time = time;
    for (std::size_t d = 0; d < depths.size(); ++d) {
        FieldSlice s;
        s.z = depths[d];
        s.k = nearest_node(z_nodes, depths[d]);
        for (int n = 0; n <= time.steps; ++n) {
            Eigen::MatrixXd plane(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
            for (std::size_t j = 0; j < ys.size(); ++j)
                for (std::size_t i = 0; i < xs.size(); ++i)
                    plane(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        sol.values[d](static_cast<Eigen::Index>(which[j * xs.size() + i]), n);
            s.steps.push_back(std::move(plane));
        }
        field.slices.push_back(std::move(s));
    }
    if (raw) *raw = std::move(sol);
    return field;
}

}  // namespace geofield
