#include "geofield/analytic_solver.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

constexpr double kPi = std::numbers::pi;

ZoneSources solve_zone(const FieldModel& model, double alpha, std::span<const double> z_nodes, int kE,
                       const TimeGrid& time, const AnalyticSettings& settings) {
    const auto started = std::chrono::steady_clock::now();
    const int R = settings.R;
    const int Nt = time.steps;
    const int Nz = static_cast<int>(z_nodes.size()) - 1;
    const double H = model.geometry.depth_H;
    const double dt = time.dt;

    ZoneSources zs;
    zs.alpha = alpha;
    zs.active_modes = resolved_modes(R, Nz);
    zs.km = build_kernel_matrices(time, model.geometry, model.exchanger, alpha, R);
    const KernelMatrices& km = zs.km;
    zs.sources.R = R;
    zs.sources.Nt = Nt;
    zs.sources.sig = Eigen::MatrixXd::Zero(R, Nt);

    const auto s = soil_coeffs_closed_form(model.thermal, H, R);
    {
        std::vector<double> target(Nt);
        std::vector<double> kernel(Nt);
        for (int r = 0; r < R; ++r) {
            for (int n = 0; n < Nt; ++n) {
                target[n] = s[r];
                kernel[n] = km.Ssrc_mat(r, n);
            }
            VolterraOptions opt;
            opt.mode = r + 1;
            opt.growth_bound = settings.growth_bound;
            const auto y = solve_volterra(target, kernel, dt, opt, &zs.sources.warnings);
            for (int n = 0; n < Nt; ++n) zs.sources.sig(r, n) = y[n];
        }
    }
    zs.soil_modes = Eigen::MatrixXd::Zero(R, Nt + 1);
    for (int n = 1; n <= Nt; ++n) {
        for (int p = 1; p <= n; ++p) {
            zs.soil_modes.col(n) += dt * km.Ssrc_mat.col(n - p).cwiseProduct(zs.sources.sig.col(p - 1));
        }
    }

    const Point2 probe = wall_probe_offset(model.exchanger);
    Eigen::VectorXd probe_weight(Nt);
    for (int m = 0; m < Nt; ++m) {
        const double t = km.lag_time(m);
        probe_weight(m) = phi(probe.x, t, alpha, H, model.exchanger.side_L_E) *
                          phi(probe.y, t, alpha, H, model.exchanger.side_L_E);
    }
    Eigen::MatrixXd sines(kE + 1, R);
    for (int k = 0; k <= kE; ++k)
        for (int r = 1; r <= R; ++r) sines(k, r - 1) = std::sin(r * kPi * z_nodes[k] / H);

    std::vector<double> base(kE + 1);
    std::vector<double> undisturbed(Nz + 1);
    for (int k = 0; k <= Nz; ++k) undisturbed[k] = undisturbed_profile(z_nodes[k], model.thermal, H);
    for (int k = 0; k <= kE; ++k) base[k] = linear_translation_w(z_nodes[k], model.thermal.T0_surface,
                                                                 model.thermal.TH_bottom, H);

    const WallModel wall_model(model, z_nodes, kE);
    IncrementalVolterra exch(km.E_mat, dt, zs.active_modes, settings.growth_bound);

    zs.wall = Eigen::MatrixXd::Zero(Nz + 1, Nt + 1);
    zs.wall_modes.coeffs = Eigen::MatrixXd::Zero(R, Nt + 1);
    std::vector<double> u_prev(undisturbed.begin(), undisturbed.begin() + kE + 1);
    zs.wall.col(0) = wall_model(u_prev);
    {
        std::vector<double> diff(Nz + 1);
        for (int k = 0; k <= Nz; ++k) diff[k] = zs.wall(k, 0) - undisturbed[k];
        const auto c = fourier_sine_coeffs(z_nodes, diff, R);
        for (int r = 0; r < zs.active_modes; ++r) zs.wall_modes.coeffs(r, 0) = c[r];
    }

    zs.iterations.reserve(Nt);
    zs.residuals.reserve(Nt);
    Eigen::VectorXd history(R);
    std::vector<double> target(zs.active_modes);
    std::vector<double> diff(Nz + 1);
    std::vector<double> latest;
    for (int n = 1; n <= Nt; ++n) {
        history.setZero();
        const Eigen::MatrixXd& eps = exch.solution();
        for (int p = 1; p < n; ++p) {
            const int m = n - p;
            history += (dt * probe_weight(m)) * km.T_mat.row(m).transpose().cwiseProduct(eps.col(p - 1));
        }
        auto advance = [&](const Eigen::VectorXd& wall) {
            for (int k = 0; k <= Nz; ++k) diff[k] = wall(k) - undisturbed[k];
            const auto c = fourier_sine_coeffs(z_nodes, diff, R);
            std::copy_n(c.begin(), zs.active_modes, target.begin());
            if (exch.rows() < n) {
                exch.push(target);
            } else {
                exch.revise_last(target);
            }
            const Eigen::VectorXd amp = history +
                                        (dt * probe_weight(0)) * km.T_mat.row(0).transpose().cwiseProduct(
                                                                     exch.solution().col(n - 1)) +
                                        zs.soil_modes.col(n);
            const Eigen::VectorXd u = sines * amp;
            latest.assign(kE + 1, 0.0);
            for (int k = 0; k <= kE; ++k) latest[k] = base[k] + u(k);
            return latest;
        };
        const auto outcome = coupled_step(u_prev, wall_model, advance, settings.coupling);
        zs.wall.col(n) = outcome.wall;
        zs.wall_modes.coeffs.col(n).head(zs.active_modes) =
            Eigen::Map<const Eigen::VectorXd>(target.data(), zs.active_modes);
        zs.iterations.push_back(outcome.iterations);
        zs.residuals.push_back(outcome.residual);
        u_prev = latest;
    }
    zs.sources.eps = exch.solution();
    zs.sources.warnings.insert(zs.sources.warnings.end(), exch.warnings().begin(), exch.warnings().end());
    zs.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return zs;
}

/// Lateral kernel tables for a fixed placement and evaluation grid, grouped by (zone, x centre).
class SliceEngine {
public:
    SliceEngine(const AnalyticEvaluator& ev, std::span<const double> xs, std::span<const double> ys,
                const Placement& placement)
        : ev_(ev), xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()) {
        const auto& model = ev.model();
        const auto& bundle = ev.bundle();
        const int Nt = bundle.time.steps;
        const double H = model.geometry.depth_H;
        const double LE = model.exchanger.side_L_E;
        std::map<std::pair<std::size_t, double>, std::size_t> index;
        for (std::size_t l = 0; l < placement.count(); ++l) {
            const Point2 c = placement.center(l);
            const std::size_t zone = model.zone_index(c.x);
            const double alpha = bundle.zones[zone].alpha;
            const auto key = std::make_pair(zone, c.x);
            auto it = index.find(key);
            if (it == index.end()) {
                Group g;
                g.zone = zone;
                g.phi_x.resize(static_cast<Eigen::Index>(xs_.size()), Nt);
                g.phi_y_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ys_.size()), Nt);
                for (int m = 0; m < Nt; ++m) {
                    const double t = bundle.zones[zone].km.lag_time(m);
                    for (std::size_t i = 0; i < xs_.size(); ++i) g.phi_x(i, m) = phi(xs_[i] - c.x, t, alpha, H, LE);
                }
                groups_.push_back(std::move(g));
                it = index.emplace(key, groups_.size() - 1).first;
            }
            Group& g = groups_[it->second];
            for (int m = 0; m < Nt; ++m) {
                const double t = bundle.zones[zone].km.lag_time(m);
                for (std::size_t j = 0; j < ys_.size(); ++j) g.phi_y_sum(j, m) += phi(ys_[j] - c.y, t, alpha, H, LE);
            }
        }
    }

    Eigen::MatrixXd compute(double z, int n) const {
        const auto& model = ev_.model();
        const Eigen::Index nx = static_cast<Eigen::Index>(xs_.size());
        const Eigen::Index ny = static_cast<Eigen::Index>(ys_.size());
        Eigen::MatrixXd out(nx, ny);
        if (n == 0) {
            out.setConstant(undisturbed_profile(z, model.thermal, model.geometry.depth_H));
            return out;
        }
        for (Eigen::Index i = 0; i < nx; ++i) out.row(i).setConstant(ev_.background(xs_[i], z, n));
        std::map<std::size_t, Eigen::VectorXd> weights;
        for (const auto& g : groups_) {
            auto it = weights.find(g.zone);
            if (it == weights.end()) it = weights.emplace(g.zone, ev_.lag_weights(g.zone, z, n)).first;
            const Eigen::VectorXd& K = it->second;
            out.noalias() += (g.phi_x.leftCols(n) * K.asDiagonal()) * g.phi_y_sum.leftCols(n).transpose();
        }
        return out;
    }

private:
    struct Group {
        std::size_t zone = 0;
        Eigen::MatrixXd phi_x;
        Eigen::MatrixXd phi_y_sum;
    };
    const AnalyticEvaluator& ev_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<Group> groups_;
};

}  // namespace

SourceBundle couple_sources(const FieldModel& model, std::span<const double> z_nodes, int k_exchanger,
                            const TimeGrid& time, const AnalyticSettings& settings) {
    if (k_exchanger < 1 || k_exchanger >= static_cast<int>(z_nodes.size()) - 1) {
        throw ConfigError("exchanger.depth_H_E_m", "exchanger bottom must be an interior z node");
    }
    SourceBundle b;
    b.time = time;
    b.R = settings.R;
    b.z_nodes.assign(z_nodes.begin(), z_nodes.end());
    b.k_exchanger = k_exchanger;
    for (const auto& zone : model.zones) {
        b.zones.push_back(solve_zone(model, zone.alpha, z_nodes, k_exchanger, time, settings));
    }
    return b;
}

AnalyticEvaluator::AnalyticEvaluator(const FieldModel& model, const SourceBundle& bundle)
    : model_(model), bundle_(bundle) {
    if (bundle.zones.size() != model.zones.size()) {
        throw NumericError("AnalyticEvaluator: source bundle does not match the soil zones");
    }
}

double AnalyticEvaluator::background(double x, double z, int n) const {
    const double H = model_.geometry.depth_H;
    double v = linear_translation_w(z, model_.thermal.T0_surface, model_.thermal.TH_bottom, H);
    if (n == 0) return v;
    const auto& zs = bundle_.zones[model_.zone_index(x)];
    for (int r = 1; r <= bundle_.R; ++r) v += std::sin(r * kPi * z / H) * zs.soil_modes(r - 1, n);
    return v;
}

Eigen::VectorXd AnalyticEvaluator::lag_weights(std::size_t zone, double z, int n) const {
    const auto& zs = bundle_.zones[zone];
    const double H = model_.geometry.depth_H;
    const int R = bundle_.R;
    Eigen::VectorXd sines(R);
    for (int r = 1; r <= R; ++r) sines(r - 1) = std::sin(r * kPi * z / H);
    Eigen::VectorXd K(n);
    for (int m = 0; m < n; ++m) {
        K(m) = bundle_.time.dt *
               zs.km.T_mat.row(m).dot(sines.cwiseProduct(zs.sources.eps.col(n - m - 1)));
    }
    return K;
}

double AnalyticEvaluator::evaluate_u(double x, double y, double z, int n, const Placement& placement) const {
    const auto& g = model_.geometry;
    if (!(std::abs(x) <= g.half_width_A && std::abs(y) <= g.half_width_B && z >= 0.0 && z <= g.depth_H)) {
        throw NumericError("evaluate_u: point outside the field");
    }
    if (n < 0 || n > bundle_.time.steps) throw NumericError("evaluate_u: time index outside the grid");
    if (n == 0) return undisturbed_profile(z, model_.thermal, g.depth_H);
    double v = background(x, z, n);
    std::map<std::size_t, Eigen::VectorXd> weights;
    const double LE = model_.exchanger.side_L_E;
    for (std::size_t l = 0; l < placement.count(); ++l) {
        const Point2 c = placement.center(l);
        const std::size_t zone = model_.zone_index(c.x);
        auto it = weights.find(zone);
        if (it == weights.end()) it = weights.emplace(zone, lag_weights(zone, z, n)).first;
        const auto& zs = bundle_.zones[zone];
        for (int m = 0; m < n; ++m) {
            const double t = zs.km.lag_time(m);
            v += it->second(m) * phi(x - c.x, t, zs.alpha, g.depth_H, LE) * phi(y - c.y, t, zs.alpha, g.depth_H, LE);
        }
    }
    return v;
}

Eigen::MatrixXd AnalyticEvaluator::slice(std::span<const double> xs, std::span<const double> ys, double z, int n,
                                         const Placement& placement) const {
    return SliceEngine(*this, xs, ys, placement).compute(z, n);
}

double evaluate_u(double x, double y, double z, int n, const Placement& placement, const FieldModel& model,
                  const SourceBundle& bundle) {
    return AnalyticEvaluator(model, bundle).evaluate_u(x, y, z, n, placement);
}

TemperatureField simulate_analytic(const FieldModel& model, const SpaceTimeGrid& grid, const SourceBundle& bundle,
                                   const Placement& placement, std::span<const double> slice_z) {
    const AnalyticEvaluator ev(model, bundle);
    const SliceEngine engine(ev, grid.x, grid.y, placement);
    TemperatureField field;
    field.solver = SolverTag::Analytic;
    field.x = grid.x;
    field.y = grid.y;
    field.time = bundle.time;
    for (double z : slice_z) {
        FieldSlice s;
        s.z = z;
        s.k = grid.z_index(z);
        s.steps.reserve(bundle.time.steps + 1);
        for (int n = 0; n <= bundle.time.steps; ++n) s.steps.push_back(engine.compute(grid.z[s.k], n));
        field.slices.push_back(std::move(s));
    }
    return field;
}

std::vector<double> relative_error(const FieldSlice& a, const FieldSlice& b) {
    if (a.steps.size() != b.steps.size()) throw NumericError("relative_error: fields have different time grids");
    std::vector<double> err;
    for (std::size_t n = 1; n < a.steps.size(); ++n) {
        const auto& A = a.steps[n];
        const auto& B = b.steps[n];
        if (A.rows() != B.rows() || A.cols() != B.cols()) throw NumericError("relative_error: slice shapes differ");
        const double den = A.cwiseAbs().sum();
        if (den == 0.0) throw NumericError("relative_error: reference slice is identically zero");
        err.push_back((A - B).cwiseAbs().sum() / den);
    }
    return err;
}

std::vector<double> relative_error(const TemperatureField& a, const TemperatureField& b, double z) {
    return relative_error(a.slice_at(z), b.slice_at(z));
}

}  // namespace geofield
