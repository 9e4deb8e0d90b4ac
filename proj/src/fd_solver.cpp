#include "geofield/fd_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "geofield/errors.hpp"

namespace geofield {

std::string to_string(SolverTag tag) {
    switch (tag) {
        case SolverTag::FiniteDifference: return "finite-difference";
        case SolverTag::Analytic: return "analytic";
        case SolverTag::Cylindrical: return "cylindrical";
    }
    return "unknown";
}

const FieldSlice& TemperatureField::slice_at(double z) const {
    for (const auto& s : slices)
        if (std::abs(s.z - z) < 1e-9) return s;
    throw ConfigError("output.slices_z_m", "no stored slice at z = " + std::to_string(z));
}

FdOperator make_fd_operator(const SpaceTimeGrid& grid, const FieldModel& model, double dt) {
    FdOperator op;
    op.dt = dt;
    op.wx.resize(grid.nx1());
    op.wy.resize(grid.nx1());
    op.wz.resize(grid.nx1());
    for (int i = 0; i <= grid.Nx; ++i) {
        const double a = model.alpha_at(grid.x[i]);
        op.wx[i] = a * dt / (grid.hx * grid.hx);
        op.wy[i] = a * dt / (grid.hy * grid.hy);
        op.wz[i] = a * dt / (grid.hz * grid.hz);
        op.cfl_value = std::max(op.cfl_value, op.wx[i] + op.wy[i] + op.wz[i]);
    }
    return op;
}

void step_explicit_euler(std::span<const double> current, std::span<double> next, const SpaceTimeGrid& grid,
                         const FdOperator& op, std::span<const double> surface, const Eigen::MatrixXd& wall,
                         int step_index) {
    if (op.cfl_value > 0.5 * (1.0 + 1e-12)) {
        throw NumericError("explicit step violates the stability bound: " + std::to_string(op.cfl_value) +
                           " > 0.5");
    }
    const std::size_t nx1 = grid.nx1();
    const std::size_t plane = nx1 * grid.ny1();
    const double* wx = op.wx.data();
    const double* wy = op.wy.data();
    const double* wz = op.wz.data();
    for (int k = 0; k <= grid.Nz; ++k) {
        for (int j = 0; j <= grid.Ny; ++j) {
            const std::size_t row = grid.index(0, j, k);
            if (k == 0 || k == grid.Nz || j == 0 || j == grid.Ny) {
                std::fill_n(next.data() + row, nx1, surface[k]);
                continue;
            }
            const double* c = current.data() + row;
            double* out = next.data() + row;
            out[0] = surface[k];
            out[grid.Nx] = surface[k];
            for (int i = 1; i < grid.Nx; ++i) {
                const double u = c[i];
                out[i] = u + wx[i] * (c[i - 1] - 2.0 * u + c[i + 1]) + wy[i] * (c[i - nx1] - 2.0 * u + c[i + nx1]) +
                         wz[i] * (c[i - plane] - 2.0 * u + c[i + plane]);
            }
        }
    }
    for (std::size_t l = 0; l < grid.footprints.size(); ++l) {
        const auto& f = grid.footprints[l];
        for (int k = 1; k <= f.k_bottom; ++k) {
            const double v = wall(k, static_cast<Eigen::Index>(l));
            for (int j = f.j0; j <= f.j1; ++j)
                for (int i = f.i0; i <= f.i1; ++i) next[grid.index(i, j, k)] = v;
        }
    }
    for (double v : next) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite temperature at step " + std::to_string(step_index));
        }
    }
}

namespace {

struct Probe {
    int i = 0;
    int j = 0;
};

void assign_walls(std::span<double> state, const SpaceTimeGrid& grid, const Eigen::MatrixXd& wall) {
    for (std::size_t l = 0; l < grid.footprints.size(); ++l) {
        const auto& f = grid.footprints[l];
        for (int k = 1; k <= f.k_bottom; ++k) {
            const double v = wall(k, static_cast<Eigen::Index>(l));
            for (int j = f.j0; j <= f.j1; ++j)
                for (int i = f.i0; i <= f.i1; ++i) state[grid.index(i, j, k)] = v;
        }
    }
}

}  // namespace

TemperatureField simulate_fd(const FieldModel& model, const SpaceTimeGrid& grid, const FdOptions& options,
                             FdDiagnostics* diagnostics) {
    const auto started = std::chrono::steady_clock::now();
    const int NE = static_cast<int>(grid.footprints.size());
    const int Nt = grid.time.steps;
    const int nz1 = static_cast<int>(grid.nz1());

    FdDiagnostics diag;
    diag.cfl = cfl_check(grid, model.alpha_max());
    if (!diag.cfl.pass) {
        if (!options.allow_substeps) {
            throw NumericError("time step " + std::to_string(grid.time.dt) + " d violates the stability bound (" +
                               std::to_string(diag.cfl.value) + " > 0.5); suggested step " +
                               std::to_string(diag.cfl.suggested_dt) + " d");
        }
        diag.substeps = static_cast<int>(std::ceil(diag.cfl.value / 0.5 - 1e-12));
    }
    const int m = diag.substeps;
    const FdOperator op = make_fd_operator(grid, model, grid.time.dt / m);

    std::vector<double> surface(nz1);
    for (int k = 0; k < nz1; ++k) surface[k] = undisturbed_profile(grid.z[k], model.thermal, model.geometry.depth_H);

    std::vector<int> zone_of(NE);
    for (int l = 0; l < NE; ++l) zone_of[l] = static_cast<int>(model.zone_index(grid.snapped_placement.center(l).x));
    const int zone_count = static_cast<int>(model.zones.size());

    const bool shared = options.coupling == FdCoupling::SharedProfile;
    if (shared) {
        if (!options.zone_walls || static_cast<int>(options.zone_walls->size()) < zone_count) {
            throw NumericError("simulate_fd: shared coupling needs one wall history per soil zone");
        }
        for (const auto& w : *options.zone_walls) {
            if (w.rows() != nz1 || w.cols() < Nt + 1) throw NumericError("simulate_fd: wall history has wrong shape");
        }
    }

    std::vector<Probe> probes(NE);
    for (int l = 0; l < NE; ++l) {
        const auto& f = grid.footprints[l];
        probes[l] = {std::min(f.i1 + 1, grid.Nx), f.j0 + (f.j1 - f.j0) / 2};
    }
    const WallModel wall_model(model, grid.z, grid.k_exchanger);
    const int kE = grid.k_exchanger;

    auto zone_probe = [&](std::span<const double> state, int zone) {
        std::vector<double> u(kE + 1, 0.0);
        int count = 0;
        for (int l = 0; l < NE; ++l) {
            if (zone_of[l] != zone) continue;
            ++count;
            for (int k = 0; k <= kE; ++k) u[k] += state[grid.index(probes[l].i, probes[l].j, k)];
        }
        for (auto& v : u) v /= std::max(count, 1);
        return u;
    };

    std::vector<double> cur(grid.node_count());
    for (int k = 0; k < nz1; ++k)
        std::fill_n(cur.begin() + static_cast<std::ptrdiff_t>(grid.index(0, 0, k)), grid.nx1() * grid.ny1(),
                    surface[k]);

    std::vector<Eigen::VectorXd> zone_wall(zone_count);
    for (int z = 0; z < zone_count; ++z) {
        zone_wall[z] = shared ? Eigen::VectorXd((*options.zone_walls)[z].col(0)) : wall_model(zone_probe(cur, z));
    }
    auto gather = [&](const std::vector<Eigen::VectorXd>& zw) {
        Eigen::MatrixXd w(nz1, NE);
        for (int l = 0; l < NE; ++l) w.col(l) = zw[zone_of[l]];
        return w;
    };
    assign_walls(cur, grid, gather(zone_wall));

    TemperatureField field;
    field.solver = SolverTag::FiniteDifference;
    field.x = grid.x;
    field.y = grid.y;
    field.time = grid.time;
    for (double z : options.slice_z) {
        FieldSlice s;
        s.z = z;
        s.k = grid.z_index(z);
        s.steps.reserve(Nt + 1);
        field.slices.push_back(std::move(s));
    }
    auto store = [&](std::span<const double> state) {
        for (auto& s : field.slices) {
            Eigen::MatrixXd plane(grid.nx1(), grid.ny1());
            std::copy_n(state.data() + grid.index(0, 0, s.k), grid.nx1() * grid.ny1(), plane.data());
            s.steps.push_back(std::move(plane));
        }
    };
    store(cur);
    if (options.observer) options.observer(0, cur);

    std::vector<double> nxt(cur.size());
    std::vector<double> work(cur.size());

    auto march = [&](const std::vector<Eigen::VectorXd>& wall_old, const std::vector<Eigen::VectorXd>& wall_new,
                     std::vector<double>& from, std::vector<double>& to, int n) {
        const Eigen::MatrixXd w0 = gather(wall_old);
        const Eigen::MatrixXd w1 = gather(wall_new);
        for (int s = 0; s < m; ++s) {
            const double theta = static_cast<double>(s + 1) / m;
            const Eigen::MatrixXd w = (1.0 - theta) * w0 + theta * w1;
            step_explicit_euler(from, to, grid, op, surface, w, n + 1);
            if (s + 1 < m) std::swap(from, to);
        }
    };

    diag.coupling_iterations.reserve(Nt);
    for (int n = 0; n < Nt; ++n) {
        std::vector<Eigen::VectorXd> next_wall(zone_count);
        if (shared) {
            for (int z = 0; z < zone_count; ++z) next_wall[z] = (*options.zone_walls)[z].col(n + 1);
            work = cur;
            march(zone_wall, next_wall, work, nxt, n);
            diag.coupling_iterations.push_back(0);
        } else {
            CouplingSettings cs = options.coupling_settings;
            if (options.coupling == FdCoupling::Lagged) cs.max_iterations = 0;
            int max_iter = 0;
            for (int z = 0; z < zone_count; ++z) next_wall[z] = zone_wall[z];
            for (int z = 0; z < zone_count; ++z) {
                bool marched = false;
                auto advance = [&](const Eigen::VectorXd& w) {
                    next_wall[z] = w;
                    if (m == 1 && marched) {
                        assign_walls(nxt, grid, gather(next_wall));
                    } else {
                        work = cur;
                        march(zone_wall, next_wall, work, nxt, n);
                        marched = true;
                    }
                    return zone_probe(nxt, z);
                };
                const auto outcome = coupled_step(zone_probe(cur, z), wall_model, advance, cs);
                max_iter = std::max(max_iter, outcome.iterations);
            }
            diag.coupling_iterations.push_back(max_iter);
        }
        std::swap(cur, nxt);
        zone_wall = std::move(next_wall);
        store(cur);
        if (options.observer) options.observer(n + 1, cur);
    }

    diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (diagnostics) *diagnostics = std::move(diag);
    return field;
}

}  // namespace geofield
