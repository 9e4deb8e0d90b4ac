#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geofield/analytic_solver.hpp"
#include "geofield/config.hpp"
#include "geofield/cylinder.hpp"
#include "geofield/fd_solver.hpp"
#include "geofield/optimizer.hpp"
#include "kernel_oracles.hpp"

using namespace geofield;
namespace fs = std::filesystem;

namespace {

struct Paths {
    fs::path configs;
    fs::path cli;
    fs::path work;
};

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Grid, sources and analytic evaluator for one configuration, built the way the CLI builds them.
struct Pipeline {
    RunConfig cfg;
    TimeGrid time;
    SpaceTimeGrid grid;
    SourceBundle bundle;

    explicit Pipeline(RunConfig c) : cfg(std::move(c)) {
        const Discretization& d = cfg.discretization;
        time = make_time_grid(d.horizon_days, d.dt_days);
        grid = build_adapted_grid(cfg.model.geometry, cfg.model.exchanger, cfg.model.placement, d.cells, time);
        bundle = couple_sources(cfg.model, grid.z, grid.k_exchanger, time, cfg.analytic);
    }

    const FieldModel& model() const { return cfg.model; }

    TemperatureField analytic() const {
        return simulate_analytic(cfg.model, grid, bundle, grid.snapped_placement, cfg.plan.slices_z);
    }

    TemperatureField fd(const std::function<void(int, std::span<const double>)>& observer = {}) const {
        FdOptions opt;
        opt.slice_z = cfg.plan.slices_z;
        opt.coupling = cfg.fd_coupling;
        opt.coupling_settings = cfg.analytic.coupling;
        opt.allow_substeps = cfg.discretization.allow_substeps;
        opt.observer = observer;
        std::vector<Eigen::MatrixXd> walls;
        for (const auto& z : bundle.zones) walls.push_back(z.wall);
        if (opt.coupling == FdCoupling::SharedProfile) opt.zone_walls = &walls;
        return simulate_fd(cfg.model, grid, opt);
    }

    int evaluation_index() const {
        return static_cast<int>(round_nearest(cfg.optimizer.evaluation_time / time.dt));
    }
};

RunConfig load(const Paths& p, const std::string& name) { return load_config(p.configs / name); }

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

double min_pair_distance(const Placement& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < p.count(); ++a)
        for (std::size_t b = a + 1; b < p.count(); ++b)
            best = std::min(best, std::hypot(p.center(a).x - p.center(b).x, p.center(a).y - p.center(b).y));
    return best;
}

/// Largest distance from a reflected centre to its nearest partner among `candidates`.
double mirror_gap(const Placement& p, bool flip_x, bool flip_y, const std::vector<std::size_t>& candidates) {
    double worst = 0.0;
    for (std::size_t a : candidates) {
        const Point2 c = p.center(a);
        const Point2 m{flip_x ? -c.x : c.x, flip_y ? -c.y : c.y};
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t b : candidates)
            nearest = std::min(nearest, std::hypot(p.center(b).x - m.x, p.center(b).y - m.y));
        worst = std::max(worst, nearest);
    }
    return worst;
}

std::vector<std::size_t> all_indices(const Placement& p) {
    std::vector<std::size_t> v(p.count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
}

Verdict single_exchanger(const Paths& paths) {
    auto run = [&](RunConfig cfg) {
        const Point2 c = cfg.model.placement.center(0);
        cfg.model.placement = Placement(std::vector<double>{c.x, c.y});
        const Pipeline p(std::move(cfg));
        const TemperatureField a = p.analytic();
        const Point2 center = p.grid.snapped_placement.center(0);
        const ZoneSources& zone = p.bundle.zones[p.model().zone_index(center.x)];
        const TemperatureField cyl = cylindrical_field(p.model(), zone, p.time, p.grid.z, p.grid.x, p.grid.y, center,
                                                       p.cfg.plan.slices_z, p.cfg.cylinder);
        double worst = 0.0;
        for (double z : p.cfg.plan.slices_z) worst = std::max(worst, max_of(relative_error(cyl, a, z)));
        return worst;
    };
    RunConfig desk = load(paths, "desk_single.json");
    RunConfig paper = desk;
    paper.discretization.cells = {140, 140, 80};
    paper.discretization.horizon_days = 180.0;
    const double e_desk = run(desk);
    const double e_paper = run(paper);
    return {e_desk <= 1e-4 && e_paper <= 1e-5,
            fmt("max err desk (h=1 m, 60 d) = %.3e (<= 1e-4), paper (h=0.5 m, 180 d) = %.3e (<= 1e-5)", e_desk,
                e_paper)};
}

Verdict lattice_comparison(const Paths& paths) {
    const Pipeline paper(load(paths, "paper_default.json"));
    const TemperatureField a = paper.analytic();
    const TemperatureField f = paper.fd();
    const auto err = relative_error(f, a, 20.0);
    const double e1 = err.front();
    const double eN = err.back();
    const bool bands = e1 >= 1e-5 && e1 <= 5e-5 && eN >= 2e-4 && eN <= 8e-4;

    const FieldSlice& s = f.slice_at(20.0);
    double drift = 0.0;
    for (double x : {-17.5, 0.0, 17.5}) {
        for (double y : {-17.5, 0.0, 17.5}) {
            const auto i = std::distance(f.x.begin(), std::min_element(f.x.begin(), f.x.end(), [&](double u, double v) {
                                             return std::abs(u - x) < std::abs(v - x);
                                         }));
            const auto j = std::distance(f.y.begin(), std::min_element(f.y.begin(), f.y.end(), [&](double u, double v) {
                                             return std::abs(u - y) < std::abs(v - y);
                                         }));
            drift = std::max(drift, std::abs(s.steps.back()(i, j) - 286.0));
        }
    }

    const Pipeline desk(load(paths, "desk_compare.json"));
    const double e_desk = max_of(relative_error(desk.fd(), desk.analytic(), 20.0));
    return {bands && drift <= 0.15 && e_desk <= 2e-3,
            fmt("paper err1 = %.3e in [1e-5, 5e-5], errN = %.3e in [2e-4, 8e-4]; cross-diagonal |T - 286| <= %.3f K "
                "(<= 0.15); desk max err = %.3e (<= 2e-3)",
                e1, eN, drift, e_desk)};
}

Verdict gradient_check(const Paths& paths) {
    RunConfig cfg = load(paths, "desk_compare.json");
    cfg.discretization.horizon_days = 120.0;
    cfg.model.placement = Placement(std::vector<double>{0.0, 0.0});
    const Pipeline p(cfg);
    const ObjectiveEvaluator obj(p.model(), p.bundle, p.time.steps);
    const ObjectiveConfig& oc = p.cfg.optimizer;
    std::mt19937_64 rng(p.cfg.plan.seed + 2024);
    std::uniform_int_distribution<int> count(2, 8);
    std::uniform_real_distribution<double> hub(-25.0, 25.0);
    std::uniform_real_distribution<double> spread(-8.0, 8.0);
    const double h = 1e-4;
    double worst = 0.0;
    int components = 0;
    for (int trial = 0; trial < 25; ++trial) {
        Placement pl;
        std::vector<EvaluationPoint> pts;
        for (;;) {
            const int n = count(rng);
            const double cx = hub(rng), cy = hub(rng);
            std::vector<double> flat;
            for (int i = 0; i < n; ++i) {
                flat.push_back(cx + spread(rng));
                flat.push_back(cy + spread(rng));
            }
            pl = Placement(flat);
            if (min_pair_distance(pl) < 1.0) continue;
            pts = evaluation_points(pl, p.model().geometry, p.model().exchanger, oc);
            if (obj.admissible(pl, pts)) break;
        }
        std::vector<double> g;
        obj.value_and_gradient(pl, pts, g);
        for (std::size_t i = 0; i < pl.coords.size(); ++i) {
            Placement plus = pl, minus = pl;
            plus.coords[i] += h;
            minus.coords[i] -= h;
            const auto dp = obj.deviations(plus, pts);
            const auto dm = obj.deviations(minus, pts);
            double diff = 0.0;
            for (std::size_t k = 0; k < dp.size(); ++k) diff += (dp[k] - dm[k]) * (dp[k] + dm[k]);
            const double fd = diff / (2 * h);
            if (std::abs(g[i]) > 1e-10) {
                worst = std::max(worst, std::abs(fd - g[i]) / std::abs(g[i]));
                ++components;
            }
        }
    }
    return {worst <= 1e-5, fmt("25 clustered placements, %d components above 1e-10, max relative gap %.3e (<= 1e-5)", components, worst)};
}

Verdict optimize_homogeneous(const Paths& paths) {
    const Pipeline p(load(paths, "optimize_homogeneous.json"));
    const ObjectiveEvaluator obj(p.model(), p.bundle, p.evaluation_index());
    const OptimizationTrace t = steepest_descent(p.model().placement, p.cfg.optimizer, p.model(), obj);
    const int iterations = static_cast<int>(t.iterations.size()) - 1;
    const double decades = std::log10(t.initial_objective) - std::log10(t.final_objective);
    const bool stopped = iterations <= 150 && (t.reason == StopReason::ObjectiveDecrease ||
                                               t.reason == StopReason::StepTolerance);
    const double d0 = min_pair_distance(t.initial);
    const double d1 = min_pair_distance(t.final_placement);
    const auto idx = all_indices(t.final_placement);
    const double sym = std::max({mirror_gap(t.final_placement, true, false, idx),
                                 mirror_gap(t.final_placement, false, true, idx)});
    return {stopped && d1 > d0 && sym <= 1e-6,
            fmt("%d iterations, stop = %s, log10 F drop %.2f, min distance %.3f -> %.3f m, mirror gap %.2e m "
                "(<= 1e-6)",
                iterations, to_string(t.reason).c_str(), decades, d0, d1, sym)};
}

Verdict optimize_heterogeneous(const Paths& paths) {
    const Pipeline p(load(paths, "optimize_heterogeneous.json"));
    const ObjectiveEvaluator obj(p.model(), p.bundle, p.evaluation_index());
    const OptimizationTrace t = steepest_descent(p.model().placement, p.cfg.optimizer, p.model(), obj);
    std::vector<std::size_t> fast, slow;
    double move_fast = 0.0, move_slow = 0.0;
    const double alpha_max = p.model().alpha_max();
    for (std::size_t l = 0; l < t.initial.count(); ++l) {
        const Point2 a = t.initial.center(l);
        const Point2 b = t.final_placement.center(l);
        const double d = std::hypot(b.x - a.x, b.y - a.y);
        if (p.model().alpha_at(a.x) == alpha_max) {
            fast.push_back(l);
            move_fast += d;
        } else {
            slow.push_back(l);
            move_slow += d;
        }
    }
    move_fast /= static_cast<double>(std::max<std::size_t>(fast.size(), 1));
    move_slow /= static_cast<double>(std::max<std::size_t>(slow.size(), 1));
    const double ratio = move_slow > 0.0 ? move_fast / move_slow : std::numeric_limits<double>::infinity();
    const double sym = std::max(mirror_gap(t.final_placement, false, true, fast),
                                mirror_gap(t.final_placement, false, true, slow));
    return {ratio >= 2.0 && sym <= 1e-3,
            fmt("%zu iterations, stop = %s, mean move high-diffusivity %.3f m, low %.3f m, ratio %.2f (>= 2); "
                "y-mirror gap %.2e m (<= 1e-3)",
                t.iterations.size() - 1, to_string(t.reason).c_str(), move_fast, move_slow, ratio, sym)};
}

Verdict volterra_round_trip(const Paths& paths) {
    const Pipeline p(load(paths, "paper_default.json"));
    const auto& zs = p.bundle.zones.front();
    const auto& km = zs.km;
    const int Nt = km.lags;
    const double dt = km.dt;
    const auto soil = soil_coeffs_closed_form(p.model().thermal, p.model().geometry.depth_H, km.R);
    double worst_e = 0.0, worst_s = 0.0;
    for (int r = 0; r < km.R; ++r) {
        double scale_e = 0.0, gap_e = 0.0, gap_s = 0.0;
        for (int n = 1; n <= Nt; ++n) {
            double ex = 0.0, so = 0.0;
            for (int q = 1; q <= n; ++q) {
                ex += dt * km.E_mat(r, n - q) * zs.sources.eps(r, q - 1);
                so += dt * km.Ssrc_mat(r, n - q) * zs.sources.sig(r, q - 1);
            }
            const double target = zs.wall_modes.coeffs(r, n);
            scale_e = std::max(scale_e, std::abs(target));
            gap_e = std::max(gap_e, std::abs(ex - target));
            gap_s = std::max(gap_s, std::abs(so - soil[r]));
        }
        if (r < zs.active_modes && scale_e > 0.0) worst_e = std::max(worst_e, gap_e / scale_e);
        if (soil[r] != 0.0) worst_s = std::max(worst_s, gap_s / std::abs(soil[r]));
    }
    return {worst_e <= 1e-12 && worst_s <= 1e-12,
            fmt("%d active exchanger modes, %d soil modes, %d steps: max relative residual %.2e / %.2e (<= 1e-12)",
                zs.active_modes, km.R, Nt, worst_e, worst_s)};
}

Verdict kernel_oracles(const Paths&) {
    const double phi_err = testing::phi_quadrature_error(100, 17);
    const auto slab = testing::slab_heat_residual(20, 23);
    const double rod = testing::rod_eigen_error();
    return {phi_err <= 1e-10 && slab.points == 20 && slab.worst_ratio <= 1.0 && rod <= 1e-8,
            fmt("phi vs quadrature %.2e (<= 1e-10); slab residual / truncation %.2f (<= 1) at %d points; rod "
                "eigen decay %.2e (<= 1e-8)",
                phi_err, slab.worst_ratio, slab.points, rod)};
}

Verdict fd_invariants(const Paths& paths) {
    RunConfig cfg = load(paths, "desk_compare.json");
    const Pipeline p(cfg);
    const SpaceTimeGrid& g = p.grid;
    const FdOperator op = make_fd_operator(g, p.model(), g.time.dt);
    const Eigen::MatrixXd flat_wall = Eigen::MatrixXd::Constant(g.nz1(), g.footprints.size(), 283.25);

    std::vector<double> cur(g.node_count(), 283.25), next(g.node_count());
    std::vector<double> surface(g.nz1(), 283.25);
    step_explicit_euler(cur, next, g, op, surface, flat_wall, 1);
    bool constant_ok = next == cur;

    auto lin = [](double z) { return 280.0 + 0.15 * z; };
    Eigen::MatrixXd lin_wall(g.nz1(), g.footprints.size());
    for (int k = 0; k <= g.Nz; ++k) {
        surface[k] = lin(g.z[k]);
        lin_wall.row(k).setConstant(lin(g.z[k]));
        for (int j = 0; j <= g.Ny; ++j)
            for (int i = 0; i <= g.Nx; ++i) cur[g.index(i, j, k)] = lin(g.z[k]);
    }
    step_explicit_euler(cur, next, g, op, surface, lin_wall, 1);
    double lin_gap = 0.0;
    for (std::size_t q = 0; q < cur.size(); ++q) lin_gap = std::max(lin_gap, std::abs(next[q] - cur[q]));

    const ThermalBoundary& tb = p.model().thermal;
    const double lo = std::min({tb.T0_surface, tb.TH_bottom, p.model().fluid.inlet_temperature_Tin});
    const double hi = std::max({tb.T0_surface, tb.TH_bottom, p.model().fluid.inlet_temperature_Tin});
    double excursion = 0.0;
    int steps_seen = 0;
    p.fd([&](int, std::span<const double> state) {
        ++steps_seen;
        for (double v : state) excursion = std::max({excursion, lo - v, v - hi});
    });

    const CflResult cfl = cfl_check(0.5, 0.5, 0.5, 1.0, 0.05);
    const bool pass = constant_ok && lin_gap <= 1e-12 && excursion <= 0.0 && !cfl.pass &&
                      std::abs(cfl.value - 0.6) < 1e-12 && steps_seen == g.time.steps + 1;
    return {pass, fmt("constant field %s; linear-in-z max change %.1e K; %d states of a %zu-exchanger run stay in "
                      "[%.0f, %.0f] K (worst excursion %.1e); stability value at dt = 1 is %.3f (rejected: %s)",
                      constant_ok ? "unchanged" : "changed", lin_gap, steps_seen, g.footprints.size(), lo, hi,
                      std::max(excursion, 0.0), cfl.value, cfl.pass ? "no" : "yes")};
}

Verdict performance(const Paths& paths) {
    RunConfig cfg = load(paths, "optimize_homogeneous.json");
    cfg.discretization.cells = {70, 70, 40};
    cfg.discretization.horizon_days = 120.0;
    cfg.fd_coupling = FdCoupling::SharedProfile;
    cfg.plan.slices_z = {20.0};
    const Pipeline p(cfg);

    ObjectiveConfig one = p.cfg.optimizer;
    one.max_steps = 1;
    const ObjectiveEvaluator obj(p.model(), p.bundle, p.evaluation_index());
    auto t0 = std::chrono::steady_clock::now();
    const OptimizationTrace t = steepest_descent(p.model().placement, one, p.model(), obj);
    const double analytic_s = seconds_since(t0);

    const int solves = 4 * static_cast<int>(p.model().placement.count()) + 1;
    t0 = std::chrono::steady_clock::now();
    for (int s = 0; s < solves; ++s) p.fd();
    const double fd_s = seconds_since(t0);
    const double ratio = fd_s / analytic_s;
    return {ratio >= 10.0 && !t.iterations.empty(),
            fmt("analytic iteration %.3f s vs %d finite-difference solves %.2f s: ratio %.1f (>= 10)", analytic_s,
                solves, fd_s, ratio)};
}

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::ifstream in(e.path(), std::ios::binary);
        out[e.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return out;
}

Verdict determinism(const Paths& paths) {
    const fs::path a = paths.work / "determinism_a";
    const fs::path b = paths.work / "determinism_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const fs::path config = paths.configs / "desk_compare.json";
    auto run = [&](const fs::path& out) {
        const std::string cmd = "\"" + paths.cli.string() + "\" --config \"" + config.string() + "\" --out \"" +
                                out.string() + "\" --seed 7 > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const int rc_a = run(a);
    const int rc_b = run(b);
    const auto files_a = read_csvs(a);
    const auto files_b = read_csvs(b);
    std::size_t bytes = 0;
    for (const auto& [name, text] : files_a) bytes += text.size();
    const bool same = !files_a.empty() && files_a == files_b;
    return {rc_a == 0 && rc_b == 0 && same,
            fmt("exit codes %d/%d; %zu CSV files, %zu bytes, identical: %s", rc_a, rc_b, files_a.size(), bytes,
                same ? "yes" : "no")};
}

struct Criterion {
    int id;
    const char* name;
    Verdict (*run)(const Paths&);
};

const Criterion kCriteria[] = {
    {1, "single exchanger vs cylinder reference", single_exchanger},
    {2, "finite differences vs analytic on the 4x4 lattice", lattice_comparison},
    {3, "analytic gradient vs central differences", gradient_check},
    {4, "homogeneous placement optimization", optimize_homogeneous},
    {5, "heterogeneous placement optimization", optimize_heterogeneous},
    {6, "Volterra round trip", volterra_round_trip},
    {7, "kernel oracles", kernel_oracles},
    {8, "finite-difference invariants", fd_invariants},
    {9, "analytic vs finite-difference iteration cost", performance},
    {10, "deterministic CSV output", determinism},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for the geofield solvers"};
    Paths paths;
    std::vector<int> only;
    app.add_option("--configs", paths.configs, "Directory holding the shipped configurations")->required();
    app.add_option("--cli", paths.cli, "Path to the geofield executable")->required();
    app.add_option("--work", paths.work, "Scratch directory")->required();
    app.add_option("--criterion", only, "Run only these criteria (1-10)");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(paths.work);

    int failures = 0;
    for (const auto& c : kCriteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run(paths);
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d [%s] %s: %s (%.1f s)\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
