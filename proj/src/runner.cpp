#include "geofield/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "geofield/csv_io.hpp"
#include "geofield/errors.hpp"

namespace geofield {

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Context {
    const RunConfig& cfg;
    RunReport& report;
    FieldModel model;
    TimeGrid time;
    SpaceTimeGrid grid;
    Stopwatch clock;

    std::filesystem::path out(const std::string& name) const { return cfg.plan.out_dir / name; }

    void write(const std::string& name, const std::string& content) {
        write_text(out(name), content);
        report.add_output(name);
    }

    void write_slices(const std::string& prefix, const TemperatureField& field) {
        for (const auto& s : field.slices) {
            const std::string name = slice_file_name(prefix, s.z);
            write_slice_file(out(name), field, s, cfg.plan.csv_time_stride);
            report.add_output(name);
        }
    }
};

void prepare(Context& ctx) {
    const Discretization& d = ctx.cfg.discretization;
    ctx.time = make_time_grid(d.horizon_days, d.dt_days);
    ctx.grid = build_adapted_grid(ctx.model.geometry, ctx.model.exchanger, ctx.model.placement, d.cells, ctx.time);
    for (double z : ctx.cfg.plan.slices_z) ctx.grid.z_index(z);
    ctx.report.set("grid", grid_summary(ctx.grid));
    ctx.report.set("convection", convection_summary(convection_params(ctx.model.fluid, ctx.model.exchanger)));
    ctx.report.add_timing("grid", ctx.clock.lap());
}

SourceBundle sources(Context& ctx) {
    SourceBundle b = couple_sources(ctx.model, ctx.grid.z, ctx.grid.k_exchanger, ctx.time, ctx.cfg.analytic);
    ctx.report.set("sources", source_summary(b));
    ctx.report.add_timing("sources", ctx.clock.lap());
    return b;
}

TemperatureField run_fd(Context& ctx, const SourceBundle* bundle) {
    const CflResult cfl = cfl_check(ctx.grid, ctx.model.alpha_max());
    ctx.report.set("cfl", cfl_summary(cfl, 1));
    if (!cfl.pass && !ctx.cfg.discretization.allow_substeps) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "stability bound violated (%.6g > 0.5); suggested time step %.6g days",
                      cfl.value, cfl.suggested_dt);
        throw NumericError(msg);
    }

    FdOptions opts;
    opts.slice_z = ctx.cfg.plan.slices_z;
    opts.coupling = ctx.cfg.fd_coupling;
    opts.coupling_settings = ctx.cfg.analytic.coupling;
    opts.allow_substeps = ctx.cfg.discretization.allow_substeps;
    std::vector<Eigen::MatrixXd> walls;
    if (opts.coupling == FdCoupling::SharedProfile) {
        for (const auto& z : bundle->zones) walls.push_back(z.wall);
        opts.zone_walls = &walls;
    }
    FdDiagnostics diag;
    TemperatureField field = simulate_fd(ctx.model, ctx.grid, opts, &diag);
    ctx.report.set("cfl", cfl_summary(diag.cfl, diag.substeps));
    ctx.report.set("fd", fd_summary(diag));
    ctx.report.add_timing("fd", ctx.clock.lap());
    return field;
}

TemperatureField run_analytic(Context& ctx, const SourceBundle& bundle) {
    TemperatureField field =
        simulate_analytic(ctx.model, ctx.grid, bundle, ctx.grid.snapped_placement, ctx.cfg.plan.slices_z);
    ctx.report.add_timing("analytic_slices", ctx.clock.lap());
    return field;
}

void write_errors(Context& ctx, const TemperatureField& reference, const TemperatureField& other) {
    RunReport::Json summaries = RunReport::Json::array();
    bool first = true;
    for (double z : ctx.cfg.plan.slices_z) {
        const std::vector<double> err = relative_error(reference, other, z);
        summaries.push_back(error_summary(z, err));
        if (first) ctx.write("relative_error.csv", relative_error_csv(err, ctx.time));
        first = false;
    }
    ctx.report.set("relative_error", summaries);
}

void simulate_fd_command(Context& ctx) {
    prepare(ctx);
    SourceBundle bundle;
    if (ctx.cfg.fd_coupling == FdCoupling::SharedProfile) bundle = sources(ctx);
    ctx.write_slices("fd", run_fd(ctx, &bundle));
}

void simulate_analytic_command(Context& ctx) {
    prepare(ctx);
    const SourceBundle bundle = sources(ctx);
    ctx.write_slices("analytic", run_analytic(ctx, bundle));
}

void compare_command(Context& ctx) {
    prepare(ctx);
    const SourceBundle bundle = sources(ctx);
    const TemperatureField analytic = run_analytic(ctx, bundle);
    const TemperatureField fd = run_fd(ctx, &bundle);
    ctx.write_slices("analytic", analytic);
    ctx.write_slices("fd", fd);
    write_errors(ctx, fd, analytic);
}

void validate_single_command(Context& ctx) {
    if (ctx.model.placement.count() == 0) {
        throw ConfigError("placement.centers_m", "validate-single needs at least one exchanger");
    }
    const Point2 c = ctx.model.placement.center(0);
    ctx.model.placement = Placement(std::vector<double>{c.x, c.y});
    prepare(ctx);
    const SourceBundle bundle = sources(ctx);
    const TemperatureField analytic = run_analytic(ctx, bundle);

    const Point2 center = ctx.grid.snapped_placement.center(0);
    const ZoneSources& zone = bundle.zones[ctx.model.zone_index(center.x)];
    CylindricalSolution raw;
    const TemperatureField cyl = cylindrical_field(ctx.model, zone, ctx.time, ctx.grid.z, ctx.grid.x, ctx.grid.y,
                                                   center, ctx.cfg.plan.slices_z, ctx.cfg.cylinder, &raw);
    ctx.report.set("cylinder", cylinder_summary(raw));
    ctx.report.add_timing("cylinder", ctx.clock.lap());
    ctx.write_slices("analytic", analytic);
    ctx.write_slices("cylinder", cyl);
    write_errors(ctx, cyl, analytic);
}

void optimize_command(Context& ctx) {
    prepare(ctx);
    const SourceBundle bundle = sources(ctx);
    const ObjectiveConfig& oc = ctx.cfg.optimizer;
    const int n = static_cast<int>(round_nearest(oc.evaluation_time / ctx.time.dt));
    const ObjectiveEvaluator objective(ctx.model, bundle, n);
    const OptimizationTrace trace = steepest_descent(ctx.model.placement, oc, ctx.model, objective);
    ctx.report.set("optimizer", optimizer_summary(trace));
    ctx.report.add_timing("optimize", ctx.clock.lap());
    ctx.write("trace.csv", trace_csv(trace));
    ctx.write("final_placement.json", placement_to_json(trace.final_placement));
}

}  // namespace

void run_command(const RunConfig& cfg, RunReport& report) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.plan.out_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.plan.out_dir.string() + ": " + ec.message());

    Context ctx{cfg, report, cfg.model, {}, {}, {}};
    report.set("command", to_string(cfg.plan.command));
    report.set("seed", cfg.plan.seed);
    report.set("config", RunReport::Json::parse(config_to_json(cfg)));
    for (const auto& w : cfg.warnings) report.add_warning(w);

    switch (cfg.plan.command) {
        case Command::SimulateFd: simulate_fd_command(ctx); break;
        case Command::SimulateAnalytic: simulate_analytic_command(ctx); break;
        case Command::Compare: compare_command(ctx); break;
        case Command::Optimize: optimize_command(ctx); break;
        case Command::ValidateSingle: validate_single_command(ctx); break;
    }
}

int execute(const RunConfig& cfg, std::string* message) {
    RunReport report;
    int code = kExitOk;
    try {
        run_command(cfg, report);
    } catch (const ConfigError& e) {
        report.fail("config", e.what());
        code = kExitConfig;
        if (message) *message = e.what();
    } catch (const NumericError& e) {
        report.fail("numeric", e.what());
        code = kExitNumeric;
        if (message) *message = e.what();
    } catch (const IoError& e) {
        report.fail("io", e.what());
        code = kExitIo;
        if (message) *message = e.what();
    }
    try {
        write_text(cfg.plan.out_dir / "report.json", report.dump());
    } catch (const IoError& e) {
        if (message && code == kExitOk) *message = e.what();
        if (code == kExitOk) code = kExitIo;
    }
    return code;
}

}  // namespace geofield
