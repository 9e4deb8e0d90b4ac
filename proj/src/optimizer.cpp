#include "geofield/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <tuple>

#include "geofield/errors.hpp"

namespace geofield {

namespace {

std::vector<Point2> ring_offsets(int count) {
    if (count == 8) {
        const double s = std::sqrt(0.5);
        return {{1, 0}, {s, s}, {0, 1}, {-s, s}, {-1, 0}, {-s, -s}, {0, -1}, {s, -s}};
    }
    std::vector<Point2> out;
    for (int k = 0; k < count; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / count;
        double c = std::cos(theta);
        double s = std::sin(theta);
        if (std::abs(c) < 1e-15) c = 0.0;
        if (std::abs(s) < 1e-15) s = 0.0;
        out.push_back({c, s});
    }
    return out;
}

bool on_footprint(double x, double y, const Placement& p, double half_side) {
    for (std::size_t l = 0; l < p.count(); ++l) {
        const Point2 c = p.center(l);
        if (std::abs(x - c.x) <= half_side && std::abs(y - c.y) <= half_side) return true;
    }
    return false;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

double ring_radius(const ObjectiveConfig& cfg, const ExchangerSpec& exch) {
    return cfg.offset_radius > 0.0 ? cfg.offset_radius : std::max(2.0, 4.0 * exch.side_L_E);
}

std::vector<EvaluationPoint> evaluation_points(const Placement& placement, const FieldGeometry& geom,
                                               const ExchangerSpec& exch, const ObjectiveConfig& cfg) {
    const double radius = ring_radius(cfg, exch);
    if (radius >= 2.0 * std::min(geom.half_width_A, geom.half_width_B)) {
        throw ConfigError("optimizer.eval_point_offset_radius_m", "ring radius does not fit inside the field");
    }
    if (cfg.ring_points < 1) throw ConfigError("optimizer.eval_point_count", "at least one ring point is required");
    const auto offsets = ring_offsets(cfg.ring_points);
    std::vector<EvaluationPoint> points;
    std::set<std::tuple<long long, long long, long long>> seen;
    for (double f : cfg.depth_fractions) {
        const double z = f * exch.depth_H_E;
        if (!(z > 0.0 && z < geom.depth_H)) {
            throw ConfigError("optimizer.depth_fractions", "evaluation depth outside (0, H)");
        }
        for (std::size_t l = 0; l < placement.count(); ++l) {
            const Point2 c = placement.center(l);
            for (const auto& o : offsets) {
                const double x = c.x + radius * o.x;
                const double y = c.y + radius * o.y;
                if (std::abs(x) > geom.half_width_A || std::abs(y) > geom.half_width_B) continue;
                if (on_footprint(x, y, placement, 0.5 * exch.side_L_E)) continue;
                const auto key = std::make_tuple(std::llround(x * 1e9), std::llround(y * 1e9), std::llround(z * 1e9));
                if (!seen.insert(key).second) continue;
                points.push_back({x, y, z});
            }
        }
    }
    return points;
}

ObjectiveEvaluator::ObjectiveEvaluator(const FieldModel& model, const SourceBundle& bundle, int time_index)
    : model_(model), bundle_(bundle), evaluator_(model, bundle), n_(time_index) {
    if (n_ < 1 || n_ > bundle.time.steps) {
        throw ConfigError("optimizer.evaluation_time_days", "evaluation time outside the simulated horizon");
    }
}

const Eigen::VectorXd& ObjectiveEvaluator::weights(std::size_t zone, double z) const {
    const auto key = std::make_pair(zone, z);
    auto it = weight_cache_.find(key);
    if (it == weight_cache_.end()) it = weight_cache_.emplace(key, evaluator_.lag_weights(zone, z, n_)).first;
    return it->second;
}

double ObjectiveEvaluator::gap(double x, double z) const {
    const auto key = std::make_pair(model_.zone_index(x), z);
    auto it = gap_cache_.find(key);
    if (it == gap_cache_.end()) {
        const double v = undisturbed_profile(z, model_.thermal, model_.geometry.depth_H) - evaluator_.background(x, z, n_);
        it = gap_cache_.emplace(key, v).first;
    }
    return it->second;
}

bool ObjectiveEvaluator::admissible(const Placement& p, std::span<const EvaluationPoint> points) const {
    const double half = 0.5 * model_.exchanger.side_L_E;
    for (const auto& pt : points)
        if (on_footprint(pt.x, pt.y, p, half)) return false;
    return true;
}

void ObjectiveEvaluator::check_points(const Placement& p, std::span<const EvaluationPoint> points) const {
    const double half = 0.5 * model_.exchanger.side_L_E;
    for (const auto& pt : points) {
        if (on_footprint(pt.x, pt.y, p, half)) {
            throw NumericError("objective: evaluation point (" + std::to_string(pt.x) + ", " + std::to_string(pt.y) +
                               ") lies on an exchanger footprint");
        }
    }
}

bool ObjectiveEvaluator::beyond_reach(double qx, double qy, double alpha, double side) const {
    // erfc(10) below this distance
    const double reach = 0.5 * side + 20.0 * std::sqrt(alpha * n_ * bundle_.time.dt);
    return std::abs(qx) > reach || std::abs(qy) > reach;
}

std::vector<double> ObjectiveEvaluator::deviations(const Placement& p, std::span<const EvaluationPoint> points) const {
    check_points(p, points);
    const double H = model_.geometry.depth_H;
    const double LE = model_.exchanger.side_L_E;
    const double dt = bundle_.time.dt;
    std::vector<double> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& pt = points[k];
        double u = 0.0;
        for (std::size_t l = 0; l < p.count(); ++l) {
            const Point2 c = p.center(l);
            const std::size_t zone = model_.zone_index(c.x);
            const double alpha = bundle_.zones[zone].alpha;
            if (beyond_reach(pt.x - c.x, pt.y - c.y, alpha, LE)) continue;
            const Eigen::VectorXd& K = weights(zone, pt.z);
            for (int m = 0; m < n_; ++m) {
                const double t = (m + 0.5) * dt;
                u += K(m) * phi(pt.x - c.x, t, alpha, H, LE) * phi(pt.y - c.y, t, alpha, H, LE);
            }
        }
        out[k] = gap(pt.x, pt.z) - u;
    }
    return out;
}

double ObjectiveEvaluator::value(const Placement& p, std::span<const EvaluationPoint> points) const {
    double f = 0.0;
    for (double d : deviations(p, points)) f += d * d;
    return f;
}

double ObjectiveEvaluator::value_and_gradient(const Placement& p, std::span<const EvaluationPoint> points,
                                              std::vector<double>& gradient) const {
    const auto dev = deviations(p, points);
    const double H = model_.geometry.depth_H;
    const double LE = model_.exchanger.side_L_E;
    const double dt = bundle_.time.dt;
    gradient.assign(p.coords.size(), 0.0);
    double f = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& pt = points[k];
        f += dev[k] * dev[k];
        for (std::size_t l = 0; l < p.count(); ++l) {
            const Point2 c = p.center(l);
            const std::size_t zone = model_.zone_index(c.x);
            const double alpha = bundle_.zones[zone].alpha;
            const double qx = pt.x - c.x;
            const double qy = pt.y - c.y;
            if (beyond_reach(qx, qy, alpha, LE)) continue;
            const Eigen::VectorXd& K = weights(zone, pt.z);
            double du_dx = 0.0;
            double du_dy = 0.0;
            for (int m = 0; m < n_; ++m) {
                const double t = (m + 0.5) * dt;
                du_dx += K(m) * dphi_dcenter(qx, t, alpha, H, LE) * phi(qy, t, alpha, H, LE);
                du_dy += K(m) * phi(qx, t, alpha, H, LE) * dphi_dcenter(qy, t, alpha, H, LE);
            }
            gradient[2 * l] -= 2.0 * dev[k] * du_dx;
            gradient[2 * l + 1] -= 2.0 * dev[k] * du_dy;
        }
    }
    return f;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::StepTolerance: return "step-tolerance";
        case StopReason::ObjectiveDecrease: return "objective-decrease";
        case StopReason::MaxSteps: return "max-steps";
        case StopReason::LineSearchFailure: return "line-search-failure";
    }
    return "unknown";
}

CoordinateBounds coordinate_bounds(const Placement& p0, const FieldModel& model, bool confine_to_zones) {
    const auto& g = model.geometry;
    CoordinateBounds b;
    for (std::size_t l = 0; l < p0.count(); ++l) {
        double lo = -g.half_width_A;
        double hi = g.half_width_A;
        if (confine_to_zones && !model.homogeneous()) {
            const std::size_t zi = model.zone_index(p0.center(l).x);
            const auto& zone = model.zones[zi];
            lo = zone.x_min;
            hi = zi + 1 < model.zones.size() ? std::nextafter(zone.x_max, lo) : zone.x_max;
        }
        b.lower.push_back(lo);
        b.upper.push_back(hi);
        b.lower.push_back(-g.half_width_B);
        b.upper.push_back(g.half_width_B);
    }
    return b;
}

Placement project_feasible(const Placement& p, const CoordinateBounds& bounds, double min_distance) {
    Placement q = p;
    auto clamp_all = [&] {
        for (std::size_t i = 0; i < q.coords.size(); ++i) {
            q.coords[i] = std::clamp(q.coords[i], bounds.lower[i], bounds.upper[i]);
        }
    };
    clamp_all();
    for (int pass = 0; pass < 10; ++pass) {
        bool moved = false;
        for (std::size_t a = 0; a < q.count(); ++a) {
            for (std::size_t b = a + 1; b < q.count(); ++b) {
                const Point2 pa = q.center(a);
                const Point2 pb = q.center(b);
                double dx = pb.x - pa.x;
                double dy = pb.y - pa.y;
                const double d = std::hypot(dx, dy);
                if (d >= min_distance) continue;
                if (d == 0.0) {
                    dx = 1.0;
                    dy = 0.0;
                } else {
                    dx /= d;
                    dy /= d;
                }
                const double push = 0.5 * (min_distance - d);
                q.set_center(a, {pa.x - push * dx, pa.y - push * dy});
                q.set_center(b, {pb.x + push * dx, pb.y + push * dy});
                moved = true;
            }
        }
        clamp_all();
        if (!moved) break;
    }
    return q;
}

OptimizationTrace steepest_descent(const Placement& p0, const ObjectiveConfig& cfg, const FieldModel& model,
                                   const ObjectiveEvaluator& objective) {
    const auto started = std::chrono::steady_clock::now();
    const auto& geom = model.geometry;
    const double min_distance = cfg.min_separation_factor * model.exchanger.side_L_E;
    OptimizationTrace trace;
    trace.initial = p0;
    const CoordinateBounds bounds = coordinate_bounds(p0, model, cfg.confine_to_zones);
    Placement p = project_feasible(p0, bounds, min_distance);
    auto points = evaluation_points(p, geom, model.exchanger, cfg);
    double F = objective.value(p, points);
    trace.initial_objective = F;
    const double logF0 = std::log10(F);

    auto at_lower = [&](std::size_t i) { return p.coords[i] <= bounds.lower[i]; };
    auto at_upper = [&](std::size_t i) { return p.coords[i] >= bounds.upper[i]; };

    for (int n = 0;; ++n) {
        IterationRecord rec;
        rec.iteration = n;
        rec.placement = p;
        rec.point_count = points.size();
        std::vector<double> g;
        F = objective.value_and_gradient(p, points, g);
        rec.objective = F;
        if (F == 0.0) {
            trace.reason = StopReason::StepTolerance;
            trace.diagnostic = "objective vanished";
            trace.iterations.push_back(rec);
            break;
        }
        std::vector<double> d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            d[i] = -g[i];
            if ((d[i] < 0.0 && at_lower(i)) || (d[i] > 0.0 && at_upper(i))) {
                d[i] = 0.0;
                rec.active.push_back(static_cast<int>(i));
            }
        }
        const double dmax = inf_norm(d);
        rec.gradient_norm = dmax;
        if (dmax <= 1e-12 * std::max(1.0, F)) {
            rec.accepted_objective = F;
            trace.iterations.push_back(rec);
            trace.reason = StopReason::StepTolerance;
            trace.diagnostic = "projected gradient vanished";
            break;
        }
        double beta = cfg.first_move / inf_norm(g);
        bool accepted = false;
        Placement trial;
        std::vector<EvaluationPoint> trial_points;
        double Ft = F;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            Placement cand = p;
            for (std::size_t i = 0; i < d.size(); ++i) cand.coords[i] += beta * d[i];
            cand = project_feasible(cand, bounds, min_distance);
            auto cand_points = evaluation_points(cand, geom, model.exchanger, cfg);
            Ft = objective.value(cand, cand_points);
            if (Ft < F) {
                trial = std::move(cand);
                trial_points = std::move(cand_points);
                accepted = true;
                break;
            }
            beta *= 0.5;
        }
        if (!accepted) {
            rec.accepted_objective = F;
            trace.iterations.push_back(rec);
            trace.reason = StopReason::LineSearchFailure;
            trace.diagnostic = "no decrease along the projected gradient after " + std::to_string(cfg.max_halvings) +
                               " halvings";
            break;
        }
        double move = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) move = std::max(move, std::abs(trial.coords[i] - p.coords[i]));
        rec.step_length = beta;
        rec.move = move;
        rec.accepted_objective = Ft;
        trace.iterations.push_back(rec);
        p = std::move(trial);
        points = std::move(trial_points);
        const double Fnext = Ft;
        if (move <= cfg.tol1) {
            trace.reason = StopReason::StepTolerance;
            break;
        }
        if (logF0 - std::log10(Fnext) >= cfg.tol2) {
            trace.reason = StopReason::ObjectiveDecrease;
            break;
        }
        if (n + 1 >= cfg.max_steps) {
            trace.reason = StopReason::MaxSteps;
            break;
        }
    }
    trace.final_placement = p;
    trace.final_objective = objective.value(p, evaluation_points(p, geom, model.exchanger, cfg));
    trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return trace;
}

}  // namespace geofield
