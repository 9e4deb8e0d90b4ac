#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geofield/analytic_solver.hpp"
#include "geofield/model.hpp"

namespace geofield {

struct ObjectiveConfig {
    double evaluation_time = 120.0;  // days
    double tol1 = 0.1;               // m
    double tol2 = 2.0;               // decades
    int max_steps = 150;
    int ring_points = 8;
    double offset_radius = 0.0;  // m; 0 selects max(2 m, 4 L_E)
    std::vector<double> depth_fractions{0.25, 0.5, 0.75};  // of H_E
    int max_halvings = 30;
    double first_move = 1.0;          // m, largest coordinate move of the first line-search trial
    double min_separation_factor = 2.0;  // centres kept at least this many L_E apart
    bool confine_to_zones = true;        // exchangers may not leave the soil zone they start in
};

struct EvaluationPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool operator==(const EvaluationPoint&) const = default;
};

double ring_radius(const ObjectiveConfig& cfg, const ExchangerSpec& exch);

/// Rings of points around every exchanger at the configured depths, clipped to the field, with points
/// on any exchanger footprint removed and duplicates merged.
std::vector<EvaluationPoint> evaluation_points(const Placement& placement, const FieldGeometry& geom,
                                               const ExchangerSpec& exch, const ObjectiveConfig& cfg);

/// Deviation objective sum_k (T_S(z_k) - u(x_k, t))^2 and its gradient at a fixed time node.
class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(const FieldModel& model, const SourceBundle& bundle, int time_index);

    double value(const Placement& p, std::span<const EvaluationPoint> points) const;
    double value_and_gradient(const Placement& p, std::span<const EvaluationPoint> points,
                              std::vector<double>& gradient) const;
    /// T_S(z_k) - u(x_k) for every point.
    std::vector<double> deviations(const Placement& p, std::span<const EvaluationPoint> points) const;

    /// False when an evaluation point lies on an exchanger footprint.
    bool admissible(const Placement& p, std::span<const EvaluationPoint> points) const;

    int time_index() const { return n_; }
    const FieldModel& model() const { return model_; }

private:
    const Eigen::VectorXd& weights(std::size_t zone, double z) const;
    bool beyond_reach(double qx, double qy, double alpha, double side) const;
    double gap(double x, double z) const;
    void check_points(const Placement& p, std::span<const EvaluationPoint> points) const;

    const FieldModel& model_;
    const SourceBundle& bundle_;
    AnalyticEvaluator evaluator_;
    int n_;
    mutable std::map<std::pair<std::size_t, double>, Eigen::VectorXd> weight_cache_;
    mutable std::map<std::pair<std::size_t, double>, double> gap_cache_;
};

enum class StopReason { StepTolerance, ObjectiveDecrease, MaxSteps, LineSearchFailure };

std::string to_string(StopReason reason);

struct IterationRecord {
    int iteration = 0;
    Placement placement;       // p^n
    double objective = 0.0;    // F(p^n; X^n)
    double gradient_norm = 0.0;  // infinity norm of the projected direction
    double step_length = 0.0;  // accepted beta
    double move = 0.0;         // ||p^{n+1} - p^n||_inf
    double accepted_objective = 0.0;  // F(p^{n+1}; X^{n+1})
    std::vector<int> active;   // frozen coordinate indices
    std::size_t point_count = 0;
};

struct OptimizationTrace {
    std::vector<IterationRecord> iterations;
    Placement initial;
    Placement final_placement;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    StopReason reason = StopReason::MaxSteps;
    std::string diagnostic;
    double seconds = 0.0;
};

/// Box-constrained steepest descent with backtracking line search.  Evaluation points follow the
/// exchangers, so every trial placement is scored on its own rings.
OptimizationTrace steepest_descent(const Placement& p0, const ObjectiveConfig& cfg, const FieldModel& model,
                                   const ObjectiveEvaluator& objective);

/// Per-coordinate box: the field, optionally narrowed to each exchanger's starting soil zone.
struct CoordinateBounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

CoordinateBounds coordinate_bounds(const Placement& p0, const FieldModel& model, bool confine_to_zones);

/// Pushes centres closer than min_distance apart, then clamps every coordinate into its bounds.
Placement project_feasible(const Placement& p, const CoordinateBounds& bounds, double min_distance);

}  // namespace geofield
