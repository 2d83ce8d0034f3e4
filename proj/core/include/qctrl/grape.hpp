#pragma once

// Variational optimal control in reduced form: J = A - C with the dynamics
// enforced by construction, adjoint (forward/backward) gradients with the
// exact spectral propagator derivative, and monotone gradient ascent over
// piecewise-constant fields.

#include <optional>
#include <vector>

#include "qctrl/dynamics.hpp"

namespace qctrl {

enum class ObjectiveKind { OBSERVABLE, GATE };

// OBSERVABLE: maximize Tr[A rho(t_F)] from rho0.
// GATE: maximize |Tr[target^dag U(t_F)]|^2 / N^2.
// lambdas are the quadratic field-energy penalty weights, one per field.
struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::OBSERVABLE;
    std::optional<HermitianOperator> observable;
    std::optional<DensityOperator> rho0;
    std::optional<Matrix> target_gate;
    Eigen::VectorXd lambdas;
};

ObjectiveSpec observable_objective(HermitianOperator a, DensityOperator rho0,
                                   Eigen::VectorXd lambdas);
ObjectiveSpec gate_objective(Matrix target, Eigen::VectorXd lambdas);

struct ObjectiveValue {
    double a_term = 0.0;
    double c_term = 0.0;
    double j = 0.0;
};

// sum_m (lambda_m / 2) sum_k f_mk^2 dt
double field_energy_cost(const PulseSchedule& sched, const Eigen::VectorXd& lambdas);

ObjectiveValue evaluate_objective(const ControlSystem& sys, const PulseSchedule& sched,
                                  const ObjectiveSpec& obj);

// dJ/df_mk as a K x M matrix, exact for the piecewise-constant dynamics.
Eigen::MatrixXd gradient(const ControlSystem& sys, const PulseSchedule& sched,
                         const ObjectiveSpec& obj);

struct OptimizeOptions {
    int max_iter = 500;
    double step = 1.0;        // initial ascent step
    bool line_search = true;  // backtracking with an Armijo condition
    double tol_grad = 1e-8;   // infinity-norm stopping threshold
};

struct OptimizationReport {
    int iterations = 0;
    std::vector<double> j_history; // accepted steps only; non-decreasing
    double final_a_term = 0.0;
    double final_cost = 0.0;
    bool converged = false;
    double wall_time_seconds = 0.0;
};

struct OptimizeResult {
    PulseSchedule schedule;
    OptimizationReport report;
};

OptimizeResult optimize(const ControlSystem& sys, const PulseSchedule& sched0,
                        const ObjectiveSpec& obj, const OptimizeOptions& opts);

} // namespace qctrl
