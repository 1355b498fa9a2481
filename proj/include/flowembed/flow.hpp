#pragma once

#include "flowembed/averaging.hpp"

namespace flowembed {

struct IntegratorConfig {
    double abs_tol = 1e-13;   // (0, 1e-3]
    double rel_tol = 1e-13;   // (0, 1e-3]
    int max_steps = 100000;   // >= 10, counts attempted steps
    double min_step = 1e-12;  // time units
};

struct FlowResult {
    Point endpoint;
    long accepted_steps = 0;
    long rejected_steps = 0;
    /// Heuristic accumulated error: sum of accepted local error
    /// estimates, or the two-tolerance endpoint discrepancy after a
    /// verified run.
    double est_global_error = 0;
    /// True when the trajectory left the delta/3-inflation of the guard
    /// box; endpoint is then the last in-domain state.
    bool escaped = false;
};

/// Integrates dx/dt = X_m(x) from t = 0 to t_final with the
/// Dormand-Prince 5(4) embedded pair and PI step-size control.
FlowResult flow_to_time(const InterpField& field, const Point& x0, double t_final,
                        const IntegratorConfig& cfg, const Domain& guard);

FlowResult flow_time_one(const InterpField& field, const Point& x0,
                         const IntegratorConfig& cfg, const Domain& guard);

/// Runs flow_time_one at (abs_tol, rel_tol) and again at 100x tighter
/// tolerances; returns the tighter result with est_global_error
/// replaced by the endpoint discrepancy. Throws FlowNonConvergence when
/// the endpoints differ by more than 100 * abs_tol. Use whenever a
/// measured error must be trusted below 1e-10.
FlowResult flow_time_one_verified(const InterpField& field, const Point& x0,
                                  const IntegratorConfig& cfg, const Domain& guard);

/// Fixed-step driver over the 5th-order formula (no error control);
/// exposed for convergence-order verification.
Point rk_fixed_steps(const InterpField& field, const Point& x0, double t_final,
                     int steps);

}  // namespace flowembed
