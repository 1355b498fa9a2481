#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flowembed/flow.hpp"

namespace flowembed {

/// Measured errors below this magnitude cannot be certified in double
/// precision regardless of integrator tolerance.
inline constexpr double kCertifiableFloor = 1e-16;

/// Embedding error bound for order m: 2 eps^2 / delta for m = 1,
/// 3 eps (6 (m-1) eps / delta)^m for m >= 2.
double theoretical_bound(double epsilon, double delta, int m);

struct ExpBound {
    double value = 0;
    bool underflow = false;  // below the certifiable floor
};

/// Exponential bound 3 eps exp(-delta / (6 e eps)) at the optimal order.
ExpBound exponential_bound(double epsilon, double delta);

struct CertifyConfig {
    SampleGrid grid;
    IntegratorConfig integrator;
    /// epsilon_used = safety_factor * sampled estimate, guarding against
    /// sampling underestimation of the true supremum.
    double safety_factor = 1.25;
    /// When set, replaces the padded estimate entirely.
    std::optional<double> epsilon_override;
};

struct ErrorReport {
    int m = 1;
    double measured_error = 0;  // sampled sup over the D_0 grid
    double bound_poly = 0;      // order-m bound (Remark bound at m = 1)
    std::optional<double> bound_exp;  // only at m = m_star
    double epsilon_used = 0;
    double delta = 0;
    long n_samples = 0;
    double integrator_discrepancy = 0;
    bool tolerance_limited = false;  // discrepancy > measured/100
    /// Admissibility held (for m >= 2) and m <= m_star. When false the
    /// measurement proceeded anyway but can never be "satisfied".
    bool within_plan = true;
    std::string note;  // non-empty when a sweep captured a per-m failure

    /// Recomputed, never stored: within plan, not tolerance limited,
    /// and measured_error <= bound_poly.
    bool satisfied() const;
};

/// ||Phi^1_{X_m}(x) - f(x)||_inf at a single point, via a verified flow.
/// Optionally reports the integrator discrepancy. Throws OrbitEscape if
/// the trajectory leaves the guard.
double embedding_error_at(const AnyMap& map, int m, const Point& x,
                          const IntegratorConfig& integ, const Domain& guard,
                          double* discrepancy = nullptr);

ErrorReport measure_error(const AnyMap& map, int m, const Domain& dom,
                          const CertifyConfig& cfg);

struct SweepResult {
    std::vector<ErrorReport> reports;
    int best_index = -1;  // empirically best m (smallest measured error)
};

/// measure_error for m = 1..min(m_max, m_star); per-m failures are
/// captured in the report note instead of aborting the sweep.
/// m_max <= 0 means "up to m_star".
SweepResult order_sweep(const AnyMap& map, const Domain& dom,
                        const CertifyConfig& cfg, int m_max);

struct OrderEstimate {
    int m = 1;
    std::array<double, 3> mu_values{};  // mu0, mu0/2, mu0/4
    std::array<double, 3> errors{};
    double observed_order = 0;  // log2(E(mu0/2) / E(mu0/4)); expect m+1
    bool inconclusive = false;  // some E at or below 100x the integrator floor
};

/// Richardson-style order check of Phi^1_{X_{m,mu}} = f_mu + O(mu^{m+1}).
OrderEstimate mu_order_check(const MapSpec& map, int m, const Domain& dom,
                             const CertifyConfig& cfg, int sample_count,
                             double mu0);

using VectorFieldFn = std::function<CVec(const Point&)>;

/// Central-difference directional derivative (v . grad) g at x along the
/// unit direction v / ||v||_inf, rescaled by ||v||_inf.
CVec directional_derivative(const VectorFieldFn& g, const Point& x, const CVec& v,
                            double fd_step);

/// Taylor coefficients a_k of the flow field in mu, k in {1,2,3}:
///   a_1 = f - id,
///   a_2 = -1/2 (a_1 . grad) a_1,
///   a_3 = -1/2 [(a_1 . grad) a_2 + (a_2 . grad) a_1]
///         - 1/6 (a_1 . grad)(a_1 . grad) a_1,
/// with all directional derivatives taken by nested central differences.
/// Throws UnstableDerivative when doubling fd_step moves the result by
/// more than 10%.
CVec lie_coefficient(const MapSpec& map, int k, const Point& x, double fd_step);

struct LieCheck {
    int k = 2;  // 2 or 3
    Point x;
    CVec a_k_numeric;     // from the recursion with numerical derivatives
    CVec a_k_from_field;  // mu^k coefficient fitted from X_{m,mu}(x)
    double rel_discrepancy = 0;
};

/// Evaluates X_{m,mu}(x) on mu_grid, fits a degree-m polynomial in mu
/// through the origin by least squares and compares the mu^k
/// coefficients against lie_coefficient for k = 2..m. m in {2,3};
/// mu_grid needs >= 2m+1 distinct positive values.
std::vector<LieCheck> lie_vs_field_taylor(const MapSpec& map, int m, const Point& x,
                                          const std::vector<double>& mu_grid,
                                          double fd_step);

struct SlopeRow {
    double h = 0;
    double epsilon_used = 0;
    double measured_error = 0;
};

struct SlopeResult {
    int m = 1;
    double slope = 0;  // d log(measured) / d log(epsilon); expect m+1
    std::vector<SlopeRow> rows;
};

/// Error-vs-epsilon slope over an Euler-step family with varying h
/// (>= 3 values in geometric progression). Throws when any report is
/// tolerance limited or the family is degenerate (epsilon = 0).
SlopeResult epsilon_slope_check(BuiltinField g, int m, const Domain& dom,
                                const CertifyConfig& cfg,
                                const std::vector<double>& h_values);

}  // namespace flowembed
