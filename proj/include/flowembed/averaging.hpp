#pragma once

#include <cstdint>
#include <vector>

#include "flowembed/map_model.hpp"

namespace flowembed {

/// Interpolating vector field of order m built from a map by discrete
/// averaging: X_m(x) = sum_{k=1}^m (-1)^{k-1}/k * Delta_k(x).
struct InterpField {
    AnyMap map;
    int order = 1;
};

/// Order plan derived from (epsilon, delta): the admissibility ratio,
/// the threshold M = delta / (6 e epsilon) and the optimal order
/// m_star = floor(M) + 1.
struct OrderPlan {
    double epsilon = 0;
    double delta = 0;
    double ratio = 0;        // epsilon / delta
    double m_threshold = 0;  // delta / (6 e epsilon)
    int m_star = 1;
    bool admissible = false;  // ratio <= 1/(6e)
};

/// 1/(6e), evaluated in full double precision.
double admissibility_threshold();

OrderPlan plan_order(double epsilon, double delta);

/// Radius of validity in mu for order m: delta/epsilon when m = 1,
/// 2 delta / (3 epsilon (m-1)) for m >= 2.
double mu_radius(double epsilon, double delta, int m);

/// Exact binomial coefficient; computed in 128-bit integers, k <= 60.
std::uint64_t binomial_exact(int k, int i);

/// Orbit x, f(x), ..., f^length(x) collected with length map calls.
std::vector<Point> orbit(const AnyMap& map, const Point& x, int length);

/// Forward difference Delta_k(x) along the orbit of f:
/// Delta_0(x) = x, Delta_k(x) = Delta_{k-1}(f(x)) - Delta_{k-1}(x).
/// Implemented by collecting the orbit once and differencing in place
/// (k map calls, k(k+1)/2 subtractions).
CVec delta(const AnyMap& map, const Point& x, int k);

/// Same value through the signed binomial sum
/// Delta_k(x) = sum_i C(k,i) (-1)^{k-i} f^i(x); serves as an
/// independent route for cross-checks. Accumulated with compensated
/// extended-precision sums so the heavy cancellation at large k does
/// not swamp the result.
CVec delta_binomial(const AnyMap& map, const Point& x, int k);

/// X_m(x) from a single orbit of length m; terms are accumulated in
/// ascending k with compensated summation.
CVec field_eval(const InterpField& field, const Point& x);

/// Sampled max of ||X_m||_inf over the delta/3-neighbourhood of D_0.
double field_norm_estimate(const InterpField& field, const Domain& dom,
                           const SampleGrid& grid);

/// Sampled max of ||Delta_k||_inf over the delta/3-neighbourhood.
double delta_norm_estimate(const AnyMap& map, int k, const Domain& dom,
                           const SampleGrid& grid);

}  // namespace flowembed
