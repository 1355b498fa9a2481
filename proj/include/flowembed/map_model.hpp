#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "flowembed/complexvec.hpp"
#include "flowembed/errors.hpp"

namespace flowembed {

/// State vector over C^n. Real points carry zero imaginary parts.
struct Point {
    CVec coords;

    explicit Point(CVec c);
    static Point real(const std::vector<double>& xs);

    int dim() const { return static_cast<int>(coords.size()); }
};

enum class BuiltinField { Pendulum, CubicOscillator };

std::string builtin_field_name(BuiltinField f);
BuiltinField builtin_field_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Built-in near-identity map families. The enumeration is closed:
// user-defined maps are out of scope, which keeps complex evaluation
// trustworthy.
// ---------------------------------------------------------------------------

struct Identity {
    int dimension = 1;
};

struct Translation {
    std::vector<double> shift;
};

struct LinearScalar {
    double lambda = 1.0;  // n = 1
};

/// One explicit Euler step of a built-in analytic vector field:
/// f = id + h * g.
struct EulerStep {
    BuiltinField field = BuiltinField::Pendulum;
    double step = 0.01;
};

/// Entire (analytic) symplectic kick map on (q, p):
///   p' = p + kick * sin(q),  q' = q + kick * p'.
struct StdSymplectic {
    double kick = 0.01;
};

struct MapSpec {
    std::variant<Identity, Translation, LinearScalar, EulerStep, StdSymplectic> family;

    int dimension() const;
    std::string family_name() const;

    static MapSpec identity(int n);
    static MapSpec translation(std::vector<double> shift);
    static MapSpec linear_scalar(double lambda);
    static MapSpec euler_step(BuiltinField field, double h);
    static MapSpec std_symplectic(double kick);
};

/// Linear interpolation between the identity and a base map:
/// f_mu(x) = (1 - mu) x + mu f(x). mu may be complex.
struct MuFamily {
    MapSpec base;
    Complex mu;
};

using AnyMap = std::variant<MapSpec, MuFamily>;

int dimension(const AnyMap& map);

/// f(x) - x evaluated from the family's explicit displacement formula
/// (not the round trip f(x) - x), so near-identity displacements do not
/// lose accuracy to the O(|x|) cancellation.
CVec displacement(const MapSpec& map, const Point& x);
CVec displacement(const AnyMap& map, const Point& x);

/// f(x) = x + displacement(x); exact complex-analytic formulas, no
/// real-only shortcuts. Throws EvalError when a component overflows.
Point eval(const MapSpec& map, const Point& x);
Point eval(const AnyMap& map, const Point& x);

/// f^k(x); f^0 = id. Evaluation errors are annotated with the failing
/// iterate index.
Point iterate(const AnyMap& map, const Point& x, int count);

/// Real box D_0 with complex neighbourhood radius delta. The shrunken
/// analyticity domain D_{delta/3} is the same box with radius delta/3.
struct Domain {
    std::vector<double> lower, upper;
    double delta = 0.0;

    Domain(std::vector<double> lo, std::vector<double> hi, double d);

    int dim() const { return static_cast<int>(lower.size()); }

    /// Distance from a complex point to the box, measured per coordinate
    /// as the complex-plane distance to the real segment, combined with
    /// the infinity norm across coordinates.
    double box_distance(const Point& z) const;

    bool contains_inflated(const Point& z, double radius) const;
};

struct SampleGrid {
    int real_points_per_axis = 21;
    int complex_ring_samples = 8;
};

/// Uniform real mesh over D_0 including endpoints; throws ConfigError
/// when the total point count exceeds max_points.
std::vector<Point> real_grid(const Domain& dom, const SampleGrid& grid,
                             std::size_t max_points = 10000);

/// Real grid points plus, per coordinate, complex offsets of modulus
/// `radius`: +-i*radius and i*radius*e^{i theta_j} for theta_j uniform
/// on [0, 2pi). Samples the infinity-norm polydisk neighbourhood.
std::vector<Point> complex_shell_samples(const Domain& dom, const SampleGrid& grid,
                                         double radius,
                                         std::size_t max_points = 10000);

/// Sampled max of ||f(z) - z||_inf over the delta-neighbourhood sample
/// set. A lower bound on the true supremum; certification compensates
/// with a safety factor.
double estimate_epsilon(const AnyMap& map, const Domain& dom, const SampleGrid& grid);

}  // namespace flowembed
