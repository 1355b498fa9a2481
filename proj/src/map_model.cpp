#include "flowembed/map_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace flowembed {

namespace {

std::string describe(const CVec& coords) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i) os << ", ";
        os << coords[i].real();
        if (coords[i].imag() != 0.0) os << (coords[i].imag() < 0 ? "-" : "+")
                                        << std::abs(coords[i].imag()) << "i";
    }
    os << ")";
    return os.str();
}

void require_finite_params(const std::vector<double>& xs, const char* what) {
    for (double v : xs)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite parameter");
}

}  // namespace

Point::Point(CVec c) : coords(std::move(c)) {
    if (coords.empty()) throw std::invalid_argument("Point: dimension must be >= 1");
    if (!all_finite(coords))
        throw std::invalid_argument("Point: non-finite component in " + describe(coords));
}

Point Point::real(const std::vector<double>& xs) {
    CVec c(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) c[i] = Complex(xs[i], 0.0);
    return Point(std::move(c));
}

std::string builtin_field_name(BuiltinField f) {
    switch (f) {
        case BuiltinField::Pendulum: return "pendulum";
        case BuiltinField::CubicOscillator: return "cubic_oscillator";
    }
    throw std::invalid_argument("builtin_field_name: unknown field");
}

BuiltinField builtin_field_from_name(const std::string& name) {
    if (name == "pendulum") return BuiltinField::Pendulum;
    if (name == "cubic_oscillator") return BuiltinField::CubicOscillator;
    throw std::invalid_argument("unknown built-in vector field: " + name);
}

int MapSpec::dimension() const {
    return std::visit(
        [](const auto& fam) -> int {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Identity>) return fam.dimension;
            else if constexpr (std::is_same_v<T, Translation>) return static_cast<int>(fam.shift.size());
            else if constexpr (std::is_same_v<T, LinearScalar>) return 1;
            else return 2;  // EulerStep, StdSymplectic
        },
        family);
}

std::string MapSpec::family_name() const {
    return std::visit(
        [](const auto& fam) -> std::string {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Identity>) return "identity";
            else if constexpr (std::is_same_v<T, Translation>) return "translation";
            else if constexpr (std::is_same_v<T, LinearScalar>) return "linear_scalar";
            else if constexpr (std::is_same_v<T, EulerStep>) return "euler_step";
            else return "std_symplectic";
        },
        family);
}

MapSpec MapSpec::identity(int n) {
    if (n < 1) throw std::invalid_argument("identity: dimension must be >= 1");
    return MapSpec{Identity{n}};
}

MapSpec MapSpec::translation(std::vector<double> shift) {
    if (shift.empty()) throw std::invalid_argument("translation: dimension must be >= 1");
    require_finite_params(shift, "translation");
    return MapSpec{Translation{std::move(shift)}};
}

MapSpec MapSpec::linear_scalar(double lambda) {
    if (!std::isfinite(lambda)) throw std::invalid_argument("linear_scalar: non-finite lambda");
    return MapSpec{LinearScalar{lambda}};
}

MapSpec MapSpec::euler_step(BuiltinField field, double h) {
    if (!std::isfinite(h)) throw std::invalid_argument("euler_step: non-finite step");
    return MapSpec{EulerStep{field, h}};
}

MapSpec MapSpec::std_symplectic(double kick) {
    if (!std::isfinite(kick)) throw std::invalid_argument("std_symplectic: non-finite kick");
    return MapSpec{StdSymplectic{kick}};
}

namespace {

CVec builtin_field_value(BuiltinField f, const CVec& x) {
    const Complex q = x[0], p = x[1];
    switch (f) {
        case BuiltinField::Pendulum: return {p, -std::sin(q)};
        case BuiltinField::CubicOscillator: return {p, -q * q * q};
    }
    throw std::invalid_argument("builtin_field_value: unknown field");
}

void require_dim(const MapSpec& map, const Point& x) {
    if (map.dimension() != x.dim())
        throw std::invalid_argument("map/point dimension mismatch: map is " +
                                    std::to_string(map.dimension()) + "-dimensional, point is " +
                                    std::to_string(x.dim()) + "-dimensional");
}

}  // namespace

CVec displacement(const MapSpec& map, const Point& x) {
    require_dim(map, x);
    return std::visit(
        [&x](const auto& fam) -> CVec {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Identity>) {
                return CVec(x.coords.size(), Complex(0.0, 0.0));
            } else if constexpr (std::is_same_v<T, Translation>) {
                CVec d(fam.shift.size());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = Complex(fam.shift[i], 0.0);
                return d;
            } else if constexpr (std::is_same_v<T, LinearScalar>) {
                return {(fam.lambda - 1.0) * x.coords[0]};
            } else if constexpr (std::is_same_v<T, EulerStep>) {
                CVec g = builtin_field_value(fam.field, x.coords);
                scale_inplace(g, Complex(fam.step, 0.0));
                return g;
            } else {  // StdSymplectic: p' = p + k sin q, q' = q + k p'
                const Complex q = x.coords[0], p = x.coords[1];
                const Complex dp = fam.kick * std::sin(q);
                const Complex dq = fam.kick * (p + dp);
                return {dq, dp};
            }
        },
        map.family);
}

CVec displacement(const AnyMap& map, const Point& x) {
    if (const auto* spec = std::get_if<MapSpec>(&map)) return displacement(*spec, x);
    const auto& fam = std::get<MuFamily>(map);
    CVec d = displacement(fam.base, x);
    scale_inplace(d, fam.mu);
    return d;
}

namespace {

Point apply_displacement(const AnyMap& map, const Point& x) {
    CVec d = displacement(map, x);
    CVec out(x.coords.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.coords[i] + d[i];
    if (!all_finite(out))
        throw EvalError("map evaluation overflowed at x = " + describe(x.coords));
    return Point(std::move(out));
}

}  // namespace

Point eval(const MapSpec& map, const Point& x) { return apply_displacement(AnyMap{map}, x); }

Point eval(const AnyMap& map, const Point& x) { return apply_displacement(map, x); }

int dimension(const AnyMap& map) {
    if (const auto* spec = std::get_if<MapSpec>(&map)) return spec->dimension();
    return std::get<MuFamily>(map).base.dimension();
}

Point iterate(const AnyMap& map, const Point& x, int count) {
    if (count < 0) throw std::invalid_argument("iterate: count must be >= 0");
    Point y = x;
    for (int k = 0; k < count; ++k) {
        try {
            y = eval(map, y);
        } catch (const EvalError& e) {
            throw EvalError(std::string(e.what()) + " (iterate " + std::to_string(k + 1) + ")",
                            k + 1);
        }
    }
    return y;
}

Domain::Domain(std::vector<double> lo, std::vector<double> hi, double d)
    : lower(std::move(lo)), upper(std::move(hi)), delta(d) {
    if (lower.empty() || lower.size() != upper.size())
        throw std::invalid_argument("Domain: bounds must be non-empty and of equal dimension");
    require_finite_params(lower, "Domain");
    require_finite_params(upper, "Domain");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("Domain: lower[" + std::to_string(i) +
                                        "] must be strictly below upper[" + std::to_string(i) + "]");
    if (!(delta > 0) || !std::isfinite(delta))
        throw std::invalid_argument("Domain: delta must be positive and finite");
}

double Domain::box_distance(const Point& z) const {
    if (z.dim() != dim()) throw std::invalid_argument("box_distance: dimension mismatch");
    double worst = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const double re = z.coords[i].real();
        const double im = z.coords[i].imag();
        double dre = 0.0;
        if (re < lower[i]) dre = lower[i] - re;
        else if (re > upper[i]) dre = re - upper[i];
        worst = std::max(worst, std::hypot(dre, im));
    }
    return worst;
}

bool Domain::contains_inflated(const Point& z, double radius) const {
    return box_distance(z) <= radius;
}

std::vector<Point> real_grid(const Domain& dom, const SampleGrid& grid,
                             std::size_t max_points) {
    if (grid.real_points_per_axis < 2)
        throw std::invalid_argument("SampleGrid: real_points_per_axis must be >= 2");
    const int n = dom.dim();
    const int per_axis = grid.real_points_per_axis;

    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        total *= static_cast<std::size_t>(per_axis);
        if (total > max_points)
            throw ConfigError("real grid exceeds " + std::to_string(max_points) + " points");
    }

    std::vector<Point> pts;
    pts.reserve(total);
    std::vector<int> idx(n, 0);
    for (std::size_t count = 0; count < total; ++count) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
            x[i] = dom.lower[i] + (dom.upper[i] - dom.lower[i]) * t;
        }
        pts.push_back(Point::real(x));
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
    }
    return pts;
}

std::vector<Point> complex_shell_samples(const Domain& dom, const SampleGrid& grid,
                                         double radius, std::size_t max_points) {
    if (!(radius > 0)) throw std::invalid_argument("complex_shell_samples: radius must be > 0");
    const std::vector<Point> base = real_grid(dom, grid, max_points);
    const int n = dom.dim();
    const int ring = grid.complex_ring_samples;

    // Offsets applied to one coordinate at a time: +-i r always, plus a
    // uniform ring i r e^{i theta_j} covering all directions of modulus r.
    std::vector<Complex> offsets;
    offsets.emplace_back(0.0, radius);
    offsets.emplace_back(0.0, -radius);
    for (int j = 0; j < ring; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(ring);
        offsets.push_back(Complex(0.0, radius) * std::polar(1.0, theta));
    }

    std::vector<Point> out;
    out.reserve(base.size() * (1 + static_cast<std::size_t>(n) * offsets.size()));
    for (const Point& b : base) {
        out.push_back(b);
        for (int c = 0; c < n; ++c) {
            for (const Complex& w : offsets) {
                CVec z = b.coords;
                z[c] += w;
                out.push_back(Point(std::move(z)));
            }
        }
    }
    return out;
}

double estimate_epsilon(const AnyMap& map, const Domain& dom, const SampleGrid& grid) {
    if (grid.complex_ring_samples < 1)
        throw std::invalid_argument(
            "estimate_epsilon: complex_ring_samples must be >= 1 for analytic estimation");
    if (dimension(map) != dom.dim())
        throw std::invalid_argument("estimate_epsilon: map/domain dimension mismatch");
    double worst = 0.0;
    for (const Point& z : complex_shell_samples(dom, grid, dom.delta))
        worst = std::max(worst, inf_norm(displacement(map, z)));
    return worst;
}

}  // namespace flowembed
