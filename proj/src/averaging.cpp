#include "flowembed/averaging.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flowembed {

double admissibility_threshold() { return 1.0 / (6.0 * std::numbers::e); }

OrderPlan plan_order(double epsilon, double delta) {
    if (!(epsilon > 0) || !std::isfinite(epsilon))
        throw std::invalid_argument("plan_order: epsilon must be positive");
    if (!(delta > 0) || !std::isfinite(delta))
        throw std::invalid_argument("plan_order: delta must be positive");

    OrderPlan p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.ratio = epsilon / delta;
    const double six_e = 6.0 * std::numbers::e;
    p.m_threshold = delta / (six_e * epsilon);
    // Guard the int conversion for absurdly small epsilon.
    p.m_star = p.m_threshold >= 1e9 ? 1000000000
                                    : static_cast<int>(std::floor(p.m_threshold)) + 1;
    p.admissible = p.ratio <= 1.0 / six_e;
    return p;
}

double mu_radius(double epsilon, double delta, int m) {
    if (!(epsilon > 0) || !(delta > 0))
        throw std::invalid_argument("mu_radius: epsilon and delta must be positive");
    if (m < 1) throw std::invalid_argument("mu_radius: m must be >= 1");
    if (m == 1) return delta / epsilon;
    return 2.0 * delta / (3.0 * epsilon * static_cast<double>(m - 1));
}

std::uint64_t binomial_exact(int k, int i) {
    if (k < 0 || i < 0 || i > k) throw std::invalid_argument("binomial_exact: need 0 <= i <= k");
    if (k > 60) throw std::invalid_argument("binomial_exact: k capped at 60");
    if (i > k - i) i = k - i;
    unsigned __int128 b = 1;
    for (int j = 1; j <= i; ++j) {
        b *= static_cast<unsigned __int128>(k - i + j);
        b /= static_cast<unsigned __int128>(j);  // exact: C(k-i+j, j) is an integer
    }
    return static_cast<std::uint64_t>(b);
}

std::vector<Point> orbit(const AnyMap& map, const Point& x, int length) {
    if (length < 0) throw std::invalid_argument("orbit: length must be >= 0");
    std::vector<Point> ys;
    ys.reserve(static_cast<std::size_t>(length) + 1);
    ys.push_back(x);
    for (int k = 1; k <= length; ++k) {
        try {
            ys.push_back(eval(map, ys.back()));
        } catch (const EvalError& e) {
            throw EvalError(std::string(e.what()) + " (orbit iterate " + std::to_string(k) + ")", k);
        }
    }
    return ys;
}

namespace {

std::vector<CVec> orbit_coords(const AnyMap& map, const Point& x, int length) {
    std::vector<Point> ys = orbit(map, x, length);
    std::vector<CVec> d;
    d.reserve(ys.size());
    for (Point& y : ys) d.push_back(std::move(y.coords));
    return d;
}

// One in-place differencing pass: after the call d[i] holds the next
// difference level for i = 0..last-1.
void difference_pass(std::vector<CVec>& d, std::size_t last) {
    for (std::size_t i = 0; i < last; ++i) d[i] = sub(d[i + 1], d[i]);
}

}  // namespace

CVec delta(const AnyMap& map, const Point& x, int k) {
    if (k < 0) throw std::invalid_argument("delta: k must be >= 0");
    if (k == 0) return x.coords;
    std::vector<CVec> d = orbit_coords(map, x, k);
    for (int level = 1; level <= k; ++level)
        difference_pass(d, static_cast<std::size_t>(k - level + 1));
    return d[0];
}

CVec delta_binomial(const AnyMap& map, const Point& x, int k) {
    if (k < 0) throw std::invalid_argument("delta_binomial: k must be >= 0");
    if (k == 0) return x.coords;
    std::vector<CVec> ys = orbit_coords(map, x, k);
    const std::size_t n = x.coords.size();

    // Signed binomial sums cancel down to near-identity scale; the
    // per-component accumulation is a Neumaier sum in long double so the
    // survivors stay meaningful up to k = 60.
    CVec out(n);
    for (std::size_t c = 0; c < n; ++c) {
        long double re = 0.0L, re_comp = 0.0L, im = 0.0L, im_comp = 0.0L;
        auto add = [](long double& s, long double& comp, long double t) {
            const long double u = s + t;
            if (std::abs(s) >= std::abs(t))
                comp += (s - u) + t;
            else
                comp += (t - u) + s;
            s = u;
        };
        for (int i = 0; i <= k; ++i) {
            const long double w = ((k - i) % 2 == 0 ? 1.0L : -1.0L) *
                                  static_cast<long double>(binomial_exact(k, i));
            add(re, re_comp, w * static_cast<long double>(ys[i][c].real()));
            add(im, im_comp, w * static_cast<long double>(ys[i][c].imag()));
        }
        out[c] = Complex(static_cast<double>(re + re_comp), static_cast<double>(im + im_comp));
    }
    return out;
}

CVec field_eval(const InterpField& field, const Point& x) {
    const int m = field.order;
    if (m < 1) throw std::invalid_argument("field_eval: order must be >= 1");
    std::vector<CVec> d = orbit_coords(field.map, x, m);

    CompensatedCVec acc(x.coords.size());
    for (int k = 1; k <= m; ++k) {
        difference_pass(d, static_cast<std::size_t>(m - k + 1));
        const double weight = (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
        acc.add_scaled(d[0], weight);
    }
    return acc.value();
}

namespace {

template <typename F>
double shell_max(const Domain& dom, const SampleGrid& grid, F&& value_at) {
    double worst = 0.0;
    for (const Point& z : complex_shell_samples(dom, grid, dom.delta / 3.0))
        worst = std::max(worst, value_at(z));
    return worst;
}

}  // namespace

double field_norm_estimate(const InterpField& field, const Domain& dom,
                           const SampleGrid& grid) {
    if (field.order < 1) throw std::invalid_argument("field_norm_estimate: order must be >= 1");
    return shell_max(dom, grid, [&](const Point& z) { return inf_norm(field_eval(field, z)); });
}

double delta_norm_estimate(const AnyMap& map, int k, const Domain& dom,
                           const SampleGrid& grid) {
    if (k < 0) throw std::invalid_argument("delta_norm_estimate: k must be >= 0");
    return shell_max(dom, grid, [&](const Point& z) { return inf_norm(delta(map, z, k)); });
}

}  // namespace flowembed
